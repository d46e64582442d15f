#pragma once

#include "trimol/types.hpp"

namespace trimol {

// W-like logical basis vectors and their orthogonal complement.
// |0_L> = (1, 1, -sqrt2)/2, |1_L> = (1, 1, +sqrt2)/2, antisymmetric (1, -1, 0)/sqrt2.
Vec3 logical_zero_vector();
Vec3 logical_one_vector();
Vec3 antisymmetric_vector();

// 3x2 isometry with columns |0_L>, |1_L>.
Eigen::Matrix<Complex, 3, 2> logical_embedding();

// Lift a normalized logical state into the single-excitation space.
MolecularAmplitude embed_logical(const LogicalState& l);

struct LogicalProjection {
    LogicalState logical;  // inner products with the basis vectors (not renormalized)
    double residual;       // norm of the component along the antisymmetric vector
};

// Inverse of embed_logical plus the out-of-subspace residual.
LogicalProjection project_logical(const MolecularAmplitude& c);

}  // namespace trimol
