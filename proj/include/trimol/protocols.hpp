#pragma once

#include <span>
#include <string>
#include <vector>

#include "trimol/chirality.hpp"
#include "trimol/types.hpp"

namespace trimol {

// Diagonal phase gate on one atom: multiplies c_n by e^{i theta}.
Mat3 local_phase_gate(int atom_index, double theta);

// exp(-i sigma_y^L alpha) on the logical subspace, identity on its complement.
Mat3 logical_rotation(double alpha);

struct UPlusAngles {
    double theta1 = 0.0;
    double theta2 = 0.0;
    double alpha = 0.0;
};

// S2(theta2) S1(theta1) R(alpha) applied to the embedded logical state.
MolecularAmplitude prepare_chiral_state(const LogicalState& l, const UPlusAngles& angles);

// Measurement error of the two-port readout over the Bloch sphere, from the
// 2x2 Hermitian current forms of the prepared basis images.
struct BlochErrorReport {
    double max_error;           // max(e0, e1): population-linear Bloch maximum
    double coherent_max_error;  // max |psi^dag A psi / psi^dag S psi - cos^2(theta/2)|
    double e0;                  // wrong-port probability of the prepared |0_L| image
    double e1;                  // wrong-port probability of the prepared |1_L| image
};

// right_form = P^dag Ihat_R P, left_form = P^dag Ihat_L P for the 3x2 preparation map P.
BlochErrorReport bloch_max_error(const Mat2& right_form, const Mat2& left_form);

struct GateDescriptor {
    std::string name;
    double angle = 0.0;
    int atom = 0;  // 0 when not a local gate
};

struct ProtocolReport {
    SystemParams params_used;
    std::vector<GateDescriptor> gates;
    double eta0 = 0.0;
    double eta1 = 0.0;
    double e0 = 0.0;
    double e1 = 0.0;
    double bloch_max_error = 0.0;
    double coherent_max_error = 0.0;
    double normalization_deficit = 0.0;
};

// Full preparation circuit U+ at the recomputed perfect-chirality point.
ProtocolReport protocol1_report(double J);

struct Protocol2Point {
    double Delta = 0.0;
    double phi = 0.0;
    double theta = 0.0;
};

// Single local gate S2(theta); readout at (Delta, phi).
ProtocolReport protocol2_report(double J, const Protocol2Point& point);

// Maximum measurement error over deviations (theta + dtheta, Delta + dDelta)
// at fixed phi. Values row-major with dtheta as the outer index; per-point
// failures become NaN.
struct ErrorMap {
    std::vector<double> dtheta;
    std::vector<double> ddelta;
    std::vector<double> max_error;  // dtheta.size() x ddelta.size()
    int failure_count = 0;

    double at(std::size_t t_index, std::size_t d_index) const {
        return max_error[t_index * ddelta.size() + d_index];
    }
};

ErrorMap robustness_map(double J, const Protocol2Point& base, std::span<const double> dtheta,
                        std::span<const double> ddelta, int threads = 0);

}  // namespace trimol
