#pragma once

#include <array>

#include "trimol/types.hpp"

namespace trimol {

// Non-Hermitian effective Hamiltonian of the molecule (complex symmetric, h = h^T).
struct EffectiveHamiltonian {
    Mat3 h;
    SystemParams params;
};

EffectiveHamiltonian build_hamiltonian(const SystemParams& p);

// Biorthogonal eigendecomposition. Because h = h^T the left rows are the
// unconjugated transposes of the right columns, and right vectors are
// normalized under the bilinear form v^T v = 1.
struct Spectrum {
    std::array<Complex, 3> eigenvalues;  // sorted by (Re, Im)
    Mat3 right;                          // right eigenvectors as columns
    Mat3 left;                           // left row vectors as rows
    double condition;                    // sigma_max/sigma_min of the right-vector matrix
};

// Closed-form eigenvalues {eps0, eps+, eps-}:
//   eps0  = (i/2)(e^{i phi} - 1) gamma0
//   eps+- = (1/4)[2 Delta - i(1 + e^{i phi}) gamma0 +- Gamma],
// with Gamma the principal square root of exceptional_distance(p).
std::array<Complex, 3> analytic_spectrum(const SystemParams& p);

// Gamma^2 = 4(Delta^2 + 8 J^2) - gamma0 (1 + e^{i phi}) [gamma0 (1 + e^{i phi}) - 4 i Delta].
// |Gamma^2| near zero flags an exceptional point where eps+ = eps-.
Complex exceptional_distance(const SystemParams& p);

// Solves the exact antisymmetric/symmetric block split of the guided-atom
// exchange symmetry: the antisymmetric eigenpair in closed form plus a stable
// quadratic for the complex-symmetric 2x2 sector block. Throws
// ExceptionalPointError when |v^T v| < tol or condition > 1/tol.
Spectrum numeric_spectrum(const EffectiveHamiltonian& h, double tol = 1e-8);

struct ModeInfo {
    Complex eigenvalue;
    double omega;  // Re(eps)
    double gamma;  // -Im(eps)
    bool is_dark;  // gamma < dark_tol
};

std::array<ModeInfo, 3> classify_modes(const Spectrum& s, double dark_tol = 1e-9);

enum class ModeLabel { Zero, Plus, Minus };

// Attach the analytic labels {eps0, eps+, eps-} to the sorted numeric eigenvalues
// by nearest match; ties broken deterministically by greedy assignment.
std::array<ModeLabel, 3> label_modes(const Spectrum& s, const SystemParams& p,
                                     double tol = 1e-6);

const char* mode_label_name(ModeLabel label);

}  // namespace trimol
