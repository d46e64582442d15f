#pragma once

#include <functional>
#include <utility>
#include <vector>

#include "trimol/spectral.hpp"
#include "trimol/types.hpp"

namespace trimol {

// Sampled non-Hermitian Schrodinger evolution with the emitted field amplitudes
// attached per sample. alpha units: sqrt(gamma0).
struct Trajectory {
    std::vector<double> times;
    std::vector<Vec3> states;
    std::vector<Complex> alpha_left;
    std::vector<Complex> alpha_right;

    std::size_t size() const { return times.size(); }
};

// Emission bras of the two waveguide directions as rows:
//   a_L = sqrt(gamma0/2) (1, e^{+i phi}, 0),  a_R = sqrt(gamma0/2) (1, e^{-i phi}, 0).
std::pair<RowVec3, RowVec3> emission_bras(const SystemParams& p);

// alpha_X = a_X . c (plain dot product, no conjugation of the bra row).
std::pair<Complex, Complex> emission_amplitudes(const MolecularAmplitude& c,
                                                const SystemParams& p);

// c(t) = sum_r e^{-i eps_r t} |eps_r> <eps'_r|c0> using the modal decomposition.
MolecularAmplitude evolve_modal(const MolecularAmplitude& c0, const Spectrum& s, double t);

// Integrates i dc/dt = H(Delta(t)) c with a fixed-step classical RK4 scheme,
// halving the global step until successive refinements agree to better than
// tol in max norm at shared grid nodes. Deterministic grids by construction.
Trajectory evolve_ode(const MolecularAmplitude& c0, const SystemParams& p,
                      const std::function<double(double)>& delta_of_t, double t_end,
                      double tol = 1e-10, int max_depth = 20);

// Constant-detuning convenience overload.
Trajectory evolve_ode(const MolecularAmplitude& c0, const SystemParams& p, double t_end,
                      double tol = 1e-10, int max_depth = 20);

// | (||c(0)||^2 - ||c(end)||^2) - integral of (|aL|^2 + |aR|^2) dt |
// with trapezoidal quadrature on the trajectory grid.
double flux_balance(const Trajectory& traj);

}  // namespace trimol
