#pragma once

#include <span>
#include <utility>
#include <vector>

#include "trimol/dynamics.hpp"
#include "trimol/spectral.hpp"
#include "trimol/types.hpp"

namespace trimol {

// Integrated directional emission probabilities as quadratic forms:
// I_X = c0^dag Ihat_X c0. Both operators are Hermitian and PSD; when every
// mode decays their sum is the identity.
struct CurrentOperators {
    Mat3 i_left;
    Mat3 i_right;
    SystemParams params;
    int radiating_rank = 0;  // modes with nonzero overlap on either emission bra
};

// Closed form from the biorthogonal decomposition,
//   Ihat_X = sum_{r,s} L_r^dag conj(g_{X,r}) g_{X,s} i/(conj(eps_r) - eps_s) L_s,
// with g_{X,r} = a_X . |eps_r|> and L_r the left rows. Terms between dark,
// non-radiating modes are dropped; a radiating dark mode throws
// DivergentCurrentError.
CurrentOperators build_current_operators(const Spectrum& s, const SystemParams& p,
                                         double dark_tol = 1e-9);

// Chooses the modal closed form, or time-domain quadrature when the point is
// within |Gamma^2| < ep_tol of an exceptional point.
CurrentOperators current_operators_for(const SystemParams& p, double dark_tol = 1e-9,
                                       double ep_tol = 1e-6);

// Quadrature construction used near exceptional points: integrates the full
// propagator and accumulates Ihat_X = integral (a_X U)^dag (a_X U) dt.
CurrentOperators time_domain_current_operators(const SystemParams& p,
                                               double dark_tol = 1e-9,
                                               double quad_tol = 1e-8);

// (I_L, I_R) for an initial state, clamped to [0, inf).
std::pair<double, double> integrated_currents(const MolecularAmplitude& c0,
                                              const CurrentOperators& ops);

// eta = (I_R - I_L)/(I_R + I_L). Throws UndefinedChiralityError when both
// currents are below 1e-14.
double chirality(double i_left, double i_right);

struct ChiralityExtremum {
    double eta_max;            // largest generalized eigenvalue, in [-1, 1]
    MolecularAmplitude state;  // attaining state, unit Euclidean norm
};

// Solves the Hermitian pencil (Ihat_R - Ihat_L, Ihat_R + Ihat_L) restricted to
// the range of the sum (whitened). Kernel-of-sum directions never radiate and
// are excluded. Throws UndefinedChiralityError when the sum is numerically zero.
ChiralityExtremum max_chirality(const CurrentOperators& ops, double rank_tol = 1e-10);

// All generalized eigenvalues of the restricted pencil, ascending.
std::vector<double> chirality_pencil_eigenvalues(const CurrentOperators& ops,
                                                 double rank_tol = 1e-10);

// eta_max over a (Delta, phi) grid. Values are laid out row-major with phi as
// the outer index; per-point failures become NaN instead of aborting the map.
struct ChiralityMap {
    std::vector<double> delta;
    std::vector<double> phi;
    std::vector<double> eta;  // phi.size() x delta.size(), row-major
    int failure_count = 0;

    double at(std::size_t phi_index, std::size_t delta_index) const {
        return eta[phi_index * delta.size() + delta_index];
    }
};

ChiralityMap chirality_map(double J, std::span<const double> deltas,
                           std::span<const double> phis, int threads = 0,
                           double gamma0 = 1.0);

}  // namespace trimol
