#pragma once

#include <functional>
#include <vector>

#include "trimol/protocols.hpp"
#include "trimol/types.hpp"

namespace trimol {

struct SearchResult {
    std::vector<double> point;
    double objective = 0.0;
    int iterations = 0;
    bool converged = false;
    std::vector<double> history;  // best objective after each accepted iteration
};

struct NotFoundError : Error {
    NotFoundError(const std::string& what, SearchResult b)
        : Error(what), best(std::move(b)) {}
    SearchResult best;
};

struct NelderMeadOptions {
    double reflection = 1.0;
    double expansion = 2.0;
    double contraction = 0.5;
    double shrink = 0.5;
    double ftol = 1e-12;   // stop when the simplex objective spread falls below this
    int max_iterations = 2000;
};

// Deterministic Nelder-Mead: fixed simplex seeded from x0 plus one step per axis.
SearchResult nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                         const std::vector<double>& x0, const std::vector<double>& steps,
                         const NelderMeadOptions& options);

struct ParameterBox {
    double delta_min = -0.5;
    double delta_max = 0.5;
    double phi_min = 0.0;
    double phi_max = kPi;
};

// Minimizes the smallest generalized eigenvalue of (Ihat_L, Ihat_L + Ihat_R) over
// (Delta, phi): zero iff a kernel state of Ihat_L exists, i.e. eta = +1 is
// attainable. Coarse grid pass then simplex refinement to < 1e-10. Throws
// NotFoundError (carrying the best point) when no grid value falls below 1e-2.
SearchResult find_perfect_chirality(double J, const ParameterBox& box = {},
                                    int grid_points = 200, int threads = 0);

// Smallest wrong-port fraction attainable at a parameter point (the
// find_perfect_chirality objective).
double leftward_leak_objective(double J, double Delta, double phi);

// Gate angles mapping |0_L> onto the kernel state of Ihat_L at a chiral point.
// Throws UnreachableError when the kernel state is outside the gate family's
// reach (unequal guided-atom magnitudes).
UPlusAngles derive_u_plus_angles(double J, double Delta, double phi);

// Default protocol-2 start: theta = pi - phi at the recomputed chiral point.
Protocol2Point default_protocol2_start(double J);

// Minimizes the Bloch-sphere maximum measurement error over (Delta, phi, theta)
// by simplex refinement from the given start.
SearchResult optimize_protocol2(double J, const Protocol2Point& start);
SearchResult optimize_protocol2(double J);

}  // namespace trimol
