#include "trimol/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <Eigen/Eigenvalues>

#include "parallel.hpp"
#include "trimol/core.hpp"

namespace trimol {

namespace {

const double kSqrt2 = std::sqrt(2.0);

double wrap_to_pi(double angle) {
    double a = std::remainder(angle, 2.0 * kPi);
    if (a <= -kPi) a += 2.0 * kPi;
    return a;
}

}  // namespace

SearchResult nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                         const std::vector<double>& x0, const std::vector<double>& steps,
                         const NelderMeadOptions& options) {
    const std::size_t n = x0.size();
    if (steps.size() != n || n == 0) {
        throw ValidationError("nelder_mead: dimension mismatch");
    }

    std::vector<std::vector<double>> simplex;
    simplex.push_back(x0);
    for (std::size_t i = 0; i < n; ++i) {
        auto p = x0;
        p[i] += steps[i];
        simplex.push_back(p);
    }
    std::vector<double> values(n + 1);
    for (std::size_t i = 0; i <= n; ++i) values[i] = f(simplex[i]);

    SearchResult result;
    std::vector<std::size_t> order(n + 1);

    int iter = 0;
    for (; iter < options.max_iterations; ++iter) {
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
        {
            std::vector<std::vector<double>> s2(n + 1);
            std::vector<double> v2(n + 1);
            for (std::size_t i = 0; i <= n; ++i) {
                s2[i] = simplex[order[i]];
                v2[i] = values[order[i]];
            }
            simplex = std::move(s2);
            values = std::move(v2);
        }
        result.history.push_back(values[0]);
        if (std::abs(values[n] - values[0]) < options.ftol) {
            break;
        }

        std::vector<double> centroid(n, 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) centroid[j] += simplex[i][j];
        }
        for (auto& c : centroid) c /= static_cast<double>(n);

        const auto blend = [&](double coef) {
            std::vector<double> p(n);
            for (std::size_t j = 0; j < n; ++j) {
                p[j] = centroid[j] + coef * (centroid[j] - simplex[n][j]);
            }
            return p;
        };

        const auto reflected = blend(options.reflection);
        const double fr = f(reflected);
        if (fr < values[0]) {
            const auto expanded = blend(options.expansion);
            const double fe = f(expanded);
            if (fe < fr) {
                simplex[n] = expanded;
                values[n] = fe;
            } else {
                simplex[n] = reflected;
                values[n] = fr;
            }
        } else if (fr < values[n - 1]) {
            simplex[n] = reflected;
            values[n] = fr;
        } else {
            const auto contracted = blend(-options.contraction);
            const double fc = f(contracted);
            if (fc < values[n]) {
                simplex[n] = contracted;
                values[n] = fc;
            } else {
                for (std::size_t i = 1; i <= n; ++i) {
                    for (std::size_t j = 0; j < n; ++j) {
                        simplex[i][j] =
                            simplex[0][j] + options.shrink * (simplex[i][j] - simplex[0][j]);
                    }
                    values[i] = f(simplex[i]);
                }
            }
        }
    }

    std::size_t best = 0;
    for (std::size_t i = 1; i <= n; ++i) {
        if (values[i] < values[best]) best = i;
    }
    result.point = simplex[best];
    result.objective = values[best];
    result.iterations = iter;
    result.converged = iter < options.max_iterations;
    return result;
}

double leftward_leak_objective(double J, double Delta, double phi) {
    const SystemParams p{1.0, J, Delta, phi};
    const CurrentOperators ops = current_operators_for(p);
    const Mat3 sum = ops.i_left + ops.i_right;
    Eigen::SelfAdjointEigenSolver<Mat3> es_sum(sum);
    const double lmax = es_sum.eigenvalues().maxCoeff();
    if (!(lmax > 1e-14)) {
        throw UndefinedChiralityError("leftward_leak_objective: nothing radiates");
    }
    std::vector<int> keep;
    for (int i = 0; i < 3; ++i) {
        if (es_sum.eigenvalues()(i) >= 1e-10 * lmax) keep.push_back(i);
    }
    Eigen::MatrixXcd w(3, static_cast<int>(keep.size()));
    for (std::size_t j = 0; j < keep.size(); ++j) {
        w.col(static_cast<int>(j)) =
            es_sum.eigenvectors().col(keep[j]) / std::sqrt(es_sum.eigenvalues()(keep[j]));
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(w.adjoint() * ops.i_left * w);
    return es.eigenvalues().minCoeff();
}

SearchResult find_perfect_chirality(double J, const ParameterBox& box, int grid_points,
                                    int threads) {
    if (!(J > 0.0)) {
        throw ValidationError("find_perfect_chirality: J must be > 0");
    }
    if (grid_points < 2) {
        throw ValidationError("find_perfect_chirality: grid must have at least 2 points");
    }

    const std::size_t n = static_cast<std::size_t>(grid_points);
    std::vector<double> grid_values(n * n);
    detail::parallel_for(n * n, threads, [&](std::size_t idx) {
        const std::size_t di = idx / n;
        const std::size_t pi = idx % n;
        const double delta = box.delta_min + (box.delta_max - box.delta_min) *
                                                 static_cast<double>(di) /
                                                 static_cast<double>(n - 1);
        const double phi = box.phi_min + (box.phi_max - box.phi_min) *
                                             static_cast<double>(pi) /
                                             static_cast<double>(n - 1);
        try {
            grid_values[idx] = leftward_leak_objective(J, delta, phi);
        } catch (const Error&) {
            grid_values[idx] = std::numeric_limits<double>::infinity();
        }
    });

    std::size_t best_idx = 0;
    for (std::size_t i = 1; i < grid_values.size(); ++i) {
        if (grid_values[i] < grid_values[best_idx]) best_idx = i;
    }
    const double best_delta =
        box.delta_min + (box.delta_max - box.delta_min) *
                            static_cast<double>(best_idx / n) / static_cast<double>(n - 1);
    const double best_phi =
        box.phi_min + (box.phi_max - box.phi_min) *
                          static_cast<double>(best_idx % n) / static_cast<double>(n - 1);

    if (!(grid_values[best_idx] < 1e-2)) {
        SearchResult best;
        best.point = {best_delta, best_phi};
        best.objective = grid_values[best_idx];
        best.converged = false;
        throw NotFoundError("find_perfect_chirality: no grid point below 1e-2", best);
    }

    const auto objective = [&](const std::vector<double>& x) {
        const double delta = x[0];
        const double phi = x[1];
        if (delta < box.delta_min || delta > box.delta_max || phi < box.phi_min ||
            phi > box.phi_max) {
            // monotone pull-back toward the box; keeps the simplex inside
            const double excess = std::max({box.delta_min - delta, delta - box.delta_max,
                                            box.phi_min - phi, phi - box.phi_max, 0.0});
            return 1e6 + excess;
        }
        try {
            return leftward_leak_objective(J, delta, phi);
        } catch (const Error&) {
            return 1e6;
        }
    };

    NelderMeadOptions options;
    options.ftol = 1e-16;
    options.max_iterations = 400;
    const std::vector<double> steps = {1e-2 * (box.delta_max - box.delta_min),
                                       1e-2 * (box.phi_max - box.phi_min)};
    SearchResult refined = nelder_mead(objective, {best_delta, best_phi}, steps, options);
    refined.converged = refined.objective < 1e-10;
    if (!refined.converged) {
        throw NotFoundError("find_perfect_chirality: refinement stalled above 1e-10",
                            refined);
    }
    return refined;
}

UPlusAngles derive_u_plus_angles(double J, double Delta, double phi) {
    const SystemParams p{1.0, J, Delta, phi};
    const CurrentOperators ops = current_operators_for(p);
    Eigen::SelfAdjointEigenSolver<Mat3> es(ops.i_left);
    Vec3 kernel = es.eigenvectors().col(0);  // ascending eigenvalues
    if ((ops.i_left * kernel).norm() > 1e-8) {
        throw UnreachableError("derive_u_plus_angles: point admits no kernel state",
                               (ops.i_left * kernel).norm());
    }

    // The gate family reaches exactly the states with equal guided-atom
    // magnitudes: S2 S1 R |0_L> = ((cos a - sin a) e^{i t1},
    //                              (cos a - sin a) e^{i t2},
    //                              -sqrt2 (cos a + sin a)) / 2.
    // Numerical kernel states carry a mismatch of order sqrt(residual).
    const double mismatch = std::abs(std::abs(kernel(0)) - std::abs(kernel(1)));
    if (mismatch > 1e-3) {
        throw UnreachableError(
            "derive_u_plus_angles: kernel state has unequal guided-atom magnitudes",
            mismatch);
    }

    // global phase: make the third component real and non-positive
    const double chi = kPi - std::arg(kernel(2));
    const Vec3 aligned = std::exp(Complex(0.0, chi)) * kernel;
    const double b = -kSqrt2 * aligned(2).real();  // cos a + sin a (>= 0 by phase choice)
    const double a = std::abs(aligned(0)) + std::abs(aligned(1));  // cos a - sin a

    UPlusAngles angles;
    angles.alpha = std::atan2(b, a) - kPi / 4.0;
    angles.theta1 = wrap_to_pi(std::arg(aligned(0)));
    angles.theta2 = wrap_to_pi(std::arg(aligned(1)));

    const MolecularAmplitude prepared =
        prepare_chiral_state(LogicalState{1.0, 0.0}, angles);
    const double residual = (ops.i_left * prepared.c).norm();
    if (residual > 1e-8) {
        throw UnreachableError("derive_u_plus_angles: prepared state is not in the "
                               "kernel of the left current",
                               residual);
    }
    return angles;
}

Protocol2Point default_protocol2_start(double J) {
    const SearchResult chiral = find_perfect_chirality(J);
    return Protocol2Point{chiral.point[0], chiral.point[1], kPi - chiral.point[1]};
}

SearchResult optimize_protocol2(double J, const Protocol2Point& start) {
    const auto objective = [&](const std::vector<double>& x) {
        try {
            return protocol2_report(J, Protocol2Point{x[0], x[1], x[2]}).bloch_max_error;
        } catch (const Error&) {
            return 1e6;
        }
    };
    NelderMeadOptions options;
    options.ftol = 1e-8;
    options.max_iterations = 500;
    const std::vector<double> steps = {0.01, 0.01 * kPi, 0.01 * kPi};
    SearchResult result =
        nelder_mead(objective, {start.Delta, start.phi, start.theta}, steps, options);
    if (!result.converged || result.objective >= 1e5) {
        throw NotFoundError("optimize_protocol2: refinement did not converge", result);
    }
    return result;
}

SearchResult optimize_protocol2(double J) {
    return optimize_protocol2(J, default_protocol2_start(J));
}

}  // namespace trimol
