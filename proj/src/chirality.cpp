#include "trimol/chirality.hpp"

#include <cmath>
#include <limits>

#include <Eigen/Eigenvalues>

#include "parallel.hpp"

namespace trimol {

namespace {

const Complex kI{0.0, 1.0};

struct WhitenedPencil {
    // columns of w map the reduced space back to the full space, scaled so the
    // pencil's right-hand side becomes the identity
    Eigen::MatrixXcd w;
    Eigen::MatrixXcd difference;  // w^dag (I_R - I_L) w
};

WhitenedPencil whiten(const CurrentOperators& ops, double rank_tol) {
    const Mat3 sum = ops.i_right + ops.i_left;
    Eigen::SelfAdjointEigenSolver<Mat3> es(sum);
    const auto& lam = es.eigenvalues();
    const double lmax = lam.maxCoeff();
    if (!(lmax > 1e-14)) {
        throw UndefinedChiralityError("chirality pencil: no radiating direction");
    }
    std::vector<int> keep;
    for (int i = 0; i < 3; ++i) {
        if (lam(i) >= rank_tol * lmax) keep.push_back(i);
    }
    WhitenedPencil out;
    out.w.resize(3, static_cast<int>(keep.size()));
    for (std::size_t j = 0; j < keep.size(); ++j) {
        out.w.col(static_cast<int>(j)) =
            es.eigenvectors().col(keep[j]) / std::sqrt(lam(keep[j]));
    }
    const Mat3 diff = ops.i_right - ops.i_left;
    out.difference = out.w.adjoint() * diff * out.w;
    return out;
}

}  // namespace

CurrentOperators build_current_operators(const Spectrum& s, const SystemParams& p,
                                         double dark_tol) {
    const auto [bra_left, bra_right] = emission_bras(p);
    std::array<Complex, 3> g_left, g_right;
    std::array<double, 3> gamma;
    for (int r = 0; r < 3; ++r) {
        g_left[r] = (bra_left * s.right.col(r))(0);
        g_right[r] = (bra_right * s.right.col(r))(0);
        gamma[r] = -s.eigenvalues[r].imag();
    }

    int radiating = 0;
    for (int r = 0; r < 3; ++r) {
        if (std::abs(g_left[r]) + std::abs(g_right[r]) > dark_tol) ++radiating;
    }

    CurrentOperators ops;
    ops.params = p;
    ops.radiating_rank = radiating;
    ops.i_left = Mat3::Zero();
    ops.i_right = Mat3::Zero();

    const auto accumulate = [&](Mat3& target, const std::array<Complex, 3>& g) {
        for (int r = 0; r < 3; ++r) {
            for (int c = 0; c < 3; ++c) {
                if (gamma[r] + gamma[c] <= dark_tol) {
                    if (std::abs(g[r]) <= dark_tol && std::abs(g[c]) <= dark_tol) {
                        continue;  // dark and silent: no contribution
                    }
                    throw DivergentCurrentError(
                        "build_current_operators: dark mode overlaps an emission bra");
                }
                const Complex coeff =
                    std::conj(g[r]) * g[c] * kI / (std::conj(s.eigenvalues[r]) - s.eigenvalues[c]);
                target += s.left.row(r).adjoint() * coeff * s.left.row(c);
            }
        }
        // exact Hermiticity for downstream solvers
        target = ((target + target.adjoint()) / 2.0).eval();
    };
    accumulate(ops.i_left, g_left);
    accumulate(ops.i_right, g_right);
    return ops;
}

CurrentOperators time_domain_current_operators(const SystemParams& p, double dark_tol,
                                               double quad_tol) {
    p.validate();
    const Mat3 h = build_hamiltonian(p).h;
    const auto analytic = analytic_spectrum(p);
    double gamma_radiating = std::numeric_limits<double>::infinity();
    for (const auto& e : analytic) {
        const double g = -e.imag();
        if (g > dark_tol) gamma_radiating = std::min(gamma_radiating, g);
    }
    if (!std::isfinite(gamma_radiating)) {
        // nothing decays: both operators vanish
        CurrentOperators ops;
        ops.params = p;
        ops.radiating_rank = 0;
        ops.i_left = Mat3::Zero();
        ops.i_right = Mat3::Zero();
        return ops;
    }
    const double horizon = 60.0 / gamma_radiating;
    const auto [bra_left, bra_right] = emission_bras(p);

    // Simpson accumulation of integral (a_X U)^dag (a_X U) dt over an RK4 sweep
    // of the propagator, halving the step until the result stabilizes.
    const auto sweep = [&](std::size_t n) -> std::pair<Mat3, Mat3> {
        const double step = horizon / static_cast<double>(n);
        Mat3 u = Mat3::Identity();
        Mat3 acc_l = Mat3::Zero();
        Mat3 acc_r = Mat3::Zero();
        const auto rhs = [&](const Mat3& x) -> Mat3 { return -kI * (h * x); };
        const auto sample = [&](const Mat3& x, double weight) {
            const RowVec3 rl = bra_left * x;
            const RowVec3 rr = bra_right * x;
            acc_l += weight * (rl.adjoint() * rl);
            acc_r += weight * (rr.adjoint() * rr);
        };
        // composite Simpson needs an even number of intervals
        sample(u, 1.0);
        for (std::size_t i = 0; i < n; ++i) {
            const Mat3 k1 = rhs(u);
            const Mat3 k2 = rhs(u + step / 2.0 * k1);
            const Mat3 k3 = rhs(u + step / 2.0 * k2);
            const Mat3 k4 = rhs(u + step * k3);
            u += step / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
            const bool last = (i + 1 == n);
            sample(u, last ? 1.0 : ((i % 2 == 0) ? 4.0 : 2.0));
        }
        const double tail = (bra_left * u).squaredNorm() + (bra_right * u).squaredNorm();
        if (tail > 1e-6) {
            throw DivergentCurrentError(
                "time_domain_current_operators: flux has not decayed at the horizon");
        }
        return {acc_l * step / 3.0, acc_r * step / 3.0};
    };

    std::size_t n = std::max<std::size_t>(512, static_cast<std::size_t>(horizon / 0.05));
    if (n % 2 == 1) ++n;
    auto prev = sweep(n);
    for (int depth = 0; depth < 16; ++depth) {
        auto cur = sweep(2 * n);
        const double diff = std::max((cur.first - prev.first).cwiseAbs().maxCoeff(),
                                     (cur.second - prev.second).cwiseAbs().maxCoeff());
        if (diff < quad_tol) {
            CurrentOperators ops;
            ops.params = p;
            ops.i_left = ((cur.first + cur.first.adjoint()) / 2.0).eval();
            ops.i_right = ((cur.second + cur.second.adjoint()) / 2.0).eval();
            ops.radiating_rank = 3;
            for (const auto& e : analytic) {
                const double g = -e.imag();
                if (g <= dark_tol) --ops.radiating_rank;
            }
            return ops;
        }
        n *= 2;
        prev = cur;
    }
    throw ConvergenceError("time_domain_current_operators: quadrature did not converge");
}

CurrentOperators current_operators_for(const SystemParams& p, double dark_tol,
                                       double ep_tol) {
    if (std::abs(exceptional_distance(p)) < ep_tol) {
        return time_domain_current_operators(p, dark_tol);
    }
    const Spectrum s = numeric_spectrum(build_hamiltonian(p));
    return build_current_operators(s, p, dark_tol);
}

std::pair<double, double> integrated_currents(const MolecularAmplitude& c0,
                                              const CurrentOperators& ops) {
    const auto clamp = [](double v) {
        if (v < -1e-10) {
            throw ValidationError("integrated_currents: quadratic form is negative "
                                  "beyond tolerance");
        }
        return std::max(0.0, v);
    };
    const double il = clamp((c0.c.adjoint() * ops.i_left * c0.c)(0).real());
    const double ir = clamp((c0.c.adjoint() * ops.i_right * c0.c)(0).real());
    return {il, ir};
}

double chirality(double i_left, double i_right) {
    if (i_left < 1e-14 && i_right < 1e-14) {
        throw UndefinedChiralityError("chirality: state does not radiate");
    }
    return (i_right - i_left) / (i_right + i_left);
}

ChiralityExtremum max_chirality(const CurrentOperators& ops, double rank_tol) {
    const WhitenedPencil pencil = whiten(ops, rank_tol);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(pencil.difference);
    const int last = static_cast<int>(es.eigenvalues().size()) - 1;
    const Eigen::VectorXcd reduced = es.eigenvectors().col(last);
    Vec3 state = pencil.w * reduced;
    state /= state.norm();
    return ChiralityExtremum{es.eigenvalues()(last), MolecularAmplitude{state}};
}

std::vector<double> chirality_pencil_eigenvalues(const CurrentOperators& ops,
                                                 double rank_tol) {
    const WhitenedPencil pencil = whiten(ops, rank_tol);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(pencil.difference);
    return {es.eigenvalues().data(), es.eigenvalues().data() + es.eigenvalues().size()};
}

ChiralityMap chirality_map(double J, std::span<const double> deltas,
                           std::span<const double> phis, int threads, double gamma0) {
    if (deltas.empty() || phis.empty()) {
        throw ValidationError("chirality_map: empty grid");
    }
    ChiralityMap map;
    map.delta.assign(deltas.begin(), deltas.end());
    map.phi.assign(phis.begin(), phis.end());
    map.eta.assign(deltas.size() * phis.size(), std::numeric_limits<double>::quiet_NaN());

    std::vector<char> failed(map.eta.size(), 0);
    detail::parallel_for(map.eta.size(), threads, [&](std::size_t idx) {
        const std::size_t pi = idx / deltas.size();
        const std::size_t di = idx % deltas.size();
        const SystemParams p{gamma0, J, deltas[di], phis[pi]};
        try {
            map.eta[idx] = max_chirality(current_operators_for(p)).eta_max;
        } catch (const Error&) {
            failed[idx] = 1;
        }
    });
    for (const char f : failed) map.failure_count += f;
    return map;
}

}  // namespace trimol
