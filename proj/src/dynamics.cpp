#include "trimol/dynamics.hpp"

#include <cmath>

#include "trimol/spectral.hpp"

namespace trimol {

namespace {

const Complex kI{0.0, 1.0};

// RK4 sweep with n uniform steps; returns the state at every node.
std::vector<Vec3> rk4_sweep(const Vec3& c0, const SystemParams& p,
                            const std::function<double(double)>& delta_of_t, double t_end,
                            std::size_t n) {
    Mat3 base = build_hamiltonian(p.with_delta(0.0)).h;
    const auto rhs = [&](double t, const Vec3& c) -> Vec3 {
        const double d = delta_of_t(t);
        if (!std::isfinite(d)) {
            throw IntegrationError("evolve_ode: delta_of_t returned a non-finite value");
        }
        Vec3 out = -kI * (base * c);
        out[2] += -kI * d * c[2];
        return out;
    };

    std::vector<Vec3> states(n + 1);
    states[0] = c0;
    const double h = t_end / static_cast<double>(n);
    Vec3 c = c0;
    for (std::size_t i = 0; i < n; ++i) {
        const double t = t_end * static_cast<double>(i) / static_cast<double>(n);
        const Vec3 k1 = rhs(t, c);
        const Vec3 k2 = rhs(t + h / 2.0, c + h / 2.0 * k1);
        const Vec3 k3 = rhs(t + h / 2.0, c + h / 2.0 * k2);
        const Vec3 k4 = rhs(t + h, c + h * k3);
        c += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        states[i + 1] = c;
    }
    return states;
}

}  // namespace

std::pair<RowVec3, RowVec3> emission_bras(const SystemParams& p) {
    const double amp = std::sqrt(p.gamma0 / 2.0);
    RowVec3 left, right;
    left << amp, amp * std::exp(kI * p.phi), 0.0;
    right << amp, amp * std::exp(-kI * p.phi), 0.0;
    return {left, right};
}

std::pair<Complex, Complex> emission_amplitudes(const MolecularAmplitude& c,
                                                const SystemParams& p) {
    const auto [left, right] = emission_bras(p);
    return {(left * c.c)(0), (right * c.c)(0)};
}

MolecularAmplitude evolve_modal(const MolecularAmplitude& c0, const Spectrum& s, double t) {
    if (!(t >= 0.0)) {
        throw ValidationError("evolve_modal: t must be >= 0");
    }
    Vec3 out = Vec3::Zero();
    for (int r = 0; r < 3; ++r) {
        const Complex weight = (s.left.row(r) * c0.c)(0);
        out += std::exp(-kI * s.eigenvalues[r] * t) * weight * s.right.col(r);
    }
    return MolecularAmplitude{out};
}

Trajectory evolve_ode(const MolecularAmplitude& c0, const SystemParams& p,
                      const std::function<double(double)>& delta_of_t, double t_end,
                      double tol, int max_depth) {
    if (!(t_end >= 0.0)) {
        throw ValidationError("evolve_ode: t_end must be >= 0");
    }
    p.validate();

    const auto [left, right] = emission_bras(p);
    const auto assemble = [&](const std::vector<Vec3>& states) {
        Trajectory traj;
        const std::size_t n = states.size();
        traj.times.resize(n);
        traj.states.resize(n);
        traj.alpha_left.resize(n);
        traj.alpha_right.resize(n);
        for (std::size_t i = 0; i < n; ++i) {
            traj.times[i] =
                (n == 1) ? 0.0 : t_end * static_cast<double>(i) / static_cast<double>(n - 1);
            traj.states[i] = states[i];
            traj.alpha_left[i] = (left * states[i])(0);
            traj.alpha_right[i] = (right * states[i])(0);
        }
        return traj;
    };

    if (t_end == 0.0) {
        return assemble({c0.c});
    }

    std::size_t n = std::max<std::size_t>(32, static_cast<std::size_t>(std::ceil(t_end / 0.1)));
    std::vector<Vec3> coarse = rk4_sweep(c0.c, p, delta_of_t, t_end, n);
    for (int depth = 0; depth < max_depth; ++depth) {
        std::vector<Vec3> fine = rk4_sweep(c0.c, p, delta_of_t, t_end, 2 * n);
        double diff = 0.0;
        for (std::size_t i = 0; i < coarse.size(); ++i) {
            diff = std::max(diff, (fine[2 * i] - coarse[i]).cwiseAbs().maxCoeff());
        }
        if (diff < tol) {
            return assemble(fine);
        }
        n *= 2;
        coarse = std::move(fine);
    }
    throw ConvergenceError("evolve_ode: step-halving did not reach tolerance at depth " +
                           std::to_string(max_depth));
}

Trajectory evolve_ode(const MolecularAmplitude& c0, const SystemParams& p, double t_end,
                      double tol, int max_depth) {
    const double d = p.Delta;
    return evolve_ode(c0, p, [d](double) { return d; }, t_end, tol, max_depth);
}

double flux_balance(const Trajectory& traj) {
    if (traj.size() < 2) {
        return 0.0;
    }
    double integral = 0.0;
    for (std::size_t i = 0; i + 1 < traj.size(); ++i) {
        const double f0 = std::norm(traj.alpha_left[i]) + std::norm(traj.alpha_right[i]);
        const double f1 =
            std::norm(traj.alpha_left[i + 1]) + std::norm(traj.alpha_right[i + 1]);
        integral += 0.5 * (f0 + f1) * (traj.times[i + 1] - traj.times[i]);
    }
    const double lost = traj.states.front().squaredNorm() - traj.states.back().squaredNorm();
    return std::abs(lost - integral);
}

}  // namespace trimol
