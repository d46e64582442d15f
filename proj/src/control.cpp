#include "trimol/control.hpp"

#include <cmath>

#include "trimol/core.hpp"
#include "trimol/dynamics.hpp"

namespace trimol {

namespace {

const Complex kI{0.0, 1.0};
const double kSqrt2 = std::sqrt(2.0);

Mat2 pauli_vector(double nx, double ny, double nz) {
    return nx * sigma_x_logical() + ny * sigma_y_logical() + nz * sigma_z_logical();
}

struct AxisAngle {
    double angle = 0.0;             // rotation angle in [0, 2*pi)
    Vec3::RealScalar n[3] = {0, 0, 0};  // unit axis (x, y, z); undefined when angle == 0
    Complex global_phase{1.0, 0.0};
};

// target = phase * exp(-i angle/2 n.sigma)
AxisAngle axis_angle_decompose(const Mat2& target) {
    const Complex det = target.determinant();
    const Complex phase = std::sqrt(det);
    Mat2 su = target / phase;
    // exp(-i a/2 n.sigma) = cos(a/2) I - i sin(a/2) n.sigma
    double cos_half = su.trace().real() / 2.0;
    cos_half = std::clamp(cos_half, -1.0, 1.0);
    AxisAngle out;
    out.global_phase = phase;
    const double sx = -(sigma_x_logical() * su).trace().imag() / 2.0;
    const double sy = -(sigma_y_logical() * su).trace().imag() / 2.0;
    const double sz = -(sigma_z_logical() * su).trace().imag() / 2.0;
    const double sin_half = std::sqrt(sx * sx + sy * sy + sz * sz);
    out.angle = 2.0 * std::atan2(sin_half, cos_half);
    if (sin_half > 1e-14) {
        out.n[0] = sx / sin_half;
        out.n[1] = sy / sin_half;
        out.n[2] = sz / sin_half;
    }
    return out;
}

// Resonant drive implementing exp(-i angle/2 (cos(axis) Sx + sin(axis) Sy)),
// angle >= 0, at the given amplitude.
Pulse equatorial_pulse(double angle, double axis, double J, double amplitude) {
    Pulse pulse;
    pulse.kind = Pulse::Kind::ResonantDrive;
    pulse.drive.amplitude = amplitude;
    pulse.drive.drive_frequency = 2.0 * kSqrt2 * J;
    // drive Hamiltonian is -(A/4)(Sx cos p + Sy sin p): axis flips sign
    pulse.drive.drive_phase = std::atan2(-std::sin(axis), -std::cos(axis));
    pulse.drive.duration = angle / (amplitude / 2.0);
    pulse.duration = pulse.drive.duration;
    return pulse;
}

Pulse free_evolution_pulse(double rz_angle, double J) {
    // reduce to [0, 4*pi): the SU(2) period of Rz
    double a = std::fmod(rz_angle, 4.0 * kPi);
    if (a < 0.0) a += 4.0 * kPi;
    Pulse pulse;
    pulse.kind = Pulse::Kind::FreeEvolution;
    pulse.duration = a / (2.0 * kSqrt2 * J);
    return pulse;
}

}  // namespace

Mat2 sigma_x_logical() {
    Mat2 m;
    m << 0.0, 1.0, 1.0, 0.0;
    return m;
}

Mat2 sigma_y_logical() {
    Mat2 m;
    m << Complex(0.0, 0.0), Complex(0.0, 1.0), Complex(0.0, -1.0), Complex(0.0, 0.0);
    return m;
}

Mat2 sigma_z_logical() {
    Mat2 m;
    m << -1.0, 0.0, 0.0, 1.0;
    return m;
}

LogicalHamiltonian logical_hamiltonian(double J, double Delta) {
    return LogicalHamiltonian{kSqrt2 * J, -Delta / 2.0, 0.0};
}

LogicalHamiltonian effective_drive_hamiltonian(double J, const DriveSpec& d) {
    return LogicalHamiltonian{(2.0 * kSqrt2 * J - d.drive_frequency) / 2.0,
                              -(d.amplitude / 4.0) * std::cos(d.drive_phase),
                              -(d.amplitude / 4.0) * std::sin(d.drive_phase)};
}

Mat2 logical_propagator(const LogicalHamiltonian& h, double t) {
    const double mag = std::sqrt(h.hz * h.hz + h.hx * h.hx + h.hy * h.hy);
    if (mag * t == 0.0) {
        return Mat2::Identity();
    }
    const double angle = mag * t;
    const Mat2 axis = pauli_vector(h.hx / mag, h.hy / mag, h.hz / mag);
    return std::cos(angle) * Mat2::Identity() - kI * std::sin(angle) * axis;
}

LogicalState evolve_logical(const LogicalState& l0, const LogicalHamiltonian& h, double t) {
    if (!(t >= 0.0)) {
        throw ValidationError("evolve_logical: t must be >= 0");
    }
    const Mat2 u = logical_propagator(h, t);
    const Vec2 v = u * Vec2(l0.a0, l0.a1);
    return LogicalState{v(0), v(1)};
}

double PulseSequence::total_duration() const {
    double sum = 0.0;
    for (const auto& p : pulses) sum += p.duration;
    return sum;
}

double gate_fidelity(const Mat2& target, const Mat2& achieved) {
    const double f = std::norm((target.adjoint() * achieved).trace()) / 4.0;
    return std::clamp(f, 0.0, 1.0);
}

PulseSequence synthesize_rotation(const Mat2& target, double J, double amplitude_cap) {
    if (!(amplitude_cap > 0.0)) {
        throw ValidationError("synthesize_rotation: amplitude_cap must be > 0");
    }
    if ((target.adjoint() * target - Mat2::Identity()).cwiseAbs().maxCoeff() > 1e-10) {
        throw ValidationError("synthesize_rotation: target is not unitary");
    }

    PulseSequence seq;
    const AxisAngle aa = axis_angle_decompose(target);
    if (aa.angle < 1e-12) {
        return seq;  // identity up to global phase
    }

    const double nz = aa.n[2];
    const double n_eq = std::hypot(aa.n[0], aa.n[1]);
    if (std::abs(nz) < 1e-12) {
        seq.pulses.push_back(
            equatorial_pulse(aa.angle, std::atan2(aa.n[1], aa.n[0]), J, amplitude_cap));
        return seq;
    }
    if (n_eq < 1e-12) {
        // pure Z rotation: free evolution only
        seq.pulses.push_back(free_evolution_pulse(aa.angle * (nz > 0 ? 1.0 : -1.0), J));
        return seq;
    }

    // General case: ZYZ Euler angles of the SU(2) part.
    // U = Rz(a) Ry(b) Rz(g) with
    //   U = [[cos(b/2) e^{i(a+g)/2}, sin(b/2) e^{i(a-g)/2}],
    //        [-sin(b/2) e^{-i(a-g)/2}, cos(b/2) e^{-i(a+g)/2}]]
    const Mat2 su = target / aa.global_phase;
    const double cb = std::abs(su(0, 0));
    const double sb = std::abs(su(0, 1));
    const double beta = 2.0 * std::atan2(sb, cb);
    double alpha, gamma;
    if (sb < 1e-14) {
        alpha = 2.0 * std::arg(su(0, 0));
        gamma = 0.0;
    } else if (cb < 1e-14) {
        alpha = 2.0 * std::arg(su(0, 1));
        gamma = 0.0;
    } else {
        const double sum = 2.0 * std::arg(su(0, 0));
        const double dif = 2.0 * std::arg(su(0, 1));
        alpha = (sum + dif) / 2.0;
        gamma = (sum - dif) / 2.0;
    }
    seq.pulses.push_back(free_evolution_pulse(gamma, J));
    seq.pulses.push_back(equatorial_pulse(beta, kPi / 2.0, J, amplitude_cap));
    seq.pulses.push_back(free_evolution_pulse(alpha, J));
    return seq;
}

Mat2 sequence_propagator(const PulseSequence& seq, double J) {
    Mat2 u = Mat2::Identity();
    for (const auto& pulse : seq.pulses) {
        if (pulse.kind == Pulse::Kind::FreeEvolution) {
            u = logical_propagator(logical_hamiltonian(J, 0.0), pulse.duration) * u;
        } else {
            u = logical_propagator(effective_drive_hamiltonian(J, pulse.drive),
                                   pulse.drive.duration) *
                u;
        }
    }
    return u;
}

GateReport calibrate_gate(const Mat2& target, double J, double amplitude_cap) {
    GateReport report;
    report.target = target;
    report.drive = synthesize_rotation(target, J, amplitude_cap);
    report.achieved = sequence_propagator(report.drive, J);
    report.fidelity = gate_fidelity(target, report.achieved);
    return report;
}

RwaCheckResult rwa_check(const LogicalState& l0, double J, const DriveSpec& d,
                         const SystemParams& df_point, double leak_tol, double ode_tol) {
    l0.require_normalized();
    d.validate();
    if (std::abs(std::remainder(df_point.phi - kPi, 2.0 * kPi)) > 1e-12) {
        throw ValidationError("rwa_check: params must sit at the DF phase phi = pi");
    }
    if (std::abs(d.amplitude) > J) {
        throw ValidationError("rwa_check: drive amplitude must stay below J");
    }

    const double amp = d.amplitude;
    const double freq = d.drive_frequency;
    const double phase = d.drive_phase;
    const auto delta_of_t = [amp, freq, phase](double t) {
        return amp * std::cos(freq * t + phase);
    };
    const Trajectory traj =
        evolve_ode(embed_logical(l0), df_point, delta_of_t, d.duration, ode_tol);

    const LogicalHamiltonian h_eff = effective_drive_hamiltonian(J, d);
    const LogicalHamiltonian frame{std::sqrt(2.0) * J, 0.0, 0.0};

    RwaCheckResult result{0.0, 0.0};
    for (std::size_t i = 0; i < traj.size(); ++i) {
        const double t = traj.times[i];
        const auto projection = project_logical(MolecularAmplitude{traj.states[i]});
        result.max_leakage = std::max(result.max_leakage, projection.residual);

        // into the rotating frame of the J splitting
        const Mat2 undo = logical_propagator(frame, t).adjoint();
        Vec2 rotated = undo * Vec2(projection.logical.a0, projection.logical.a1);
        const double norm = rotated.norm();
        if (norm > 0.0) rotated /= norm;

        const Mat2 predicted_u = logical_propagator(h_eff, t);
        const Vec2 predicted = predicted_u * Vec2(l0.a0, l0.a1);

        const double fid = std::norm((rotated.adjoint() * predicted)(0));
        const double trace_distance = std::sqrt(std::max(0.0, 1.0 - fid));
        result.deviation = std::max(result.deviation, trace_distance);
    }
    if (result.max_leakage > leak_tol) {
        throw LeakageError("rwa_check: logical-subspace leakage above tolerance",
                           result.max_leakage);
    }
    return result;
}

double full_model_rabi_frequency(double J, const DriveSpec& d, double ode_tol) {
    d.validate();
    const SystemParams df{1.0, J, 0.0, kPi};
    const double amp = d.amplitude;
    const double freq = d.drive_frequency;
    const double phase = d.drive_phase;
    const auto delta_of_t = [amp, freq, phase](double t) {
        return amp * std::cos(freq * t + phase);
    };
    // start on the equator (|e3> = |-_L>) so the sigma_z population swings fully
    const MolecularAmplitude c0{Vec3(0.0, 0.0, 1.0)};
    const double horizon = d.duration > 0.0 ? d.duration : 1.25 * kPi / (amp / 2.0);
    const Trajectory traj = evolve_ode(c0, df, delta_of_t, horizon, ode_tol);

    // first sign-reversing zero crossing of n_z after its initial departure
    std::vector<double> nz(traj.size());
    for (std::size_t i = 0; i < traj.size(); ++i) {
        const auto proj = project_logical(MolecularAmplitude{traj.states[i]});
        const double p0 = std::norm(proj.logical.a0);
        const double p1 = std::norm(proj.logical.a1);
        nz[i] = (p1 - p0) / std::max(p0 + p1, 1e-300);
    }
    double departed_sign = 0.0;
    for (std::size_t i = 1; i < nz.size(); ++i) {
        if (departed_sign == 0.0) {
            if (std::abs(nz[i]) > 0.05) departed_sign = nz[i] > 0 ? 1.0 : -1.0;
            continue;
        }
        if (nz[i] * departed_sign < 0.0) {
            // linear interpolation of the crossing time; half Rabi period
            const double t0 = traj.times[i - 1];
            const double t1 = traj.times[i];
            const double f0 = nz[i - 1];
            const double f1 = nz[i];
            const double tc = t0 + (t1 - t0) * f0 / (f0 - f1);
            return kPi / tc;
        }
    }
    throw ConvergenceError("full_model_rabi_frequency: no population oscillation found "
                           "within the horizon");
}

}  // namespace trimol
