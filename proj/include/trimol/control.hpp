#pragma once

#include <vector>

#include "trimol/types.hpp"

namespace trimol {

// H = hz sigma_z^L + hx sigma_x^L + hy sigma_y^L on the logical qubit, with
//   sigma_z^L = |1><1| - |0><0|,
//   sigma_x^L = |1><0| + |0><1|,
//   sigma_y^L = -i|1><0| + i|0><1|.
struct LogicalHamiltonian {
    double hz = 0.0;
    double hx = 0.0;
    double hy = 0.0;
};

// Static-detuning qubit Hamiltonian: (hz, hx, hy) = (sqrt2 J, -Delta/2, 0).
LogicalHamiltonian logical_hamiltonian(double J, double Delta);

// Rotating-frame Hamiltonian under a parametric detuning drive:
// (hz, hx, hy) = ((2 sqrt2 J - w_d)/2, -(A/4) cos(phase), -(A/4) sin(phase)).
LogicalHamiltonian effective_drive_hamiltonian(double J, const DriveSpec& d);

// Logical Pauli matrices in (a0, a1) coordinates.
Mat2 sigma_x_logical();
Mat2 sigma_y_logical();
Mat2 sigma_z_logical();

// exp(-i t H) by the closed-form axis-angle formula.
Mat2 logical_propagator(const LogicalHamiltonian& h, double t);

LogicalState evolve_logical(const LogicalState& l0, const LogicalHamiltonian& h, double t);

// One piecewise segment of a synthesized gate: either free evolution at
// Delta = 0 (a phase gate) or a resonant parametric drive.
struct Pulse {
    enum class Kind { FreeEvolution, ResonantDrive };
    Kind kind = Kind::FreeEvolution;
    double duration = 0.0;
    DriveSpec drive;  // meaningful for ResonantDrive only
};

struct PulseSequence {
    std::vector<Pulse> pulses;

    bool empty() const { return pulses.empty(); }
    double total_duration() const;
};

// |tr(target^dag achieved)|^2 / 4, clamped to [0, 1].
double gate_fidelity(const Mat2& target, const Mat2& achieved);

// Decomposes a 2x2 unitary into resonant-drive and free-evolution segments.
// Equatorial rotations become a single resonant drive at the amplitude cap;
// anything else becomes a Z-equatorial-Z sandwich. Identity gives an empty list.
PulseSequence synthesize_rotation(const Mat2& target, double J, double amplitude_cap);

// Composes the sequence under the rotating-frame model (for fidelity checks).
Mat2 sequence_propagator(const PulseSequence& seq, double J);

struct GateReport {
    Mat2 target;
    Mat2 achieved;
    double fidelity = 0.0;
    PulseSequence drive;
};

GateReport calibrate_gate(const Mat2& target, double J, double amplitude_cap);

struct RwaCheckResult {
    double deviation;    // max trace distance between full model and the RWA prediction
    double max_leakage;  // max residual outside the logical subspace
};

// Evolves the full three-level model under Delta(t) = A cos(w_d t + phase) at the
// decoherence-free point, projects onto the logical subspace, rotates into the
// frame of the J coupling and compares against the rotating-frame prediction.
// Throws LeakageError when the out-of-subspace residual exceeds leak_tol.
RwaCheckResult rwa_check(const LogicalState& l0, double J, const DriveSpec& d,
                         const SystemParams& df_point, double leak_tol = 1e-6,
                         double ode_tol = 1e-9);

// Population Rabi frequency extracted from full-model evolution at the DF point,
// from the first half-period of the logical sigma_z oscillation.
double full_model_rabi_frequency(double J, const DriveSpec& d, double ode_tol = 1e-9);

}  // namespace trimol
