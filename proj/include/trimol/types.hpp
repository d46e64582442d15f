#pragma once

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace trimol {

using Complex = std::complex<double>;
using Vec2 = Eigen::Vector2cd;
using Vec3 = Eigen::Vector3cd;
using Mat2 = Eigen::Matrix2cd;
using Mat3 = Eigen::Matrix3cd;
using RowVec3 = Eigen::RowVector3cd;

inline constexpr double kPi = 3.14159265358979323846;

// Base class for everything thrown by this library.
struct Error : std::runtime_error {
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

struct ValidationError : Error {
    using Error::Error;
};

// Spectral decomposition is defective or too ill-conditioned to trust.
struct ExceptionalPointError : Error {
    ExceptionalPointError(const std::string& what, Complex a, Complex b)
        : Error(what), eigenvalue_a(a), eigenvalue_b(b) {}
    Complex eigenvalue_a;
    Complex eigenvalue_b;
};

// A dark mode overlaps the emission bras: the integrated current diverges.
struct DivergentCurrentError : Error {
    using Error::Error;
};

// State never radiates; chirality has no value.
struct UndefinedChiralityError : Error {
    using Error::Error;
};

struct LeakageError : Error {
    LeakageError(const std::string& what, double r) : Error(what), residual(r) {}
    double residual;
};

struct UnreachableError : Error {
    UnreachableError(const std::string& what, double r) : Error(what), residual(r) {}
    double residual;
};

struct IntegrationError : Error {
    using Error::Error;
};

struct ConvergenceError : Error {
    using Error::Error;
};

// Physical parameters of the triatomic molecule. Units: hbar = 1, energies and
// rates in units of gamma0 (default gamma0 = 1), time in 1/gamma0.
struct SystemParams {
    double gamma0 = 1.0;  // waveguide-induced decay rate
    double J = 0.0;       // intramolecular coupling
    double Delta = 0.0;   // detuning of atom 3
    double phi = 0.0;     // accumulated photon phase, stored unwrapped

    void validate() const;

    SystemParams with_delta(double d) const {
        SystemParams p = *this;
        p.Delta = d;
        return p;
    }
    SystemParams with_phi(double ph) const {
        SystemParams p = *this;
        p.phi = ph;
        return p;
    }
};

// Complex amplitudes (c1, c2, c3) on the single-excitation basis {|e1>,|e2>,|e3>}.
// Norm may decay below 1 under evolution.
struct MolecularAmplitude {
    Vec3 c = Vec3::Zero();

    double norm() const { return c.norm(); }
};

// Amplitudes on the logical basis {|0_L>, |1_L>}.
struct LogicalState {
    Complex a0{0.0, 0.0};
    Complex a1{0.0, 0.0};

    double norm() const { return std::sqrt(std::norm(a0) + std::norm(a1)); }
    void require_normalized(double tol = 1e-12) const;
};

// Monochromatic parametric modulation of the detuning:
// Delta(t) = amplitude * cos(drive_frequency * t + drive_phase).
struct DriveSpec {
    double amplitude = 0.0;
    double drive_frequency = 0.0;
    double drive_phase = 0.0;
    double duration = 0.0;

    void validate() const;
};

}  // namespace trimol
