#include "trimol/core.hpp"

#include <cmath>

namespace trimol {

void SystemParams::validate() const {
    if (!(gamma0 >= 0.0) || !std::isfinite(gamma0)) {
        throw ValidationError("SystemParams: gamma0 must be finite and >= 0");
    }
    if (!std::isfinite(J) || !std::isfinite(Delta) || !std::isfinite(phi)) {
        throw ValidationError("SystemParams: J, Delta, phi must be finite");
    }
}

void LogicalState::require_normalized(double tol) const {
    if (std::abs(norm() - 1.0) > tol) {
        throw ValidationError("LogicalState: expected unit norm, got " +
                              std::to_string(norm()));
    }
}

void DriveSpec::validate() const {
    if (!(duration >= 0.0)) {
        throw ValidationError("DriveSpec: duration must be >= 0");
    }
    if (!std::isfinite(amplitude) || !std::isfinite(drive_frequency) ||
        !std::isfinite(drive_phase) || !std::isfinite(duration)) {
        throw ValidationError("DriveSpec: fields must be finite");
    }
}

namespace {
const double kSqrt2 = std::sqrt(2.0);
}

Vec3 logical_zero_vector() {
    return Vec3(0.5, 0.5, -kSqrt2 / 2.0);
}

Vec3 logical_one_vector() {
    return Vec3(0.5, 0.5, kSqrt2 / 2.0);
}

Vec3 antisymmetric_vector() {
    return Vec3(1.0 / kSqrt2, -1.0 / kSqrt2, 0.0);
}

Eigen::Matrix<Complex, 3, 2> logical_embedding() {
    Eigen::Matrix<Complex, 3, 2> e;
    e.col(0) = logical_zero_vector();
    e.col(1) = logical_one_vector();
    return e;
}

MolecularAmplitude embed_logical(const LogicalState& l) {
    l.require_normalized();
    return MolecularAmplitude{l.a0 * logical_zero_vector() + l.a1 * logical_one_vector()};
}

LogicalProjection project_logical(const MolecularAmplitude& c) {
    LogicalProjection out;
    out.logical.a0 = logical_zero_vector().dot(c.c);  // dot conjugates the left argument
    out.logical.a1 = logical_one_vector().dot(c.c);
    out.residual = std::abs(antisymmetric_vector().dot(c.c));
    return out;
}

}  // namespace trimol
