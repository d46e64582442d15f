#include "trimol/protocols.hpp"

#include <cmath>
#include <limits>

#include <Eigen/Eigenvalues>

#include "parallel.hpp"
#include "trimol/core.hpp"
#include "trimol/optimize.hpp"

namespace trimol {

namespace {

const Complex kI{0.0, 1.0};

// 3x2 map taking (a0, a1) to the prepared molecular state.
using PrepMatrix = Eigen::Matrix<Complex, 3, 2>;

struct PreparedForms {
    Mat2 right;  // P^dag Ihat_R P
    Mat2 left;   // P^dag Ihat_L P
};

PreparedForms prepared_forms(const PrepMatrix& prep, const CurrentOperators& ops) {
    return PreparedForms{prep.adjoint() * ops.i_right * prep,
                         prep.adjoint() * ops.i_left * prep};
}

// Common tail of both protocol reports once the preparation map is fixed.
void fill_report(ProtocolReport& report, const PrepMatrix& prep,
                 const CurrentOperators& ops) {
    const auto forms = prepared_forms(prep, ops);
    const auto bloch = bloch_max_error(forms.right, forms.left);
    report.e0 = bloch.e0;
    report.e1 = bloch.e1;
    report.bloch_max_error = bloch.max_error;
    report.coherent_max_error = bloch.coherent_max_error;

    const double il0 = forms.left(0, 0).real();
    const double ir0 = forms.right(0, 0).real();
    const double il1 = forms.left(1, 1).real();
    const double ir1 = forms.right(1, 1).real();
    report.eta0 = chirality(il0, ir0);
    report.eta1 = chirality(il1, ir1);
    report.normalization_deficit =
        std::max(std::abs(1.0 - (il0 + ir0)), std::abs(1.0 - (il1 + ir1)));
}

// Dense sampled maximum of the coherent error, used when the normalization
// form deviates from the identity. Non-radiating superpositions carry no
// outcome statistics and are skipped.
double sampled_coherent_max(const Mat2& a_form, const Mat2& s_form) {
    double best = std::numeric_limits<double>::quiet_NaN();
    constexpr int kPolar = 181;
    constexpr int kAzimuth = 181;
    for (int it = 0; it < kPolar; ++it) {
        const double theta = kPi * it / (kPolar - 1);
        for (int ip = 0; ip < kAzimuth; ++ip) {
            const double phase = 2.0 * kPi * ip / (kAzimuth - 1);
            const Vec2 psi(std::cos(theta / 2.0),
                           std::exp(kI * phase) * std::sin(theta / 2.0));
            const double a = (psi.adjoint() * a_form * psi)(0).real();
            const double s = (psi.adjoint() * s_form * psi)(0).real();
            if (s < 1e-12) continue;
            const double ideal = std::cos(theta / 2.0) * std::cos(theta / 2.0);
            const double err = std::abs(a / s - ideal);
            if (std::isnan(best) || err > best) best = err;
        }
    }
    return best;
}

}  // namespace

Mat3 local_phase_gate(int atom_index, double theta) {
    if (atom_index < 1 || atom_index > 3) {
        throw ValidationError("local_phase_gate: atom index must be 1, 2 or 3");
    }
    Mat3 gate = Mat3::Identity();
    gate(atom_index - 1, atom_index - 1) = std::exp(kI * theta);
    return gate;
}

Mat3 logical_rotation(double alpha) {
    // R(alpha)|0_L> = cos(alpha)|0_L> - sin(alpha)|1_L>,
    // R(alpha)|1_L> = sin(alpha)|0_L> + cos(alpha)|1_L>, identity on the complement.
    const Eigen::Matrix<Complex, 3, 2> embed = logical_embedding();
    Eigen::Matrix<Complex, 2, 2> block;
    block << std::cos(alpha), std::sin(alpha), -std::sin(alpha), std::cos(alpha);
    const Vec3 anti = antisymmetric_vector();
    return embed * block * embed.transpose() + anti * anti.transpose();
}

MolecularAmplitude prepare_chiral_state(const LogicalState& l, const UPlusAngles& angles) {
    const Mat3 u = local_phase_gate(2, angles.theta2) * local_phase_gate(1, angles.theta1) *
                   logical_rotation(angles.alpha);
    return MolecularAmplitude{u * embed_logical(l).c};
}

BlochErrorReport bloch_max_error(const Mat2& right_form, const Mat2& left_form) {
    BlochErrorReport report{};
    const double ir0 = right_form(0, 0).real();
    const double il0 = left_form(0, 0).real();
    const double ir1 = right_form(1, 1).real();
    const double il1 = left_form(1, 1).real();
    if (ir0 + il0 < 1e-12 || ir1 + il1 < 1e-12) {
        throw UndefinedChiralityError("bloch_max_error: a basis image does not radiate");
    }
    report.e0 = il0 / (il0 + ir0);
    report.e1 = ir1 / (il1 + ir1);
    // population-linear error interpolates between the poles; max at a pole
    report.max_error = std::max(report.e0, report.e1);

    // coherent variant: |psi^dag A psi / psi^dag S psi - cos^2(theta/2)|
    const Mat2 s_form = right_form + left_form;
    const double s_deficit = (s_form - Mat2::Identity()).cwiseAbs().maxCoeff();
    if (s_deficit < 1e-6) {
        // normalization is the identity: extremal eigenvalue of A - diag(1, 0)
        Mat2 q = right_form;
        q(0, 0) -= 1.0;
        Eigen::SelfAdjointEigenSolver<Mat2> es(q);
        report.coherent_max_error =
            std::max(std::abs(es.eigenvalues()(0)), std::abs(es.eigenvalues()(1)));
    } else {
        report.coherent_max_error = sampled_coherent_max(right_form, s_form);
    }
    return report;
}

ProtocolReport protocol1_report(double J) {
    const SearchResult chiral = find_perfect_chirality(J);
    const double delta = chiral.point[0];
    const double phi = chiral.point[1];
    const UPlusAngles angles = derive_u_plus_angles(J, delta, phi);

    ProtocolReport report;
    report.params_used = SystemParams{1.0, J, delta, phi};
    report.gates = {GateDescriptor{"R", angles.alpha, 0},
                    GateDescriptor{"S1", angles.theta1, 1},
                    GateDescriptor{"S2", angles.theta2, 2}};

    const Mat3 u = local_phase_gate(2, angles.theta2) * local_phase_gate(1, angles.theta1) *
                   logical_rotation(angles.alpha);
    const PrepMatrix prep = u * logical_embedding();
    fill_report(report, prep, current_operators_for(report.params_used));
    return report;
}

ProtocolReport protocol2_report(double J, const Protocol2Point& point) {
    ProtocolReport report;
    report.params_used = SystemParams{1.0, J, point.Delta, point.phi};
    report.gates = {GateDescriptor{"S2", point.theta, 2}};

    const PrepMatrix prep = local_phase_gate(2, point.theta) * logical_embedding();
    fill_report(report, prep, current_operators_for(report.params_used));
    return report;
}

ErrorMap robustness_map(double J, const Protocol2Point& base, std::span<const double> dtheta,
                        std::span<const double> ddelta, int threads) {
    if (dtheta.empty() || ddelta.empty()) {
        throw ValidationError("robustness_map: empty grid");
    }
    ErrorMap map;
    map.dtheta.assign(dtheta.begin(), dtheta.end());
    map.ddelta.assign(ddelta.begin(), ddelta.end());
    map.max_error.assign(dtheta.size() * ddelta.size(),
                         std::numeric_limits<double>::quiet_NaN());

    std::vector<char> failed(map.max_error.size(), 0);
    detail::parallel_for(map.max_error.size(), threads, [&](std::size_t idx) {
        const std::size_t ti = idx / ddelta.size();
        const std::size_t di = idx % ddelta.size();
        const Protocol2Point point{base.Delta + ddelta[di], base.phi,
                                   base.theta + dtheta[ti]};
        try {
            map.max_error[idx] = protocol2_report(J, point).bloch_max_error;
        } catch (const Error&) {
            failed[idx] = 1;
        }
    });
    for (const char f : failed) map.failure_count += f;
    return map;
}

}  // namespace trimol
