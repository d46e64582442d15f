#include <doctest.h>

#include "oracles.hpp"
#include "trimol/chirality.hpp"
#include "trimol/core.hpp"
#include "trimol/protocols.hpp"

using namespace trimol;

namespace {
const double kSqrt2 = std::sqrt(2.0);
const Complex kI{0.0, 1.0};

// recomputed protocol-2 operating point for J = 0.1 (see test_optimize)
const Protocol2Point kP2Point{-0.12933625703353163, 0.26239386239275742,
                              3.1333234165814154};

// dense sampled maximum of the population-linear error functional
double sampled_pole_max(double J, const Protocol2Point& point) {
    const auto ops = current_operators_for(SystemParams{1.0, J, point.Delta, point.phi});
    const Eigen::Matrix<Complex, 3, 2> prep =
        local_phase_gate(2, point.theta) * logical_embedding();
    double best = 0.0;
    for (int it = 0; it <= 200; ++it) {
        const double theta = kPi * it / 200.0;
        for (int ip = 0; ip < 100; ++ip) {
            const double phase = 2.0 * kPi * ip / 100.0;
            const Vec2 psi(std::cos(theta / 2.0),
                           std::exp(kI * phase) * std::sin(theta / 2.0));
            const Vec3 c = prep * psi;
            const auto [il, ir] = integrated_currents(MolecularAmplitude{c}, ops);
            const double ideal = std::cos(theta / 2.0) * std::cos(theta / 2.0);
            const double population_error =
                ideal * (il / (il + ir)) + (1.0 - ideal) * (ir / (il + ir));
            best = std::max(best, population_error);
        }
    }
    return best;
}
}  // namespace

TEST_CASE("local_phase_gate") {
    const Vec3 symmetric(1.0 / kSqrt2, 1.0 / kSqrt2, 0.0);
    const Vec3 flipped = local_phase_gate(2, kPi) * symmetric;
    CHECK((flipped - antisymmetric_vector()).norm() < 1e-15);

    CHECK((local_phase_gate(2, 0.0) - Mat3::Identity()).cwiseAbs().maxCoeff() == 0.0);
    CHECK_THROWS_AS(local_phase_gate(0, 1.0), ValidationError);
    CHECK_THROWS_AS(local_phase_gate(4, 1.0), ValidationError);
}

TEST_CASE("logical_rotation") {
    CHECK((logical_rotation(0.0) - Mat3::Identity()).cwiseAbs().maxCoeff() < 1e-15);

    // quarter turn maps |0_L> onto |1_L> up to the sign convention
    const Vec3 rotated = logical_rotation(kPi / 2.0) * logical_zero_vector();
    CHECK(std::abs(std::abs(logical_one_vector().dot(rotated)) - 1.0) < 1e-14);

    oracle::Sampler sampler(79);
    for (int n = 0; n < 20; ++n) {
        const double alpha = sampler.uniform(-kPi, kPi);
        const Mat3 r = logical_rotation(alpha);
        CHECK((r.adjoint() * r - Mat3::Identity()).cwiseAbs().maxCoeff() < 1e-12);
        CHECK((r * antisymmetric_vector() - antisymmetric_vector()).norm() < 1e-14);
    }
}

TEST_CASE("prepare_chiral_state with zero angles is the plain embedding") {
    const LogicalState l{0.8, 0.6};
    const auto prepared = prepare_chiral_state(l, UPlusAngles{0.0, 0.0, 0.0});
    CHECK((prepared.c - embed_logical(l).c).norm() < 1e-14);
}

TEST_CASE("bloch_max_error on diagonal forms interpolates the pole errors") {
    Mat2 right = Mat2::Zero();
    Mat2 left = Mat2::Zero();
    right(0, 0) = 1.0;   // prepared |0_L> image emits fully rightward
    right(1, 1) = 0.02;  // prepared |1_L> image leaks 2% into the right port
    left(1, 1) = 0.98;
    const auto report = bloch_max_error(right, left);
    CHECK(report.e0 == doctest::Approx(0.0));
    CHECK(report.e1 == doctest::Approx(0.02));
    CHECK(report.max_error == doctest::Approx(0.02));
    CHECK(report.coherent_max_error == doctest::Approx(0.02).epsilon(1e-9));
}

TEST_CASE("bloch_max_error rejects silent basis images") {
    CHECK_THROWS_AS(bloch_max_error(Mat2::Zero(), Mat2::Zero()), UndefinedChiralityError);
}

TEST_CASE("protocol 1 reproduces the full-circuit readout figures") {
    const auto report = protocol1_report(0.1);
    CHECK(report.e0 < 1e-6);
    CHECK(report.e1 == doctest::Approx(0.01923077).epsilon(5e-3));
    CHECK(report.bloch_max_error == doctest::Approx(0.01923077).epsilon(5e-3));
    // the prepared zero image is exactly chiral, so coherences vanish and the
    // coherent maximum coincides with the pole maximum
    CHECK(report.coherent_max_error == doctest::Approx(report.bloch_max_error).epsilon(1e-6));
    CHECK(report.eta0 == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(report.normalization_deficit < 1e-6);
    REQUIRE(report.gates.size() == 3);
    CHECK(report.gates[0].name == "R");
}

TEST_CASE("protocol 2 at the operating point") {
    const auto report = protocol2_report(0.1, kP2Point);
    CHECK(report.eta0 == doctest::Approx(0.976).epsilon(3e-3));
    CHECK(report.eta1 == doctest::Approx(-0.975).epsilon(3e-3));
    CHECK(report.bloch_max_error == doctest::Approx(0.0127).epsilon(0.05));
    CHECK(report.normalization_deficit < 1e-6);

    // basis consistency: the report's pole errors are the diagonal functionals
    CHECK(report.e0 == doctest::Approx((1.0 - report.eta0) / 2.0).epsilon(1e-10));
    CHECK(report.e1 == doctest::Approx((1.0 + report.eta1) / 2.0).epsilon(1e-10));
    CHECK(report.bloch_max_error == doctest::Approx(std::max(report.e0, report.e1)));
}

TEST_CASE("population-linear Bloch maximum matches dense sampling") {
    const auto report = protocol2_report(0.1, kP2Point);
    CHECK(sampled_pole_max(0.1, kP2Point) ==
          doctest::Approx(report.bloch_max_error).epsilon(1e-3));
}

TEST_CASE("protocol 2 with phi = pi has no directionality") {
    const auto report = protocol2_report(0.1, Protocol2Point{0.1, kPi, 0.3});
    CHECK(std::abs(report.eta0) < 1e-10);
    CHECK(std::abs(report.eta1) < 1e-10);
}

TEST_CASE("the S2 angle theta = pi - phi silences the left port at t = 0") {
    const double phi = kP2Point.phi;
    const double theta = kPi - phi;
    const SystemParams p{1.0, 0.1, kP2Point.Delta, phi};
    const MolecularAmplitude prepared{local_phase_gate(2, theta) *
                                      embed_logical(LogicalState{1.0, 0.0}).c};
    const auto [left, right] = emission_amplitudes(prepared, p);
    CHECK(std::abs(left) < 1e-14);
    CHECK(std::abs(right) > 0.0);
}

TEST_CASE("robustness map around the operating point") {
    std::vector<double> dtheta, ddelta;
    for (int k = -5; k <= 5; ++k) dtheta.push_back(0.01 * kPi * k);
    for (int k = -5; k <= 5; ++k) ddelta.push_back(0.002 * k);
    const auto map = robustness_map(0.1, kP2Point, dtheta, ddelta, 2);
    CHECK(map.failure_count == 0);

    const std::size_t t0 = 5, d0 = 5;  // origin
    CHECK(map.at(t0, d0) == doctest::Approx(0.0127).epsilon(0.05));

    // growth away from the origin along each half axis
    CHECK(map.at(t0, d0 + 3) > map.at(t0, d0));
    CHECK(map.at(t0, d0 - 3) > map.at(t0, d0));
    CHECK(map.at(t0 + 3, d0) > map.at(t0, d0));
    CHECK(map.at(t0 - 3, d0) > map.at(t0, d0));

    // detuning deviations dominate: compare second differences at the origin
    const double curvature_delta =
        map.at(t0, d0 + 1) + map.at(t0, d0 - 1) - 2.0 * map.at(t0, d0);
    const double curvature_theta =
        map.at(t0 + 1, d0) + map.at(t0 - 1, d0) - 2.0 * map.at(t0, d0);
    CHECK(curvature_delta / (0.002 * 0.002) >
          curvature_theta / (0.01 * kPi * 0.01 * kPi));
}

TEST_CASE("robustness map records silent points instead of aborting") {
    // at phi = pi the prepared logical images never radiate
    const std::vector<double> dtheta = {0.0, 0.1};
    const std::vector<double> ddelta = {0.0};
    const auto map = robustness_map(0.1, Protocol2Point{0.0, kPi, 0.5}, dtheta, ddelta, 1);
    CHECK(map.failure_count == 2);
    CHECK(std::isnan(map.at(0, 0)));
    CHECK(std::isnan(map.at(1, 0)));
}
