#include <doctest.h>

#include "oracles.hpp"
#include "trimol/core.hpp"
#include "trimol/dynamics.hpp"

using namespace trimol;

namespace {
const double kSqrt2 = std::sqrt(2.0);
const Complex kI{0.0, 1.0};
}

TEST_CASE("emission amplitudes at phi = pi") {
    const SystemParams p{1.0, 0.1, 0.0, kPi};

    const auto symmetric = emission_amplitudes(
        MolecularAmplitude{Vec3(1.0 / kSqrt2, 1.0 / kSqrt2, 0.0)}, p);
    CHECK(std::abs(symmetric.first) < 1e-15);
    CHECK(std::abs(symmetric.second) < 1e-15);

    const auto anti = emission_amplitudes(MolecularAmplitude{antisymmetric_vector()}, p);
    CHECK(std::abs(anti.first) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::abs(anti.second) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("one-sided emission when the guided phases satisfy theta + phi = pi") {
    const double phi = 0.088 * kPi;
    const double theta = kPi - phi;
    const SystemParams p{1.0, 0.1, 0.0, phi};
    const Vec3 c(1.0 / kSqrt2, std::exp(kI * theta) / kSqrt2, 0.0);
    const auto [left, right] = emission_amplitudes(MolecularAmplitude{c}, p);
    CHECK(std::abs(left) < 1e-15);
    CHECK(std::abs(right) > 0.1);
}

TEST_CASE("evolve_modal is a pure phase on the protected subspace") {
    const SystemParams p{1.0, 0.1, 0.0, kPi};
    const auto s = numeric_spectrum(build_hamiltonian(p));
    const MolecularAmplitude c0 = embed_logical(LogicalState{1.0, 0.0});
    for (const double t : {0.3, 2.0, 17.0}) {
        const auto ct = evolve_modal(c0, s, t);
        CHECK(std::abs(ct.norm() - 1.0) < 1e-12);
        // |0_L> carries eps- = -sqrt2 J: phase e^{+i sqrt2 J t}
        const Complex expected = std::exp(kI * kSqrt2 * 0.1 * t);
        CHECK((ct.c - expected * c0.c).norm() < 1e-12);
    }
}

TEST_CASE("evolve_modal at t = 0 is the identity") {
    oracle::Sampler sampler(5);
    const SystemParams p = sampler.fully_decaying_params();
    const auto s = numeric_spectrum(build_hamiltonian(p));
    const Vec3 c0 = sampler.state();
    CHECK((evolve_modal(MolecularAmplitude{c0}, s, 0.0).c - c0).norm() < 1e-12);
}

TEST_CASE("evolve_modal matches the reference integrator") {
    const SystemParams p{1.0, 0.1, -0.132, 0.088 * kPi};
    const auto s = numeric_spectrum(build_hamiltonian(p));
    const MolecularAmplitude c0{Vec3(1.0, 0.0, 0.0)};
    const Vec3 reference = oracle::evolve_reference(p, c0.c, 3.0);
    CHECK((evolve_modal(c0, s, 3.0).c - reference).norm() < 1e-8);
}

TEST_CASE("evolve_modal semigroup property") {
    oracle::Sampler sampler(7);
    for (int n = 0; n < 50; ++n) {
        const SystemParams p = sampler.params();
        Spectrum s;
        try {
            s = numeric_spectrum(build_hamiltonian(p));
        } catch (const ExceptionalPointError&) {
            continue;
        }
        const MolecularAmplitude c0{sampler.state()};
        const double t1 = sampler.uniform(0.0, 4.0);
        const double t2 = sampler.uniform(0.0, 4.0);
        const auto two_step = evolve_modal(evolve_modal(c0, s, t1), s, t2);
        const auto one_step = evolve_modal(c0, s, t1 + t2);
        CHECK((two_step.c - one_step.c).norm() < 1e-10);
    }
}

TEST_CASE("evolve_ode preserves the norm of protected states") {
    const SystemParams p{1.0, 0.1, 0.0, kPi};
    const auto traj = evolve_ode(embed_logical(LogicalState{0.6, 0.8}), p, 50.0, 1e-10);
    for (const auto& state : traj.states) {
        CHECK(std::abs(state.norm() - 1.0) < 1e-8);
    }
}

TEST_CASE("evolve_ode is exactly unitary in the Hermitian limit") {
    const SystemParams p{0.0, 0.17, 0.4, 1.3};
    oracle::Sampler sampler(13);
    const auto traj = evolve_ode(MolecularAmplitude{sampler.state()}, p, 30.0, 1e-10);
    for (const auto& state : traj.states) {
        CHECK(std::abs(state.norm() - 1.0) < 1e-9);
    }
}

TEST_CASE("evolve_ode agrees with evolve_modal at constant detuning") {
    oracle::Sampler sampler(17);
    for (int n = 0; n < 25; ++n) {
        const SystemParams p = sampler.fully_decaying_params(0.02);
        const auto s = numeric_spectrum(build_hamiltonian(p));
        const MolecularAmplitude c0{sampler.state()};
        const double t_end = sampler.uniform(1.0, 10.0);
        const auto traj = evolve_ode(c0, p, t_end, 1e-10);
        const auto modal = evolve_modal(c0, s, t_end);
        CHECK((traj.states.back() - modal.c).cwiseAbs().maxCoeff() < 1e-9);
    }
}

TEST_CASE("parametric drive produces the resonant Rabi oscillation") {
    // sigma_x drive on a sigma_z eigenstate: population oscillates at amplitude/2
    const double J = 0.1;
    const double amplitude = 0.01;
    const SystemParams p{1.0, J, 0.0, kPi};
    const auto delta_of_t = [=](double t) { return amplitude * std::cos(2.0 * kSqrt2 * J * t); };

    const double quarter_period = kPi / amplitude;  // angle pi/2 at rate amplitude/2
    const auto traj =
        evolve_ode(embed_logical(LogicalState{1.0, 0.0}), p, delta_of_t, quarter_period, 1e-9);
    const auto projection = project_logical(MolecularAmplitude{traj.states.back()});
    // half the population has moved after a quarter Rabi period
    CHECK(std::norm(projection.logical.a1) == doctest::Approx(0.5).epsilon(0.05));
}

TEST_CASE("flux balance at the decoherence-free point") {
    const SystemParams p{1.0, 0.1, 0.0, kPi};
    const auto traj = evolve_ode(embed_logical(LogicalState{1.0, 0.0}), p, 20.0, 1e-10);
    CHECK(flux_balance(traj) < 1e-8);
}

TEST_CASE("flux balance for the superradiant mode") {
    const SystemParams p{1.0, 0.1, 0.0, kPi};
    const auto traj = evolve_ode(MolecularAmplitude{antisymmetric_vector()}, p, 20.0, 1e-10);
    const double lost =
        traj.states.front().squaredNorm() - traj.states.back().squaredNorm();
    CHECK(lost == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(flux_balance(traj) < 1e-6);
}

TEST_CASE("flux balance on random draws") {
    oracle::Sampler sampler(19);
    for (int n = 0; n < 1000; ++n) {
        const SystemParams p = sampler.fully_decaying_params(0.08);
        const auto eig = analytic_spectrum(p);
        double gmin = 1e300;
        for (const auto& e : eig) gmin = std::min(gmin, -e.imag());
        const MolecularAmplitude c0{sampler.state()};
        const auto traj = evolve_ode(c0, p, 50.0 / gmin, 1e-8);
        CHECK(flux_balance(traj) < 1e-5);
    }
}

TEST_CASE("emission bras coincide at phi in {0, pi}") {
    for (const double phi : {0.0, kPi}) {
        const auto [left, right] = emission_bras(SystemParams{1.0, 0.1, 0.2, phi});
        CHECK((left - right).cwiseAbs().maxCoeff() < 1e-15);
    }
}

TEST_CASE("evolve_ode error paths") {
    const SystemParams p{1.0, 0.1, 0.0, kPi};
    const MolecularAmplitude c0{Vec3(0.0, 0.0, 1.0)};
    CHECK_THROWS_AS(
        evolve_ode(c0, p, [](double) { return std::numeric_limits<double>::quiet_NaN(); },
                   1.0, 1e-10),
        IntegrationError);
    CHECK_THROWS_AS(evolve_ode(c0, p, 1.0, 1e-30, 0), ConvergenceError);
    CHECK_THROWS_AS(evolve_ode(c0, p, -1.0, 1e-10), ValidationError);
}

TEST_CASE("trajectory grids are strictly increasing and aligned") {
    const SystemParams p{1.0, 0.1, 0.1, 0.7};
    const auto traj = evolve_ode(MolecularAmplitude{Vec3(0, 0, 1)}, p, 5.0, 1e-9);
    REQUIRE(traj.times.size() == traj.states.size());
    REQUIRE(traj.times.size() == traj.alpha_left.size());
    REQUIRE(traj.times.size() == traj.alpha_right.size());
    for (std::size_t i = 1; i < traj.times.size(); ++i) {
        CHECK(traj.times[i] > traj.times[i - 1]);
    }
    CHECK(traj.times.front() == 0.0);
    CHECK(traj.times.back() == doctest::Approx(5.0).epsilon(1e-14));
}
