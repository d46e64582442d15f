#include <doctest.h>

#include "oracles.hpp"
#include "trimol/core.hpp"
#include "trimol/spectral.hpp"

using namespace trimol;

namespace {
const double kSqrt2 = std::sqrt(2.0);
const Complex kI{0.0, 1.0};

bool contains_eigenvalue(const std::array<Complex, 3>& eig, Complex target, double tol) {
    for (const auto& e : eig) {
        if (std::abs(e - target) < tol) return true;
    }
    return false;
}

double set_distance(const std::array<Complex, 3>& a, const std::array<Complex, 3>& b) {
    // both sorted by (Re, Im); pairwise after sorting is enough away from ties
    double d = 0.0;
    for (int k = 0; k < 3; ++k) d = std::max(d, std::abs(a[k] - b[k]));
    return d;
}

std::array<Complex, 3> sorted(std::array<Complex, 3> v) {
    std::sort(v.begin(), v.end(), [](Complex a, Complex b) {
        if (a.real() != b.real()) return a.real() < b.real();
        return a.imag() < b.imag();
    });
    return v;
}
}  // namespace

TEST_CASE("build_hamiltonian matches the stated entries") {
    const auto ham = build_hamiltonian(SystemParams{1.0, 0.1, 0.0, kPi});
    Mat3 expected;
    expected << Complex(0, -0.5), Complex(0, 0.5), 0.1,
                Complex(0, 0.5), Complex(0, -0.5), 0.1,
                0.1, 0.1, 0.0;
    CHECK((ham.h - expected).cwiseAbs().maxCoeff() < 1e-15);
    CHECK((ham.h - ham.h.transpose()).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("build_hamiltonian limits") {
    CHECK(build_hamiltonian(SystemParams{0.0, 0.0, 0.0, 0.0}).h.cwiseAbs().maxCoeff() == 0.0);

    const auto hermitian = build_hamiltonian(SystemParams{0.0, 0.3, 0.2, 1.234});
    CHECK((hermitian.h - hermitian.h.adjoint()).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("analytic_spectrum at the decoherence-free point") {
    const auto eig = analytic_spectrum(SystemParams{1.0, 0.1, 0.0, kPi});
    CHECK(std::abs(eig[0] - Complex(0.0, -1.0)) < 1e-14);  // eps0
    CHECK(std::abs(eig[1] - kSqrt2 * 0.1) < 1e-14);        // eps+
    CHECK(std::abs(eig[2] + kSqrt2 * 0.1) < 1e-14);        // eps-
}

TEST_CASE("analytic_spectrum block-diagonal limit") {
    const auto eig = analytic_spectrum(SystemParams{1.0, 0.0, 0.5, kPi});
    CHECK(contains_eigenvalue(eig, Complex(0.0, 0.0), 1e-14));
    CHECK(contains_eigenvalue(eig, Complex(0.0, -1.0), 1e-14));
    CHECK(contains_eigenvalue(eig, Complex(0.5, 0.0), 1e-14));
}

TEST_CASE("analytic_spectrum agrees with the companion-matrix cubic oracle") {
    const SystemParams p{1.0, 0.1, -0.132, 0.088 * kPi};
    const auto roots = oracle::characteristic_roots(build_hamiltonian(p).h);
    const auto eig = sorted(analytic_spectrum(p));
    CHECK(set_distance(eig, roots) < 1e-12);
}

TEST_CASE("exceptional_distance closed forms") {
    CHECK(std::abs(exceptional_distance(SystemParams{1.0, 0.25, 0.0, kPi}) -
                   Complex(32.0 * 0.25 * 0.25, 0.0)) < 1e-14);
    CHECK(std::abs(exceptional_distance(SystemParams{1.0, 0.0, 0.0, 0.0}) -
                   Complex(-4.0, 0.0)) < 1e-14);
}

TEST_CASE("Gamma is twice the eigenvalue splitting") {
    const SystemParams p{1.0, 0.1, -0.132, 0.088 * kPi};
    const auto eig = analytic_spectrum(p);
    const Complex gamma_sq = exceptional_distance(p);
    const Complex splitting = eig[1] - eig[2];  // eps+ - eps-
    CHECK(std::abs(gamma_sq - 4.0 * splitting * splitting) < 1e-12);
}

TEST_CASE("numeric_spectrum at the decoherence-free point") {
    const auto s = numeric_spectrum(build_hamiltonian(SystemParams{1.0, 0.1, 0.0, kPi}));
    CHECK(std::abs(s.eigenvalues[0] + kSqrt2 * 0.1) < 1e-12);
    CHECK(std::abs(s.eigenvalues[1] - Complex(0.0, -1.0)) < 1e-12);
    CHECK(std::abs(s.eigenvalues[2] - kSqrt2 * 0.1) < 1e-12);

    // logical vectors are the real eigenvectors, antisymmetric carries the decay
    const Vec3 v0 = logical_zero_vector();
    const Vec3 v1 = logical_one_vector();
    const Vec3 va = antisymmetric_vector();
    const Mat3& h = build_hamiltonian(SystemParams{1.0, 0.1, 0.0, kPi}).h;
    CHECK((h * v0 - (-kSqrt2 * 0.1) * v0).norm() < 1e-14);
    CHECK((h * v1 - (kSqrt2 * 0.1) * v1).norm() < 1e-14);
    CHECK((h * va - Complex(0.0, -1.0) * va).norm() < 1e-14);
    CHECK(s.condition < 1.0 + 1e-12);
}

TEST_CASE("antisymmetric vector is an eigenvector at every parameter point") {
    oracle::Sampler sampler(23);
    const Vec3 va = antisymmetric_vector();
    for (int n = 0; n < 500; ++n) {
        const SystemParams p = sampler.params();
        const Mat3 h = build_hamiltonian(p).h;
        const Complex expected = kI / 2.0 * (std::exp(kI * p.phi) - 1.0) * p.gamma0;
        CHECK((h * va - expected * va).norm() < 1e-10);
    }
}

TEST_CASE("Hermitian limit reduces to a standard eigenproblem") {
    const SystemParams p{0.0, 0.3, 0.2, 0.0};
    const auto s = numeric_spectrum(build_hamiltonian(p));
    for (const auto& e : s.eigenvalues) {
        CHECK(std::abs(e.imag()) < 1e-14);
    }
    // real vectors: left rows coincide with conjugated right vectors
    CHECK((s.left - s.right.adjoint()).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("numeric_spectrum rejects matrices outside the symmetric family") {
    auto ham = build_hamiltonian(SystemParams{1.0, 0.1, 0.0, kPi});
    ham.h(0, 2) = 0.5;
    CHECK_THROWS_AS(numeric_spectrum(ham), ValidationError);
}

TEST_CASE("numeric_spectrum throws at an exact exceptional point") {
    // phi = 0, Delta = 0, 32 J^2 = 4: the symmetric-sector pair coalesces
    const SystemParams p{1.0, 1.0 / (2.0 * kSqrt2), 0.0, 0.0};
    CHECK(std::abs(exceptional_distance(p)) < 1e-12);
    CHECK_THROWS_AS(numeric_spectrum(build_hamiltonian(p)), ExceptionalPointError);
}

TEST_CASE("analytic and numeric spectra agree over random draws") {
    oracle::Sampler sampler(37);
    int tested = 0;
    while (tested < 10000) {
        const SystemParams p = sampler.params();
        if (std::abs(exceptional_distance(p)) <= 1e-6) continue;
        ++tested;
        const auto s = numeric_spectrum(build_hamiltonian(p));
        CHECK(set_distance(sorted(analytic_spectrum(p)), s.eigenvalues) < 1e-9);

        const Complex trace_expected = Complex(p.Delta, -p.gamma0);
        const Complex trace_actual = s.eigenvalues[0] + s.eigenvalues[1] + s.eigenvalues[2];
        CHECK(std::abs(trace_actual - trace_expected) < 1e-10);
    }
}

TEST_CASE("biorthogonality and reconstruction over random draws") {
    oracle::Sampler sampler(41);
    for (int n = 0; n < 2000; ++n) {
        const SystemParams p = sampler.params();
        if (std::abs(exceptional_distance(p)) <= 1e-6) continue;
        Spectrum s;
        try {
            s = numeric_spectrum(build_hamiltonian(p));
        } catch (const ExceptionalPointError&) {
            continue;
        }
        if (s.condition >= 1e6) continue;

        double bio = 0.0;
        for (int r = 0; r < 3; ++r) {
            for (int c = 0; c < 3; ++c) {
                bio = std::max(bio, std::abs((s.left.row(r) * s.right.col(c))(0) -
                                             Complex(r == c ? 1.0 : 0.0)));
            }
        }
        CHECK(bio < 1e-10);

        Mat3 recon = Mat3::Zero();
        for (int r = 0; r < 3; ++r) {
            recon += s.eigenvalues[r] * s.right.col(r) * s.left.row(r);
        }
        CHECK((recon - build_hamiltonian(p).h).cwiseAbs().maxCoeff() < 1e-9);
    }
}

TEST_CASE("classify_modes") {
    const auto df = numeric_spectrum(build_hamiltonian(SystemParams{1.0, 0.1, 0.0, kPi}));
    const auto df_modes = classify_modes(df, 1e-9);
    int dark = 0;
    for (const auto& m : df_modes) {
        if (m.is_dark) ++dark;
        if (!m.is_dark) CHECK(m.gamma == doctest::Approx(1.0).epsilon(1e-10));
    }
    CHECK(dark == 2);

    // phi = 0: only the antisymmetric mode is dark
    const auto zero = numeric_spectrum(build_hamiltonian(SystemParams{1.0, 0.1, 0.0, 0.0}));
    const auto zero_modes = classify_modes(zero, 1e-9);
    dark = 0;
    for (const auto& m : zero_modes) dark += m.is_dark ? 1 : 0;
    CHECK(dark == 1);

    const auto generic =
        numeric_spectrum(build_hamiltonian(SystemParams{1.0, 0.1, 0.2, 0.3 * kPi}));
    dark = 0;
    for (const auto& m : classify_modes(generic, 1e-6)) dark += m.is_dark ? 1 : 0;
    CHECK(dark == 0);
}

TEST_CASE("label_modes attaches analytic labels") {
    const SystemParams p{1.0, 0.1, 0.0, kPi};
    const auto s = numeric_spectrum(build_hamiltonian(p));
    const auto labels = label_modes(s, p);
    CHECK(labels[0] == ModeLabel::Minus);
    CHECK(labels[1] == ModeLabel::Zero);
    CHECK(labels[2] == ModeLabel::Plus);
}

TEST_CASE("principal branch keeps eps_pm continuous across Delta = 0 at phi = pi") {
    // Gamma^2 > 0 on this line; both branches of eps_pm must vary smoothly
    std::array<Complex, 3> prev{};
    bool first = true;
    for (double delta = -0.2; delta <= 0.2 + 1e-12; delta += 0.005) {
        const auto eig = analytic_spectrum(SystemParams{1.0, 0.1, delta, kPi});
        if (!first) {
            CHECK(std::abs(eig[1] - prev[1]) < 0.02);
            CHECK(std::abs(eig[2] - prev[2]) < 0.02);
        }
        prev = eig;
        first = false;
    }
}
