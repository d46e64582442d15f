#include "trimol/spectral.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>

namespace trimol {

namespace {

const Complex kI{0.0, 1.0};

bool eig_less(Complex a, Complex b) {
    if (a.real() != b.real()) return a.real() < b.real();
    return a.imag() < b.imag();
}

// Deterministic sign fix: the largest-magnitude component gets a non-negative
// real part (tie-break on the imaginary part).
void fix_vector_sign(Vec3& v) {
    int idx = 0;
    double mx = -1.0;
    for (int i = 0; i < 3; ++i) {
        if (std::abs(v[i]) > mx) {
            mx = std::abs(v[i]);
            idx = i;
        }
    }
    const Complex lead = v[idx];
    if (lead.real() < 0.0 || (lead.real() == 0.0 && lead.imag() < 0.0)) {
        v = -v;
    }
}

}  // namespace

EffectiveHamiltonian build_hamiltonian(const SystemParams& p) {
    p.validate();
    const Complex off = -kI * p.gamma0 * std::exp(kI * p.phi) / 2.0;
    Mat3 h;
    h << Complex(0.0, -p.gamma0 / 2.0), off, Complex(p.J),
         off, Complex(0.0, -p.gamma0 / 2.0), Complex(p.J),
         Complex(p.J), Complex(p.J), Complex(p.Delta);
    return EffectiveHamiltonian{h, p};
}

Complex exceptional_distance(const SystemParams& p) {
    const Complex e = std::exp(kI * p.phi);
    const Complex gphase = p.gamma0 * (1.0 + e);
    return 4.0 * (p.Delta * p.Delta + 8.0 * p.J * p.J) -
           gphase * (gphase - 4.0 * kI * p.Delta);
}

std::array<Complex, 3> analytic_spectrum(const SystemParams& p) {
    const Complex e = std::exp(kI * p.phi);
    const Complex eps0 = kI / 2.0 * (e - 1.0) * p.gamma0;
    const Complex gamma_big = std::sqrt(exceptional_distance(p));
    const Complex base = 2.0 * p.Delta - kI * (1.0 + e) * p.gamma0;
    return {eps0, (base + gamma_big) / 4.0, (base - gamma_big) / 4.0};
}

Spectrum numeric_spectrum(const EffectiveHamiltonian& ham, double tol) {
    if (!(tol > 0.0)) {
        throw ValidationError("numeric_spectrum: tol must be > 0");
    }
    const Mat3& h = ham.h;
    const double scale = std::max(h.cwiseAbs().maxCoeff(), 1e-30);
    if (std::abs(h(0, 0) - h(1, 1)) > 1e-12 * scale ||
        std::abs(h(0, 2) - h(1, 2)) > 1e-12 * scale ||
        (h - h.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
        throw ValidationError("numeric_spectrum: matrix is outside the guided-atom "
                              "exchange-symmetric family");
    }

    // The guided atoms enter symmetrically, so h block-diagonalizes exactly in
    // the antisymmetric/symmetric basis: a 1x1 block carrying the antisymmetric
    // mode and a complex-symmetric 2x2 block carrying the remaining pair. Close
    // encounters between the two sectors are diabolic (eigenvectors stay
    // orthogonal), so solving per sector never mixes them; genuine exceptional
    // points live inside the 2x2 block alone.
    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    const Complex eps_anti = h(0, 0) - h(0, 1);
    const Vec3 v_anti(inv_sqrt2, -inv_sqrt2, 0.0);

    // symmetric-sector block [[a, b], [b, c]] in the basis {(e1+e2)/sqrt2, e3}
    const Complex a = h(0, 0) + h(0, 1);
    const Complex b = std::sqrt(2.0) * h(0, 2);
    const Complex c = h(2, 2);
    const Complex mean = (a + c) / 2.0;
    const Complex dev = (a - c) / 2.0;
    const Complex split = std::sqrt(dev * dev + b * b);
    const Complex lam_hi = mean + split;
    const Complex lam_lo = mean - split;

    const auto sector_vector = [&](Complex lam) -> Vec3 {
        // (a - lam) x + b y = 0 has solutions (b, lam - a) and (lam - c, b);
        // pick the better-conditioned one
        Vec2 v2;
        if (std::norm(b) + std::norm(lam - a) >= std::norm(lam - c) + std::norm(b)) {
            v2 << b, lam - a;
        } else {
            v2 << lam - c, b;
        }
        const double n = v2.norm();
        if (n < 1e-300) {
            v2 << 1.0, 0.0;  // block is a multiple of the identity
        } else {
            v2 /= n;
        }
        return Vec3(v2(0) * inv_sqrt2, v2(0) * inv_sqrt2, v2(1));
    };

    std::array<Complex, 3> eig = {eps_anti, lam_hi, lam_lo};
    std::array<Vec3, 3> vectors = {v_anti, sector_vector(lam_hi), sector_vector(lam_lo)};

    std::array<int, 3> order = {0, 1, 2};
    std::sort(order.begin(), order.end(),
              [&](int x, int y) { return eig_less(eig[x], eig[y]); });

    Mat3 right;
    std::array<Complex, 3> sorted_eig;
    for (int k = 0; k < 3; ++k) {
        sorted_eig[k] = eig[order[k]];
        right.col(k) = vectors[order[k]];
    }
    eig = sorted_eig;

    // bilinear normalization v^T v = 1; collapse here signals an exceptional point
    for (int k = 0; k < 3; ++k) {
        Vec3 v = right.col(k);
        const Complex self = v.transpose() * v;
        if (std::abs(self) < tol) {
            throw ExceptionalPointError(
                "numeric_spectrum: bilinear self-product collapsed (defective pair)",
                lam_hi, lam_lo);
        }
        v /= std::sqrt(self);
        fix_vector_sign(v);
        right.col(k) = v;
    }

    Eigen::SelfAdjointEigenSolver<Mat3> gram(right.adjoint() * right);
    const double smin = std::sqrt(std::max(gram.eigenvalues()(0), 0.0));
    const double smax = std::sqrt(std::max(gram.eigenvalues()(2), 0.0));
    const double condition = (smin > 0.0) ? smax / smin : std::numeric_limits<double>::infinity();
    if (condition > 1.0 / tol) {
        throw ExceptionalPointError("numeric_spectrum: eigenvector matrix near-singular",
                                    lam_hi, lam_lo);
    }

    Spectrum s;
    s.eigenvalues = eig;
    s.right = right;
    s.left = right.transpose();
    s.condition = condition;
    return s;
}

std::array<ModeInfo, 3> classify_modes(const Spectrum& s, double dark_tol) {
    std::array<ModeInfo, 3> out;
    for (int k = 0; k < 3; ++k) {
        const Complex e = s.eigenvalues[k];
        out[k] = ModeInfo{e, e.real(), -e.imag(), -e.imag() < dark_tol};
    }
    return out;
}

std::array<ModeLabel, 3> label_modes(const Spectrum& s, const SystemParams& p, double tol) {
    const auto analytic = analytic_spectrum(p);
    const std::array<ModeLabel, 3> labels = {ModeLabel::Zero, ModeLabel::Plus,
                                             ModeLabel::Minus};
    std::array<ModeLabel, 3> out{};
    std::array<bool, 3> used = {false, false, false};
    for (int k = 0; k < 3; ++k) {
        int best = -1;
        double best_dist = std::numeric_limits<double>::infinity();
        for (int j = 0; j < 3; ++j) {
            if (used[j]) continue;
            const double d = std::abs(s.eigenvalues[k] - analytic[j]);
            if (d < best_dist) {
                best_dist = d;
                best = j;
            }
        }
        if (best_dist > tol) {
            throw ValidationError("label_modes: numeric eigenvalue does not match the "
                                  "analytic spectrum within tolerance");
        }
        used[best] = true;
        out[k] = labels[best];
    }
    return out;
}

const char* mode_label_name(ModeLabel label) {
    switch (label) {
        case ModeLabel::Zero: return "eps0";
        case ModeLabel::Plus: return "eps+";
        case ModeLabel::Minus: return "eps-";
    }
    return "?";
}

}  // namespace trimol
