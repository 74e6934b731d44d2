#ifndef CGOK_VERIFY_HPP
#define CGOK_VERIFY_HPP

#include <string>
#include <vector>

#include "cgok/density.hpp"
#include "cgok/pairing.hpp"

namespace cgok {

struct CheckLine {
    std::string name;
    double value = 0;
    double threshold = 0;
    bool pass = false;
};

/// Dense random polynomial of total degree <= maxdeg with standard complex
/// normal coefficients.
inline HoloPoly random_poly(int n, int maxdeg, Rng& rng) {
    HoloPoly p(n);
    MultiIndex a(n, 0);
    // odometer over exponents <= maxdeg, filtered by total degree
    while (true) {
        if (static_cast<int>(total_degree(a)) <= maxdeg) p.set_coeff(a, rng.cnormal());
        int j = n - 1;
        while (j >= 0) {
            if (a[j] < static_cast<std::uint32_t>(maxdeg)) {
                ++a[j];
                break;
            }
            a[j] = 0;
            --j;
        }
        if (j < 0) break;
    }
    return p;
}

/// Random point in the polydisk of the given radius (per coordinate).
inline CPoint random_point(int n, double radius, Rng& rng) {
    CPoint z(n);
    for (int j = 0; j < n; ++j) {
        for (int tries = 0; tries < 64; ++tries) {
            Complex c(rng.uniform(-radius, radius), rng.uniform(-radius, radius));
            if (std::abs(c) <= radius) {
                z[j] = c;
                break;
            }
        }
    }
    return z;
}

/// Harmonicity of Re/Im of random holomorphic polynomials under the analytic
/// Laplacian: the residual must sit at round-off.
inline CheckLine verify_harmonicity(int n, const KahlerPotential& F, int n_polys, int n_points,
                                    int maxdeg, std::uint64_t seed) {
    Rng rng(seed);
    DomainBox dom = DomainBox::polydisk(n, 1.0, 0.1);
    double worst = 0;
    for (int t = 0; t < n_polys; ++t) {
        HoloPoly p = random_poly(n, maxdeg, rng);
        std::vector<CPoint> samples;
        samples.reserve(n_points);
        for (int s = 0; s < n_points; ++s) samples.push_back(dom.sample_interior(rng));
        worst = std::max(worst, harmonicity_residual(F, p, samples));
    }
    return {"harmonicity max |Delta Re/Im u| (" + F.name() + ", n=" + std::to_string(n) + ")",
            worst, 1e-10, worst <= 1e-10};
}

/// The complexified-Hessian identity: (D^2 u + i D^2 v) applied to holomorphic
/// vectors equals sum_jk Q_jk a^j c^k.
inline CheckLine verify_hessian_identity(int n, int count, std::uint64_t seed) {
    Rng rng(seed);
    double worst = 0;
    for (int t = 0; t < count; ++t) {
        HoloPoly p = random_poly(n, 3, rng);
        CPoint z = random_point(n, 1.0, rng);
        Eigen::VectorXcd a(n), c(n);
        for (int j = 0; j < n; ++j) {
            a(j) = rng.cnormal();
            c(j) = rng.cnormal();
        }
        Eigen::MatrixXcd q = hol_hessian(p, z);
        RealHessian du = real_hessian_of_part(p, Part::Re, z);
        RealHessian dv = real_hessian_of_part(p, Part::Im, z);
        Complex lhs = apply_to_holomorphic_vectors(du, a, c) +
                      Complex(0, 1) * apply_to_holomorphic_vectors(dv, a, c);
        Complex rhs = 0;
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k) rhs += q(j, k) * a(j) * c(k);
        double rel = std::abs(lhs - rhs) / std::max(1.0, std::abs(rhs));
        worst = std::max(worst, rel);
    }
    return {"Hessian identity (D2u + i D2v)(a, c) vs sum Q a c (n=" + std::to_string(n) + ")",
            worst, 1e-10, worst <= 1e-10};
}

/// Determinant transfer: |det D^2(2 Im f)| = 4^n |det Q|^2, the relation the
/// stationary-phase constant relies on.
inline CheckLine verify_det_relation(int n, int count, std::uint64_t seed) {
    Rng rng(seed);
    double worst = 0;
    int done = 0;
    while (done < count) {
        HoloPoly p = random_poly(n, 4, rng);
        CPoint z = random_point(n, 1.0, rng);
        Eigen::MatrixXcd q = hol_hessian(p, z);
        double qscale = q.cwiseAbs().maxCoeff();
        double adet = std::abs(q.determinant());
        if (adet < 1e-3 * std::pow(std::max(qscale, 1e-8), n)) continue; // want Morse samples
        RealHessian dv = real_hessian_of_part(p, Part::Im, z);
        double lhs = std::abs((2.0 * dv).determinant());
        double rhs = std::pow(4.0, n) * adet * adet;
        worst = std::max(worst, std::abs(lhs - rhs) / rhs);
        ++done;
    }
    return {"|det D2(2 Im f)| vs 4^n |det Q|^2 (n=" + std::to_string(n) + ")", worst, 1e-8,
            worst <= 1e-8};
}

/// Stationary-phase oracle on the canonical phase sum z_j^2 with a unit
/// amplitude and a centered bump: predicted leading term vs brute-force
/// pairing integral, first-order accuracy (relative error <= 10 h).
inline CheckLine verify_stationary_phase(int n, const KahlerPotential& F, double h) {
    double radius = n == 1 ? 1.0 : 1.35;
    double width = n == 1 ? 0.88 : 1.2;
    DomainBox dom = DomainBox::polydisk(n, radius, 0.1);
    CPoint origin(n, Complex(0, 0));

    std::vector<HoloPoly> charts;
    for (int j = 0; j < n; ++j) charts.push_back(HoloPoly::coordinate(n, j));
    Phase phase = build_phase(origin, charts);
    Amplitude amp = build_amplitude(origin, {});
    TestDensity density = TestDensity::bump(origin, width);

    QuadratureSpec q;
    q.order = 10;
    CGOPair pair(phase, amp, h);
    PairingResult pr = pairing_integral(density.field(), pair, F, dom, q);
    Complex pred = stationary_phase_predict(density.value(origin), phase, amp, F, origin, h);
    double rel = std::abs(pr.value - pred) / std::abs(pred);
    return {"stationary phase oracle (n=" + std::to_string(n) + ", h=" + format_double(h) + ")",
            rel, 10.0 * h, rel <= 10.0 * h};
}

} // namespace cgok

#endif // CGOK_VERIFY_HPP
