#include <catch2/catch_amalgamated.hpp>

#include "cgok/kahler.hpp"
#include "cgok/quadrature.hpp"
#include "cgok/verify.hpp"
#include "oracles.hpp"

using namespace cgok;

TEST_CASE("metric matrix for the built-in potentials", "[kahler]") {
    // Euclidean: H = I/2 everywhere
    KahlerPotential eu = KahlerPotential::euclidean(2);
    Eigen::MatrixXcd h = metric_matrix(eu, {Complex(0.3, -1), Complex(2, 0.5)});
    CHECK((h - 0.5 * Eigen::MatrixXcd::Identity(2, 2)).norm() == 0.0);

    // Fubini-Study, n=1: H(0) = c
    for (double c : {1.0, 2.5}) {
        KahlerPotential fs = KahlerPotential::fubini_study(1, c);
        CHECK(std::abs(metric_matrix(fs, {Complex(0, 0)})(0, 0) - Complex(c)) < 1e-15);
    }
}

TEST_CASE("Fubini-Study metric matches finite differences of the potential", "[kahler]") {
    Rng rng(101);
    KahlerPotential fs = KahlerPotential::fubini_study(2, 1.3);
    for (int trial = 0; trial < 8; ++trial) {
        CPoint z = random_point(2, 0.9, rng);
        Eigen::MatrixXcd got = metric_matrix(fs, z);
        Eigen::MatrixXcd want =
            oracles::fd_mixed_hessian([&](const CPoint& w) { return fs.value(w); }, z, 1e-4);
        CHECK((got - want).cwiseAbs().maxCoeff() <= 1e-6);
    }
}

TEST_CASE("non positive definite potentials are rejected", "[kahler]") {
    KahlerPotential bad = KahlerPotential::custom(
        1, [](const CPoint&) { return 0.0; },
        [](const CPoint&) {
            Eigen::MatrixXcd h(1, 1);
            h(0, 0) = -1.0;
            return h;
        });
    CHECK_THROWS_AS(metric_matrix(bad, {Complex(0, 0)}), PotentialError);

    KahlerPotential sing = KahlerPotential::custom(
        1, [](const CPoint&) { return 0.0; },
        [](const CPoint&) { return Eigen::MatrixXcd::Zero(1, 1); });
    CHECK_THROWS_AS(volume_density(sing, {Complex(0, 0)}), PotentialError);
}

TEST_CASE("volume density conventions", "[kahler]") {
    // Euclidean: rho = 1
    KahlerPotential eu = KahlerPotential::euclidean(2);
    CHECK(volume_density(eu, {Complex(0.2, 0.1), Complex(-1, 1)}) == 1.0);

    // F = |z|^2 doubles the mass of any box relative to Lebesgue
    KahlerPotential dbl = KahlerPotential::custom(
        1, [](const CPoint& z) { return std::norm(z[0]); },
        [](const CPoint&) { return Eigen::MatrixXcd::Identity(1, 1); });
    CHECK(volume_density(dbl, {Complex(0.7, -0.2)}) == 2.0);
    PanelRule rule(-0.5, 0.5, 4, 8);
    double mass = 0;
    for (std::size_t i = 0; i < rule.size(); ++i)
        for (std::size_t k = 0; k < rule.size(); ++k)
            mass += rule.w[i] * rule.w[k] *
                    volume_density(dbl, {Complex(rule.x[i], rule.x[k])});
    CHECK(std::abs(mass - 2.0 * 1.0 * 1.0) < 1e-12); // box area 1, doubled

    // Fubini-Study n=1, c=1 at 0: rho = 2
    KahlerPotential fs = KahlerPotential::fubini_study(1, 1.0);
    CHECK(std::abs(volume_density(fs, {Complex(0, 0)}) - 2.0) < 1e-15);
    // and rho = 2/(1+|z|^2)^2 in general; cross-check against FD of F
    Rng rng(7);
    for (int t = 0; t < 5; ++t) {
        CPoint z = random_point(1, 0.9, rng);
        double want = 2.0 / std::pow(1.0 + std::norm(z[0]), 2);
        CHECK(std::abs(volume_density(fs, z) - want) < 1e-13);
        Eigen::MatrixXcd hfd =
            oracles::fd_mixed_hessian([&](const CPoint& w) { return fs.value(w); }, z, 1e-4);
        CHECK(std::abs(2.0 * hfd(0, 0).real() - want) < 1e-6);
    }
}

TEST_CASE("laplacian on flat space", "[kahler]") {
    KahlerPotential eu = KahlerPotential::euclidean(1);
    // u = x^2: positive Laplacian gives -2
    SmoothField x2 = SmoothField::from_mixed_poly(MixedPoly::real_coordinate(1, 0) *
                                                  MixedPoly::real_coordinate(1, 0));
    CHECK(std::abs(laplacian(eu, x2, {Complex(0.4, -0.7)}) - Complex(-2.0)) < 1e-14);

    // flat consistency with a plain FD Laplacian on a generic smooth field
    SmoothField smooth = SmoothField::numeric(1, [](const CPoint& z) {
        return Complex(std::sin(z[0].real()) * std::exp(0.3 * z[0].imag()), 0);
    });
    Rng rng(5);
    for (int t = 0; t < 5; ++t) {
        CPoint z = random_point(1, 0.8, rng);
        Complex got = laplacian(eu, smooth, z);
        double s = 1e-4;
        auto u = [&](double x, double y) {
            return std::sin(x) * std::exp(0.3 * y);
        };
        double x = z[0].real(), y = z[0].imag();
        double flat = (u(x + s, y) + u(x - s, y) + u(x, y + s) + u(x, y - s) - 4 * u(x, y)) / (s * s);
        CHECK(std::abs(got - Complex(-flat)) < 1e-6);
    }
}

TEST_CASE("holomorphic polynomials are harmonic for any potential", "[kahler]") {
    Rng rng(31);
    KahlerPotential eu = KahlerPotential::euclidean(1);
    DomainBox disk = DomainBox::polydisk(1, 1.0, 0.1);

    // z1^2 on the Euclidean disk: residual is exactly zero
    HoloPoly z2(1);
    z2.set_coeff({2}, 1.0);
    std::vector<CPoint> samples;
    for (int s = 0; s < 100; ++s) samples.push_back(disk.sample_interior(rng));
    CHECK(harmonicity_residual(eu, z2, samples) == 0.0);

    // random degree-5 polynomial under Fubini-Study
    KahlerPotential fs = KahlerPotential::fubini_study(2, 1.0);
    DomainBox bidisk = DomainBox::polydisk(2, 1.0, 0.1);
    for (int trial = 0; trial < 5; ++trial) {
        HoloPoly p = random_poly(2, 5, rng);
        std::vector<CPoint> pts;
        for (int s = 0; s < 100; ++s) pts.push_back(bidisk.sample_interior(rng));
        CHECK(harmonicity_residual(fs, p, pts) <= 1e-10);
    }
}

TEST_CASE("non-holomorphic fields are not harmonic (negative control)", "[kahler]") {
    // |z1|^2 has Delta = -2 tr(H^{-1} E11); stays away from zero
    SmoothField nsq = SmoothField::from_mixed_poly(MixedPoly::norm_squared(1));
    KahlerPotential eu = KahlerPotential::euclidean(1);
    CHECK(std::abs(laplacian(eu, nsq, {Complex(0.3, 0.2)})) >= 1.0);
    KahlerPotential fs = KahlerPotential::fubini_study(1, 1.0);
    CHECK(std::abs(laplacian(fs, nsq, {Complex(0.3, 0.2)})) >= 1.0);
}

TEST_CASE("laplacian matches the divergence-form FD stencil", "[kahler]") {
    // Fubini-Study n=2, u = |z|^2 at random points
    KahlerPotential fs = KahlerPotential::fubini_study(2, 1.0);
    SmoothField nsq = SmoothField::from_mixed_poly(MixedPoly::norm_squared(2));
    Rng rng(77);
    for (int t = 0; t < 4; ++t) {
        CPoint z = random_point(2, 0.7, rng);
        Complex got = laplacian(fs, nsq, z);
        Complex fd = oracles::fd_laplace_beltrami(
            fs, [&](const CPoint& w) { return nsq.value(w); }, z, 1e-3, 1e-4);
        CHECK(std::abs(got - fd) <= 1e-5 * std::max(1.0, std::abs(got)));
    }
}

TEST_CASE("metric is Hermitian positive definite across the domain", "[kahler]") {
    Rng rng(13);
    for (int n : {1, 2, 3}) {
        DomainBox dom = DomainBox::polydisk(n, 1.0, 0.05);
        for (const char* name : {"euclidean", "fubini-study"}) {
            KahlerPotential F = KahlerPotential::from_name(name, n, 1.0);
            double worst_asym = 0, worst_eig = std::numeric_limits<double>::infinity();
            for (int s = 0; s < 1000; ++s) {
                CPoint z = dom.sample_interior(rng);
                Eigen::MatrixXcd h = metric_matrix(F, z);
                worst_asym = std::max(worst_asym, (h - h.adjoint()).norm());
                Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h, Eigen::EigenvaluesOnly);
                worst_eig = std::min(worst_eig, es.eigenvalues().minCoeff());
            }
            CHECK(worst_asym <= 1e-12);
            CHECK(worst_eig > 0.0);
        }
    }
}

TEST_CASE("harmonicity is independent of the potential scaling", "[kahler]") {
    // replacing F by 2F leaves the holomorphic kernel untouched
    KahlerPotential doubled = KahlerPotential::custom(
        1, [](const CPoint& z) { return std::norm(z[0]); },
        [](const CPoint&) { return Eigen::MatrixXcd::Identity(1, 1); });
    Rng rng(3);
    HoloPoly p = random_poly(1, 6, rng);
    SmoothField re = SmoothField::re_of(p);
    for (int t = 0; t < 20; ++t) {
        CPoint z = random_point(1, 0.9, rng);
        CHECK(laplacian(doubled, re, z) == Complex(0));
    }
}

TEST_CASE("smooth field FD hessian fallback agrees with the analytic path", "[kahler]") {
    MixedPoly m = MixedPoly::norm_squared(2) * MixedPoly::real_coordinate(2, 0);
    SmoothField analytic = SmoothField::from_mixed_poly(m);
    SmoothField numeric = SmoothField::numeric(2, [m](const CPoint& z) { return m.eval(z); });
    Rng rng(19);
    for (int t = 0; t < 5; ++t) {
        CPoint z = random_point(2, 0.8, rng);
        Eigen::MatrixXcd a = analytic.hessian_at(z);
        Eigen::MatrixXcd b = numeric.hessian_at(z);
        CHECK((a - b).cwiseAbs().maxCoeff() <= 1e-6);
    }
}

TEST_CASE("domain boxes", "[kahler]") {
    DomainBox disk = DomainBox::polydisk(1, 1.0, 0.1);
    CHECK(disk.contains({Complex(0.99, 0)}));
    CHECK(!disk.contains({Complex(1.01, 0)}));
    CHECK(disk.interior({Complex(0.85, 0)}));
    CHECK(!disk.interior({Complex(0.95, 0)}));
    CHECK(disk.max_extent() == 2.0);

    DomainBox sq = DomainBox::polysquare(2, 1.0, 0.2);
    CHECK(sq.contains({Complex(0.99, -0.99), Complex(0, 0)}));
    CHECK(!sq.interior({Complex(0.85, 0), Complex(0, 0)}));
    CHECK(sq.interior({Complex(0.75, 0), Complex(0, 0)}));

    Rng rng(1);
    for (int t = 0; t < 200; ++t) CHECK(disk.margin(disk.sample_interior(rng)) >= 0.1);

    CHECK_THROWS_AS(DomainBox::polydisk(1, 1.0, 0.0), ConfigError);
    CHECK_THROWS_AS(DomainBox::polydisk(1, 0.05, 0.1), ConfigError);
    CHECK_THROWS_AS(disk.margin({Complex(0, 0), Complex(0, 0)}), DimensionError);
}

TEST_CASE("potential factory validates names", "[kahler]") {
    CHECK(KahlerPotential::from_name("euclidean", 2).kind() == PotentialKind::Euclidean);
    CHECK(KahlerPotential::from_name("fubini-study", 1, 2.0).scale() == 2.0);
    CHECK_THROWS_AS(KahlerPotential::from_name("hyperbolic", 1), ConfigError);
    CHECK_THROWS_AS(KahlerPotential::fubini_study(1, -1.0), PotentialError);
}
