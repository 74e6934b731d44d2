#include <catch2/catch_amalgamated.hpp>

#include "cgok/hessian.hpp"
#include "cgok/holo_poly.hpp"
#include "cgok/rng.hpp"
#include "cgok/verify.hpp"
#include "oracles.hpp"

using namespace cgok;

namespace {

HoloPoly monomial(int dim, std::initializer_list<std::uint32_t> alpha, Complex c = 1.0) {
    HoloPoly p(dim);
    p.set_coeff(MultiIndex(alpha), c);
    return p;
}

} // namespace

TEST_CASE("eval on simple polynomials", "[holo_algebra]") {
    // z1^2 at 1+i
    CHECK(monomial(1, {2}).eval({Complex(1, 1)}) == Complex(0, 2));
    // constants
    CHECK(HoloPoly::constant(3, 1.0).eval({Complex(2, 1), Complex(0, 0), Complex(-1, 5)}) ==
          Complex(1, 0));
    // z1 z2 at (2, 3i)
    CHECK(monomial(2, {1, 1}).eval({Complex(2, 0), Complex(0, 3)}) == Complex(0, 6));
}

TEST_CASE("eval is exact on Gaussian integers", "[holo_algebra]") {
    Rng rng(11);
    for (int trial = 0; trial < 50; ++trial) {
        int n = 1 + static_cast<int>(rng.uniform(0, 2.999));
        HoloPoly p(n);
        // small integer coefficients and exponents
        for (int t = 0; t < 6; ++t) {
            MultiIndex a(n, 0);
            for (int j = 0; j < n; ++j) a[j] = static_cast<std::uint32_t>(rng.uniform(0, 3.999));
            p.add_coeff(a, Complex(std::floor(rng.uniform(-4, 5)), std::floor(rng.uniform(-4, 5))));
        }
        CPoint z(n);
        for (int j = 0; j < n; ++j)
            z[j] = Complex(std::floor(rng.uniform(-3, 4)), std::floor(rng.uniform(-3, 4)));
        // exact integer evaluation with 64-bit Gaussian arithmetic
        long long re = 0, im = 0;
        for (const auto& [a, c] : p.terms()) {
            long long tre = static_cast<long long>(c.real()), tim = static_cast<long long>(c.imag());
            for (int j = 0; j < n; ++j) {
                for (std::uint32_t k = 0; k < a[j]; ++k) {
                    long long zr = static_cast<long long>(z[j].real());
                    long long zi = static_cast<long long>(z[j].imag());
                    long long nre = tre * zr - tim * zi;
                    long long nim = tre * zi + tim * zr;
                    tre = nre;
                    tim = nim;
                }
            }
            re += tre;
            im += tim;
        }
        Complex got = p.eval(z);
        CHECK(got.real() == static_cast<double>(re));
        CHECK(got.imag() == static_cast<double>(im));
    }
}

TEST_CASE("wirtinger gradient", "[holo_algebra]") {
    // d/dz (z^2) = 2z
    auto g = monomial(1, {2}).wirtinger_grad();
    REQUIRE(g.size() == 1);
    CHECK(g[0].coeff({1}) == Complex(2.0));

    // d(z1 z2) = (z2, z1)
    auto g2 = monomial(2, {1, 1}).wirtinger_grad();
    CHECK(g2[0].coeff({0, 1}) == Complex(1.0));
    CHECK(g2[1].coeff({1, 0}) == Complex(1.0));

    // dPhi = 2 sum f_l df_l for Phi = sum f_l^2, as polynomials
    Rng rng(3);
    for (int trial = 0; trial < 10; ++trial) {
        int n = 2;
        std::vector<HoloPoly> charts;
        for (int l = 0; l < n; ++l) {
            HoloPoly f(n);
            for (int t = 0; t < 4; ++t) {
                MultiIndex a(n, 0);
                for (int j = 0; j < n; ++j) a[j] = static_cast<std::uint32_t>(rng.uniform(0, 2.999));
                f.add_coeff(a, rng.cnormal());
            }
            charts.push_back(f);
        }
        HoloPoly phi(n);
        for (const auto& f : charts) phi = phi + f.squared();
        auto grad = phi.wirtinger_grad();
        for (int j = 0; j < n; ++j) {
            HoloPoly expect(n);
            for (const auto& f : charts) expect = expect + (f * f.derivative(j)).scaled(2.0);
            HoloPoly diff = grad[j] - expect;
            CHECK(diff.coeff_norm() <= 1e-12 * std::max(1.0, expect.coeff_norm()));
        }
    }
}

TEST_CASE("mixed derivatives commute", "[holo_algebra]") {
    Rng rng(17);
    for (int trial = 0; trial < 20; ++trial) {
        int n = 2 + (trial % 2);
        HoloPoly p = random_poly(n, 4, rng);
        for (int j = 0; j < n; ++j)
            for (int k = j + 1; k < n; ++k) {
                HoloPoly d1 = p.derivative(j).derivative(k);
                HoloPoly d2 = p.derivative(k).derivative(j);
                CHECK((d1 - d2).is_zero());
            }
    }
}

TEST_CASE("holomorphic Hessian", "[holo_algebra]") {
    // sum z_l^2 -> 2 I at any point
    Rng rng(5);
    for (int n : {1, 2, 3}) {
        HoloPoly p(n);
        for (int j = 0; j < n; ++j) {
            MultiIndex a(n, 0);
            a[j] = 2;
            p.add_coeff(a, 1.0);
        }
        CPoint z = random_point(n, 1.0, rng);
        HolHessian q = hol_hessian(p, z);
        CHECK((q - 2.0 * Eigen::MatrixXcd::Identity(n, n)).norm() == 0.0);
    }
    // z1 z2 -> [[0,1],[1,0]]
    HolHessian q2 = hol_hessian(monomial(2, {1, 1}), {Complex(0.3, 1), Complex(-2, 0.1)});
    CHECK(q2(0, 0) == Complex(0));
    CHECK(q2(0, 1) == Complex(1));
    CHECK(q2(1, 0) == Complex(1));
    CHECK(q2(1, 1) == Complex(0));
    // z1^3 at z1 = 1 -> 6
    CHECK(hol_hessian(monomial(1, {3}), {Complex(1, 0)})(0, 0) == Complex(6));
}

TEST_CASE("Hessian symmetry on random polynomials", "[holo_algebra]") {
    Rng rng(23);
    for (int trial = 0; trial < 30; ++trial) {
        int n = 1 + (trial % 3);
        HoloPoly p = random_poly(n, 5, rng);
        CPoint z = random_point(n, 1.2, rng);
        HolHessian q = hol_hessian(p, z);
        CHECK((q - q.transpose()).norm() == 0.0);
    }
}

TEST_CASE("real Hessians of Re and Im parts", "[holo_algebra]") {
    // Im z^2 = 2xy, Re z^2 = x^2 - y^2 at the origin
    HoloPoly z2 = monomial(1, {2});
    RealHessian him = real_hessian_of_part(z2, Part::Im, {Complex(0, 0)});
    CHECK(him(0, 0) == 0.0);
    CHECK(him(0, 1) == 2.0);
    CHECK(him(1, 0) == 2.0);
    CHECK(him(1, 1) == 0.0);
    RealHessian hre = real_hessian_of_part(z2, Part::Re, {Complex(0, 0)});
    CHECK(hre(0, 0) == 2.0);
    CHECK(hre(0, 1) == 0.0);
    CHECK(hre(1, 1) == -2.0);
}

TEST_CASE("real Hessian matches finite differences", "[holo_algebra]") {
    Rng rng(31);
    for (int trial = 0; trial < 10; ++trial) {
        int n = 1 + (trial % 2);
        HoloPoly p = random_poly(n, 3, rng);
        CPoint z = random_point(n, 0.8, rng);
        for (Part part : {Part::Re, Part::Im}) {
            RealHessian got = real_hessian_of_part(p, part, z);
            auto fn = [&](const CPoint& w) {
                Complex v = p.eval(w);
                return part == Part::Re ? v.real() : v.imag();
            };
            Eigen::MatrixXd want = oracles::fd_real_hessian(fn, z, 1e-4);
            CHECK((got - want).cwiseAbs().maxCoeff() <= 1e-6 * std::max(1.0, got.norm()));
        }
    }
}

TEST_CASE("Hessian-lemma identity on random data", "[holo_algebra]") {
    for (int n : {1, 2, 3}) {
        CheckLine line = verify_hessian_identity(n, 100, 1234 + n);
        INFO(line.name << " residual " << line.value);
        CHECK(line.pass);
    }
}

TEST_CASE("determinant transfer between real and holomorphic Hessians", "[holo_algebra]") {
    // |det D^2(Im p)| = |det Q|^2 and |det D^2(2 Im p)| = 4^n |det Q|^2
    Rng rng(41);
    for (int trial = 0; trial < 50; ++trial) {
        int n = 1 + (trial % 2);
        HoloPoly p = random_poly(n, 4, rng);
        CPoint z = random_point(n, 1.0, rng);
        Eigen::MatrixXcd q = hol_hessian(p, z);
        double adet = std::abs(q.determinant());
        double qscale = q.cwiseAbs().maxCoeff();
        if (adet < 1e-3 * std::pow(std::max(qscale, 1e-8), n)) continue;
        RealHessian dv = real_hessian_of_part(p, Part::Im, z);
        CHECK(std::abs(std::abs(dv.determinant()) - adet * adet) <= 1e-8 * adet * adet);
        double lhs = std::abs((2.0 * dv).determinant());
        double rhs = std::pow(4.0, n) * adet * adet;
        CHECK(std::abs(lhs - rhs) <= 1e-8 * rhs);
    }
}

TEST_CASE("nondegeneracy transfers between Q and the real Hessian", "[holo_algebra]") {
    // z1^3 at 0: both degenerate
    HoloPoly cub = monomial(1, {3});
    CHECK(std::abs(hol_hessian(cub, {Complex(0, 0)}).determinant()) == 0.0);
    CHECK(std::abs(real_hessian_of_part(cub, Part::Im, {Complex(0, 0)}).determinant()) == 0.0);
}

TEST_CASE("affine charts", "[holo_algebra]") {
    // center 0, direction e1 -> z1
    HoloPoly c1 = HoloPoly::affine_chart({Complex(0, 0), Complex(0, 0)}, {Complex(1), Complex(0)});
    CHECK(c1.coeff({1, 0}) == Complex(1));
    CHECK(c1.coeff({0, 0}) == Complex(0));

    // vanishes at the center for unit directions
    Rng rng(7);
    for (int trial = 0; trial < 10; ++trial) {
        CPoint p = random_point(2, 2.0, rng);
        for (int j = 0; j < 2; ++j) {
            std::vector<Complex> dir(2, Complex(0));
            dir[j] = 1.0;
            CHECK(HoloPoly::affine_chart(p, dir).eval(p) == Complex(0));
        }
    }

    // center (1, 0), direction (1, 1) -> (z1 - 1) + z2
    HoloPoly c3 = HoloPoly::affine_chart({Complex(1, 0), Complex(0, 0)}, {Complex(1), Complex(1)});
    CHECK(c3.eval({Complex(1, 0), Complex(0, 0)}) == Complex(0));
    CHECK(c3.eval({Complex(2, 0), Complex(3, 0)}) == Complex(4));

    CHECK_THROWS_AS(HoloPoly::affine_chart({Complex(0, 0)}, {Complex(0)}), Error);
}

TEST_CASE("arithmetic is exact on coefficients", "[holo_algebra]") {
    // (z1 + 1)^2 = z1^2 + 2 z1 + 1
    HoloPoly z1 = HoloPoly::coordinate(1, 0);
    HoloPoly s = (z1 + HoloPoly::constant(1, 1.0)).squared();
    CHECK(s.coeff({2}) == Complex(1));
    CHECK(s.coeff({1}) == Complex(2));
    CHECK(s.coeff({0}) == Complex(1));

    // scaling by zero collapses to the zero polynomial (no stored zeros)
    CHECK(s.scaled(0.0).is_zero());
    HoloPoly diff = s - s;
    CHECK(diff.is_zero());
}

TEST_CASE("flat evaluation matches the map-based path bit for bit", "[holo_algebra]") {
    Rng rng(67);
    for (int trial = 0; trial < 20; ++trial) {
        int n = 1 + (trial % 3);
        HoloPoly p = random_poly(n, 5, rng);
        FlatPoly fp(p);
        for (int s = 0; s < 5; ++s) {
            CPoint z = random_point(n, 1.3, rng);
            CHECK(fp.eval(z) == p.eval(z));
        }
    }
}

TEST_CASE("graded-lex term order is canonical", "[holo_algebra]") {
    HoloPoly p(2);
    p.set_coeff({0, 2}, 1.0);
    p.set_coeff({1, 0}, 2.0);
    p.set_coeff({0, 0}, 3.0);
    p.set_coeff({1, 1}, 4.0);
    std::vector<MultiIndex> order;
    for (const auto& [a, c] : p.terms()) order.push_back(a);
    REQUIRE(order.size() == 4);
    CHECK(order[0] == MultiIndex({0, 0}));
    CHECK(order[1] == MultiIndex({1, 0}));
    CHECK(order[2] == MultiIndex({0, 2}));
    CHECK(order[3] == MultiIndex({1, 1}));
}

TEST_CASE("JSON round trip preserves polynomials exactly", "[holo_algebra]") {
    Rng rng(53);
    for (int trial = 0; trial < 20; ++trial) {
        int n = 1 + (trial % 3);
        HoloPoly p = random_poly(n, 4, rng);
        nlohmann::json j = p;
        HoloPoly q = j.get<HoloPoly>();
        CHECK(q.dim() == p.dim());
        CHECK((p - q).is_zero());
        CHECK(j.at("dim") == n);
        CHECK(j.at("terms").is_array());
        if (!j.at("terms").empty()) {
            CHECK(j.at("terms").front().contains("alpha"));
            CHECK(j.at("terms").front().contains("re"));
            CHECK(j.at("terms").front().contains("im"));
        }
    }
}

TEST_CASE("dimension mismatches are rejected", "[holo_algebra]") {
    HoloPoly p = monomial(2, {1, 0});
    CHECK_THROWS_AS(p.eval({Complex(1, 0)}), DimensionError);
    CHECK_THROWS_AS(p + HoloPoly::constant(1, 1.0), DimensionError);
    CHECK_THROWS_AS(hol_hessian(p, {Complex(0, 0)}), DimensionError);
}
