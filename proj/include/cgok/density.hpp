#ifndef CGOK_DENSITY_HPP
#define CGOK_DENSITY_HPP

#include <cctype>
#include <optional>
#include <string>

#include "cgok/kahler.hpp"
#include "cgok/mixed_poly.hpp"

namespace cgok {

/// Synthetic test density: a radial bump, optionally times a real polynomial
/// factor, or the zero density. The bump profile is
///   exp(1 - 1/(1 - r^2)),  r = ||z - center|| / width  (0 for r >= 1),
/// so the density is C-infinity, equals the factor value at the center, and
/// vanishes identically outside the support ball.
class TestDensity {
public:
    enum class Kind { Zero, Bump, BumpPoly };

    static TestDensity zero(int n) {
        TestDensity d;
        d.kind_ = Kind::Zero;
        d.n_ = n;
        return d;
    }

    static TestDensity bump(const CPoint& center, double width) {
        if (width <= 0) throw ConfigError("TestDensity: width must be > 0");
        TestDensity d;
        d.kind_ = Kind::Bump;
        d.n_ = static_cast<int>(center.size());
        d.center_ = center;
        d.width_ = width;
        return d;
    }

    static TestDensity bump_poly(const CPoint& center, double width, MixedPoly factor) {
        TestDensity d = bump(center, width);
        if (factor.dim() != d.n_) throw DimensionError("TestDensity: factor dimension mismatch");
        d.kind_ = Kind::BumpPoly;
        d.factor_ = std::move(factor);
        return d;
    }

    Kind kind() const { return kind_; }
    int dim() const { return n_; }
    double width() const { return width_; }
    const CPoint& center() const { return center_; }

    Complex value(const CPoint& z) const {
        if (kind_ == Kind::Zero) return {0, 0};
        double r2 = 0;
        for (int j = 0; j < n_; ++j) r2 += std::norm(z[j] - center_[j]);
        r2 /= width_ * width_;
        if (r2 >= 1.0) return {0, 0};
        double b = std::exp(1.0 - 1.0 / (1.0 - r2));
        if (kind_ == Kind::Bump) return {b, 0};
        return b * factor_->eval(z);
    }

    /// Support ball must stay >= delta away from the domain boundary; the
    /// per-coordinate projection test is exact for product domains.
    void validate_inside(const DomainBox& dom) const {
        if (kind_ == Kind::Zero) return;
        if (dom.dim() != n_) throw DimensionError("TestDensity: domain dimension mismatch");
        for (int j = 0; j < n_; ++j) {
            const auto& reg = dom.regions()[j];
            Complex off = center_[j] - reg.center;
            double reach = (reg.kind == DomainBox::CoordRegion::Disk)
                               ? std::abs(off) + width_
                               : std::max(std::abs(off.real()), std::abs(off.imag())) + width_;
            if (reach >= reg.radius - dom.delta())
                throw ConfigError("TestDensity: support violates the delta collar");
        }
    }

    /// Field view with the support bounding box attached (quadrature skips the
    /// complement, where the density vanishes identically).
    SmoothField field() const {
        SmoothField f;
        f.dim = n_;
        TestDensity d = *this;
        f.value = [d](const CPoint& z) { return d.value(z); };
        if (kind_ != Kind::Zero) {
            f.support.resize(2 * n_);
            for (int j = 0; j < n_; ++j) {
                f.support[2 * j] = {center_[j].real() - width_, center_[j].real() + width_};
                f.support[2 * j + 1] = {center_[j].imag() - width_, center_[j].imag() + width_};
            }
        }
        return f;
    }

private:
    Kind kind_ = Kind::Zero;
    int n_ = 1;
    CPoint center_;
    double width_ = 1.0;
    std::optional<MixedPoly> factor_;
};

/// Parse a real polynomial factor over x_j, y_j, e.g. "x1", "2.5*x1*y2^2 - y1".
/// Grammar: terms joined by +/-, each term an optional coefficient times
/// variables 'x<k>' or 'y<k>' with optional '^<power>'.
inline MixedPoly parse_poly_factor(const std::string& expr, int n) {
    MixedPoly out(n);
    std::size_t i = 0;
    auto skip_ws = [&] {
        while (i < expr.size() && std::isspace(static_cast<unsigned char>(expr[i]))) ++i;
    };
    skip_ws();
    if (i == expr.size()) throw ConfigError("poly factor: empty expression");
    while (i < expr.size()) {
        double sign = 1.0;
        skip_ws();
        if (expr[i] == '+' || expr[i] == '-') {
            sign = (expr[i] == '-') ? -1.0 : 1.0;
            ++i;
            skip_ws();
        }
        // optional numeric coefficient
        double coeff = 1.0;
        std::size_t start = i;
        while (i < expr.size() &&
               (std::isdigit(static_cast<unsigned char>(expr[i])) || expr[i] == '.' ||
                expr[i] == 'e' || expr[i] == 'E' ||
                ((expr[i] == '+' || expr[i] == '-') && i > start &&
                 (expr[i - 1] == 'e' || expr[i - 1] == 'E'))))
            ++i;
        if (i > start) coeff = std::stod(expr.substr(start, i - start));
        MixedPoly term = MixedPoly::constant(n, sign * coeff);
        // variables
        while (true) {
            skip_ws();
            if (i < expr.size() && expr[i] == '*') {
                ++i;
                skip_ws();
            }
            if (i >= expr.size() || (expr[i] != 'x' && expr[i] != 'y')) break;
            char var = expr[i++];
            std::size_t ds = i;
            while (i < expr.size() && std::isdigit(static_cast<unsigned char>(expr[i]))) ++i;
            if (i == ds) throw ConfigError("poly factor: variable index missing in '" + expr + "'");
            int idx = std::stoi(expr.substr(ds, i - ds));
            if (idx < 1 || idx > n) throw ConfigError("poly factor: variable index out of range");
            int power = 1;
            if (i < expr.size() && expr[i] == '^') {
                ++i;
                std::size_t ps = i;
                while (i < expr.size() && std::isdigit(static_cast<unsigned char>(expr[i]))) ++i;
                if (i == ps) throw ConfigError("poly factor: exponent missing");
                power = std::stoi(expr.substr(ps, i - ps));
            }
            MixedPoly v = (var == 'x') ? MixedPoly::real_coordinate(n, idx - 1)
                                       : MixedPoly::imag_coordinate(n, idx - 1);
            for (int k = 0; k < power; ++k) term = term * v;
        }
        out = out + term;
        skip_ws();
        if (i < expr.size() && expr[i] != '+' && expr[i] != '-')
            throw ConfigError("poly factor: unexpected character '" + std::string(1, expr[i]) +
                              "' in '" + expr + "'");
    }
    return out;
}

} // namespace cgok

#endif // CGOK_DENSITY_HPP
