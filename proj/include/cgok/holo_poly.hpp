#ifndef CGOK_HOLO_POLY_HPP
#define CGOK_HOLO_POLY_HPP

#include <algorithm>
#include <complex>
#include <cstdint>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "cgok/errors.hpp"

namespace cgok {

using Complex = std::complex<double>;

/// Point z = (z_1, ..., z_n) in C^n, z_j = x_j + i y_j.
using CPoint = std::vector<Complex>;

/// Exponent multi-index alpha in N^n.
using MultiIndex = std::vector<std::uint32_t>;

inline std::uint32_t total_degree(const MultiIndex& a) {
    std::uint32_t d = 0;
    for (auto e : a) d += e;
    return d;
}

/// Canonical term ordering: graded lexicographic (total degree first, then
/// lexicographic). Fixes the summation order of every evaluation.
struct GradedLexLess {
    bool operator()(const MultiIndex& a, const MultiIndex& b) const {
        std::uint32_t da = total_degree(a), db = total_degree(b);
        if (da != db) return da < db;
        return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
    }
};

inline double norm2(const CPoint& a) {
    double s = 0;
    for (const auto& c : a) s += std::norm(c);
    return std::sqrt(s);
}

inline double distance(const CPoint& a, const CPoint& b) {
    double s = 0;
    for (std::size_t j = 0; j < a.size(); ++j) s += std::norm(a[j] - b[j]);
    return std::sqrt(s);
}

/// Holomorphic polynomial on C^n in sparse multi-index form, sum_a c_a z^a.
/// Zero coefficients are never stored; terms iterate in graded-lex order, so
/// every coefficient traversal (evaluation, serialization) is deterministic.
class HoloPoly {
public:
    using TermMap = std::map<MultiIndex, Complex, GradedLexLess>;

    explicit HoloPoly(int dim) : dim_(dim) {
        if (dim < 1) throw DimensionError("HoloPoly: dim must be >= 1");
    }

    static HoloPoly constant(int dim, Complex c) {
        HoloPoly p(dim);
        p.set_coeff(MultiIndex(dim, 0), c);
        return p;
    }

    /// The coordinate function z_j (0-based j).
    static HoloPoly coordinate(int dim, int j) {
        HoloPoly p(dim);
        MultiIndex a(dim, 0);
        a.at(j) = 1;
        p.set_coeff(a, 1.0);
        return p;
    }

    /// Affine chart z -> <z - center, direction> (bilinear, no conjugation).
    static HoloPoly affine_chart(const CPoint& center, const std::vector<Complex>& direction) {
        const int n = static_cast<int>(center.size());
        if (static_cast<int>(direction.size()) != n)
            throw DimensionError("affine_chart: center/direction size mismatch");
        double dnorm = 0;
        for (const auto& d : direction) dnorm += std::norm(d);
        if (dnorm == 0.0) throw Error("affine_chart: zero direction");
        HoloPoly p(n);
        Complex c0 = 0;
        for (int j = 0; j < n; ++j) {
            MultiIndex a(n, 0);
            a[j] = 1;
            p.set_coeff(a, direction[j]);
            c0 -= center[j] * direction[j];
        }
        p.set_coeff(MultiIndex(n, 0), c0);
        return p;
    }

    int dim() const { return dim_; }
    const TermMap& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }

    int degree() const {
        int d = 0;
        for (const auto& [a, c] : terms_) d = std::max<int>(d, total_degree(a));
        return d;
    }

    Complex coeff(const MultiIndex& a) const {
        auto it = terms_.find(a);
        return it == terms_.end() ? Complex(0) : it->second;
    }

    void set_coeff(const MultiIndex& a, Complex c) {
        if (static_cast<int>(a.size()) != dim_)
            throw DimensionError("HoloPoly: multi-index length != dim");
        if (c == Complex(0))
            terms_.erase(a);
        else
            terms_[a] = c;
    }

    void add_coeff(const MultiIndex& a, Complex c) { set_coeff(a, coeff(a) + c); }

    /// Evaluate sum_a c_a z^a. Powers are accumulated by repeated
    /// multiplication and terms summed in graded-lex order, so the result is
    /// reproducible and exact on Gaussian-integer data of moderate size.
    Complex eval(const CPoint& z) const {
        check_point(z);
        // per-coordinate power tables up to the needed degree
        std::vector<std::uint32_t> maxdeg(dim_, 0);
        for (const auto& [a, c] : terms_)
            for (int j = 0; j < dim_; ++j) maxdeg[j] = std::max(maxdeg[j], a[j]);
        std::vector<std::vector<Complex>> pow(dim_);
        for (int j = 0; j < dim_; ++j) {
            pow[j].resize(maxdeg[j] + 1);
            pow[j][0] = 1.0;
            for (std::uint32_t k = 1; k <= maxdeg[j]; ++k) pow[j][k] = pow[j][k - 1] * z[j];
        }
        Complex acc = 0;
        for (const auto& [a, c] : terms_) {
            Complex t = c;
            for (int j = 0; j < dim_; ++j) t *= pow[j][a[j]];
            acc += t;
        }
        return acc;
    }

    /// Wirtinger derivative d/dz_j, exact on coefficients.
    HoloPoly derivative(int j) const {
        HoloPoly q(dim_);
        for (const auto& [a, c] : terms_) {
            if (a[j] == 0) continue;
            MultiIndex b = a;
            b[j] -= 1;
            q.add_coeff(b, c * static_cast<double>(a[j]));
        }
        return q;
    }

    /// Gradient (d p/d z_1, ..., d p/d z_n).
    std::vector<HoloPoly> wirtinger_grad() const {
        std::vector<HoloPoly> g;
        g.reserve(dim_);
        for (int j = 0; j < dim_; ++j) g.push_back(derivative(j));
        return g;
    }

    HoloPoly operator+(const HoloPoly& o) const {
        check_same_dim(o);
        HoloPoly r = *this;
        for (const auto& [a, c] : o.terms_) r.add_coeff(a, c);
        return r;
    }

    HoloPoly operator-(const HoloPoly& o) const {
        check_same_dim(o);
        HoloPoly r = *this;
        for (const auto& [a, c] : o.terms_) r.add_coeff(a, -c);
        return r;
    }

    HoloPoly scaled(Complex s) const {
        HoloPoly r(dim_);
        if (s == Complex(0)) return r;
        for (const auto& [a, c] : terms_) r.set_coeff(a, s * c);
        return r;
    }

    /// Exact coefficient convolution.
    HoloPoly operator*(const HoloPoly& o) const {
        check_same_dim(o);
        HoloPoly r(dim_);
        for (const auto& [a, ca] : terms_) {
            for (const auto& [b, cb] : o.terms_) {
                MultiIndex s(dim_);
                for (int j = 0; j < dim_; ++j) s[j] = a[j] + b[j];
                r.add_coeff(s, ca * cb);
            }
        }
        return r;
    }

    HoloPoly squared() const { return (*this) * (*this); }

    /// l2 norm of the coefficient vector.
    double coeff_norm() const {
        double s = 0;
        for (const auto& [a, c] : terms_) s += std::norm(c);
        return std::sqrt(s);
    }

    std::string to_string() const {
        if (terms_.empty()) return "0";
        std::ostringstream os;
        bool first = true;
        for (const auto& [a, c] : terms_) {
            if (!first) os << " + ";
            first = false;
            os << "(" << c.real() << (c.imag() < 0 ? "" : "+") << c.imag() << "i)";
            for (int j = 0; j < dim_; ++j)
                if (a[j] > 0) os << "*z" << (j + 1) << (a[j] > 1 ? "^" + std::to_string(a[j]) : "");
        }
        return os.str();
    }

    void check_point(const CPoint& z) const {
        if (static_cast<int>(z.size()) != dim_)
            throw DimensionError("HoloPoly: point dimension mismatch");
    }

private:
    void check_same_dim(const HoloPoly& o) const {
        if (o.dim_ != dim_) throw DimensionError("HoloPoly: operand dimension mismatch");
    }

    int dim_;
    TermMap terms_;
};

/// Flattened read-only view for hot loops. Evaluation reproduces
/// HoloPoly::eval bit for bit (same power recurrences, same term order).
struct FlatPoly {
    int dim = 0;
    std::vector<MultiIndex> alpha;
    std::vector<Complex> coeff;
    std::vector<std::uint32_t> maxdeg;
    std::size_t pow_size = 0;

    FlatPoly() = default;

    explicit FlatPoly(const HoloPoly& p) : dim(p.dim()), maxdeg(p.dim(), 0) {
        for (const auto& [a, c] : p.terms()) {
            alpha.push_back(a);
            coeff.push_back(c);
            for (int j = 0; j < dim; ++j) maxdeg[j] = std::max(maxdeg[j], a[j]);
        }
        for (int j = 0; j < dim; ++j) pow_size += maxdeg[j] + 1;
        if (pow_size > kPowCap)
            throw DimensionError("FlatPoly: polynomial too large for flat evaluation");
    }

    static constexpr std::size_t kPowCap = 256;

    Complex eval(const Complex* z) const {
        Complex powbuf[kPowCap];
        Complex acc = 0;
        // power tables, laid out per coordinate
        std::size_t off = 0;
        for (int j = 0; j < dim; ++j) {
            powbuf[off] = 1.0;
            for (std::uint32_t k = 1; k <= maxdeg[j]; ++k) powbuf[off + k] = powbuf[off + k - 1] * z[j];
            off += maxdeg[j] + 1;
        }
        for (std::size_t t = 0; t < alpha.size(); ++t) {
            Complex v = coeff[t];
            std::size_t o = 0;
            for (int j = 0; j < dim; ++j) {
                v *= powbuf[o + alpha[t][j]];
                o += maxdeg[j] + 1;
            }
            acc += v;
        }
        return acc;
    }

    Complex eval(const CPoint& z) const { return eval(z.data()); }
};

// --- JSON serialization -----------------------------------------------------
// {"dim": n, "terms": [{"alpha": [...], "re": .., "im": ..}, ...]}

inline void to_json(nlohmann::json& j, const HoloPoly& p) {
    nlohmann::json terms = nlohmann::json::array();
    for (const auto& [a, c] : p.terms()) {
        terms.push_back({{"alpha", a}, {"re", c.real()}, {"im", c.imag()}});
    }
    j = {{"dim", p.dim()}, {"terms", terms}};
}

inline void from_json(const nlohmann::json& j, HoloPoly& p) {
    p = HoloPoly(j.at("dim").get<int>());
    for (const auto& t : j.at("terms")) {
        MultiIndex a = t.at("alpha").get<MultiIndex>();
        p.add_coeff(a, Complex(t.at("re").get<double>(), t.at("im").get<double>()));
    }
}

} // namespace cgok

#endif // CGOK_HOLO_POLY_HPP
