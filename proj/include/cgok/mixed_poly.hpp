#ifndef CGOK_MIXED_POLY_HPP
#define CGOK_MIXED_POLY_HPP

#include <map>
#include <utility>

#include "cgok/holo_poly.hpp"

namespace cgok {

/// Polynomial in (z, zbar): sum c_{ab} z^a zbar^b. This is the exact carrier
/// for Wirtinger calculus on non-holomorphic fields (|z|^2, Re p, Im p, real
/// polynomial density factors). Derivatives act on coefficients, so identities
/// like d/dzbar (holomorphic) = 0 hold by genuine term cancellation rather
/// than by fiat.
class MixedPoly {
public:
    using Key = std::pair<MultiIndex, MultiIndex>; // (z exponents, zbar exponents)

    struct KeyLess {
        bool operator()(const Key& a, const Key& b) const {
            GradedLexLess less;
            if (less(a.first, b.first)) return true;
            if (less(b.first, a.first)) return false;
            return less(a.second, b.second);
        }
    };

    using TermMap = std::map<Key, Complex, KeyLess>;

    explicit MixedPoly(int dim) : dim_(dim) {
        if (dim < 1) throw DimensionError("MixedPoly: dim must be >= 1");
    }

    static MixedPoly constant(int dim, Complex c) {
        MixedPoly p(dim);
        p.set_coeff(MultiIndex(dim, 0), MultiIndex(dim, 0), c);
        return p;
    }

    static MixedPoly from_holo(const HoloPoly& h) {
        MixedPoly p(h.dim());
        MultiIndex zero(h.dim(), 0);
        for (const auto& [a, c] : h.terms()) p.set_coeff(a, zero, c);
        return p;
    }

    /// |z|^2 = sum_j z_j zbar_j.
    static MixedPoly norm_squared(int dim) {
        MixedPoly p(dim);
        for (int j = 0; j < dim; ++j) {
            MultiIndex a(dim, 0), b(dim, 0);
            a[j] = 1;
            b[j] = 1;
            p.set_coeff(a, b, 1.0);
        }
        return p;
    }

    /// x_j = (z_j + zbar_j)/2.
    static MixedPoly real_coordinate(int dim, int j) {
        MixedPoly p(dim);
        MultiIndex a(dim, 0), b(dim, 0);
        a.at(j) = 1;
        p.set_coeff(a, MultiIndex(dim, 0), 0.5);
        b.at(j) = 1;
        p.set_coeff(MultiIndex(dim, 0), b, 0.5);
        return p;
    }

    /// y_j = (z_j - zbar_j)/(2i).
    static MixedPoly imag_coordinate(int dim, int j) {
        MixedPoly p(dim);
        MultiIndex a(dim, 0), b(dim, 0);
        a.at(j) = 1;
        p.set_coeff(a, MultiIndex(dim, 0), Complex(0, -0.5));
        b.at(j) = 1;
        p.set_coeff(MultiIndex(dim, 0), b, Complex(0, 0.5));
        return p;
    }

    int dim() const { return dim_; }
    const TermMap& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }

    void set_coeff(const MultiIndex& a, const MultiIndex& b, Complex c) {
        if (static_cast<int>(a.size()) != dim_ || static_cast<int>(b.size()) != dim_)
            throw DimensionError("MixedPoly: multi-index length != dim");
        Key k{a, b};
        if (c == Complex(0))
            terms_.erase(k);
        else
            terms_[k] = c;
    }

    void add_coeff(const MultiIndex& a, const MultiIndex& b, Complex c) {
        Key k{a, b};
        auto it = terms_.find(k);
        Complex v = (it == terms_.end() ? Complex(0) : it->second) + c;
        if (v == Complex(0)) {
            if (it != terms_.end()) terms_.erase(it);
        } else {
            terms_[k] = v;
        }
    }

    MixedPoly conjugate() const {
        MixedPoly r(dim_);
        for (const auto& [k, c] : terms_) r.set_coeff(k.second, k.first, std::conj(c));
        return r;
    }

    MixedPoly re() const { return ((*this) + conjugate()).scaled(0.5); }
    MixedPoly im() const { return ((*this) - conjugate()).scaled(Complex(0, -0.5)); }

    MixedPoly operator+(const MixedPoly& o) const {
        check_same_dim(o);
        MixedPoly r = *this;
        for (const auto& [k, c] : o.terms_) r.add_coeff(k.first, k.second, c);
        return r;
    }

    MixedPoly operator-(const MixedPoly& o) const {
        check_same_dim(o);
        MixedPoly r = *this;
        for (const auto& [k, c] : o.terms_) r.add_coeff(k.first, k.second, -c);
        return r;
    }

    MixedPoly scaled(Complex s) const {
        MixedPoly r(dim_);
        if (s == Complex(0)) return r;
        for (const auto& [k, c] : terms_) r.set_coeff(k.first, k.second, s * c);
        return r;
    }

    MixedPoly operator*(const MixedPoly& o) const {
        check_same_dim(o);
        MixedPoly r(dim_);
        for (const auto& [ka, ca] : terms_) {
            for (const auto& [kb, cb] : o.terms_) {
                MultiIndex a(dim_), b(dim_);
                for (int j = 0; j < dim_; ++j) {
                    a[j] = ka.first[j] + kb.first[j];
                    b[j] = ka.second[j] + kb.second[j];
                }
                r.add_coeff(a, b, ca * cb);
            }
        }
        return r;
    }

    /// d/dz_j.
    MixedPoly dz(int j) const {
        MixedPoly r(dim_);
        for (const auto& [k, c] : terms_) {
            if (k.first[j] == 0) continue;
            MultiIndex a = k.first;
            a[j] -= 1;
            r.add_coeff(a, k.second, c * static_cast<double>(k.first[j]));
        }
        return r;
    }

    /// d/dzbar_j.
    MixedPoly dzbar(int j) const {
        MixedPoly r(dim_);
        for (const auto& [k, c] : terms_) {
            if (k.second[j] == 0) continue;
            MultiIndex b = k.second;
            b[j] -= 1;
            r.add_coeff(k.first, b, c * static_cast<double>(k.second[j]));
        }
        return r;
    }

    Complex eval(const CPoint& z) const {
        if (static_cast<int>(z.size()) != dim_)
            throw DimensionError("MixedPoly: point dimension mismatch");
        std::vector<std::uint32_t> mda(dim_, 0), mdb(dim_, 0);
        for (const auto& [k, c] : terms_) {
            for (int j = 0; j < dim_; ++j) {
                mda[j] = std::max(mda[j], k.first[j]);
                mdb[j] = std::max(mdb[j], k.second[j]);
            }
        }
        std::vector<std::vector<Complex>> pa(dim_), pb(dim_);
        for (int j = 0; j < dim_; ++j) {
            pa[j].assign(mda[j] + 1, 1.0);
            pb[j].assign(mdb[j] + 1, 1.0);
            for (std::uint32_t k = 1; k <= mda[j]; ++k) pa[j][k] = pa[j][k - 1] * z[j];
            Complex zb = std::conj(z[j]);
            for (std::uint32_t k = 1; k <= mdb[j]; ++k) pb[j][k] = pb[j][k - 1] * zb;
        }
        Complex acc = 0;
        for (const auto& [k, c] : terms_) {
            Complex t = c;
            for (int j = 0; j < dim_; ++j) t *= pa[j][k.first[j]];
            for (int j = 0; j < dim_; ++j) t *= pb[j][k.second[j]];
            acc += t;
        }
        return acc;
    }

private:
    void check_same_dim(const MixedPoly& o) const {
        if (o.dim_ != dim_) throw DimensionError("MixedPoly: operand dimension mismatch");
    }

    int dim_;
    TermMap terms_;
};

} // namespace cgok

#endif // CGOK_MIXED_POLY_HPP
