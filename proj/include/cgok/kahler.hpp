#ifndef CGOK_KAHLER_HPP
#define CGOK_KAHLER_HPP

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "cgok/errors.hpp"
#include "cgok/hessian.hpp"
#include "cgok/holo_poly.hpp"
#include "cgok/mixed_poly.hpp"
#include "cgok/rng.hpp"

namespace cgok {

// ---------------------------------------------------------------------------
// Kahler potential
//
// Conventions (fixed for the whole library, chosen so that F = |z|^2/2 gives
// the Euclidean metric, Lebesgue volume and the flat positive Laplacian):
//   H_{j kbar}(z) = d^2 F / dz_j dzbar_k          (Hermitian, positive definite)
//   real metric   = 2 Re(H dz (x) dzbar)
//   rho(z)        = 2^n det H(z)                  (volume density vs Lebesgue)
//   Delta_g u     = -2 sum_{jk} (H^{-1})_{kj} d^2 u / dz_j dzbar_k
// ---------------------------------------------------------------------------

enum class PotentialKind { Euclidean, FubiniStudy, Custom };

class KahlerPotential {
public:
    using ValueFn = std::function<double(const CPoint&)>;
    using HessFn = std::function<Eigen::MatrixXcd(const CPoint&)>;

    /// F = |z|^2 / 2, H = I/2.
    static KahlerPotential euclidean(int n) {
        KahlerPotential p;
        p.kind_ = PotentialKind::Euclidean;
        p.n_ = n;
        p.scale_ = 1.0;
        return p;
    }

    /// Fubini-Study chart potential F = c log(1 + |z|^2),
    /// H_{j kbar} = c ((1+|z|^2) delta_{jk} - zbar_j z_k) / (1+|z|^2)^2.
    static KahlerPotential fubini_study(int n, double scale = 1.0) {
        if (scale <= 0) throw PotentialError("fubini-study: scale must be > 0");
        KahlerPotential p;
        p.kind_ = PotentialKind::FubiniStudy;
        p.n_ = n;
        p.scale_ = scale;
        return p;
    }

    static KahlerPotential custom(int n, ValueFn value, HessFn hess) {
        KahlerPotential p;
        p.kind_ = PotentialKind::Custom;
        p.n_ = n;
        p.scale_ = 1.0;
        p.value_ = std::move(value);
        p.hess_ = std::move(hess);
        return p;
    }

    /// Config-facing factory: name in {"euclidean", "fubini-study"}.
    static KahlerPotential from_name(const std::string& name, int n, double scale = 1.0) {
        if (name == "euclidean") return euclidean(n);
        if (name == "fubini-study") return fubini_study(n, scale);
        throw ConfigError("unknown potential '" + name + "' (expected euclidean|fubini-study)");
    }

    PotentialKind kind() const { return kind_; }
    int dim() const { return n_; }
    double scale() const { return scale_; }

    std::string name() const {
        switch (kind_) {
            case PotentialKind::Euclidean: return "euclidean";
            case PotentialKind::FubiniStudy: return "fubini-study";
            default: return "custom";
        }
    }

    double value(const CPoint& z) const {
        check(z);
        switch (kind_) {
            case PotentialKind::Euclidean: {
                double s = 0;
                for (const auto& c : z) s += std::norm(c);
                return 0.5 * s;
            }
            case PotentialKind::FubiniStudy: {
                double s = 0;
                for (const auto& c : z) s += std::norm(c);
                return scale_ * std::log1p(s);
            }
            default:
                return value_(z);
        }
    }

    /// Analytic mixed Hessian H_{j kbar}(z).
    Eigen::MatrixXcd mixed_hessian(const CPoint& z) const {
        check(z);
        switch (kind_) {
            case PotentialKind::Euclidean:
                return 0.5 * Eigen::MatrixXcd::Identity(n_, n_);
            case PotentialKind::FubiniStudy: {
                double s = 0;
                for (const auto& c : z) s += std::norm(c);
                double d = 1.0 + s;
                Eigen::MatrixXcd h(n_, n_);
                for (int j = 0; j < n_; ++j)
                    for (int k = 0; k < n_; ++k) {
                        Complex v = (j == k ? Complex(d) : Complex(0)) - std::conj(z[j]) * z[k];
                        h(j, k) = scale_ * v / (d * d);
                    }
                return h;
            }
            default:
                return hess_(z);
        }
    }

private:
    void check(const CPoint& z) const {
        if (static_cast<int>(z.size()) != n_)
            throw DimensionError("KahlerPotential: point dimension mismatch");
    }

    PotentialKind kind_ = PotentialKind::Euclidean;
    int n_ = 1;
    double scale_ = 1.0;
    ValueFn value_;
    HessFn hess_;
};

// ---------------------------------------------------------------------------
// Domain
// ---------------------------------------------------------------------------

struct Interval {
    double lo = 0, hi = 0;
    double length() const { return hi - lo; }
    double mid() const { return 0.5 * (lo + hi); }
};

/// Product domain: in each z_j-plane a closed disk or square, with an interior
/// margin delta. Target points must keep distance >= delta from the boundary.
class DomainBox {
public:
    struct CoordRegion {
        enum Kind { Disk, Square } kind = Disk;
        Complex center{0, 0};
        double radius = 1.0; // disk radius or square half-width
    };

    DomainBox() = default;

    static DomainBox polydisk(int n, double radius, double delta, Complex center = {0, 0}) {
        DomainBox d;
        d.regions_.assign(n, CoordRegion{CoordRegion::Disk, center, radius});
        d.delta_ = delta;
        d.validate();
        return d;
    }

    static DomainBox polysquare(int n, double halfwidth, double delta, Complex center = {0, 0}) {
        DomainBox d;
        d.regions_.assign(n, CoordRegion{CoordRegion::Square, center, halfwidth});
        d.delta_ = delta;
        d.validate();
        return d;
    }

    int dim() const { return static_cast<int>(regions_.size()); }
    double delta() const { return delta_; }
    const std::vector<CoordRegion>& regions() const { return regions_; }

    /// Signed distance of coordinate j to its region boundary (positive inside).
    double coord_margin(int j, Complex zj) const {
        const auto& r = regions_[j];
        Complex w = zj - r.center;
        if (r.kind == CoordRegion::Disk) return r.radius - std::abs(w);
        return std::min(r.radius - std::abs(w.real()), r.radius - std::abs(w.imag()));
    }

    /// Minimum over coordinates of the boundary margin.
    double margin(const CPoint& z) const {
        check(z);
        double m = std::numeric_limits<double>::infinity();
        for (int j = 0; j < dim(); ++j) m = std::min(m, coord_margin(j, z[j]));
        return m;
    }

    bool contains(const CPoint& z, double tol = 0.0) const { return margin(z) >= -tol; }
    bool interior(const CPoint& z) const { return margin(z) >= delta_; }

    Interval real_axis(int j) const {
        const auto& r = regions_[j];
        return {r.center.real() - r.radius, r.center.real() + r.radius};
    }
    Interval imag_axis(int j) const {
        const auto& r = regions_[j];
        return {r.center.imag() - r.radius, r.center.imag() + r.radius};
    }

    /// Largest per-axis extent; the length scale for grids and tolerances.
    double max_extent() const {
        double e = 0;
        for (const auto& r : regions_) e = std::max(e, 2.0 * r.radius);
        return e;
    }

    /// Uniform sample from the interior (margin >= delta), by rejection.
    CPoint sample_interior(Rng& rng, int max_tries = 4096) const {
        for (int t = 0; t < max_tries; ++t) {
            CPoint z(dim());
            for (int j = 0; j < dim(); ++j) {
                Interval rx = real_axis(j), ry = imag_axis(j);
                z[j] = Complex(rng.uniform(rx.lo, rx.hi), rng.uniform(ry.lo, ry.hi));
            }
            if (interior(z)) return z;
        }
        throw Error("DomainBox: interior sampling failed (delta too large?)");
    }

private:
    void check(const CPoint& z) const {
        if (static_cast<int>(z.size()) != dim())
            throw DimensionError("DomainBox: point dimension mismatch");
    }
    void validate() const {
        if (regions_.empty()) throw ConfigError("DomainBox: empty domain");
        if (delta_ <= 0) throw ConfigError("DomainBox: delta must be > 0");
        for (const auto& r : regions_)
            if (r.radius <= delta_) throw ConfigError("DomainBox: region smaller than delta");
    }

    std::vector<CoordRegion> regions_;
    double delta_ = 0.1;
};

// ---------------------------------------------------------------------------
// Smooth field
// ---------------------------------------------------------------------------

/// C-infinity function of (z, zbar). Carries the evaluator plus, when known
/// analytically, the mixed Wirtinger Hessian d^2 u / dz_j dzbar_k; otherwise
/// the Hessian falls back to central finite differences of the evaluator.
/// An optional per-real-axis support box lets quadrature skip regions where
/// the field vanishes identically.
struct SmoothField {
    int dim = 0;
    std::function<Complex(const CPoint&)> value;
    std::function<Eigen::MatrixXcd(const CPoint&)> mixed_hessian; // may be empty
    std::vector<Interval> support;                                // empty = everywhere

    static SmoothField from_mixed_poly(const MixedPoly& p) {
        SmoothField f;
        f.dim = p.dim();
        f.value = [p](const CPoint& z) { return p.eval(z); };
        const int n = p.dim();
        std::vector<MixedPoly> hess;
        hess.reserve(n * n);
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k) hess.push_back(p.dz(j).dzbar(k));
        f.mixed_hessian = [hess, n](const CPoint& z) {
            Eigen::MatrixXcd m(n, n);
            for (int j = 0; j < n; ++j)
                for (int k = 0; k < n; ++k) m(j, k) = hess[j * n + k].eval(z);
            return m;
        };
        return f;
    }

    static SmoothField from_holo(const HoloPoly& p) { return from_mixed_poly(MixedPoly::from_holo(p)); }
    static SmoothField re_of(const HoloPoly& p) { return from_mixed_poly(MixedPoly::from_holo(p).re()); }
    static SmoothField im_of(const HoloPoly& p) { return from_mixed_poly(MixedPoly::from_holo(p).im()); }

    static SmoothField numeric(int n, std::function<Complex(const CPoint&)> fn) {
        SmoothField f;
        f.dim = n;
        f.value = std::move(fn);
        return f;
    }

    /// a f + b g (pointwise; support = union of support boxes).
    static SmoothField linear_combination(Complex a, const SmoothField& f,
                                          Complex b, const SmoothField& g) {
        if (f.dim != g.dim) throw DimensionError("SmoothField: dimension mismatch");
        SmoothField r;
        r.dim = f.dim;
        auto fv = f.value, gv = g.value;
        r.value = [a, b, fv, gv](const CPoint& z) { return a * fv(z) + b * gv(z); };
        if (!f.support.empty() && !g.support.empty()) {
            r.support.resize(f.support.size());
            for (std::size_t i = 0; i < f.support.size(); ++i)
                r.support[i] = {std::min(f.support[i].lo, g.support[i].lo),
                                std::max(f.support[i].hi, g.support[i].hi)};
        }
        return r;
    }

    /// Mixed Wirtinger Hessian at z; finite differences with step fd_step when
    /// no analytic Hessian is attached.
    Eigen::MatrixXcd hessian_at(const CPoint& z, double fd_step = 1e-4) const {
        if (mixed_hessian) return mixed_hessian(z);
        const int n = dim;
        Eigen::MatrixXcd m(n, n);
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k) m(j, k) = fd_mixed(z, j, k, fd_step);
        return m;
    }

private:
    Complex second_diff(const CPoint& z, int aj, bool aj_imag, int ak, bool ak_imag, double s) const {
        auto shift = [&](const CPoint& base, int idx, bool im, double d) {
            CPoint w = base;
            w[idx] += im ? Complex(0, d) : Complex(d, 0);
            return w;
        };
        CPoint pp = shift(shift(z, aj, aj_imag, s), ak, ak_imag, s);
        CPoint pm = shift(shift(z, aj, aj_imag, s), ak, ak_imag, -s);
        CPoint mp = shift(shift(z, aj, aj_imag, -s), ak, ak_imag, s);
        CPoint mm = shift(shift(z, aj, aj_imag, -s), ak, ak_imag, -s);
        return (value(pp) - value(pm) - value(mp) + value(mm)) / (4.0 * s * s);
    }

    /// d^2/dz_j dzbar_k = 1/4 [ (d_xj d_xk + d_yj d_yk) + i (d_xj d_yk - d_yj d_xk) ].
    Complex fd_mixed(const CPoint& z, int j, int k, double s) const {
        Complex xx = second_diff(z, j, false, k, false, s);
        Complex yy = second_diff(z, j, true, k, true, s);
        Complex xy = second_diff(z, j, false, k, true, s);
        Complex yx = second_diff(z, j, true, k, false, s);
        return 0.25 * (xx + yy + Complex(0, 1) * (xy - yx));
    }
};

// ---------------------------------------------------------------------------
// Metric, volume, Laplacian
// ---------------------------------------------------------------------------

/// H(z) with the Hermitian positive-definite invariant enforced.
inline Eigen::MatrixXcd metric_matrix(const KahlerPotential& F, const CPoint& z) {
    Eigen::MatrixXcd h = F.mixed_hessian(z);
    double asym = (h - h.adjoint()).norm();
    if (asym > 1e-10 * std::max(1.0, h.norm()))
        throw PotentialError("metric_matrix: mixed Hessian is not Hermitian");
    Eigen::LLT<Eigen::MatrixXcd> llt(0.5 * (h + h.adjoint()));
    if (llt.info() != Eigen::Success)
        throw PotentialError("metric_matrix: mixed Hessian is not positive definite");
    return h;
}

/// rho(z) = 2^n det H(z); the density of dV_g against Lebesgue measure on R^{2n}.
inline double volume_density(const KahlerPotential& F, const CPoint& z) {
    Eigen::MatrixXcd h = metric_matrix(F, z);
    double det = h.determinant().real();
    return std::ldexp(det, F.dim()); // 2^n * det
}

/// Positive Laplace-Beltrami operator on functions:
/// Delta_g u = -2 sum_{jk} (H^{-1})_{kj} d^2 u / dz_j dzbar_k.
inline Complex laplacian(const KahlerPotential& F, const SmoothField& u, const CPoint& z) {
    if (u.dim != F.dim()) throw DimensionError("laplacian: field/potential dimension mismatch");
    Eigen::MatrixXcd h = metric_matrix(F, z);
    Eigen::MatrixXcd hinv = h.inverse();
    Eigen::MatrixXcd uh = u.hessian_at(z);
    Complex tr = 0;
    for (int j = 0; j < F.dim(); ++j)
        for (int k = 0; k < F.dim(); ++k) tr += hinv(k, j) * uh(j, k);
    return -2.0 * tr;
}

/// max_z |Delta_g Re p| + max_z |Delta_g Im p| over the sample set. Both terms
/// vanish identically for holomorphic p (the mixed Hessian polynomials cancel
/// term by term), which is the testable form of harmonicity.
inline double harmonicity_residual(const KahlerPotential& F, const HoloPoly& p,
                                   const std::vector<CPoint>& samples) {
    SmoothField re = SmoothField::re_of(p);
    SmoothField im = SmoothField::im_of(p);
    double mre = 0, mim = 0;
    for (const auto& z : samples) {
        mre = std::max(mre, std::abs(laplacian(F, re, z)));
        mim = std::max(mim, std::abs(laplacian(F, im, z)));
    }
    return mre + mim;
}

} // namespace cgok

#endif // CGOK_KAHLER_HPP
