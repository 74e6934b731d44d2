#ifndef CGOK_PAIRING_HPP
#define CGOK_PAIRING_HPP

#include <cmath>
#include <functional>
#include <vector>

#include "cgok/kahler.hpp"
#include "cgok/morse.hpp"
#include "cgok/quadrature.hpp"

namespace cgok {

/// CGO pair u1 = e^{Phi/h} a, u2 = conj(e^{-Phi/h} a). u1 is holomorphic and
/// u2 antiholomorphic, so both are harmonic for any Kahler potential, and
/// pointwise u1 u2 = e^{2i Im(Phi)/h} |a|^2.
struct CGOPair {
    Phase phase;
    Amplitude amplitude;
    double h = 0.1;

    CGOPair() = default;
    CGOPair(Phase ph, Amplitude a, double h_) : phase(std::move(ph)), amplitude(std::move(a)), h(h_) {
        if (h <= 0) throw Error("CGOPair: h must be > 0");
    }

    Complex u1(const CPoint& z) const {
        return std::exp(phase.phi.eval(z) / h) * amplitude.eval(z);
    }
    Complex u2(const CPoint& z) const {
        return std::conj(std::exp(-phase.phi.eval(z) / h) * amplitude.eval(z));
    }
};

/// Tensor Gauss-Legendre specification with an oscillation guard: the
/// effective nodes per axis (panels * order) must be at least
/// guard_factor * (max |grad Im Phi| * extent) / (pi h). With auto_panels the
/// panel count is raised per axis to satisfy the guard; otherwise a violation
/// throws OscillationError.
struct QuadratureSpec {
    int panels = 4;
    int order = 10;
    double guard_factor = 6.0;
    bool auto_panels = true;

    int effective_nodes() const { return panels * order; }
};

struct PairingResult {
    double h = 0;
    Complex value{0, 0};
    std::int64_t nodes = 0;
    double err_estimate = 0;
};

namespace detail {

/// max ||grad_z Phi|| over a lattice on the box; for holomorphic Phi this
/// equals max ||grad Im Phi|| in real coordinates.
inline double max_phase_gradient(const GradSystem& sys, const std::vector<Interval>& axes) {
    const int n = sys.n;
    const int k = 7;
    std::vector<std::size_t> idx(2 * n, 0);
    double best = 0;
    while (true) {
        CPoint z(n);
        for (int j = 0; j < n; ++j) {
            const Interval& ax = axes[2 * j];
            const Interval& ay = axes[2 * j + 1];
            double tx = k == 1 ? 0.5 : static_cast<double>(idx[2 * j]) / (k - 1);
            double ty = k == 1 ? 0.5 : static_cast<double>(idx[2 * j + 1]) / (k - 1);
            z[j] = Complex(ax.lo + ax.length() * tx, ay.lo + ay.length() * ty);
        }
        best = std::max(best, sys.gradient(z).norm());
        int ax = 2 * n - 1;
        while (ax >= 0 && ++idx[ax] == static_cast<std::size_t>(k)) idx[ax--] = 0;
        if (ax < 0) break;
    }
    return 1.05 * best; // lattice maximum, small safety factor
}

/// Closed-form volume density per built-in potential; falls back to the
/// generic determinant route for custom potentials.
inline std::function<double(const CPoint&)> density_evaluator(const KahlerPotential& F) {
    const int n = F.dim();
    switch (F.kind()) {
        case PotentialKind::Euclidean:
            return [](const CPoint&) { return 1.0; };
        case PotentialKind::FubiniStudy: {
            double c = F.scale();
            double cn = std::pow(c, n) * std::ldexp(1.0, n); // 2^n c^n
            return [cn, n](const CPoint& z) {
                double s = 0;
                for (const auto& w : z) s += std::norm(w);
                return cn / std::pow(1.0 + s, n + 1);
            };
        }
        default:
            return [&F](const CPoint& z) { return volume_density(F, z); };
    }
}

struct TensorIntegrator {
    std::vector<PanelRule> rules; // one per real axis, x1, y1, x2, y2, ...
    int n = 0;

    std::int64_t nodes() const {
        std::int64_t t = 1;
        for (const auto& r : rules) t *= static_cast<std::int64_t>(r.size());
        return t;
    }

    /// Depth-first evaluation with pairwise reduction at every axis level;
    /// the association tree is fixed by the rule sizes alone.
    template <typename Leaf>
    Complex integrate(Leaf&& leaf) const {
        CPoint z(n);
        return recurse(0, z, leaf);
    }

private:
    template <typename Leaf>
    Complex recurse(int axis, CPoint& z, Leaf&& leaf) const {
        const PanelRule& r = rules[axis];
        std::vector<Complex> vals(r.size());
        const bool im_part = (axis % 2) == 1;
        const int coord = axis / 2;
        for (std::size_t i = 0; i < r.size(); ++i) {
            if (im_part)
                z[coord] = Complex(z[coord].real(), r.x[i]);
            else
                z[coord] = Complex(r.x[i], z[coord].imag());
            Complex v = (axis + 1 == 2 * n) ? leaf(z) : recurse(axis + 1, z, leaf);
            vals[i] = r.w[i] * v;
        }
        return pairwise_sum(std::span<const Complex>(vals));
    }
};

} // namespace detail

/// Oscillatory pairing integral
///   I(h) = int f(z) e^{2i Im Phi(z)/h} |a(z)|^2 rho(z) dL(z)
/// over the domain's bounding box intersected with the support box of f.
/// Preconditions enforced: the oscillation guard for this h, and f negligible
/// (<= 1e-14 ||f||_inf) within delta of the domain boundary, the discrete
/// stand-in for vanishing to infinite order at dM.
inline PairingResult pairing_integral(const SmoothField& f, const CGOPair& pair,
                                      const KahlerPotential& F, const DomainBox& dom,
                                      const QuadratureSpec& q) {
    const int n = dom.dim();
    if (f.dim != n || pair.phase.phi.dim() != n || F.dim() != n)
        throw DimensionError("pairing_integral: dimension mismatch");
    if (!f.support.empty() && static_cast<int>(f.support.size()) != 2 * n)
        throw DimensionError("pairing_integral: support box must have 2n axes");

    // --- collar check on the experiment domain --------------------------------
    {
        const int k = 9;
        std::vector<std::size_t> idx(2 * n, 0);
        double collar_max = 0, f_max = 0;
        while (true) {
            CPoint z(n);
            for (int j = 0; j < n; ++j) {
                Interval ax = dom.real_axis(j), ay = dom.imag_axis(j);
                z[j] = Complex(ax.lo + ax.length() * idx[2 * j] / (k - 1),
                               ay.lo + ay.length() * idx[2 * j + 1] / (k - 1));
            }
            double v = std::abs(f.value(z));
            f_max = std::max(f_max, v);
            if (dom.margin(z) < dom.delta()) collar_max = std::max(collar_max, v);
            int ax = 2 * n - 1;
            while (ax >= 0 && ++idx[ax] == static_cast<std::size_t>(k)) idx[ax--] = 0;
            if (ax < 0) break;
        }
        if (f_max > 0 && collar_max > 1e-14 * f_max)
            throw ConfigError("pairing_integral: f is not negligible in the boundary collar");
    }

    // --- integration box -------------------------------------------------------
    std::vector<Interval> box(2 * n);
    for (int j = 0; j < n; ++j) {
        box[2 * j] = dom.real_axis(j);
        box[2 * j + 1] = dom.imag_axis(j);
    }
    if (!f.support.empty()) {
        for (int a = 0; a < 2 * n; ++a) {
            box[a].lo = std::max(box[a].lo, f.support[a].lo);
            box[a].hi = std::min(box[a].hi, f.support[a].hi);
            if (box[a].lo >= box[a].hi) return {pair.h, Complex(0, 0), 0, 0.0};
        }
    }

    // --- oscillation guard ------------------------------------------------------
    detail::GradSystem sys(pair.phase.phi);
    double grad_max = detail::max_phase_gradient(sys, box);
    std::vector<int> panels(2 * n, q.panels);
    for (int a = 0; a < 2 * n; ++a) {
        double required = q.guard_factor * grad_max * box[a].length() / (M_PI * pair.h);
        int need = static_cast<int>(std::ceil(required));
        if (q.auto_panels) {
            panels[a] = std::max(q.panels, (need + q.order - 1) / q.order);
        } else if (q.effective_nodes() < need) {
            std::ostringstream os;
            os << "pairing_integral: oscillation guard violated at h=" << pair.h << " (need "
               << need << " nodes/axis, have " << q.effective_nodes() << ")";
            throw OscillationError(os.str());
        }
    }

    FlatPoly phi(pair.phase.phi);
    auto rho = detail::density_evaluator(F);
    const Amplitude& amp = pair.amplitude;
    const double inv_h = 1.0 / pair.h;
    auto leaf = [&](const CPoint& z) -> Complex {
        Complex fv = f.value(z);
        if (fv == Complex(0)) return Complex(0, 0);
        double im_phi = phi.eval(z).imag();
        Complex osc = std::polar(1.0, 2.0 * im_phi * inv_h);
        double a2 = std::norm(amp.eval(z));
        return fv * osc * (a2 * rho(z));
    };

    auto make_integrator = [&](const std::vector<int>& pan, int order) {
        detail::TensorIntegrator t;
        t.n = n;
        t.rules.reserve(2 * n);
        for (int a = 0; a < 2 * n; ++a) t.rules.emplace_back(box[a].lo, box[a].hi, pan[a], order);
        return t;
    };

    detail::TensorIntegrator fine = make_integrator(panels, q.order);
    Complex value = fine.integrate(leaf);

    // error estimate against a coarser rule (half the panels, or lower order)
    std::vector<int> coarse_panels(2 * n);
    int coarse_order = q.order;
    bool halved = true;
    for (int a = 0; a < 2 * n; ++a) {
        coarse_panels[a] = std::max(1, panels[a] / 2);
        if (coarse_panels[a] == panels[a]) halved = false;
    }
    if (!halved) coarse_order = std::max(2, q.order - 2);
    detail::TensorIntegrator coarse = make_integrator(coarse_panels, coarse_order);
    Complex value_coarse = coarse.integrate(leaf);

    PairingResult r;
    r.h = pair.h;
    r.value = value;
    r.nodes = fine.nodes();
    r.err_estimate = std::abs(value - value_coarse);
    return r;
}

/// Leading stationary-phase term at the critical point p:
///   C(p) f_p h^n e^{2i Im Phi(p)/h},   C(p) = pi^n |det Q(p)|^{-1} |a(p)|^2 rho(p).
/// Uses |det D^2(2 Im Phi)(p)| = 4^n |det Q(p)|^2 and signature 0, both of
/// which are asserted rather than assumed.
inline Complex stationary_phase_predict(Complex f_p, const Phase& phase, const Amplitude& a,
                                        const KahlerPotential& F, const CPoint& p, double h,
                                        double det_tol = 1e-12) {
    const int n = phase.phi.dim();
    Eigen::MatrixXcd q = hol_hessian(phase.phi, p);
    double abs_det = std::abs(q.determinant());
    if (abs_det < det_tol)
        throw DegenerateError("stationary_phase_predict: |det Q| below tolerance");
    auto [pos, neg] = inertia(real_hessian_of_part(phase.phi, Part::Im, p));
    if (pos != n || neg != n)
        throw DegenerateError("stationary_phase_predict: Im(Phi) does not have signature 0 at p");
    double c = std::pow(M_PI, n) / abs_det * std::norm(a.eval(p)) * volume_density(F, p);
    double im_phi = phase.phi.eval(p).imag();
    return c * f_p * std::pow(h, n) * std::polar(1.0, 2.0 * im_phi / h);
}

struct Recovery {
    Complex f_hat{0, 0};
    double fit_residual = 0;   // RMS residual of the demodulated fit, in units of h^n
    double order_estimate = 0; // empirical slope of log|y| vs log h
    Complex c1{0, 0}, c2{0, 0};
    double condition = 0;
    std::vector<PairingResult> table;
};

/// Pointwise recovery by h-extrapolation: demodulate I(h) by
/// e^{-2i Im Phi(p')/h}, fit c1 h^n + c2 h^{n+1} by least squares weighted by
/// h^{-(n+1)}, and divide the leading coefficient by
/// C0 = pi^n |det Q(p')|^{-1} |a(p')|^2 rho(p'). The recovered value is
/// attributed to the certified anchor p'.
inline Recovery recover_point_value(const SmoothField& f, const Phase& phase, const Amplitude& a,
                                    const KahlerPotential& F, const DomainBox& dom,
                                    const std::vector<double>& h_schedule,
                                    const QuadratureSpec& q) {
    const int n = phase.phi.dim();
    const CPoint& anchor = phase.anchor;
    if (h_schedule.size() < 3)
        throw ConfigError("recover_point_value: need at least 3 h values");
    for (std::size_t k = 0; k < h_schedule.size(); ++k) {
        if (h_schedule[k] <= 0)
            throw ConfigError("recover_point_value: h values must be positive");
        if (k > 0 && h_schedule[k] >= h_schedule[k - 1])
            throw ConfigError("recover_point_value: h_schedule must be strictly decreasing");
    }

    Eigen::MatrixXcd qh = hol_hessian(phase.phi, anchor);
    double abs_det = std::abs(qh.determinant());
    if (abs_det < 1e-12)
        throw DegenerateError("recover_point_value: degenerate Hessian at anchor");
    auto [pos, neg] = inertia(real_hessian_of_part(phase.phi, Part::Im, anchor));
    if (pos != n || neg != n)
        throw DegenerateError("recover_point_value: Im(Phi) signature is not 0 at anchor");

    const double im_phi_p = phase.phi.eval(anchor).imag();
    const std::size_t m = h_schedule.size();

    Recovery out;
    out.table.reserve(m);
    Eigen::VectorXcd y(m);
    for (std::size_t k = 0; k < m; ++k) {
        CGOPair pair(phase, a, h_schedule[k]);
        PairingResult pr = pairing_integral(f, pair, F, dom, q);
        out.table.push_back(pr);
        y(k) = pr.value * std::polar(1.0, -2.0 * im_phi_p / h_schedule[k]);
    }

    // weighted least squares for y = c1 h^n + c2 h^{n+1}
    Eigen::MatrixXd A(m, 2);
    Eigen::VectorXd wts(m);
    for (std::size_t k = 0; k < m; ++k) {
        double h = h_schedule[k];
        A(k, 0) = std::pow(h, n);
        A(k, 1) = std::pow(h, n + 1);
        wts(k) = std::pow(h, -(n + 1));
    }
    Eigen::MatrixXd Aw = wts.asDiagonal() * A;
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(Aw);
    double cond = svd.singularValues()(0) / svd.singularValues()(1);
    out.condition = cond;
    if (!(cond < 1e8)) {
        std::ostringstream os;
        os << "recover_point_value: ill-conditioned fit (cond = " << cond << ")";
        throw FitError(os.str());
    }
    Eigen::Matrix2d N = Aw.transpose() * Aw;
    Eigen::VectorXcd yw = wts.asDiagonal() * y;
    Eigen::Vector2cd b = Aw.transpose().cast<Complex>() * yw;
    Eigen::Matrix2d Ninv = N.inverse();
    Eigen::Vector2cd c = Ninv.cast<Complex>() * b;
    out.c1 = c(0);
    out.c2 = c(1);

    double res2 = 0;
    for (std::size_t k = 0; k < m; ++k) {
        Complex pred = c(0) * A(k, 0) + c(1) * A(k, 1);
        res2 += std::norm((y(k) - pred) / A(k, 0));
    }
    out.fit_residual = std::sqrt(res2 / m);

    // empirical convergence order: slope of log|y| against log h
    {
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        int cnt = 0;
        for (std::size_t k = 0; k < m; ++k) {
            double ay = std::abs(y(k));
            if (ay <= 0) continue;
            double lx = std::log(h_schedule[k]), ly = std::log(ay);
            sx += lx;
            sy += ly;
            sxx += lx * lx;
            sxy += lx * ly;
            ++cnt;
        }
        if (cnt >= 2 && cnt * sxx - sx * sx > 0)
            out.order_estimate = (cnt * sxy - sx * sy) / (cnt * sxx - sx * sx);
    }

    double c0 = std::pow(M_PI, n) / abs_det * std::norm(a.eval(anchor)) * volume_density(F, anchor);
    out.f_hat = c(0) / c0;
    return out;
}

} // namespace cgok

#endif // CGOK_PAIRING_HPP
