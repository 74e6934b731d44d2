#ifndef CGOK_MORSE_HPP
#define CGOK_MORSE_HPP

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "cgok/hessian.hpp"
#include "cgok/holo_poly.hpp"
#include "cgok/kahler.hpp"
#include "cgok/rng.hpp"

namespace cgok {

/// Holomorphic phase with a certified critical point. `anchor` is the located
/// critical point nearest the requested one; after construction it satisfies
/// ||dPhi(anchor)|| <= 1e-12.
struct Phase {
    HoloPoly phi;
    CPoint requested_anchor;
    CPoint anchor;
    double epsilon = 0.0;
    std::uint64_t seed = 0;

    Phase() : phi(1) {}
    explicit Phase(HoloPoly p) : phi(std::move(p)) {}
};

struct CriticalPoint {
    CPoint location;
    Eigen::MatrixXcd hol_hess;
    double abs_det = 0.0;
    bool on_boundary = false;
};

struct CriticalSet {
    std::vector<CriticalPoint> points;
    double r_min = 0.0;
    std::vector<std::string> warnings; // coverage warnings, not fatal

    std::size_t size() const { return points.size(); }

    std::vector<CPoint> locations() const {
        std::vector<CPoint> out;
        out.reserve(points.size());
        for (const auto& p : points) out.push_back(p.location);
        return out;
    }

    /// Index of the point nearest z, or -1 when empty.
    int nearest(const CPoint& z) const {
        int best = -1;
        double bd = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < points.size(); ++i) {
            double d = distance(points[i].location, z);
            if (d < bd) {
                bd = d;
                best = static_cast<int>(i);
            }
        }
        return best;
    }
};

inline void to_json(nlohmann::json& j, const CriticalSet& cs) {
    nlohmann::json pts = nlohmann::json::array();
    for (const auto& p : cs.points) {
        nlohmann::json loc = nlohmann::json::array();
        for (const auto& c : p.location) loc.push_back({c.real(), c.imag()});
        pts.push_back({{"z", loc}, {"abs_det_q", p.abs_det}, {"on_boundary", p.on_boundary}});
    }
    j = {{"points", pts}, {"r_min", cs.r_min}, {"warnings", cs.warnings}};
}

// ---------------------------------------------------------------------------
// Newton solver on the holomorphic system dPhi = 0. The Hessian lemma equates
// critical points of Im(Phi) with solutions of the n-dimensional complex
// system, which is half the size of the real gradient system.
// ---------------------------------------------------------------------------

namespace detail {

struct GradSystem {
    std::vector<FlatPoly> grad;      // dPhi/dz_j
    std::vector<FlatPoly> hess;      // d2Phi/dz_j dz_k, row-major upper storage applied full
    int n = 0;
    double scale = 1.0;              // coefficient scale for tolerances

    explicit GradSystem(const HoloPoly& phi) : n(phi.dim()) {
        std::vector<HoloPoly> g = phi.wirtinger_grad();
        double s = 0;
        for (int j = 0; j < n; ++j) {
            grad.emplace_back(g[j]);
            s = std::max(s, g[j].coeff_norm());
            for (int k = 0; k < n; ++k) hess.emplace_back(g[j].derivative(k));
        }
        scale = std::max(1.0, s);
    }

    Eigen::VectorXcd gradient(const CPoint& z) const {
        Eigen::VectorXcd v(n);
        for (int j = 0; j < n; ++j) v(j) = grad[j].eval(z);
        return v;
    }

    Eigen::MatrixXcd jacobian(const CPoint& z) const {
        Eigen::MatrixXcd m(n, n);
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k) m(j, k) = hess[j * n + k].eval(z);
        return m;
    }
};

/// Damped Newton iteration for dPhi(z) = 0 from a single start. Returns the
/// converged root or nullopt. `bound` aborts runs that leave the search region.
inline std::optional<CPoint> newton_root(const GradSystem& sys, CPoint z, double tol,
                                         double bound, int max_iter = 60) {
    const int n = sys.n;
    for (int it = 0; it < max_iter; ++it) {
        Eigen::VectorXcd g = sys.gradient(z);
        double gn = g.norm();
        if (gn <= tol) return z;
        Eigen::MatrixXcd jac = sys.jacobian(z);
        Eigen::PartialPivLU<Eigen::MatrixXcd> lu(jac);
        Eigen::VectorXcd step = lu.solve(g);
        if (!step.allFinite()) return std::nullopt;
        // plain Newton with a simple backtracking safeguard
        double t = 1.0;
        for (int bt = 0; bt < 8; ++bt) {
            CPoint zn(n);
            for (int j = 0; j < n; ++j) zn[j] = z[j] - t * step(j);
            if (sys.gradient(zn).norm() < gn) {
                z = zn;
                break;
            }
            t *= 0.5;
            if (bt == 7) {
                for (int j = 0; j < n; ++j) z[j] -= step(j); // accept full step anyway
            }
        }
        double zn2 = 0;
        for (const auto& c : z) zn2 += std::norm(c);
        if (std::sqrt(zn2) > bound) return std::nullopt;
    }
    // final residual check
    if (sys.gradient(z).norm() <= tol) return z;
    return std::nullopt;
}

} // namespace detail

// ---------------------------------------------------------------------------
// Operations
// ---------------------------------------------------------------------------

/// Phi = sum_l f_l^2 from charts vanishing at p (constants are subtracted
/// automatically). dPhi(p) = 0 exactly on coefficients, and
/// hol_hessian(Phi, p) = 2 J^T J with J the chart Jacobian at p.
inline Phase build_phase(const CPoint& p, std::vector<HoloPoly> charts) {
    const int n = static_cast<int>(p.size());
    if (static_cast<int>(charts.size()) != n)
        throw ChartError("build_phase: need exactly n charts");
    for (auto& f : charts) {
        f.check_point(p);
        Complex fp = f.eval(p);
        if (fp != Complex(0)) f = f - HoloPoly::constant(n, fp);
    }
    // chart Jacobian J_{lj} = d f_l / d z_j (p) must be invertible
    Eigen::MatrixXcd jac(n, n);
    for (int l = 0; l < n; ++l)
        for (int j = 0; j < n; ++j) jac(l, j) = charts[l].derivative(j).eval(p);
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(jac);
    double smin = svd.singularValues()(n - 1);
    double smax = svd.singularValues()(0);
    if (!(smin > 1e-10 * std::max(1.0, smax)))
        throw ChartError("build_phase: chart differentials are linearly dependent at p");

    HoloPoly phi(n);
    for (const auto& f : charts) phi = phi + f.squared();
    Phase ph(phi);
    ph.requested_anchor = p;
    ph.anchor = p;
    return ph;
}

/// Multistart Newton over a rectangular lattice on the domain, deduplicated at
/// radius r_min and classified interior/boundary by the domain margin delta.
inline CriticalSet find_critical_points(const HoloPoly& phi, const DomainBox& dom,
                                        double grid_density = 8.0) {
    if (phi.dim() != dom.dim())
        throw DimensionError("find_critical_points: phase/domain dimension mismatch");
    if (grid_density < 4.0)
        throw Error("find_critical_points: grid_density must be >= 4 nodes per unit length");

    const int n = phi.dim();
    detail::GradSystem sys(phi);
    const double extent = dom.max_extent();
    const double tol = 1e-13 * sys.scale;
    const double r_min = 1e-6 * std::max(1.0, extent);
    const double bound = 8.0 * std::max(1.0, extent);

    // lattice: per real axis, ceil(length * density) + 1 nodes
    std::vector<std::vector<double>> axes(2 * n);
    for (int j = 0; j < n; ++j) {
        Interval rx = dom.real_axis(j), ry = dom.imag_axis(j);
        int kx = static_cast<int>(std::ceil(rx.length() * grid_density)) + 1;
        int ky = static_cast<int>(std::ceil(ry.length() * grid_density)) + 1;
        for (int i = 0; i < kx; ++i) axes[2 * j].push_back(rx.lo + rx.length() * i / (kx - 1));
        for (int i = 0; i < ky; ++i) axes[2 * j + 1].push_back(ry.lo + ry.length() * i / (ky - 1));
    }

    CriticalSet cs;
    cs.r_min = r_min;
    struct FailedStart {
        CPoint z;
        double gnorm;
    };
    std::vector<FailedStart> failed;
    double min_start_res = std::numeric_limits<double>::infinity();

    std::vector<std::size_t> idx(2 * n, 0);
    while (true) {
        CPoint z0(n);
        for (int j = 0; j < n; ++j)
            z0[j] = Complex(axes[2 * j][idx[2 * j]], axes[2 * j + 1][idx[2 * j + 1]]);

        double res0 = sys.gradient(z0).norm();
        min_start_res = std::min(min_start_res, res0);
        auto root = detail::newton_root(sys, z0, tol, bound);
        if (root && dom.contains(*root, 1e-9 * std::max(1.0, extent))) {
            bool dup = false;
            for (const auto& p : cs.points)
                if (distance(p.location, *root) < r_min) {
                    dup = true;
                    break;
                }
            if (!dup) {
                CriticalPoint cp;
                cp.location = *root;
                cp.hol_hess = hol_hessian(phi, *root);
                cp.abs_det = std::abs(cp.hol_hess.determinant());
                cp.on_boundary = !dom.interior(*root);
                cs.points.push_back(std::move(cp));
            }
        } else if (!root) {
            failed.push_back({z0, res0});
        }

        int ax = 2 * n - 1;
        while (ax >= 0 && ++idx[ax] == axes[ax].size()) idx[ax--] = 0;
        if (ax < 0) break;
    }

    // Coverage warning: a start with conspicuously small residual that Newton
    // could not converge from, and no found root nearby, may indicate a missed
    // root cluster.
    for (const auto& f : failed) {
        if (f.gnorm > 50.0 * std::max(min_start_res, tol)) continue;
        bool near_found = false;
        for (const auto& p : cs.points)
            if (distance(p.location, f.z) < 0.5) {
                near_found = true;
                break;
            }
        if (!near_found) {
            std::ostringstream os;
            os << "newton failed from low-residual start (|dPhi|=" << f.gnorm << ")";
            cs.warnings.push_back(os.str());
        }
    }
    return cs;
}

struct CertifyResult {
    bool certified = false;
    double min_det = std::numeric_limits<double>::infinity();
    double det_tol = 0.0;
    bool signature_ok = true; // Im(Phi) has (n, n) inertia at interior points
};

/// certified <=> every interior critical point has |det Q| >= det_tol.
/// det_tol = 0 selects the default 1e-8 * scale^n, scale = max |Q| entry over
/// interior points. Also checks the signature-0 property of Im(Phi), which
/// the pairing module relies on.
inline CertifyResult certify_morse(const HoloPoly& phi, const CriticalSet& cs,
                                   double det_tol = 0.0) {
    const int n = phi.dim();
    CertifyResult r;
    double scale = 0.0;
    for (const auto& p : cs.points) {
        if (p.on_boundary) continue;
        scale = std::max(scale, p.hol_hess.cwiseAbs().maxCoeff());
    }
    if (scale == 0.0) scale = 1.0;
    r.det_tol = det_tol > 0 ? det_tol : 1e-8 * std::pow(scale, n);
    r.certified = true;
    for (const auto& p : cs.points) {
        if (p.on_boundary) continue;
        r.min_det = std::min(r.min_det, p.abs_det);
        if (p.abs_det < r.det_tol) r.certified = false;
        if (p.abs_det >= r.det_tol) {
            auto [pos, neg] = inertia(real_hessian_of_part(phi, Part::Im, p.location));
            if (pos != n || neg != n) r.signature_ok = false;
        }
    }
    return r;
}

struct MorsePhase {
    Phase phase;
    CriticalSet critical_points;
    CertifyResult cert;
};

/// Phi = Phi0 + eps * l with l a seeded random affine polynomial of unit
/// coefficient norm; the anchor is re-located by Newton near the requested
/// point and the perturbed phase is certified Morse, retrying with fresh
/// seeds up to max_retries times.
inline MorsePhase perturb_to_morse(const Phase& phi0, const DomainBox& dom, double eps,
                                   std::uint64_t seed, int max_retries = 16,
                                   double grid_density = 8.0) {
    const int n = phi0.phi.dim();
    if (eps < 0) throw Error("perturb_to_morse: eps must be >= 0");
    const int attempts = (eps == 0.0) ? 1 : std::max(1, max_retries);
    std::string last_fail = "no attempt";

    for (int attempt = 0; attempt < attempts; ++attempt) {
        std::uint64_t aseed = derive_seed(seed, attempt);
        HoloPoly cand = phi0.phi;
        if (eps > 0.0) {
            Rng rng(aseed);
            // affine l = c0 + sum c_j z_j, ||c||_2 = 1
            std::vector<Complex> c(n + 1);
            double nrm = 0;
            for (auto& v : c) {
                v = rng.cnormal();
                nrm += std::norm(v);
            }
            nrm = std::sqrt(nrm);
            HoloPoly ell = HoloPoly::constant(n, c[0] / nrm);
            for (int j = 0; j < n; ++j)
                ell = ell + HoloPoly::coordinate(n, j).scaled(c[j + 1] / nrm);
            cand = cand + ell.scaled(eps);
        }

        CriticalSet cs = find_critical_points(cand, dom, grid_density);
        // re-anchor: Newton from the requested point, falling back to the
        // nearest located critical point
        detail::GradSystem sys(cand);
        const double tol = 1e-13 * sys.scale;
        CPoint anchor;
        auto direct = detail::newton_root(sys, phi0.requested_anchor, tol,
                                          8.0 * std::max(1.0, dom.max_extent()));
        int ni = cs.nearest(direct ? *direct : phi0.requested_anchor);
        if (ni < 0) {
            last_fail = "no critical points located in domain";
            continue;
        }
        anchor = cs.points[ni].location;
        double drift = distance(anchor, phi0.requested_anchor);
        if (drift > 0.5 * dom.delta()) {
            std::ostringstream os;
            os << "anchor drift " << drift << " exceeds delta/2";
            last_fail = os.str();
            continue;
        }

        CertifyResult cert = certify_morse(cand, cs);
        if (!cert.certified) {
            std::ostringstream os;
            os << "certification failed (min |det Q| = " << cert.min_det << ")";
            last_fail = os.str();
            continue;
        }

        MorsePhase out;
        out.phase = Phase(cand);
        out.phase.requested_anchor = phi0.requested_anchor;
        out.phase.anchor = anchor;
        out.phase.epsilon = eps;
        out.phase.seed = aseed;
        out.critical_points = std::move(cs);
        out.cert = cert;
        return out;
    }
    throw MorseSearchError("perturb_to_morse: not certified after " + std::to_string(attempts) +
                           " attempts; last failure: " + last_fail);
}

/// Separating amplitude in factored form: a(z) = prod_j <z - q_j, c_j> / s_j
/// with c_j = conj(p - q_j) and s_j = <p - q_j, c_j>. Evaluating through the
/// factors makes a(p) = 1 and a(q_j) = 0 exact in floating point, which the
/// expanded coefficient form cannot guarantee.
struct Amplitude {
    struct Factor {
        CPoint center;
        std::vector<Complex> direction;
        Complex scale;
    };
    int dim = 1;
    CPoint normalization_point;
    std::vector<Factor> factors;

    Complex eval(const CPoint& z) const {
        Complex prod = 1.0;
        for (const auto& f : factors) {
            Complex s = 0;
            for (int j = 0; j < dim; ++j) s += (z[j] - f.center[j]) * f.direction[j];
            prod *= s / f.scale;
        }
        return prod;
    }

    /// Expanded polynomial (degree = number of factors); for serialization and
    /// derivative work, not for evaluation at the construction points.
    HoloPoly poly() const {
        HoloPoly a = HoloPoly::constant(dim, 1.0);
        for (const auto& f : factors)
            a = a * HoloPoly::affine_chart(f.center, f.direction).scaled(1.0 / f.scale);
        return a;
    }

    int degree() const { return static_cast<int>(factors.size()); }
};

/// a(p) = 1, a(q) = 0 for every q in others. Pairwise-distinct points required.
inline Amplitude build_amplitude(const CPoint& p, const std::vector<CPoint>& others) {
    const int n = static_cast<int>(p.size());
    Amplitude a;
    a.dim = n;
    a.normalization_point = p;
    for (const auto& q : others) {
        if (static_cast<int>(q.size()) != n)
            throw DimensionError("build_amplitude: point dimension mismatch");
        double d2 = 0;
        for (int j = 0; j < n; ++j) d2 += std::norm(p[j] - q[j]);
        if (d2 == 0.0) throw SeparationError("build_amplitude: separation point coincides with p");
        Amplitude::Factor f;
        f.center = q;
        f.direction.resize(n);
        for (int j = 0; j < n; ++j) f.direction[j] = std::conj(p[j] - q[j]);
        Complex s = 0;
        for (int j = 0; j < n; ++j) s += (p[j] - q[j]) * f.direction[j];
        f.scale = s;
        a.factors.push_back(std::move(f));
    }
    for (std::size_t i = 0; i < others.size(); ++i)
        for (std::size_t j = i + 1; j < others.size(); ++j)
            if (distance(others[i], others[j]) == 0.0)
                throw SeparationError("build_amplitude: coincident separation points");
    return a;
}

} // namespace cgok

#endif // CGOK_MORSE_HPP
