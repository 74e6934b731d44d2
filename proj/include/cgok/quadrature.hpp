#ifndef CGOK_QUADRATURE_HPP
#define CGOK_QUADRATURE_HPP

#include <cmath>
#include <complex>
#include <map>
#include <mutex>
#include <span>
#include <vector>

#include "cgok/errors.hpp"

namespace cgok {

/// Gauss-Legendre nodes and weights on [-1, 1], computed by Newton iteration
/// on P_n with the usual Chebyshev initial guesses. Cached per order.
struct GaussLegendre {
    std::vector<double> x, w;

    static const GaussLegendre& get(int order) {
        static std::map<int, GaussLegendre> cache;
        static std::mutex mu;
        std::lock_guard<std::mutex> lock(mu);
        auto it = cache.find(order);
        if (it != cache.end()) return it->second;
        return cache.emplace(order, compute(order)).first->second;
    }

    static GaussLegendre compute(int n) {
        if (n < 1) throw Error("GaussLegendre: order must be >= 1");
        GaussLegendre r;
        r.x.resize(n);
        r.w.resize(n);
        for (int i = 0; i < n; ++i) {
            double t = std::cos(M_PI * (i + 0.75) / (n + 0.5));
            for (int iter = 0; iter < 100; ++iter) {
                // evaluate P_n(t) and P_n'(t) by the recurrence
                double p0 = 1.0, p1 = t;
                for (int k = 2; k <= n; ++k) {
                    double p2 = ((2.0 * k - 1.0) * t * p1 - (k - 1.0) * p0) / k;
                    p0 = p1;
                    p1 = p2;
                }
                double dp = n * (t * p1 - p0) / (t * t - 1.0);
                double dt = p1 / dp;
                t -= dt;
                if (std::abs(dt) < 1e-15) break;
            }
            double p0 = 1.0, p1 = t;
            for (int k = 2; k <= n; ++k) {
                double p2 = ((2.0 * k - 1.0) * t * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            double dp = n * (t * p1 - p0) / (t * t - 1.0);
            r.x[i] = t;
            r.w[i] = 2.0 / ((1.0 - t * t) * dp * dp);
        }
        return r;
    }
};

/// Panelized Gauss-Legendre rule on [a, b]: `panels` equal panels of the given
/// order. Node count = panels * order.
struct PanelRule {
    std::vector<double> x, w;

    PanelRule() = default;

    PanelRule(double a, double b, int panels, int order) {
        if (panels < 1 || order < 1) throw Error("PanelRule: panels and order must be >= 1");
        const GaussLegendre& gl = GaussLegendre::get(order);
        x.reserve(panels * order);
        w.reserve(panels * order);
        double hlen = (b - a) / panels;
        for (int p = 0; p < panels; ++p) {
            double lo = a + p * hlen;
            double mid = lo + 0.5 * hlen, half = 0.5 * hlen;
            for (int i = 0; i < order; ++i) {
                x.push_back(mid + half * gl.x[i]);
                w.push_back(half * gl.w[i]);
            }
        }
    }

    std::size_t size() const { return x.size(); }
};

/// Pairwise (tree) summation: deterministic association independent of the
/// producer, O(log n) error growth.
inline std::complex<double> pairwise_sum(std::span<const std::complex<double>> v) {
    if (v.size() <= 8) {
        std::complex<double> s = 0;
        for (const auto& c : v) s += c;
        return s;
    }
    std::size_t half = v.size() / 2;
    return pairwise_sum(v.subspan(0, half)) + pairwise_sum(v.subspan(half));
}

inline double pairwise_sum(std::span<const double> v) {
    if (v.size() <= 8) {
        double s = 0;
        for (double c : v) s += c;
        return s;
    }
    std::size_t half = v.size() / 2;
    return pairwise_sum(v.subspan(0, half)) + pairwise_sum(v.subspan(half));
}

} // namespace cgok

#endif // CGOK_QUADRATURE_HPP
