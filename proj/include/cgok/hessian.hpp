#ifndef CGOK_HESSIAN_HPP
#define CGOK_HESSIAN_HPP

#include <Eigen/Dense>

#include "cgok/holo_poly.hpp"

namespace cgok {

/// Holomorphic Hessian Q_{jk} = d^2 f / dz_j dz_k at a point (n x n, symmetric).
using HolHessian = Eigen::MatrixXcd;

/// Real coordinate Hessian, 2n x 2n and symmetric, in (x_1..x_n, y_1..y_n)
/// ordering. All block formulas in this header use that ordering.
using RealHessian = Eigen::MatrixXd;

enum class Part { Re, Im };

/// Q_{jk} = d^2 p / dz_j dz_k (z): exact coefficient differentiation, then eval.
inline HolHessian hol_hessian(const HoloPoly& p, const CPoint& z) {
    p.check_point(z);
    const int n = p.dim();
    HolHessian q(n, n);
    for (int j = 0; j < n; ++j) {
        HoloPoly dj = p.derivative(j);
        for (int k = j; k < n; ++k) {
            Complex v = dj.derivative(k).eval(z);
            q(j, k) = v;
            q(k, j) = v;
        }
    }
    return q;
}

/// Real Hessian of Re(p) or Im(p). For holomorphic p the mixed z-zbar second
/// derivatives vanish, so the full 2n x 2n Hessian is assembled from
/// Q = hol_hessian alone:
///   D^2 Re(p) = [[ Re Q, -Im Q], [-Im Q, -Re Q]]
///   D^2 Im(p) = [[ Im Q,  Re Q], [ Re Q, -Im Q]]
inline RealHessian real_hessian_of_part(const HoloPoly& p, Part part, const CPoint& z) {
    const int n = p.dim();
    HolHessian q = hol_hessian(p, z);
    RealHessian h(2 * n, 2 * n);
    for (int j = 0; j < n; ++j) {
        for (int k = 0; k < n; ++k) {
            double re = q(j, k).real(), im = q(j, k).imag();
            if (part == Part::Re) {
                h(j, k) = re;
                h(j, n + k) = -im;
                h(n + j, k) = -im;
                h(n + j, n + k) = -re;
            } else {
                h(j, k) = im;
                h(j, n + k) = re;
                h(n + j, k) = re;
                h(n + j, n + k) = -im;
            }
        }
    }
    return h;
}

/// Apply a complexified real Hessian to holomorphic tangent vectors
/// a^j d/dz_j and c^k d/dz_k. In (x, y) coordinates the vector a^j d/dz_j has
/// coefficients (a/2, -i a/2); the bilinear extension is evaluated directly.
inline Complex apply_to_holomorphic_vectors(const RealHessian& h,
                                            const Eigen::VectorXcd& a,
                                            const Eigen::VectorXcd& c) {
    const int n = static_cast<int>(a.size());
    Eigen::VectorXcd va(2 * n), vc(2 * n);
    const Complex half(0.5, 0.0), mihalf(0.0, -0.5);
    for (int j = 0; j < n; ++j) {
        va(j) = half * a(j);
        va(n + j) = mihalf * a(j);
        vc(j) = half * c(j);
        vc(n + j) = mihalf * c(j);
    }
    Complex s = 0;
    for (int r = 0; r < 2 * n; ++r)
        for (int t = 0; t < 2 * n; ++t) s += va(r) * h(r, t) * vc(t);
    return s;
}

/// Inertia (n_pos, n_neg) of a symmetric matrix; eigenvalues within
/// tol * max|eig| of zero are counted as neither.
inline std::pair<int, int> inertia(const RealHessian& h, double tol = 1e-9) {
    Eigen::SelfAdjointEigenSolver<RealHessian> es(h, Eigen::EigenvaluesOnly);
    const auto& ev = es.eigenvalues();
    double scale = 0;
    for (int i = 0; i < ev.size(); ++i) scale = std::max(scale, std::abs(ev(i)));
    int pos = 0, neg = 0;
    for (int i = 0; i < ev.size(); ++i) {
        if (ev(i) > tol * scale) ++pos;
        else if (ev(i) < -tol * scale) ++neg;
    }
    return {pos, neg};
}

} // namespace cgok

#endif // CGOK_HESSIAN_HPP
