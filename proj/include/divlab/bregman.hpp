#pragma once

#include "generators.hpp"

#include <functional>
#include <string>

namespace divlab {

struct SmoothConvexFn {
    std::string name;
    Eigen::Index n = 0;
    std::function<double(const Vec&)> F;
    std::function<Vec(const Vec&)> grad;
    std::function<Mat(const Vec&)> hess;
    std::function<bool(const Vec&)> domain = [](const Vec&) { return true; };
};

// F(x) = 1/2 x^T H x with H symmetric positive semidefinite.
inline SmoothConvexFn quadratic_fn(const Mat& H) {
    if (H.rows() != H.cols()) throw domain_error("quadratic_fn: H must be square");
    Mat S = 0.5 * (H + H.transpose());
    SmoothConvexFn fn;
    fn.name = "quadratic";
    fn.n = S.rows();
    fn.F = [S](const Vec& x) { return 0.5 * x.dot(S * x); };
    fn.grad = [S](const Vec& x) { return Vec(S * x); };
    fn.hess = [S](const Vec&) { return S; };
    return fn;
}

// F(x) = sum_i x_i ln x_i on the positive orthant.
inline SmoothConvexFn negative_entropy_fn(Eigen::Index n) {
    SmoothConvexFn fn;
    fn.name = "negative_entropy";
    fn.n = n;
    fn.F = [](const Vec& x) { return (x.array() * x.array().log()).sum(); };
    fn.grad = [](const Vec& x) { return Vec(x.array().log() + 1.0); };
    fn.hess = [](const Vec& x) { return Mat(x.cwiseInverse().asDiagonal()); };
    fn.domain = [](const Vec& x) { return (x.array() > 0.0).all(); };
    return fn;
}

// f_r(x) = sum_i r_i f(x_i / r_i) for a generator f and a positive reference r.
inline SmoothConvexFn generator_fn(const Generator& g, const Vec& r) {
    if (!(r.array() > 0.0).all()) throw domain_error("generator_fn: reference must be positive");
    SmoothConvexFn fn;
    fn.name = "f_r[" + g.name + "]";
    fn.n = r.size();
    fn.F = [g, r](const Vec& x) {
        double s = 0.0;
        for (Eigen::Index i = 0; i < r.size(); ++i) s += r[i] * g.f(x[i] / r[i]);
        return s;
    };
    fn.grad = [g, r](const Vec& x) {
        Vec out(r.size());
        for (Eigen::Index i = 0; i < r.size(); ++i) out[i] = g.f1(x[i] / r[i]);
        return out;
    };
    fn.hess = [g, r](const Vec& x) {
        Vec d(r.size());
        for (Eigen::Index i = 0; i < r.size(); ++i) d[i] = g.f2(x[i] / r[i]) / r[i];
        return Mat(d.asDiagonal());
    };
    fn.domain = [](const Vec& x) { return (x.array() > 0.0).all(); };
    return fn;
}

namespace detail {

inline void require_domain(const SmoothConvexFn& fn, const Vec& x, const char* who) {
    if (x.size() != fn.n) throw domain_error(std::string(who) + ": dimension mismatch");
    if (!fn.domain(x)) throw domain_error(std::string(who) + ": point outside the domain");
}

}  // namespace detail

inline double bregman_divergence(const SmoothConvexFn& fn, const Vec& x, const Vec& y) {
    detail::require_domain(fn, x, "bregman_divergence");
    detail::require_domain(fn, y, "bregman_divergence");
    return fn.F(x) - fn.F(y) - fn.grad(y).dot(x - y);
}

// int_0^1 (1-t) (x-y)^T H(y + t(x-y)) (x-y) dt by Gauss-Legendre.
inline double bregman_integral(const SmoothConvexFn& fn, const Vec& x, const Vec& y, int quad_nodes = 64) {
    detail::require_domain(fn, x, "bregman_integral");
    detail::require_domain(fn, y, "bregman_integral");
    Quadrature quad = gauss_legendre(quad_nodes);
    Vec d = x - y;
    double acc = 0.0;
    for (int k = 0; k < quad_nodes; ++k) {
        double t = quad.nodes[k];
        Mat H = fn.hess(y + t * d);
        acc += quad.weights[k] * (1.0 - t) * d.dot(H * d);
    }
    return acc;
}

struct BregmanSandwich {
    double gamma_down = 0.0;
    double gamma_up = 0.0;
    double value = 0.0;
    double integral = 0.0;
    double tv_lower = 0.0;
    double l2_lower = 0.0;
    double l2_upper = 0.0;
    double tv_upper = 0.0;
    Eigen::Index support = 0;  // |supp(x - y)|
    bool holds = true;
};

// Lower chain carries the 1/2 from the second-order remainder:
// 2 gamma_down / |supp|^2 TV^2 <= gamma_down/2 ||x-y||^2 <= B_F <= gamma_up/2 ||x-y||^2 <= 2 gamma_up TV^2.
inline BregmanSandwich bregman_sandwich(const SmoothConvexFn& fn, const Vec& x, const Vec& y, int t_grid_n = 257) {
    detail::require_domain(fn, x, "bregman_sandwich");
    detail::require_domain(fn, y, "bregman_sandwich");
    if (t_grid_n < 2) throw domain_error("bregman_sandwich: t_grid_n must be at least 2");
    BregmanSandwich r;
    Vec d = x - y;
    double up = -inf, down = inf;
    for (int k = 0; k < t_grid_n; ++k) {
        double t = static_cast<double>(k) / (t_grid_n - 1);
        Vec z = y + t * d;
        if (!fn.domain(z)) throw domain_error("bregman_sandwich: segment leaves the domain");
        Mat H = fn.hess(z);
        if (!H.allFinite()) throw numerical_error("bregman_sandwich: Hessian evaluation failed");
        if ((H - H.transpose()).cwiseAbs().maxCoeff() > 1e-9 * std::max(1.0, H.cwiseAbs().maxCoeff()))
            throw numerical_error("bregman_sandwich: Hessian is not symmetric");
        Mat S = 0.5 * (H + H.transpose());
        Eigen::SelfAdjointEigenSolver<Mat> es(S, Eigen::EigenvaluesOnly);
        if (es.info() != Eigen::Success) throw numerical_error("bregman_sandwich: eigen solve failed");
        up = std::max(up, es.eigenvalues().maxCoeff());
        down = std::min(down, es.eigenvalues().minCoeff());
    }
    if (down < -1e-8) throw domain_error("bregman_sandwich: function is not convex on the segment");
    r.gamma_up = up;
    r.gamma_down = std::max(0.0, down);
    r.value = bregman_divergence(fn, x, y);
    r.integral = bregman_integral(fn, x, y, 64);

    for (Eigen::Index i = 0; i < d.size(); ++i) r.support += d[i] != 0.0;
    double l2sq = d.squaredNorm();
    double tv = 0.5 * d.lpNorm<1>();
    r.l2_lower = 0.5 * r.gamma_down * l2sq;
    r.l2_upper = 0.5 * r.gamma_up * l2sq;
    r.tv_upper = 2.0 * r.gamma_up * tv * tv;
    r.tv_lower = r.support > 0 ? 2.0 * r.gamma_down / static_cast<double>(r.support * r.support) * tv * tv : 0.0;

    const double tol = 1e-9 * std::max(1.0, std::abs(r.value));
    r.holds = r.tv_lower <= r.l2_lower + tol && r.l2_lower <= r.value + tol && r.value <= r.l2_upper + tol &&
              r.l2_upper <= r.tv_upper + tol && std::abs(r.integral - r.value) <= 1e-7 * std::max(1.0, std::abs(r.value));
    return r;
}

}  // namespace divlab
