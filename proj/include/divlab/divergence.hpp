#pragma once

#include "common.hpp"
#include "generators.hpp"

namespace divlab {

// sum_x q(x) f(p(x)/q(x)) with 0 f(0/0) = 0 and 0 f(a/0) = a f'(inf).
inline double f_divergence(const Generator& g, const WeightVec& p, const WeightVec& q) {
    require_same_alphabet(p, q);
    double total = 0.0;
    for (Eigen::Index i = 0; i < p.size(); ++i) {
        double pi = p[i], qi = q[i];
        double term;
        if (qi > 0.0)
            term = pi > 0.0 ? qi * g.f(pi / qi) : ext_mul(qi, g.f_at_zero);
        else
            term = ext_mul(pi, g.fprime_at_inf);
        total += term;
        if (is_inf(total)) return inf;
    }
    return total;
}

inline double total_variation(const WeightVec& p, const WeightVec& q) {
    require_same_alphabet(p, q);
    return 0.5 * (p.vec() - q.vec()).lpNorm<1>();
}

inline double chi_squared(const WeightVec& p, const WeightVec& q) {
    require_same_alphabet(p, q);
    double total = 0.0;
    for (Eigen::Index i = 0; i < p.size(); ++i) {
        if (q[i] > 0.0) {
            double d = p[i] - q[i];
            total += d * d / q[i];
        } else if (p[i] > 0.0) {
            return inf;
        }
    }
    return total;
}

// Gauss-Legendre evaluation of int_0^1 (1-t) sum_i q_i^{-1} f''(1 + t(p_i/q_i - 1)) (p_i - q_i)^2 dt.
inline double integral_representation(const Generator& g, const WeightVec& p, const WeightVec& q, int quad_nodes) {
    require_same_alphabet(p, q);
    if (quad_nodes < 1) throw domain_error("integral_representation: quad_nodes must be positive");
    if (!absolutely_continuous(p, q)) throw domain_error("integral_representation: p is not absolutely continuous w.r.t. q");
    if (!equal_sums(p, q) && std::abs(g.f1(1.0)) > 1e-12)
        throw domain_error("integral_representation: requires equal sums or f'(1) = 0");
    for (Eigen::Index i = 0; i < p.size(); ++i)
        if (q[i] > 0.0 && p[i] == 0.0 && !g.f2_at_zero_finite)
            throw domain_error("integral_representation: non-integrable singularity (f'' infinite at 0 and p touches 0)");

    const Quadrature quad = gauss_legendre(quad_nodes);
    double total = 0.0;
    for (Eigen::Index i = 0; i < p.size(); ++i) {
        if (!(q[i] > 0.0)) continue;
        double d = p[i] - q[i];
        if (d == 0.0) continue;
        double r = p[i] / q[i];
        double acc = 0.0;
        for (int k = 0; k < quad_nodes; ++k) {
            double t = quad.nodes[k];
            acc += quad.weights[k] * (1.0 - t) * g.f2(1.0 + t * (r - 1.0));
        }
        total += acc * d * d / q[i];
    }
    return total;
}

namespace detail {

inline bool smooth_between(const Generator& g, double lo, double hi) {
    if (!g.twice_continuous) return false;
    for (double k : g.kinks)
        if (k >= lo && k <= hi) return false;
    return true;
}

// f(r) - f'(1)(r - 1) = (r - 1)^2 int_0^1 (1-t) f''(1 + t(r-1)) dt, free of cancellation for r near 1.
inline double second_order_part(const Generator& g, double r) {
    static const Quadrature quad = gauss_legendre(48);
    double acc = 0.0;
    for (std::size_t k = 0; k < quad.nodes.size(); ++k) {
        double t = quad.nodes[k];
        acc += quad.weights[k] * (1.0 - t) * g.f2(1.0 + t * (r - 1.0));
    }
    return acc * (r - 1.0) * (r - 1.0);
}

}  // namespace detail

// D_f(p||q), evaluated through the second-order integral form when every ratio on supp(q) lies in [1/2, 2].
// Avoids the cancellation in sum q f(p/q) when p is close to q.
inline double f_divergence_near(const Generator& g, const WeightVec& p, const WeightVec& q) {
    require_same_alphabet(p, q);
    if (!absolutely_continuous(p, q) || !equal_sums(p, q, 1e-12)) return f_divergence(g, p, q);
    double lo = 1.0, hi = 1.0;
    for (Eigen::Index i = 0; i < p.size(); ++i)
        if (q[i] > 0.0) {
            double r = p[i] / q[i];
            lo = std::min(lo, r);
            hi = std::max(hi, r);
        }
    if (lo < 0.5 || hi > 2.0 || !detail::smooth_between(g, lo, hi)) return f_divergence(g, p, q);
    double total = 0.0;
    for (Eigen::Index i = 0; i < p.size(); ++i)
        if (q[i] > 0.0 && p[i] != q[i]) total += q[i] * detail::second_order_part(g, p[i] / q[i]);
    return total;
}

}  // namespace divlab
