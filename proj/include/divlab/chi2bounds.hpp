#pragma once

#include "divergence.hpp"

#include <optional>

namespace divlab {

struct KappaPair {
    double kappa_up = 0.0;  // may be +inf
    double kappa_down = 0.0;
    Eigen::Index up_index = -1;
    double up_t = 0.0;
    Eigen::Index down_index = -1;
    double down_t = 0.0;
    bool absolutely_continuous = true;
    bool finite = true;  // false when kappa_up is +inf
};

enum class KappaMethod { automatic, endpoints, dense_grid };

namespace detail {

inline double f2_at(const Generator& g, double s) { return s > 0.0 ? g.f2(s) : g.f2_at_zero; }

}  // namespace detail

// max/min over i in supp(q), t in [0,1] of f''(1 + t (p_i/q_i - 1)).
inline KappaPair kappa_bounds(const Generator& g, const WeightVec& p, const WeightVec& q, int t_grid_n = 1025,
                              KappaMethod method = KappaMethod::automatic) {
    require_same_alphabet(p, q);
    if (t_grid_n < 2) throw domain_error("kappa_bounds: t_grid_n must be at least 2");
    KappaPair k;
    k.absolutely_continuous = absolutely_continuous(p, q);
    bool use_endpoints = method == KappaMethod::endpoints ||
                         (method == KappaMethod::automatic && g.f2_monotonicity != Monotonicity::unknown);
    double up = -inf, down = inf;
    auto visit = [&](Eigen::Index i, double t, double r) {
        double v = detail::f2_at(g, 1.0 + t * (r - 1.0));
        if (v > up) {
            up = v;
            k.up_index = i;
            k.up_t = t;
        }
        if (v < down) {
            down = v;
            k.down_index = i;
            k.down_t = t;
        }
    };
    for (Eigen::Index i = 0; i < q.size(); ++i) {
        if (!(q[i] > 0.0)) continue;
        double r = p[i] / q[i];
        visit(i, 0.0, r);
        visit(i, 1.0, r);
        if (!use_endpoints)
            for (int j = 1; j < t_grid_n - 1; ++j) visit(i, static_cast<double>(j) / (t_grid_n - 1), r);
    }
    if (k.up_index < 0) {
        up = down = g.f2(1.0);
    }
    if (!k.absolutely_continuous) up = inf;
    k.kappa_up = up;
    k.kappa_down = std::max(0.0, down);
    k.finite = !is_inf(k.kappa_up);
    return k;
}

struct SandwichResult {
    double lower = 0.0;
    double value = 0.0;
    double upper = 0.0;
    double chi2 = 0.0;
    KappaPair kappa;
    bool vacuous = false;  // upper bound infinite
    bool holds = true;
};

namespace detail {

inline void require_sandwich_preconditions(const Generator& g, const WeightVec& p, const WeightVec& q, const char* who) {
    if (!equal_sums(p, q) && std::abs(g.f1(1.0)) > 1e-12)
        throw domain_error(std::string(who) + ": requires equal sums or f'(1) = 0");
}

inline double slack(double v) { return 1e-10 * std::max(1.0, std::abs(v)); }

}  // namespace detail

// (kappa_down/2) chi^2 <= D_f <= (kappa_up/2) chi^2.
inline SandwichResult chi2_sandwich(const Generator& g, const WeightVec& p, const WeightVec& q, int t_grid_n = 1025) {
    detail::require_sandwich_preconditions(g, p, q, "chi2_sandwich");
    SandwichResult r;
    r.kappa = kappa_bounds(g, p, q, t_grid_n);
    r.value = f_divergence(g, p, q);
    r.chi2 = chi_squared(p, q);
    // the lower bound needs p << q
    r.lower = r.kappa.absolutely_continuous ? ext_mul(0.5 * r.kappa.kappa_down, r.chi2) : 0.0;
    r.upper = ext_mul(0.5 * r.kappa.kappa_up, r.chi2);
    r.vacuous = is_inf(r.upper);
    bool lower_ok = is_inf(r.value) || r.lower <= r.value + detail::slack(r.value);
    bool upper_ok = r.vacuous || r.value <= r.upper + detail::slack(r.value);
    r.holds = lower_ok && upper_ok;
    return r;
}

struct ReversePinskerResult {
    double value = 0.0;
    double l2_bound = 0.0;
    double tv_bound = 0.0;
    double kappa_up = 0.0;
    double q_min = 0.0;  // smallest entry on supp(q)
    bool vacuous = false;
    bool holds = true;
};

// D_f <= kappa_up / (2 q~min) ||p - q||_2^2 <= 2 kappa_up / q~min TV^2.
inline ReversePinskerResult reverse_pinsker(const Generator& g, const WeightVec& p, const WeightVec& q) {
    detail::require_sandwich_preconditions(g, p, q, "reverse_pinsker");
    if (!absolutely_continuous(p, q)) throw domain_error("reverse_pinsker: p is not absolutely continuous w.r.t. q");
    ReversePinskerResult r;
    KappaPair k = kappa_bounds(g, p, q);
    r.kappa_up = k.kappa_up;
    r.q_min = q.min_on_support();
    r.value = f_divergence(g, p, q);
    double l2sq = (p.vec() - q.vec()).squaredNorm();
    double tv = total_variation(p, q);
    r.l2_bound = ext_mul(k.kappa_up / (2.0 * r.q_min), l2sq);
    r.tv_bound = ext_mul(2.0 * k.kappa_up / r.q_min, tv * tv);
    r.vacuous = is_inf(r.tv_bound);
    double s = detail::slack(r.value);
    r.holds = (is_inf(r.l2_bound) || r.value <= r.l2_bound + s) && (r.vacuous || r.l2_bound <= r.tv_bound + s);
    return r;
}

struct BoundValue {
    double value = 0.0;
    double bound = 0.0;
    bool holds = true;
};

// chi^2 <= 4 / q~min TV^2.
inline BoundValue chi2_reverse_pinsker(const WeightVec& p, const WeightVec& q) {
    if (!absolutely_continuous(p, q)) throw domain_error("chi2_reverse_pinsker: p is not absolutely continuous w.r.t. q");
    BoundValue b;
    b.value = chi_squared(p, q);
    double tv = total_variation(p, q);
    b.bound = 4.0 / q.min_on_support() * tv * tv;
    b.holds = b.value <= b.bound + detail::slack(b.value);
    return b;
}

// KL in bits: D <= 2 r / (ln 2 q_min) TV^2 with r = max{1, max_i q_i/p_i}.
inline BoundValue kl_reverse_pinsker_bits(const ProbVec& p, const ProbVec& q) {
    require_same_alphabet(p, q);
    for (Eigen::Index i = 0; i < p.size(); ++i)
        if ((p[i] > 0.0) != (q[i] > 0.0)) throw domain_error("kl_reverse_pinsker_bits: p and q must be mutually absolutely continuous");
    double r = 1.0;
    for (Eigen::Index i = 0; i < p.size(); ++i)
        if (q[i] > 0.0) r = std::max(r, q[i] / p[i]);
    BoundValue b;
    b.value = f_divergence(make_generator("kl"), p, q) / std::log(2.0);
    double tv = total_variation(p, q);
    b.bound = 2.0 * r / (std::log(2.0) * q.min_on_support()) * tv * tv;
    b.holds = b.value <= b.bound + detail::slack(b.value);
    return b;
}

struct Chi2TvUpper {
    double chi2 = 0.0;
    double inf_l1_bound = 0.0;
    std::optional<double> prob_bound;
    bool holds = true;
};

inline Chi2TvUpper chi2_tv_upper(const WeightVec& p, const WeightVec& q) {
    require_same_alphabet(p, q);
    if (!absolutely_continuous(p, q)) throw domain_error("chi2_tv_upper: p is not absolutely continuous w.r.t. q");
    Chi2TvUpper r;
    Vec d = p.vec() - q.vec();
    double qmin = q.min_on_support();
    r.chi2 = chi_squared(p, q);
    double l1 = d.lpNorm<1>();
    r.inf_l1_bound = d.lpNorm<Eigen::Infinity>() * l1 / qmin;
    double s = detail::slack(r.chi2);
    r.holds = r.chi2 <= r.inf_l1_bound + s;
    if (std::abs(p.sum() - 1.0) <= 1e-10 && std::abs(q.sum() - 1.0) <= 1e-10) {
        r.prob_bound = l1 * l1 / (2.0 * qmin);
        r.holds = r.holds && r.chi2 <= *r.prob_bound + s;
    }
    return r;
}

struct LowerByChi2 {
    double value = 0.0;
    double bound = 0.0;
    bool applicable = true;  // requires p << q
    bool holds = true;
};

// D_f >= (L_f q~min / 4) chi^2 for p << q.
inline LowerByChi2 f_lower_by_chi2(const Generator& g, const ProbVec& p, const ProbVec& q) {
    require_same_alphabet(p, q);
    if (!g.pinsker_constant) throw domain_error("f_lower_by_chi2: generator " + g.name + " has no Pinsker constant");
    LowerByChi2 r;
    r.value = f_divergence(g, p, q);
    r.applicable = absolutely_continuous(p, q);
    if (!r.applicable) return r;
    double L = g.lf();
    r.bound = ext_mul(L * q.min_on_support() / 4.0, chi_squared(p, q));
    r.holds = is_inf(r.value) || r.value >= r.bound - detail::slack(r.value);
    return r;
}

}  // namespace divlab
