#pragma once

#include "chi2bounds.hpp"
#include "markov.hpp"

#include <optional>
#include <string>
#include <vector>

namespace divlab {

struct SamplerBudget {
    int samples = 2000;          // Dirichlet samples (at least 100)
    std::uint64_t seed = 0;
    int grid_1d = 4096;          // exhaustive grid on binary input alphabets
    int refine_top = 8;          // candidates refined by hill-climbing
    int hill_climb_iters = 400;
    int workers = 1;
};

struct EtaChi2Result {
    double value = 0.0;
    bool degenerate = false;  // reference supported on a single symbol
};

// Squared second singular value of W(y|x) q(x) / sqrt(q(x) p_Y(y)).
inline EtaChi2Result eta_chi2(const Channel& W, const ProbVec& q) {
    if (q.size() != W.inputs()) throw domain_error("eta_chi2: dimension mismatch");
    EtaChi2Result r;
    if (q.support_size() <= 1) {
        r.degenerate = true;
        return r;
    }
    const Mat& M = W.matrix();
    Vec py = M * q.vec();
    Mat P = Mat::Zero(M.rows(), M.cols());
    for (Eigen::Index x = 0; x < M.cols(); ++x) {
        if (!(q[x] > 0.0)) continue;
        for (Eigen::Index y = 0; y < M.rows(); ++y)
            if (py[y] > support_epsilon) P(y, x) = M(y, x) * q[x] / std::sqrt(q[x] * py[y]);
    }
    Eigen::JacobiSVD<Mat> svd(P);
    const Vec& sv = svd.singularValues();
    double s2 = sv.size() > 1 ? sv[1] : 0.0;
    r.value = std::clamp(s2 * s2, 0.0, 1.0);
    return r;
}

struct EtaEstimate {
    double estimate = 0.0;
    std::optional<ProbVec> witness;
    bool empty = false;  // no feasible input found
    std::size_t evaluated = 0;
};

namespace detail {

struct Candidate {
    Vec p;
    double ratio = -inf;
    bool feasible = false;
};

// D_f(Wp||Wq) / D_f(p||q) restricted to 1e-12 < D_f(p||q) < inf.
inline double contraction_ratio(const Generator& g, const Mat& W, const WeightVec& q, const WeightVec& wq, const Vec& p,
                                bool& feasible) {
    WeightVec pv(p);
    double den = f_divergence_near(g, pv, q);
    feasible = den > 1e-12 && !is_inf(den);
    if (!feasible) return -inf;
    double num = f_divergence_near(g, WeightVec(Vec((W * p).cwiseMax(0.0))), wq);
    return num / den;
}

// Input cloud: exhaustive grid on binary alphabets, otherwise vertices blended toward q plus Dirichlet samples.
inline std::vector<Vec> input_cloud(Eigen::Index n, const ProbVec& q, const SamplerBudget& b) {
    std::vector<Vec> cloud;
    if (n == 2) {
        int m = std::max(2, b.grid_1d);
        cloud.reserve(m);
        for (int k = 0; k < m; ++k) {
            double s = static_cast<double>(k) / (m - 1);
            Vec p(2);
            p << s, 1.0 - s;
            cloud.push_back(p);
        }
        return cloud;
    }
    const double weights[] = {0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 0.99};
    for (Eigen::Index x = 0; x < n; ++x)
        for (double w : weights) {
            Vec p = (1.0 - w) * Vec::Unit(n, x) + w * q.vec();
            cloud.push_back(p);
        }
    for (int i = 0; i < b.samples; ++i) {
        auto rng = stream_rng(b.seed, static_cast<std::uint64_t>(i));
        cloud.push_back(sample_dirichlet(n, rng).vec());
    }
    return cloud;
}

// Pairwise mass transfers with step halving; deterministic.
inline Candidate hill_climb(const Generator& g, const Mat& W, const WeightVec& q, const WeightVec& wq, Candidate c,
                            int iters) {
    const Eigen::Index n = c.p.size();
    double step = 0.05;
    for (int it = 0; it < iters && step > 1e-7; ++it) {
        Candidate best = c;
        for (Eigen::Index a = 0; a < n; ++a)
            for (Eigen::Index b = 0; b < n; ++b) {
                if (a == b || c.p[b] < step) continue;
                Vec p = c.p;
                p[a] += step;
                p[b] -= step;
                bool feas = false;
                double r = contraction_ratio(g, W, q, wq, p, feas);
                if (feas && r > best.ratio) {
                    best.p = p;
                    best.ratio = r;
                    best.feasible = true;
                }
            }
        if (best.ratio > c.ratio)
            c = best;
        else
            step *= 0.5;
    }
    return c;
}

}  // namespace detail

// Sampled supremum of D_f(Wp||Wq)/D_f(p||q); a lower estimate of eta_f(W, q).
inline EtaEstimate eta_f_estimate(const Channel& W, const ProbVec& q, const Generator& g, const SamplerBudget& budget = {}) {
    if (budget.samples < 100) throw domain_error("eta_f_estimate: budget must allow at least 100 samples");
    if (q.size() != W.inputs()) throw domain_error("eta_f_estimate: dimension mismatch");
    const Eigen::Index n = W.inputs();
    const Mat& M = W.matrix();
    WeightVec wq(Vec((M * q.vec()).cwiseMax(0.0)));
    auto cloud = detail::input_cloud(n, q, budget);
    std::vector<detail::Candidate> cands(cloud.size());
    parallel_for(cloud.size(), budget.workers, [&](std::size_t i) {
        detail::Candidate c;
        c.p = cloud[i];
        c.ratio = detail::contraction_ratio(g, M, q, wq, c.p, c.feasible);
        cands[i] = std::move(c);
    });

    if (n > 2) {
        std::vector<std::size_t> order;
        for (std::size_t i = 0; i < cands.size(); ++i)
            if (cands[i].feasible) order.push_back(i);
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return cands[a].ratio > cands[b].ratio; });
        order.resize(std::min<std::size_t>(order.size(), static_cast<std::size_t>(std::max(0, budget.refine_top))));
        std::vector<detail::Candidate> refined(order.size());
        parallel_for(order.size(), budget.workers, [&](std::size_t k) {
            refined[k] = detail::hill_climb(g, M, q, wq, cands[order[k]], budget.hill_climb_iters);
        });
        for (auto& c : refined) cands.push_back(std::move(c));
    }

    EtaEstimate out;
    out.evaluated = cands.size();
    std::optional<std::size_t> best;
    for (std::size_t i = 0; i < cands.size(); ++i)
        if (cands[i].feasible && (!best || cands[i].ratio > cands[*best].ratio)) best = i;
    if (!best) {
        out.empty = true;
        return out;
    }
    out.estimate = std::max(0.0, cands[*best].ratio);
    out.witness = ProbVec::normalized(cands[*best].p);
    return out;
}

struct KappaSup {
    double value = 0.0;  // may be +inf
    std::optional<ProbVec> witness;
    bool any_feasible = false;
};

// sup over the sampled cloud of kappa_up(Wp, Wq), over inputs with 0 < D_f(p||q) < inf.
inline KappaSup sampled_kappa_sup(const Channel& W, const ProbVec& q, const Generator& g, const SamplerBudget& budget) {
    const Eigen::Index n = W.inputs();
    const Mat& M = W.matrix();
    WeightVec wq(Vec((M * q.vec()).cwiseMax(0.0)));
    auto cloud = detail::input_cloud(n, q, budget);
    std::vector<double> vals(cloud.size(), -inf);
    parallel_for(cloud.size(), budget.workers, [&](std::size_t i) {
        WeightVec pv(cloud[i]);
        double d = f_divergence(g, pv, q);
        if (!(d > 0.0) || is_inf(d)) return;
        WeightVec wp(Vec((M * cloud[i]).cwiseMax(0.0)));
        vals[i] = kappa_bounds(g, wp, wq).kappa_up;
    });
    KappaSup out;
    std::optional<std::size_t> best;
    for (std::size_t i = 0; i < vals.size(); ++i)
        if (vals[i] > -inf && (!best || vals[i] > vals[*best])) best = i;
    if (best) {
        out.any_feasible = true;
        out.value = vals[*best];
        out.witness = ProbVec::normalized(cloud[*best]);
    }
    return out;
}

struct OptionalBound {
    std::optional<double> value;  // absent when preconditions fail; may be +inf
    std::string note;
};

struct EtaUpperBounds {
    double eta_chi2 = 0.0;
    OptionalBound nonlinear;
    OptionalBound linear;
    KappaSup kappa;
};

inline EtaUpperBounds eta_f_upper_bounds(const Channel& W, const ProbVec& q, const Generator& g, const SamplerBudget& budget = {}) {
    EtaUpperBounds out;
    out.eta_chi2 = eta_chi2(W, q).value;
    const double L = g.lf();
    const bool q_full = q.support_size() == q.size();

    if (!(L > 0.0)) {
        out.nonlinear.note = "requires a positive Pinsker constant";
    } else if (!is_inf(g.fprime_at_inf) && !q_full) {
        out.nonlinear.note = "requires f'(inf) = +inf or a full-support reference";
    } else {
        out.kappa = sampled_kappa_sup(W, q, g, budget);
        if (!out.kappa.any_feasible) {
            out.nonlinear.value = 0.0;
            out.nonlinear.note = "no feasible input";
        } else {
            out.nonlinear.value = ext_mul(4.0 / (L * q.min_on_support()) * out.kappa.value, out.eta_chi2);
            out.nonlinear.note = is_inf(out.kappa.value) ? "sampled-sup: kappa_up unbounded (f'' singular where Wp vanishes)"
                                                         : "sampled-sup";
        }
    }

    if (!(L > 0.0)) {
        out.linear.note = "requires a positive Pinsker constant";
    } else if (!g.g_concave) {
        out.linear.note = "requires (f(t) - f(0))/t concave";
    } else if (!std::isfinite(g.f_at_zero)) {
        out.linear.note = "requires finite f(0)";
    } else if (!q_full) {
        out.linear.note = "requires a full-support reference";
    } else {
        double c = g.f1(1.0) + g.f_at_zero;
        out.linear.value = 4.0 * c / (L * q.min_entry()) * out.eta_chi2;
    }
    return out;
}

struct ContractionReport {
    double eta_chi2 = 0.0;
    double eta_f_estimate = 0.0;
    EtaUpperBounds upper;
    std::optional<ProbVec> witness;
};

inline ContractionReport contraction_report(const Channel& W, const ProbVec& q, const Generator& g, const SamplerBudget& budget = {}) {
    ContractionReport r;
    auto est = eta_f_estimate(W, q, g, budget);
    r.eta_f_estimate = est.estimate;
    r.witness = est.witness;
    r.upper = eta_f_upper_bounds(W, q, g, budget);
    r.eta_chi2 = r.upper.eta_chi2;
    return r;
}

struct ProfilePoint {
    int n = 0;
    double eta_estimate = 0.0;
    double rate = 0.0;          // eta_estimate^(1/n)
    double kappa_hat = 0.0;     // sampled sup of kappa_up(W^n p, pi)
    double envelope = inf;      // eta_chi2(W, pi) * (4 kappa_hat / (L pi_min))^(1/n)
    double slack = inf;
    bool within_envelope = true;
};

struct RateProfile {
    double eta_chi2 = 0.0;
    ProbVec pi;
    std::string condition;  // structural condition that licenses the profile
    std::vector<ProfilePoint> points;
};

inline RateProfile contraction_rate_profile(const Channel& W, const Generator& g, int n_max, const SamplerBudget& budget = {}) {
    if (n_max < 2) throw domain_error("contraction_rate_profile: n_max must be at least 2");
    ChainStructure cs = structure(W);
    if (!cs.stationary_unique) throw domain_error("contraction_rate_profile: stationary distribution is not unique");
    RateProfile prof;
    prof.pi = *cs.stationary;
    const bool full = prof.pi.support_size() == prof.pi.size();
    if (cs.irreducible && cs.aperiodic)
        prof.condition = "irreducible-aperiodic";
    else if (cs.scrambling && (full || is_inf(g.fprime_at_inf)))
        prof.condition = "scrambling";
    else if (cs.indecomposable.value_or(false) && full)
        prof.condition = "indecomposable-full-support";
    else
        throw domain_error("contraction_rate_profile: no structural condition holds");
    if (!g.f2_at_zero_finite && !cs.positivity_index)
        throw domain_error("contraction_rate_profile: f''(0) is infinite and no power of W is entrywise positive");

    prof.eta_chi2 = eta_chi2(W, prof.pi).value;
    const double L = g.lf();
    const double pimin = prof.pi.min_on_support();
    for (int n = 1; n <= n_max; ++n) {
        Channel Wn = W.power(n);
        ProfilePoint pt;
        pt.n = n;
        pt.eta_estimate = eta_f_estimate(Wn, prof.pi, g, budget).estimate;
        pt.rate = std::pow(pt.eta_estimate, 1.0 / n);
        if (L > 0.0) {
            KappaSup ks = sampled_kappa_sup(Wn, prof.pi, g, budget);
            pt.kappa_hat = ks.value;
            if (!is_inf(ks.value)) {
                double factor = std::pow(4.0 * ks.value / (L * pimin), 1.0 / n);
                pt.slack = factor - 1.0;
                pt.envelope = prof.eta_chi2 * factor;
            }
        }
        pt.within_envelope = is_inf(pt.envelope) || pt.rate <= pt.envelope + 1e-9;
        prof.points.push_back(pt);
    }
    return prof;
}

struct ConvergenceBound {
    double tv_actual = 0.0;
    double bound_general = 0.0;  // may be +inf
    std::optional<double> bound_full_support;
    bool vacuous = false;
    bool holds = true;
};

inline ConvergenceBound convergence_bound(const Channel& W, const ProbVec& pi, const ProbVec& p, int n) {
    if (!W.square() || pi.size() != W.inputs() || p.size() != W.inputs()) throw domain_error("convergence_bound: dimension mismatch");
    if ((W.matrix() * pi.vec() - pi.vec()).lpNorm<1>() > 1e-9) throw domain_error("convergence_bound: pi is not stationary");
    ConvergenceBound r;
    double eta = eta_chi2(W, pi).value;
    double decay = std::pow(eta, 0.5 * n);
    r.tv_actual = total_variation(iterate(W, p, n), pi);
    double chi2 = chi_squared(p, pi);
    r.vacuous = is_inf(chi2);
    r.bound_general = r.vacuous ? inf : 0.5 * decay * std::sqrt(chi2);
    if (pi.support_size() == pi.size()) r.bound_full_support = std::sqrt(1.0 / (2.0 * pi.min_entry())) * decay;
    r.holds = (r.vacuous || r.tv_actual <= r.bound_general + 1e-9) &&
              (!r.bound_full_support || r.tv_actual <= *r.bound_full_support + 1e-9);
    return r;
}

struct MixingTimes {
    double eta_chi2 = 0.0;
    double pi_min = 0.0;
    int tv_bound = 0;
    int empirical_tv = 0;
    std::optional<int> f_bound;
    std::optional<int> empirical_f;
    std::string f_note;
    bool holds = true;
};

namespace detail {

inline int ceil_nonneg(double v) { return v <= 0.0 ? 0 : static_cast<int>(std::ceil(v - 1e-12)); }

}  // namespace detail

inline MixingTimes mixing_time_bounds(const Channel& W, double delta, const std::optional<Generator>& g = std::nullopt,
                                      int search_cap = 1000000) {
    if (!(delta > 0.0)) throw domain_error("mixing_time_bounds: delta must be positive");
    StationaryResult st = stationary_distribution(W);
    if (!st.unique) throw domain_error("mixing_time_bounds: stationary distribution is not unique");
    if (st.pi.support_size() != st.pi.size()) throw domain_error("mixing_time_bounds: stationary distribution lacks full support");
    MixingTimes r;
    r.eta_chi2 = eta_chi2(W, st.pi).value;
    if (r.eta_chi2 >= 1.0 - 1e-12) throw domain_error("mixing_time_bounds: eta_chi2 is 1, no finite bound");
    r.pi_min = st.pi.min_entry();
    const double log_inv_eta = std::log(1.0 / r.eta_chi2);
    if (delta >= 1.0)
        r.tv_bound = 0;
    else
        r.tv_bound = detail::ceil_nonneg(2.0 * std::log(1.0 / (std::sqrt(2.0 * r.pi_min) * delta)) / log_inv_eta);

    const Eigen::Index n = W.inputs();
    const Mat& M = W.matrix();
    const Vec& pi = st.pi.vec();
    auto worst_tv = [&](const Mat& P) {
        double w = 0.0;
        for (Eigen::Index x = 0; x < n; ++x) w = std::max(w, 0.5 * (P.col(x) - pi).lpNorm<1>());
        return w;
    };
    Mat P = Mat::Identity(n, n);
    int k = 0;
    while (worst_tv(P) > delta && k < search_cap) {
        P = M * P;
        ++k;
    }
    r.empirical_tv = k;
    r.holds = r.empirical_tv <= r.tv_bound;

    if (g) {
        if (!g->g_concave)
            r.f_note = "requires (f(t) - f(0))/t concave";
        else if (!std::isfinite(g->f_at_zero))
            r.f_note = "requires finite f(0)";
        else {
            double c = g->f1(1.0) + g->f_at_zero;
            if (!(c > 0.0))
                r.f_bound = 0;
            else
                r.f_bound = detail::ceil_nonneg((std::log(2.0 / (delta * r.pi_min)) + std::log(c)) / log_inv_eta);
            auto worst_f = [&](const Mat& Q) {
                double w = 0.0;
                for (Eigen::Index x = 0; x < n; ++x)
                    w = std::max(w, f_divergence(*g, WeightVec(Vec(Q.col(x).cwiseMax(0.0))), st.pi));
                return w;
            };
            Mat Q = Mat::Identity(n, n);
            int m = 0;
            while (worst_f(Q) > delta && m < search_cap) {
                Q = M * Q;
                ++m;
            }
            r.empirical_f = m;
            r.holds = r.holds && m <= *r.f_bound;
        }
    }
    return r;
}

}  // namespace divlab
