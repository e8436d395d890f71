#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <random>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace divlab {

// Entries below this magnitude are treated as exact zeros.
inline constexpr double support_epsilon = 1e-12;

inline constexpr double inf = std::numeric_limits<double>::infinity();

// Extended reals are IEEE doubles restricted to finite values and +inf.
inline bool is_inf(double v) { return std::isinf(v) && v > 0; }
inline bool is_finite(double v) { return std::isfinite(v); }

// 0 * inf = 0, the measure-theoretic convention.
inline double ext_mul(double a, double b) {
    if (a == 0.0 || b == 0.0) return 0.0;
    return a * b;
}

struct domain_error : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct numerical_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

// Non-negative vector over a finite alphabet.
class WeightVec {
public:
    WeightVec() = default;

    explicit WeightVec(const Vec& v) : v_(v) {
        if (v_.size() < 1) throw domain_error("WeightVec: empty alphabet");
        for (Eigen::Index i = 0; i < v_.size(); ++i) {
            if (!std::isfinite(v_[i])) throw domain_error("WeightVec: non-finite entry");
            if (v_[i] < -support_epsilon) throw domain_error("WeightVec: negative entry");
            if (v_[i] < support_epsilon) v_[i] = 0.0;
        }
    }

    WeightVec(std::initializer_list<double> xs) : WeightVec(from_list(xs)) {}

    const Vec& vec() const { return v_; }
    Eigen::Index size() const { return v_.size(); }
    double operator[](Eigen::Index i) const { return v_[i]; }
    double sum() const { return v_.sum(); }

    bool in_support(Eigen::Index i) const { return v_[i] > 0.0; }

    Eigen::Index support_size() const {
        Eigen::Index n = 0;
        for (Eigen::Index i = 0; i < v_.size(); ++i) n += v_[i] > 0.0;
        return n;
    }

    // Smallest entry on the support.
    double min_on_support() const {
        double m = inf;
        for (Eigen::Index i = 0; i < v_.size(); ++i)
            if (v_[i] > 0.0) m = std::min(m, v_[i]);
        return m;
    }

    double min_entry() const { return v_.minCoeff(); }

private:
    static Vec from_list(std::initializer_list<double> xs) {
        Vec v(static_cast<Eigen::Index>(xs.size()));
        Eigen::Index i = 0;
        for (double x : xs) v[i++] = x;
        return v;
    }

    Vec v_;
};

// WeightVec with unit sum.
class ProbVec : public WeightVec {
public:
    ProbVec() = default;

    explicit ProbVec(const Vec& v) : WeightVec(v) {
        if (std::abs(sum() - 1.0) > 1e-10) throw domain_error("ProbVec: entries do not sum to one");
    }

    ProbVec(std::initializer_list<double> xs) : WeightVec(xs) {
        if (std::abs(sum() - 1.0) > 1e-10) throw domain_error("ProbVec: entries do not sum to one");
    }

    static ProbVec uniform(Eigen::Index n) { return ProbVec(Vec::Constant(n, 1.0 / static_cast<double>(n))); }

    static ProbVec vertex(Eigen::Index n, Eigen::Index k) {
        Vec v = Vec::Zero(n);
        v[k] = 1.0;
        return ProbVec(v);
    }

    // Rescales a non-negative vector to unit sum.
    static ProbVec normalized(const Vec& v) {
        Vec w = v.cwiseMax(0.0);
        double s = w.sum();
        if (!(s > 0.0)) throw domain_error("ProbVec: zero mass");
        return ProbVec(w / s);
    }
};

inline void require_same_alphabet(const WeightVec& p, const WeightVec& q) {
    if (p.size() != q.size()) throw domain_error("alphabet mismatch");
}

inline bool absolutely_continuous(const WeightVec& p, const WeightVec& q) {
    for (Eigen::Index i = 0; i < p.size(); ++i)
        if (p[i] > 0.0 && q[i] == 0.0) return false;
    return true;
}

inline bool equal_sums(const WeightVec& p, const WeightVec& q, double tol = 1e-9) {
    return std::abs(p.sum() - q.sum()) <= tol * std::max(1.0, std::abs(q.sum()));
}

// Deterministic per-index streams: the stream for index i depends only on (seed, i).
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::mt19937_64 stream_rng(std::uint64_t seed, std::uint64_t index) {
    return std::mt19937_64(splitmix64(seed ^ splitmix64(index + 0x632be59bd9b4e019ULL)));
}

inline ProbVec sample_dirichlet(Eigen::Index n, std::mt19937_64& rng, double alpha = 1.0) {
    std::gamma_distribution<double> gam(alpha, 1.0);
    Vec v(n);
    for (Eigen::Index i = 0; i < n; ++i) v[i] = gam(rng);
    if (v.sum() <= 0.0) v.setConstant(1.0);
    return ProbVec(v / v.sum());
}

// Gauss-Legendre nodes and weights on [0, 1].
struct Quadrature {
    std::vector<double> nodes;
    std::vector<double> weights;
};

inline Quadrature gauss_legendre(int n) {
    if (n < 1) throw domain_error("gauss_legendre: need at least one node");
    Quadrature q;
    q.nodes.resize(n);
    q.weights.resize(n);
    const double pi = std::acos(-1.0);
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double x = std::cos(pi * (i + 0.75) / (n + 0.5));
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = pk;
            }
            double dp = n * (x * p1 - p0) / (x * x - 1.0);
            double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        // recompute derivative at the converged root
        double p0 = 1.0, p1 = x;
        for (int k = 2; k <= n; ++k) {
            double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
            p0 = p1;
            p1 = pk;
        }
        double dp = n * (x * p1 - p0) / (x * x - 1.0);
        double w = 2.0 / ((1.0 - x * x) * dp * dp);
        q.nodes[i] = 0.5 * (1.0 - x);
        q.nodes[n - 1 - i] = 0.5 * (1.0 + x);
        q.weights[i] = 0.5 * w;
        q.weights[n - 1 - i] = 0.5 * w;
    }
    return q;
}

// Runs fn(i) for i in [0, count) on up to `workers` threads; each index is visited once.
template <class Fn>
void parallel_for(std::size_t count, int workers, Fn&& fn) {
    if (workers <= 1 || count < 2) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::size_t w = std::min<std::size_t>(static_cast<std::size_t>(workers), count);
    std::vector<std::thread> pool;
    pool.reserve(w);
    for (std::size_t k = 0; k < w; ++k)
        pool.emplace_back([&, k] {
            for (std::size_t i = k; i < count; i += w) fn(i);
        });
    for (auto& t : pool) t.join();
}

inline std::vector<double> log_grid(double lo, double hi, int n) {
    std::vector<double> t(n);
    double a = std::log(lo), b = std::log(hi);
    for (int i = 0; i < n; ++i) t[i] = std::exp(a + (b - a) * i / (n - 1));
    return t;
}

}  // namespace divlab
