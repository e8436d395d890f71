#pragma once

#include "divergence.hpp"

#include <algorithm>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace divlab {

// Column-stochastic matrix; output distribution is W * p.
class Channel {
public:
    Channel() = default;

    explicit Channel(const Mat& W, double column_tol = 1e-10) : W_(W) {
        if (W_.rows() < 1 || W_.cols() < 1) throw domain_error("Channel: empty matrix");
        for (Eigen::Index i = 0; i < W_.rows(); ++i)
            for (Eigen::Index j = 0; j < W_.cols(); ++j) {
                double& w = W_(i, j);
                if (!std::isfinite(w)) throw domain_error("Channel: non-finite entry");
                if (w < -1e-14) throw domain_error("Channel: negative entry");
                if (w < 0.0) w = 0.0;
            }
        for (Eigen::Index j = 0; j < W_.cols(); ++j) {
            double s = W_.col(j).sum();
            if (std::abs(s - 1.0) > column_tol)
                throw domain_error("Channel: column " + std::to_string(j) + " sums to " + std::to_string(s));
        }
    }

    const Mat& matrix() const { return W_; }
    Eigen::Index inputs() const { return W_.cols(); }
    Eigen::Index outputs() const { return W_.rows(); }
    bool square() const { return W_.rows() == W_.cols(); }

    ProbVec apply(const ProbVec& p) const {
        if (p.size() != inputs()) throw domain_error("Channel::apply: dimension mismatch");
        return ProbVec::normalized(W_ * p.vec());
    }

    Vec apply_raw(const Vec& p) const { return W_ * p; }

    Channel power(int n) const {
        if (!square()) throw domain_error("Channel::power: channel must be square");
        if (n < 0) throw domain_error("Channel::power: negative exponent");
        Mat R = Mat::Identity(W_.rows(), W_.cols());
        Mat B = W_;
        for (int e = n; e > 0; e >>= 1) {
            if (e & 1) R = B * R;
            B = B * B;
        }
        return Channel(renormalize_columns(R), 1e-8);
    }

    // Product channel "this after other".
    Channel after(const Channel& other) const {
        if (inputs() != other.outputs()) throw domain_error("Channel::after: dimension mismatch");
        return Channel(renormalize_columns(W_ * other.W_), 1e-8);
    }

private:
    static Mat renormalize_columns(Mat M) {
        for (Eigen::Index j = 0; j < M.cols(); ++j) M.col(j) /= M.col(j).sum();
        return M;
    }

    Mat W_;
};

inline Channel bsc(double p) {
    if (!(p >= 0.0 && p <= 1.0)) throw domain_error("bsc: crossover must lie in [0,1]");
    Mat W(2, 2);
    W << 1.0 - p, p, p, 1.0 - p;
    return Channel(W);
}

inline Channel identity_channel(Eigen::Index n) { return Channel(Mat::Identity(n, n)); }

// Every input is mapped to output y.
inline Channel constant_channel(Eigen::Index n, Eigen::Index y) {
    if (y < 0 || y >= n) throw domain_error("constant_channel: output index out of range");
    Mat W = Mat::Zero(n, n);
    W.row(y).setOnes();
    return Channel(W);
}

// Uniform over the other symbols.
inline Channel uniform_off_diagonal(Eigen::Index n) {
    if (n < 2) throw domain_error("uniform_off_diagonal: need at least two symbols");
    Mat W = Mat::Constant(n, n, 1.0 / static_cast<double>(n - 1));
    W.diagonal().setZero();
    return Channel(W);
}

inline Channel noisy_typewriter4() {
    Mat W(4, 4);
    W << 1, 1, 0, 0,  //
        0, 1, 1, 0,   //
        0, 0, 1, 1,   //
        1, 0, 0, 1;
    return Channel(0.5 * W);
}

inline Channel random_channel(Eigen::Index outputs, Eigen::Index inputs, std::mt19937_64& rng) {
    Mat W(outputs, inputs);
    for (Eigen::Index j = 0; j < inputs; ++j) W.col(j) = sample_dirichlet(outputs, rng).vec();
    return Channel(W, 1e-9);
}

inline ProbVec iterate(const Channel& W, const ProbVec& p, int n, std::vector<std::string>* warnings = nullptr) {
    if (n < 0) throw domain_error("iterate: n must be non-negative");
    if (p.size() != W.inputs() || (n > 0 && !W.square())) throw domain_error("iterate: dimension mismatch");
    Vec v = p.vec();
    for (int k = 0; k < n; ++k) v = W.matrix() * v;
    double s = v.sum();
    if (std::abs(s - 1.0) > 1e-9) {
        if (warnings) warnings->push_back("iterate: mass drift " + std::to_string(s - 1.0) + " renormalized");
        v /= s;
    }
    return ProbVec::normalized(v);
}

struct StationaryResult {
    ProbVec pi;
    bool unique = false;
    int eigenspace_dim = 0;
};

namespace detail {

using BoolMat = Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic>;

inline BoolMat support_pattern(const Mat& W) { return (W.array() > support_epsilon).matrix(); }

inline BoolMat bool_product(const BoolMat& A, const BoolMat& B) {
    BoolMat C = BoolMat::Constant(A.rows(), B.cols(), false);
    for (Eigen::Index i = 0; i < A.rows(); ++i)
        for (Eigen::Index k = 0; k < A.cols(); ++k)
            if (A(i, k))
                for (Eigen::Index j = 0; j < B.cols(); ++j) C(i, j) = C(i, j) || B(k, j);
    return C;
}

// reach(y, x): y reachable from x in zero or more steps (W(y|x) edges x -> y).
inline BoolMat reachability(const Mat& W) {
    const Eigen::Index n = W.rows();
    BoolMat R = support_pattern(W);
    for (Eigen::Index i = 0; i < n; ++i) R(i, i) = true;
    for (Eigen::Index k = 0; k < n; ++k)
        for (Eigen::Index x = 0; x < n; ++x)
            if (R(k, x))
                for (Eigen::Index y = 0; y < n; ++y)
                    if (R(y, k)) R(y, x) = true;
    return R;
}

// Stationary distribution of the closed class containing `members`, embedded in the full alphabet.
inline Vec class_stationary(const Mat& W, const std::vector<Eigen::Index>& members) {
    const Eigen::Index m = static_cast<Eigen::Index>(members.size());
    Mat A(m, m);
    for (Eigen::Index a = 0; a < m; ++a)
        for (Eigen::Index b = 0; b < m; ++b) A(a, b) = W(members[a], members[b]) - (a == b ? 1.0 : 0.0);
    A.row(m - 1).setOnes();
    Vec rhs = Vec::Zero(m);
    rhs[m - 1] = 1.0;
    Vec sol = A.fullPivLu().solve(rhs);
    Vec out = Vec::Zero(W.rows());
    for (Eigen::Index a = 0; a < m; ++a) out[members[a]] = std::max(0.0, sol[a]);
    return out / out.sum();
}

}  // namespace detail

inline StationaryResult stationary_distribution(const Channel& W) {
    if (!W.square()) throw domain_error("stationary_distribution: channel must be square");
    const Mat& M = W.matrix();
    const Eigen::Index n = M.rows();
    Mat A = M - Mat::Identity(n, n);
    Eigen::JacobiSVD<Mat> svd(A);
    const Vec& sv = svd.singularValues();
    int nullity = 0;
    for (Eigen::Index i = 0; i < sv.size(); ++i) nullity += sv[i] <= 1e-8;

    // closed communicating classes
    auto R = detail::reachability(M);
    std::vector<bool> assigned(n, false);
    std::vector<std::vector<Eigen::Index>> closed;
    for (Eigen::Index x = 0; x < n; ++x) {
        if (assigned[x]) continue;
        std::vector<Eigen::Index> cls;
        for (Eigen::Index y = 0; y < n; ++y)
            if (R(y, x) && R(x, y)) cls.push_back(y);
        for (auto y : cls) assigned[y] = true;
        bool is_closed = true;
        for (auto y : cls)
            for (Eigen::Index z = 0; z < n; ++z)
                if (R(z, y) && !R(y, z)) is_closed = false;
        if (is_closed) closed.push_back(cls);
    }
    if (closed.empty()) throw numerical_error("stationary_distribution: no closed class found");
    Vec pi = Vec::Zero(n);
    for (const auto& cls : closed) pi += detail::class_stationary(M, cls);
    pi /= pi.sum();
    if ((M * pi - pi).lpNorm<1>() > 1e-9) throw numerical_error("stationary_distribution: residual exceeds 1e-9");

    StationaryResult out;
    out.pi = ProbVec::normalized(pi);
    out.eigenspace_dim = nullity;
    out.unique = nullity == 1;
    return out;
}

struct ChainStructure {
    bool scrambling = false;
    bool irreducible = false;
    bool aperiodic = false;
    std::optional<bool> indecomposable;  // empty when the stationary distribution is not unique
    std::optional<ProbVec> stationary;
    bool stationary_unique = false;
    std::optional<int> positivity_index;
    std::vector<long> periods;  // 0 when no return was observed within n_cap
};

inline ChainStructure structure(const Channel& W, std::optional<int> n_cap_opt = std::nullopt) {
    if (!W.square()) throw domain_error("structure: channel must be square");
    const Mat& M = W.matrix();
    const Eigen::Index n = M.rows();
    const int n_cap = n_cap_opt ? *n_cap_opt : static_cast<int>(std::max<Eigen::Index>(n * n, 64));
    if (n_cap < n * n) throw domain_error("structure: n_cap must be at least |X|^2");

    ChainStructure s;
    s.scrambling = true;
    for (Eigen::Index a = 0; a < n && s.scrambling; ++a)
        for (Eigen::Index b = a + 1; b < n; ++b) {
            double overlap = 0.0;
            for (Eigen::Index y = 0; y < n; ++y)
                if (M(y, a) > support_epsilon && M(y, b) > support_epsilon) overlap += M(y, a) * M(y, b);
            if (!(overlap > 0.0)) {
                s.scrambling = false;
                break;
            }
        }

    auto B = detail::support_pattern(M);
    detail::BoolMat P = B;
    detail::BoolMat reach = B;
    Mat Wn = M;
    s.periods.assign(n, 0);
    for (int k = 1; k <= n_cap; ++k) {
        if (k > 1) {
            P = detail::bool_product(B, P);
            Wn = M * Wn;
            reach = reach.array() || P.array();
        }
        for (Eigen::Index x = 0; x < n; ++x)
            if (P(x, x)) s.periods[x] = std::gcd(s.periods[x], static_cast<long>(k));
        if (!s.positivity_index && (Wn.array() > support_epsilon).all()) s.positivity_index = k;
    }
    s.irreducible = reach.all();
    s.aperiodic = std::all_of(s.periods.begin(), s.periods.end(), [](long d) { return d == 1; });

    StationaryResult st = stationary_distribution(W);
    s.stationary = st.pi;
    s.stationary_unique = st.unique;
    if (st.unique) {
        // bipartite support graph of p_XY(x, y) = W(y|x) pi(x)
        const Vec& pi = st.pi.vec();
        Vec py = M * pi;
        std::vector<Eigen::Index> parent(2 * n);
        for (Eigen::Index i = 0; i < 2 * n; ++i) parent[i] = i;
        std::function<Eigen::Index(Eigen::Index)> find = [&](Eigen::Index i) {
            return parent[i] == i ? i : parent[i] = find(parent[i]);
        };
        for (Eigen::Index x = 0; x < n; ++x)
            for (Eigen::Index y = 0; y < n; ++y)
                if (M(y, x) * pi[x] > support_epsilon) parent[find(x)] = find(n + y);
        std::optional<Eigen::Index> root;
        bool connected = true;
        for (Eigen::Index i = 0; i < 2 * n; ++i) {
            bool active = i < n ? pi[i] > support_epsilon : py[i - n] > support_epsilon;
            if (!active) continue;
            if (!root) root = find(i);
            else if (find(i) != *root) connected = false;
        }
        s.indecomposable = connected;
    }
    return s;
}

}  // namespace divlab
