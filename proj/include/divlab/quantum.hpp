#pragma once

#include "chi2bounds.hpp"
#include "contraction.hpp"
#include "markov.hpp"

#include <complex>
#include <optional>
#include <string>
#include <vector>

namespace divlab {

using cplx = std::complex<double>;
using CMat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;

class DensityMatrix {
public:
    DensityMatrix() = default;

    explicit DensityMatrix(const CMat& m, double tol = 1e-10) {
        if (m.rows() < 1 || m.rows() != m.cols()) throw domain_error("DensityMatrix: matrix must be square and non-empty");
        if (!m.allFinite()) throw domain_error("DensityMatrix: non-finite entry");
        if ((m - m.adjoint()).cwiseAbs().maxCoeff() > tol) throw domain_error("DensityMatrix: matrix is not Hermitian");
        m_ = 0.5 * (m + m.adjoint());
        if (std::abs(m_.trace().real() - 1.0) > tol) throw domain_error("DensityMatrix: trace differs from one");
        Eigen::SelfAdjointEigenSolver<CMat> es(m_, Eigen::EigenvaluesOnly);
        if (es.eigenvalues().minCoeff() < -tol) throw domain_error("DensityMatrix: negative eigenvalue");
    }

    static DensityMatrix maximally_mixed(Eigen::Index d) {
        return DensityMatrix(CMat::Identity(d, d) / static_cast<double>(d));
    }

    static DensityMatrix pure(const CVec& psi) {
        CVec v = psi / psi.norm();
        return DensityMatrix(v * v.adjoint());
    }

    static DensityMatrix diagonal(const ProbVec& p) {
        CMat m = CMat::Zero(p.size(), p.size());
        for (Eigen::Index i = 0; i < p.size(); ++i) m(i, i) = p[i];
        return DensityMatrix(m);
    }

    // Rescales a positive semidefinite Hermitian matrix to unit trace.
    static DensityMatrix normalized(const CMat& m) {
        CMat h = 0.5 * (m + m.adjoint());
        double t = h.trace().real();
        if (!(t > 0.0)) throw domain_error("DensityMatrix: zero trace");
        return DensityMatrix(h / t, 1e-9);
    }

    const CMat& matrix() const { return m_; }
    Eigen::Index dim() const { return m_.rows(); }

private:
    CMat m_;
};

struct Spectrum {
    Vec values;    // ascending, entries below 1e-12 set to zero
    CMat vectors;  // orthonormal columns
};

inline Spectrum spectral_decomposition(const CMat& h) {
    if ((h - h.adjoint()).cwiseAbs().maxCoeff() > 1e-9) throw domain_error("spectral_decomposition: matrix is not Hermitian");
    Eigen::SelfAdjointEigenSolver<CMat> es(0.5 * (h + h.adjoint()));
    if (es.info() != Eigen::Success) throw numerical_error("spectral_decomposition: eigen solve failed");
    Spectrum s{es.eigenvalues(), es.eigenvectors()};
    for (Eigen::Index i = 0; i < s.values.size(); ++i)
        if (s.values[i] < 1e-12) s.values[i] = 0.0;
    return s;
}

inline Spectrum spectral_decomposition(const DensityMatrix& rho) { return spectral_decomposition(rho.matrix()); }

inline double lambda_min(const DensityMatrix& rho) { return spectral_decomposition(rho).values.minCoeff(); }

// Smallest non-zero eigenvalue.
inline double lambda_min_nonzero(const DensityMatrix& rho) {
    const Vec& v = spectral_decomposition(rho).values;
    double m = inf;
    for (Eigen::Index i = 0; i < v.size(); ++i)
        if (v[i] > 0.0) m = std::min(m, v[i]);
    return m;
}

inline double trace_distance(const DensityMatrix& a, const DensityMatrix& b) {
    if (a.dim() != b.dim()) throw domain_error("trace_distance: dimension mismatch");
    Eigen::SelfAdjointEigenSolver<CMat> es(a.matrix() - b.matrix(), Eigen::EigenvaluesOnly);
    return 0.5 * es.eigenvalues().cwiseAbs().sum();
}

inline double hilbert_schmidt_sq(const DensityMatrix& a, const DensityMatrix& b) {
    return (a.matrix() - b.matrix()).squaredNorm();
}

// Row-major over (x, y): index x * d + y.
struct NSPair {
    WeightVec p;
    WeightVec q;
    Eigen::Index d = 0;
};

inline NSPair ns_from_spectra(const Spectrum& a, const Spectrum& b) {
    const Eigen::Index d = a.values.size();
    if (b.values.size() != d) throw domain_error("ns_distributions: dimension mismatch");
    Vec p(d * d), q(d * d);
    for (Eigen::Index x = 0; x < d; ++x)
        for (Eigen::Index y = 0; y < d; ++y) {
            double c = std::norm(a.vectors.col(x).dot(b.vectors.col(y)));
            p[x * d + y] = a.values[x] * c;
            q[x * d + y] = b.values[y] * c;
        }
    return {WeightVec(p), WeightVec(q), d};
}

inline NSPair ns_distributions(const DensityMatrix& rho, const DensityMatrix& sigma) {
    if (rho.dim() != sigma.dim()) throw domain_error("ns_distributions: dimension mismatch");
    return ns_from_spectra(spectral_decomposition(rho), spectral_decomposition(sigma));
}

// supp(rho) contained in supp(sigma).
inline bool quantum_absolutely_continuous(const DensityMatrix& rho, const DensityMatrix& sigma) {
    Spectrum s = spectral_decomposition(sigma);
    double leak = 0.0;
    for (Eigen::Index y = 0; y < s.values.size(); ++y)
        if (s.values[y] == 0.0) leak += (s.vectors.col(y).adjoint() * rho.matrix() * s.vectors.col(y))(0, 0).real();
    return leak <= 1e-12;
}

// sum over positive spectra of mu_y f(lambda_x/mu_y) |<e_x|f_y>|^2 plus f(0+) Tr[(I-P0) sigma] + f'(inf) Tr[rho (I-Q0)].
// Summed as q [f(r) - f'(1)(r-1)] per NS cell, which is equal because both traces are one.
inline double petz_from_spectra(const Generator& g, const Spectrum& a, const Spectrum& b) {
    const Eigen::Index d = a.values.size();
    if (b.values.size() != d) throw domain_error("petz_f_divergence: dimension mismatch");
    const double f1 = g.f1(1.0);
    double main = 0.0, outside_rho = 0.0, outside_sigma = 0.0;
    for (Eigen::Index x = 0; x < d; ++x)
        for (Eigen::Index y = 0; y < d; ++y) {
            double c = std::norm(a.vectors.col(x).dot(b.vectors.col(y)));
            if (c <= 1e-12) continue;
            double l = a.values[x], m = b.values[y];
            if (l > 0.0 && m > 0.0) {
                double r = l / m;
                bool near = std::abs(r - 1.0) <= 0.5 && detail::smooth_between(g, std::min(r, 1.0), std::max(r, 1.0));
                main += m * c * (near ? detail::second_order_part(g, r) : g.f(r) - f1 * (r - 1.0));
            } else if (m > 0.0) {
                outside_rho += m * c;
            } else if (l > 0.0) {
                outside_sigma += l * c;
            }
        }
    double total = main;
    if (outside_rho > 0.0) total += outside_rho * (g.f_at_zero + f1);
    if (outside_sigma > 0.0) total += outside_sigma * (g.fprime_at_inf - f1);
    return is_inf(total) ? inf : std::max(total, 0.0);
}

inline double petz_f_divergence(const Generator& g, const DensityMatrix& rho, const DensityMatrix& sigma) {
    if (rho.dim() != sigma.dim()) throw domain_error("petz_f_divergence: dimension mismatch");
    return petz_from_spectra(g, spectral_decomposition(rho), spectral_decomposition(sigma));
}

// Tr[sigma^+ (rho - sigma)^2], +inf unless supp(rho) lies in supp(sigma).
inline double petz_chi2(const DensityMatrix& rho, const DensityMatrix& sigma) {
    if (rho.dim() != sigma.dim()) throw domain_error("petz_chi2: dimension mismatch");
    if (!quantum_absolutely_continuous(rho, sigma)) return inf;
    Spectrum s = spectral_decomposition(sigma);
    Vec inv = Vec::Zero(s.values.size());
    for (Eigen::Index y = 0; y < s.values.size(); ++y)
        if (s.values[y] > 0.0) inv[y] = 1.0 / s.values[y];
    CMat pinv = s.vectors * inv.cast<cplx>().asDiagonal() * s.vectors.adjoint();
    CMat D = rho.matrix() - sigma.matrix();
    return std::max(0.0, (pinv * D * D).trace().real());
}

class KrausChannel {
public:
    KrausChannel() = default;

    explicit KrausChannel(std::vector<CMat> ks, double tol = 1e-9) : ks_(std::move(ks)) {
        if (ks_.empty()) throw domain_error("KrausChannel: empty Kraus list");
        const Eigen::Index dout = ks_[0].rows(), din = ks_[0].cols();
        if (dout < 1 || din < 1) throw domain_error("KrausChannel: empty Kraus operator");
        CMat sum = CMat::Zero(din, din);
        for (const auto& k : ks_) {
            if (k.rows() != dout || k.cols() != din) throw domain_error("KrausChannel: inconsistent Kraus dimensions");
            if (!k.allFinite()) throw domain_error("KrausChannel: non-finite entry");
            sum += k.adjoint() * k;
        }
        double dev = (sum - CMat::Identity(din, din)).cwiseAbs().maxCoeff();
        if (dev > tol) throw domain_error("KrausChannel: completeness violated by " + std::to_string(dev));
    }

    const std::vector<CMat>& kraus() const { return ks_; }
    Eigen::Index d_in() const { return ks_[0].cols(); }
    Eigen::Index d_out() const { return ks_[0].rows(); }
    bool square() const { return d_in() == d_out(); }

    CMat apply_raw(const CMat& x) const {
        CMat out = CMat::Zero(d_out(), d_out());
        for (const auto& k : ks_) out += k * x * k.adjoint();
        return out;
    }

    // vec(E(X)) = S vec(X) with column-major vec.
    CMat superoperator() const {
        const Eigen::Index a = d_in(), b = d_out();
        CMat S = CMat::Zero(b * b, a * a);
        for (const auto& k : ks_) {
            CMat kc = k.conjugate();
            for (Eigen::Index i = 0; i < b; ++i)
                for (Eigen::Index j = 0; j < a; ++j) S.block(i * b, j * a, b, a) += kc(i, j) * k;
        }
        return S;
    }

    // Choi matrix sum_i vec(K_i) vec(K_i)^dagger.
    CMat choi() const {
        const Eigen::Index n = d_in() * d_out();
        CMat J = CMat::Zero(n, n);
        for (const auto& k : ks_) {
            CVec v = Eigen::Map<const CVec>(k.data(), n);
            J += v * v.adjoint();
        }
        return J;
    }

private:
    std::vector<CMat> ks_;
};

inline DensityMatrix apply_channel(const KrausChannel& E, const DensityMatrix& rho) {
    if (rho.dim() != E.d_in()) throw domain_error("apply_channel: dimension mismatch");
    return DensityMatrix::normalized(E.apply_raw(rho.matrix()));
}

// Kraus representation with at most d_in * d_out operators.
inline KrausChannel minimal_kraus(const KrausChannel& E) {
    CMat J = E.choi();
    Eigen::SelfAdjointEigenSolver<CMat> es(0.5 * (J + J.adjoint()));
    if (es.info() != Eigen::Success) throw numerical_error("minimal_kraus: eigen solve failed");
    const Eigen::Index dout = E.d_out(), din = E.d_in();
    double top = std::max(es.eigenvalues().maxCoeff(), 0.0);
    std::vector<CMat> ks;
    for (Eigen::Index i = es.eigenvalues().size() - 1; i >= 0; --i) {
        double l = es.eigenvalues()[i];
        if (l <= 1e-14 * std::max(1.0, top)) continue;
        CVec v = std::sqrt(l) * es.eigenvectors().col(i);
        ks.push_back(Eigen::Map<const CMat>(v.data(), dout, din));
    }
    return KrausChannel(std::move(ks), 1e-8);
}

// E after F.
inline KrausChannel compose(const KrausChannel& E, const KrausChannel& F) {
    if (E.d_in() != F.d_out()) throw domain_error("compose: dimension mismatch");
    std::vector<CMat> ks;
    ks.reserve(E.kraus().size() * F.kraus().size());
    for (const auto& a : E.kraus())
        for (const auto& b : F.kraus()) ks.push_back(a * b);
    KrausChannel out(std::move(ks), 1e-8);
    if (out.kraus().size() > static_cast<std::size_t>(out.d_in() * out.d_out())) return minimal_kraus(out);
    return out;
}

inline KrausChannel channel_power(const KrausChannel& E, int n) {
    if (!E.square()) throw domain_error("channel_power: channel must be square");
    if (n < 0) throw domain_error("channel_power: negative exponent");
    KrausChannel R({CMat::Identity(E.d_in(), E.d_in())});
    KrausChannel B = E;
    for (int e = n; e > 0; e >>= 1) {
        if (e & 1) R = compose(B, R);
        if (e > 1) B = compose(B, B);
    }
    return R;
}

inline KrausChannel identity_qchannel(Eigen::Index d) { return KrausChannel({CMat::Identity(d, d)}); }

// rho -> (1 - lambda) rho + lambda Tr[rho] I/d, via Weyl operators.
inline KrausChannel depolarizing(Eigen::Index d, double lambda) {
    if (d < 1) throw domain_error("depolarizing: dimension must be positive");
    const double upper = d > 1 ? static_cast<double>(d * d) / static_cast<double>(d * d - 1) : 1.0;
    if (!(lambda >= 0.0 && lambda <= upper))
        throw domain_error("depolarizing: lambda outside the completely positive range");
    const double pi = std::acos(-1.0);
    const cplx w = std::polar(1.0, 2.0 * pi / static_cast<double>(d));
    const double dd = static_cast<double>(d * d);
    std::vector<CMat> ks;
    for (Eigen::Index a = 0; a < d; ++a)
        for (Eigen::Index b = 0; b < d; ++b) {
            double weight = lambda / dd + (a == 0 && b == 0 ? 1.0 - lambda : 0.0);
            if (weight <= 0.0) continue;
            CMat W = CMat::Zero(d, d);
            for (Eigen::Index k = 0; k < d; ++k) W((k + a) % d, k) = std::pow(w, static_cast<double>(b * k));
            ks.push_back(std::sqrt(weight) * W);
        }
    return KrausChannel(std::move(ks));
}

inline KrausChannel complete_dephasing(Eigen::Index d) {
    std::vector<CMat> ks;
    for (Eigen::Index k = 0; k < d; ++k) {
        CMat P = CMat::Zero(d, d);
        P(k, k) = 1.0;
        ks.push_back(P);
    }
    return KrausChannel(std::move(ks));
}

// rho -> Tr[rho] sigma.
inline KrausChannel replacer(const DensityMatrix& sigma, Eigen::Index d_in) {
    Spectrum s = spectral_decomposition(sigma);
    std::vector<CMat> ks;
    for (Eigen::Index y = 0; y < s.values.size(); ++y) {
        if (s.values[y] <= 0.0) continue;
        for (Eigen::Index j = 0; j < d_in; ++j) {
            CMat K = CMat::Zero(sigma.dim(), d_in);
            K.col(j) = std::sqrt(s.values[y]) * s.vectors.col(y);
            ks.push_back(K);
        }
    }
    return KrausChannel(std::move(ks), 1e-8);
}

// K_{yx} = sqrt(W(y|x)) |y><x|.
inline KrausChannel classical_embedding(const Channel& W) {
    const Mat& M = W.matrix();
    std::vector<CMat> ks;
    for (Eigen::Index x = 0; x < M.cols(); ++x)
        for (Eigen::Index y = 0; y < M.rows(); ++y) {
            if (!(M(y, x) > 0.0)) continue;
            CMat K = CMat::Zero(M.rows(), M.cols());
            K(y, x) = std::sqrt(M(y, x));
            ks.push_back(K);
        }
    return KrausChannel(std::move(ks));
}

inline KrausChannel amplitude_damping(double gamma) {
    if (!(gamma >= 0.0 && gamma <= 1.0)) throw domain_error("amplitude_damping: gamma must lie in [0,1]");
    CMat K0 = CMat::Zero(2, 2), K1 = CMat::Zero(2, 2);
    K0(0, 0) = 1.0;
    K0(1, 1) = std::sqrt(1.0 - gamma);
    K1(0, 1) = std::sqrt(gamma);
    return KrausChannel({K0, K1});
}

inline CVec random_state_vector(Eigen::Index d, std::mt19937_64& rng) {
    std::normal_distribution<double> nd;
    CVec v(d);
    for (Eigen::Index i = 0; i < d; ++i) v[i] = cplx(nd(rng), nd(rng));
    return v / v.norm();
}

inline DensityMatrix random_pure_state(Eigen::Index d, std::mt19937_64& rng) {
    return DensityMatrix::pure(random_state_vector(d, rng));
}

// Ginibre ensemble: G G^dagger / Tr, full rank almost surely.
inline DensityMatrix random_density(Eigen::Index d, std::mt19937_64& rng) {
    std::normal_distribution<double> nd;
    CMat G(d, d);
    for (Eigen::Index i = 0; i < d; ++i)
        for (Eigen::Index j = 0; j < d; ++j) G(i, j) = cplx(nd(rng), nd(rng));
    return DensityMatrix::normalized(G * G.adjoint());
}

// Random channel from the first d_in columns of a Haar-like unitary on C^{k d_out}.
inline KrausChannel random_kraus_channel(Eigen::Index d, int n_kraus, std::mt19937_64& rng) {
    std::normal_distribution<double> nd;
    const Eigen::Index rows = n_kraus * d;
    CMat G(rows, d);
    for (Eigen::Index i = 0; i < rows; ++i)
        for (Eigen::Index j = 0; j < d; ++j) G(i, j) = cplx(nd(rng), nd(rng));
    Eigen::HouseholderQR<CMat> qr(G);
    CMat V = qr.householderQ() * CMat::Identity(rows, d);
    std::vector<CMat> ks;
    for (int k = 0; k < n_kraus; ++k) ks.push_back(V.block(k * d, 0, d, d));
    return KrausChannel(std::move(ks), 1e-8);
}

namespace detail {

// Pure basis states plus |i>+|j> and |i>+i|j> superpositions; their span is all of M_d.
inline std::vector<DensityMatrix> probe_states(Eigen::Index d) {
    std::vector<DensityMatrix> out;
    for (Eigen::Index i = 0; i < d; ++i) out.push_back(DensityMatrix::pure(CVec::Unit(d, i)));
    for (Eigen::Index i = 0; i < d; ++i)
        for (Eigen::Index j = i + 1; j < d; ++j) {
            out.push_back(DensityMatrix::pure(CVec::Unit(d, i) + CVec::Unit(d, j)));
            out.push_back(DensityMatrix::pure(CVec::Unit(d, i) + cplx(0.0, 1.0) * CVec::Unit(d, j)));
        }
    return out;
}

inline CMat apply_super(const CMat& S, const CMat& x) {
    const Eigen::Index d = x.rows();
    CVec v = S * Eigen::Map<const CVec>(x.data(), d * d);
    return Eigen::Map<const CMat>(v.data(), d, d);
}

inline CMat super_power(const CMat& S, long n) {
    CMat R = CMat::Identity(S.rows(), S.cols());
    CMat B = S;
    for (long e = n; e > 0; e >>= 1) {
        if (e & 1) R = B * R;
        if (e > 1) B = B * B;
    }
    return R;
}

inline double hermitian_min_eig(const CMat& m) {
    Eigen::SelfAdjointEigenSolver<CMat> es(0.5 * (m + m.adjoint()), Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
}

}  // namespace detail

struct QuantumStructure {
    std::optional<DensityMatrix> fixed_point;
    bool unique = false;
    int eigenspace_dim = 0;
    bool mixing = false;
    bool strongly_mixing = false;
    std::optional<int> positivity_index;
};

inline QuantumStructure channel_structure(const KrausChannel& E, int n_cap = 1024, double tol = 1e-8) {
    if (!E.square()) throw domain_error("channel_structure: channel must be square");
    if (n_cap < 4) throw domain_error("channel_structure: n_cap must be at least 4");
    const Eigen::Index d = E.d_in();
    CMat S = E.superoperator();
    QuantumStructure r;
    Eigen::JacobiSVD<CMat> svd(S - CMat::Identity(d * d, d * d), Eigen::ComputeFullV);
    const Vec& sv = svd.singularValues();
    for (Eigen::Index i = 0; i < sv.size(); ++i) r.eigenspace_dim += sv[i] <= 1e-8;
    r.unique = r.eigenspace_dim == 1;
    if (!r.unique) return r;

    CVec v = svd.matrixV().col(d * d - 1);
    CMat X = Eigen::Map<const CMat>(v.data(), d, d);
    cplx tr = X.trace();
    if (std::abs(tr) < 1e-12) throw numerical_error("channel_structure: fixed point has zero trace");
    X *= std::conj(tr) / std::abs(tr);
    X = 0.5 * (X + X.adjoint());
    X /= X.trace().real();
    Eigen::SelfAdjointEigenSolver<CMat> es(X);
    Vec ev = es.eigenvalues().cwiseMax(0.0);
    X = es.eigenvectors() * ev.cast<cplx>().asDiagonal() * es.eigenvectors().adjoint();
    r.fixed_point = DensityMatrix::normalized(X);
    const DensityMatrix& pi = *r.fixed_point;

    auto probes = detail::probe_states(d);
    CMat Sn = detail::super_power(S, n_cap);
    r.mixing = true;
    for (const auto& p : probes) {
        CMat out = detail::apply_super(Sn, p.matrix());
        Eigen::SelfAdjointEigenSolver<CMat> diff(0.5 * (out + out.adjoint()) - pi.matrix(), Eigen::EigenvaluesOnly);
        if (0.5 * diff.eigenvalues().cwiseAbs().sum() > tol) {
            r.mixing = false;
            break;
        }
    }

    auto rng = stream_rng(0x5eed, 0);
    for (int i = 0; i < 8; ++i) probes.push_back(random_pure_state(d, rng));
    CMat P = CMat::Identity(d * d, d * d);
    for (int n = 1; n <= n_cap; ++n) {
        P = S * P;
        bool positive = true;
        for (const auto& p : probes)
            if (detail::hermitian_min_eig(detail::apply_super(P, p.matrix())) <= tol) {
                positive = false;
                break;
            }
        if (positive) {
            r.positivity_index = n;
            break;
        }
    }
    r.strongly_mixing = r.mixing && r.positivity_index.has_value();
    return r;
}

struct BoundCheck {
    std::string bound_id;
    double lhs = 0.0;
    double rhs = 0.0;
    bool applicable = true;
    bool holds = true;
    std::string note;
};

namespace detail {

inline BoundCheck le_check(std::string id, double lhs, double rhs, double slack) {
    BoundCheck b{std::move(id), lhs, rhs, true, true, {}};
    b.holds = is_inf(rhs) || lhs <= rhs + slack * std::max(1.0, std::abs(lhs));
    return b;
}

inline BoundCheck not_applicable(std::string id, std::string note) {
    BoundCheck b;
    b.bound_id = std::move(id);
    b.applicable = false;
    b.note = std::move(note);
    return b;
}

}  // namespace detail

// Petz-divergence inequalities for (rho, sigma); each entry is "lhs <= rhs".
inline std::vector<BoundCheck> petz_bounds_report(const Generator& g, const DensityMatrix& rho, const DensityMatrix& sigma,
                                                  double slack = 1e-9) {
    if (rho.dim() != sigma.dim()) throw domain_error("petz_bounds_report: dimension mismatch");
    std::vector<BoundCheck> out;
    Spectrum a = spectral_decomposition(rho), b = spectral_decomposition(sigma);
    const double D = petz_from_spectra(g, a, b);
    const double chi2 = petz_chi2(rho, sigma);
    const double td = trace_distance(rho, sigma);
    const bool ac = quantum_absolutely_continuous(rho, sigma);
    const double L = g.lf();
    const double lmin = lambda_min_nonzero(sigma);
    NSPair ns = ns_from_spectra(a, b);

    if (ac) {
        KappaPair k = kappa_bounds(g, ns.p, ns.q);
        out.push_back(detail::le_check("petz_chi2_sandwich_lower", ext_mul(0.5 * k.kappa_down, chi2), D, slack));
        out.push_back(detail::le_check("petz_chi2_sandwich_upper", D, ext_mul(0.5 * k.kappa_up, chi2), slack));
    } else {
        out.push_back(detail::not_applicable("petz_chi2_sandwich_lower", "requires supp(rho) in supp(sigma)"));
        out.push_back(detail::not_applicable("petz_chi2_sandwich_upper", "requires supp(rho) in supp(sigma)"));
    }

    if (g.operator_convex && L > 0.0)
        out.push_back(detail::le_check("quantum_pinsker", 0.5 * L * td * td, D, slack));
    else
        out.push_back(detail::not_applicable("quantum_pinsker", "requires operator-convex f with a Pinsker constant"));

    if (ac) {
        double hs = hilbert_schmidt_sq(rho, sigma);
        out.push_back(detail::le_check("petz_chi2_hs_upper", chi2, hs / lmin, slack));
        out.push_back(detail::le_check("petz_chi2_td_upper", hs / lmin, 4.0 * td * td / lmin, slack));
    } else {
        out.push_back(detail::not_applicable("petz_chi2_hs_upper", "requires supp(rho) in supp(sigma)"));
        out.push_back(detail::not_applicable("petz_chi2_td_upper", "requires supp(rho) in supp(sigma)"));
    }

    if (ac && g.operator_convex && L > 0.0)
        out.push_back(detail::le_check("petz_lower_by_chi2", L * lmin / 8.0 * chi2, D, slack));
    else
        out.push_back(detail::not_applicable("petz_lower_by_chi2", "requires operator-convex f, a Pinsker constant and supp(rho) in supp(sigma)"));

    if (ac) {
        ReversePinskerResult rp = reverse_pinsker(g, ns.p, ns.q);
        out.push_back(detail::le_check("petz_reverse_pinsker_l2", D, rp.l2_bound, slack));
        out.push_back(detail::le_check("petz_reverse_pinsker_tv", rp.l2_bound, rp.tv_bound, slack));
    } else {
        out.push_back(detail::not_applicable("petz_reverse_pinsker_l2", "requires supp(rho) in supp(sigma)"));
        out.push_back(detail::not_applicable("petz_reverse_pinsker_tv", "requires supp(rho) in supp(sigma)"));
    }
    return out;
}

struct QuantumBudget {
    int samples = 400;         // Haar-random pure states (at least 100)
    std::uint64_t seed = 0;
    int bloch_grid = 0;        // qubit only: points per Bloch angle, 0 disables
    int refine_top = 4;
    int hill_climb_iters = 60;
    int workers = 1;
};

struct QuantumEtaEstimate {
    double estimate = 0.0;
    std::optional<DensityMatrix> witness;
    bool empty = false;
    std::size_t evaluated = 0;
};

namespace detail {

inline std::vector<CMat> quantum_cloud(const DensityMatrix& sigma, const QuantumBudget& b) {
    const Eigen::Index d = sigma.dim();
    std::vector<CMat> pures;
    for (const auto& p : probe_states(d)) pures.push_back(p.matrix());
    Spectrum s = spectral_decomposition(sigma);
    for (Eigen::Index y = 0; y < d; ++y) pures.push_back(s.vectors.col(y) * s.vectors.col(y).adjoint());
    if (d == 2 && b.bloch_grid > 0) {
        const double pi = std::acos(-1.0);
        for (int i = 0; i <= b.bloch_grid; ++i)
            for (int j = 0; j < 2 * b.bloch_grid; ++j) {
                double th = pi * i / b.bloch_grid, ph = pi * j / b.bloch_grid;
                CVec v(2);
                v << std::cos(th / 2), std::polar(std::sin(th / 2), ph);
                pures.push_back(v * v.adjoint());
            }
    }
    for (int i = 0; i < b.samples; ++i) {
        auto rng = stream_rng(b.seed, static_cast<std::uint64_t>(i));
        CVec v = random_state_vector(d, rng);
        pures.push_back(v * v.adjoint());
    }
    const double weights[] = {0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 0.99};
    std::vector<CMat> cloud;
    cloud.reserve(pures.size() * std::size(weights));
    for (const auto& p : pures)
        for (double w : weights) cloud.push_back((1.0 - w) * p + w * sigma.matrix());
    return cloud;
}

struct QCandidate {
    CMat rho;
    double ratio = -inf;
    bool feasible = false;
};

inline double quantum_ratio(const Generator& g, const KrausChannel& E, const Spectrum& s_sigma, const Spectrum& s_out,
                            const CMat& rho, bool& feasible) {
    double den = petz_from_spectra(g, spectral_decomposition(rho), s_sigma);
    feasible = den > 1e-12 && !is_inf(den);
    if (!feasible) return -inf;
    CMat out = E.apply_raw(rho);
    double num = petz_from_spectra(g, spectral_decomposition(0.5 * (out + out.adjoint())), s_out);
    return num / den;
}

}  // namespace detail

// Sampled supremum of the Petz ratio D(E(rho)||E(sigma)) / D(rho||sigma); a lower estimate.
inline QuantumEtaEstimate quantum_eta_estimate(const KrausChannel& E, const DensityMatrix& sigma, const Generator& g,
                                               const QuantumBudget& budget = {}) {
    if (budget.samples < 100) throw domain_error("quantum_eta_estimate: budget must allow at least 100 samples");
    if (sigma.dim() != E.d_in()) throw domain_error("quantum_eta_estimate: dimension mismatch");
    Spectrum s_sigma = spectral_decomposition(sigma);
    Spectrum s_out = spectral_decomposition(apply_channel(E, sigma));
    auto cloud = detail::quantum_cloud(sigma, budget);
    std::vector<detail::QCandidate> cands(cloud.size());
    parallel_for(cloud.size(), budget.workers, [&](std::size_t i) {
        detail::QCandidate c;
        c.rho = cloud[i];
        c.ratio = detail::quantum_ratio(g, E, s_sigma, s_out, c.rho, c.feasible);
        cands[i] = std::move(c);
    });

    std::vector<std::size_t> order;
    for (std::size_t i = 0; i < cands.size(); ++i)
        if (cands[i].feasible) order.push_back(i);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return cands[a].ratio > cands[b].ratio; });
    order.resize(std::min<std::size_t>(order.size(), static_cast<std::size_t>(std::max(0, budget.refine_top))));

    // move toward pure directions with step halving
    std::vector<CMat> directions;
    for (std::size_t i = 0; i < cloud.size(); i += 11) directions.push_back(cloud[i]);
    std::vector<detail::QCandidate> refined(order.size());
    parallel_for(order.size(), budget.workers, [&](std::size_t k) {
        detail::QCandidate c = cands[order[k]];
        double step = 0.1;
        for (int it = 0; it < budget.hill_climb_iters && step > 1e-6; ++it) {
            detail::QCandidate best = c;
            for (const auto& dir : directions) {
                CMat rho = (1.0 - step) * c.rho + step * dir;
                bool feas = false;
                double r = detail::quantum_ratio(g, E, s_sigma, s_out, rho, feas);
                if (feas && r > best.ratio) {
                    best.rho = rho;
                    best.ratio = r;
                    best.feasible = true;
                }
            }
            if (best.ratio > c.ratio)
                c = best;
            else
                step *= 0.5;
        }
        refined[k] = std::move(c);
    });
    for (auto& c : refined) cands.push_back(std::move(c));

    QuantumEtaEstimate out;
    out.evaluated = cands.size();
    std::optional<std::size_t> best;
    for (std::size_t i = 0; i < cands.size(); ++i)
        if (cands[i].feasible && (!best || cands[i].ratio > cands[*best].ratio)) best = i;
    if (!best) {
        out.empty = true;
        return out;
    }
    out.estimate = std::max(0.0, cands[*best].ratio);
    out.witness = DensityMatrix::normalized(cands[*best].rho);
    return out;
}

struct QuantumEtaBounds {
    double eta_chi2_estimate = 0.0;
    double kappa_sup = 0.0;
    OptionalBound nonlinear;
    OptionalBound linear;
};

inline QuantumEtaBounds quantum_eta_bounds(const KrausChannel& E, const DensityMatrix& sigma, const Generator& g,
                                           const QuantumBudget& budget = {}) {
    QuantumEtaBounds out;
    out.eta_chi2_estimate = quantum_eta_estimate(E, sigma, make_generator("pearson_chi2"), budget).estimate;
    const double L = g.lf();
    const double lmin = lambda_min(sigma);
    const double lmin_nz = lambda_min_nonzero(sigma);
    const bool full = lmin > 0.0;

    if (!g.operator_convex)
        out.nonlinear.note = "requires operator-convex f";
    else if (!g.f2_at_zero_finite)
        out.nonlinear.note = "requires finite f''(0)";
    else if (!(L > 0.0))
        out.nonlinear.note = "requires a positive Pinsker constant";
    else if (!full && !is_inf(g.fprime_at_inf))
        out.nonlinear.note = "requires full-rank sigma or f'(inf) = +inf";
    else {
        Spectrum s_sigma = spectral_decomposition(sigma);
        DensityMatrix out_sigma = apply_channel(E, sigma);
        Spectrum s_out = spectral_decomposition(out_sigma);
        auto cloud = detail::quantum_cloud(sigma, budget);
        std::vector<double> vals(cloud.size(), -inf);
        parallel_for(cloud.size(), budget.workers, [&](std::size_t i) {
            double den = petz_from_spectra(g, spectral_decomposition(cloud[i]), s_sigma);
            if (!(den > 0.0) || is_inf(den)) return;
            CMat o = E.apply_raw(cloud[i]);
            NSPair ns = ns_from_spectra(spectral_decomposition(0.5 * (o + o.adjoint())), s_out);
            vals[i] = kappa_bounds(g, ns.p, ns.q).kappa_up;
        });
        double k = 0.0;
        for (double v : vals) k = std::max(k, v);
        out.kappa_sup = k;
        out.nonlinear.value = ext_mul(8.0 / (L * lmin_nz) * k, out.eta_chi2_estimate);
        out.nonlinear.note = "sampled-sup";
    }

    if (!g.operator_convex)
        out.linear.note = "requires operator-convex f";
    else if (!g.g_concave)
        out.linear.note = "requires (f(t) - f(0))/t concave";
    else if (!std::isfinite(g.f_at_zero))
        out.linear.note = "requires finite f(0)";
    else if (!(L > 0.0))
        out.linear.note = "requires a positive Pinsker constant";
    else if (!full)
        out.linear.note = "requires full-rank sigma";
    else if (!(g.f1(1.0) - g.f_at_zero > 0.0))
        out.linear.note = "requires f'(1) - f(0) > 0";
    else {
        double c = g.f1(1.0) - g.f_at_zero;
        out.linear.value = 8.0 * c / (L * lmin) * out.eta_chi2_estimate;
        out.linear.note = "estimate-based";
    }
    return out;
}

struct QuantumProfilePoint {
    int n = 0;
    double eta_estimate = 0.0;
    double rate = 0.0;
    double kappa_hat = 0.0;
    double envelope = inf;  // eta_chi2_hat(E, pi) * (8 kappa_hat / (L lambda_min))^(1/n)
    bool within_envelope = true;
};

struct QuantumRateProfile {
    double eta_chi2_estimate = 0.0;
    DensityMatrix pi;
    std::vector<QuantumProfilePoint> points;
};

inline QuantumRateProfile quantum_rate_profile(const KrausChannel& E, const Generator& g, int n_max,
                                               const QuantumBudget& budget = {}, double sampling_slack = 1e-6) {
    if (n_max < 2) throw domain_error("quantum_rate_profile: n_max must be at least 2");
    QuantumStructure qs = channel_structure(E);
    if (!qs.mixing) throw domain_error("quantum_rate_profile: channel is not mixing");
    QuantumRateProfile prof;
    prof.pi = *qs.fixed_point;
    const double lmin = lambda_min(prof.pi);
    if (!(lmin > 0.0)) throw domain_error("quantum_rate_profile: fixed point is not full rank");
    prof.eta_chi2_estimate = quantum_eta_estimate(E, prof.pi, make_generator("pearson_chi2"), budget).estimate;
    const double L = g.lf();
    for (int n = 1; n <= n_max; ++n) {
        KrausChannel En = channel_power(E, n);
        QuantumProfilePoint pt;
        pt.n = n;
        pt.eta_estimate = quantum_eta_estimate(En, prof.pi, g, budget).estimate;
        pt.rate = std::pow(pt.eta_estimate, 1.0 / n);
        if (L > 0.0 && g.operator_convex && g.f2_at_zero_finite) {
            QuantumEtaBounds qb = quantum_eta_bounds(En, prof.pi, g, budget);
            pt.kappa_hat = qb.kappa_sup;
            pt.envelope = prof.eta_chi2_estimate * std::pow(8.0 * qb.kappa_sup / (L * lmin), 1.0 / n);
        }
        pt.within_envelope = is_inf(pt.envelope) || pt.rate <= pt.envelope + sampling_slack;
        prof.points.push_back(pt);
    }
    return prof;
}

struct QuantumMixingTimes {
    double eta_chi2_estimate = 0.0;
    double lambda_min = 0.0;
    int td_bound = 0;
    int empirical_td = 0;
    std::optional<int> f_bound;
    std::optional<int> empirical_f;
    std::string f_note;
    bool estimate_based = true;
    bool holds = true;
};

inline QuantumMixingTimes quantum_mixing_time_bounds(const KrausChannel& E, double delta,
                                                     const std::optional<Generator>& g = std::nullopt,
                                                     const QuantumBudget& budget = {}, int search_cap = 100000) {
    if (!(delta > 0.0)) throw domain_error("quantum_mixing_time_bounds: delta must be positive");
    QuantumStructure qs = channel_structure(E);
    if (!qs.mixing) throw domain_error("quantum_mixing_time_bounds: channel is not mixing");
    const DensityMatrix& pi = *qs.fixed_point;
    QuantumMixingTimes r;
    r.lambda_min = lambda_min(pi);
    if (!(r.lambda_min > 0.0)) throw domain_error("quantum_mixing_time_bounds: fixed point is not full rank");
    r.eta_chi2_estimate = quantum_eta_estimate(E, pi, make_generator("pearson_chi2"), budget).estimate;
    if (r.eta_chi2_estimate >= 1.0 - 1e-12) throw domain_error("quantum_mixing_time_bounds: estimated eta is 1");
    const double log_inv_eta = std::log(1.0 / r.eta_chi2_estimate);
    r.td_bound = delta >= 1.0 ? 0 : detail::ceil_nonneg(std::log(1.0 / (r.lambda_min * delta * delta)) / log_inv_eta);

    const Eigen::Index d = E.d_in();
    const CMat S = E.superoperator();
    auto probes = detail::probe_states(d);
    auto worst = [&](const CMat& P, auto&& dist) {
        double w = 0.0;
        for (const auto& p : probes) {
            CMat o = detail::apply_super(P, p.matrix());
            w = std::max(w, dist(DensityMatrix::normalized(o)));
        }
        return w;
    };
    auto td = [&](const DensityMatrix& x) { return trace_distance(x, pi); };
    CMat P = CMat::Identity(d * d, d * d);
    int k = 0;
    while (worst(P, td) > delta && k < search_cap) {
        P = S * P;
        ++k;
    }
    r.empirical_td = k;
    r.holds = r.empirical_td <= r.td_bound;

    if (g) {
        if (!g->operator_convex)
            r.f_note = "requires operator-convex f";
        else if (!g->f_over_t_concave)
            r.f_note = "requires f(t)/t concave";
        else if (!std::isfinite(g->f_at_zero))
            r.f_note = "requires finite f(0)";
        else if (!(g->f1(1.0) - g->f_at_zero > 0.0))
            r.f_note = "requires f'(1) - f(0) > 0";
        else {
            double c = g->f1(1.0) - g->f_at_zero;
            r.f_bound = detail::ceil_nonneg(std::log(4.0 * c / (r.lambda_min * delta)) / log_inv_eta);
            auto fd = [&](const DensityMatrix& x) { return petz_f_divergence(*g, x, pi); };
            CMat Q = CMat::Identity(d * d, d * d);
            int m = 0;
            while (worst(Q, fd) > delta && m < search_cap) {
                Q = S * Q;
                ++m;
            }
            r.empirical_f = m;
            r.holds = r.holds && m <= *r.f_bound;
        }
    }
    return r;
}

}  // namespace divlab
