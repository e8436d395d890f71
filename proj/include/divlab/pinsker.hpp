#pragma once

#include "divergence.hpp"

#include <string>
#include <utility>

namespace divlab {

inline void require_open_unit(double x, double y) {
    if (!(x > 0.0 && x < 1.0 && y > 0.0 && y < 1.0)) throw domain_error("h_lambda: x and y must lie in (0,1)");
}

inline double h_lambda(const Generator& g, double lambda, double x, double y) {
    if (!(lambda >= 0.0 && lambda <= 1.0)) throw domain_error("h_lambda: lambda must lie in [0,1]");
    require_open_unit(x, y);
    double a = x / y, b = (1.0 - x) / (1.0 - y);
    double wa = (1.0 - lambda) + lambda * a;
    double wb = (1.0 - lambda) + lambda * b;
    return wa * wa / y * g.f2(a) + wb * wb / (1.0 - y) * g.f2(b);
}

// Single-lambda conditions.
inline double h_0(const Generator& g, double x, double y) {
    require_open_unit(x, y);
    return g.f2(x / y) / y + g.f2((1.0 - x) / (1.0 - y)) / (1.0 - y);
}

inline double h_1(const Generator& g, double x, double y) {
    require_open_unit(x, y);
    double u = 1.0 - x, v = 1.0 - y;
    return x * x / (y * y * y) * g.f2(x / y) + u * u / (v * v * v) * g.f2(u / v);
}

enum class Verdict { certified, violated, inconclusive_boundary };

inline const char* to_string(Verdict v) {
    switch (v) {
        case Verdict::certified: return "certified";
        case Verdict::violated: return "violated";
        default: return "inconclusive-boundary";
    }
}

struct PinskerCertificate {
    std::string generator;
    double lambda = 0.0;
    double grid_min = 0.0;  // refined minimum over the closed eps-square
    std::pair<double, double> grid_argmin{0.5, 0.5};
    double claimed_L = 0.0;
    Verdict verdict = Verdict::violated;
    bool attained = false;  // refined minimum equals claimed_L within tolerance
    double interior_min = 0.0;
    double ring_min = 0.0;
};

namespace detail {

template <class F>
double golden_min(F&& fn, double lo, double hi, double& arg) {
    const double r = 0.5 * (std::sqrt(5.0) - 1.0);
    double a = lo, b = hi;
    double c = b - r * (b - a), d = a + r * (b - a);
    double fc = fn(c), fd = fn(d);
    for (int it = 0; it < 200 && b - a > 1e-13; ++it) {
        if (fc < fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - r * (b - a);
            fc = fn(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + r * (b - a);
            fd = fn(d);
        }
    }
    if (fc < fd) {
        arg = c;
        return fc;
    }
    arg = d;
    return fd;
}

}  // namespace detail

inline constexpr double certification_tol = 1e-6;

inline PinskerCertificate certify_constant(const Generator& g, double lambda, int grid_n = 512, double boundary_eps = 1e-4,
                                           std::optional<double> claimed_L = std::nullopt) {
    if (grid_n < 16) throw domain_error("certify_constant: grid_n must be at least 16");
    if (!(boundary_eps > 0.0 && boundary_eps < 0.1)) throw domain_error("certify_constant: boundary_eps must lie in (0, 0.1)");
    PinskerCertificate cert;
    cert.generator = g.name;
    cert.lambda = lambda;
    cert.claimed_L = claimed_L ? *claimed_L : g.lf();

    const double lo = boundary_eps, hi = 1.0 - boundary_eps;
    const double h = (hi - lo) / (grid_n - 1);
    auto coord = [&](int i) { return i == grid_n - 1 ? hi : lo + i * h; };

    double imin = inf, rmin = inf;
    std::pair<double, double> iarg{0.5, 0.5}, rarg{0.5, 0.5};
    for (int i = 0; i < grid_n; ++i) {
        double x = coord(i);
        for (int j = 0; j < grid_n; ++j) {
            double y = coord(j);
            double v = h_lambda(g, lambda, x, y);
            bool ring = i == 0 || j == 0 || i == grid_n - 1 || j == grid_n - 1;
            if (ring && v < rmin) {
                rmin = v;
                rarg = {x, y};
            } else if (!ring && v < imin) {
                imin = v;
                iarg = {x, y};
            }
        }
    }

    // coordinate-wise golden-section descent from the interior argmin
    double x = iarg.first, y = iarg.second, best = imin;
    for (int sweep = 0; sweep < 200; ++sweep) {
        double before = best;
        double ax = x;
        double vx = detail::golden_min([&](double s) { return h_lambda(g, lambda, s, y); }, std::max(lo, x - 2 * h),
                                       std::min(hi, x + 2 * h), ax);
        if (vx < best) {
            best = vx;
            x = ax;
        }
        double ay = y;
        double vy = detail::golden_min([&](double s) { return h_lambda(g, lambda, x, s); }, std::max(lo, y - 2 * h),
                                       std::min(hi, y + 2 * h), ay);
        if (vy < best) {
            best = vy;
            y = ay;
        }
        if (!(before - best > 1e-15)) break;
    }
    cert.interior_min = best;
    cert.ring_min = rmin;
    if (rmin < best) {
        cert.grid_min = rmin;
        cert.grid_argmin = rarg;
    } else {
        cert.grid_min = best;
        cert.grid_argmin = {x, y};
    }

    const double L = cert.claimed_L;
    bool escapes = rmin < best - 1e-9;
    if (cert.grid_min < L - certification_tol)
        cert.verdict = Verdict::violated;
    else if (escapes && !g.f2_at_zero_finite)
        cert.verdict = Verdict::inconclusive_boundary;
    else
        cert.verdict = Verdict::certified;
    cert.attained = std::abs(cert.grid_min - L) <= certification_tol;
    return cert;
}

inline PinskerCertificate certify_constant(const Generator& g, int grid_n = 512, double boundary_eps = 1e-4) {
    if (!g.pinsker_constant) throw domain_error("certify_constant: generator " + g.name + " has no Pinsker constant");
    return certify_constant(g, g.pinsker_constant->lambda, grid_n, boundary_eps);
}

struct PinskerCheck {
    double lhs = 0.0;
    double rhs = 0.0;
    bool holds = true;
};

// D_f(p||q) >= L_f / (2c) TV(p,q)^2 for equal-sum vectors of mass c.
inline PinskerCheck check_pinsker(const Generator& g, const WeightVec& p, const WeightVec& q) {
    require_same_alphabet(p, q);
    double c = q.sum();
    if (!(c > 0.0) || std::abs(p.sum() - c) > 1e-9) throw domain_error("check_pinsker: p and q must have equal positive sums");
    if (!g.pinsker_constant) throw domain_error("check_pinsker: generator " + g.name + " has no Pinsker constant");
    PinskerCheck out;
    out.lhs = f_divergence(g, p, q);
    double tv = total_variation(p, q);
    out.rhs = g.lf() / (2.0 * c) * tv * tv;
    out.holds = out.lhs >= out.rhs - 1e-10;
    return out;
}

// f'''(1) by a fourth-order central difference of f''.
inline double third_derivative_at_one(const Generator& g, double step = 1e-4) {
    double h = step;
    return (-g.f2(1.0 + 2 * h) + 8.0 * g.f2(1.0 + h) - 8.0 * g.f2(1.0 - h) + g.f2(1.0 - 2 * h)) / (12.0 * h);
}

inline bool gilardoni_condition(const Generator& g, const std::vector<double>& t_grid) {
    double f2_1 = g.f2(1.0);
    if (!(f2_1 > 0.0)) throw domain_error("gilardoni_condition: f''(1) must be positive");
    double f3_1 = third_derivative_at_one(g);
    double f1_1 = g.f1(1.0);
    for (double t : t_grid) {
        if (!(t > 0.0)) throw domain_error("gilardoni_condition: grid must be positive");
        double u = t - 1.0;
        double lhs = (g.f(t) - f1_1 * u) * (1.0 - f3_1 / (3.0 * f2_1) * u);
        double rhs = 0.5 * f2_1 * u * u;
        if (lhs < rhs - 1e-12 * std::max(1.0, std::abs(rhs))) return false;
    }
    return true;
}

inline bool gilardoni_condition(const Generator& g) { return gilardoni_condition(g, log_grid(1e-3, 1e3, 2001)); }

}  // namespace divlab
