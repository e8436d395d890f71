#pragma once

#include "common.hpp"

#include <charconv>
#include <functional>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace divlab {

enum class Monotonicity { nonincreasing, nondecreasing, constant, unknown };

inline const char* to_string(Monotonicity m) {
    switch (m) {
        case Monotonicity::nonincreasing: return "nonincreasing";
        case Monotonicity::nondecreasing: return "nondecreasing";
        case Monotonicity::constant: return "constant";
        default: return "unknown";
    }
}

// L_f together with the lambda for which h_lambda >= L_f holds.
struct PinskerConstant {
    double value = 0.0;
    double lambda = 0.0;
    bool tight = false;  // infimum attained inside the open square
};

using RealFn = std::function<double(double)>;

struct Generator {
    std::string name;    // canonical spelling, e.g. "hellinger:alpha=1.5"
    std::string family;  // registry key, e.g. "hellinger"
    std::vector<std::pair<std::string, double>> params;

    RealFn f, f1, f2;

    double f_at_zero = inf;      // f(0+)
    double fprime_at_inf = inf;  // lim_{t->inf} f(t)/t
    double f2_at_zero = inf;     // f''(0+)

    std::optional<PinskerConstant> pinsker_constant;
    Monotonicity f2_monotonicity = Monotonicity::unknown;

    bool operator_convex = false;
    bool g_concave = false;         // (f(t) - f(0)) / t concave
    bool f_over_t_concave = false;  // f(t) / t concave
    bool f2_at_zero_finite = false;
    bool strictly_convex = true;
    bool twice_continuous = true;   // f'' continuous on (0, inf)
    std::vector<double> kinks;      // points where f is not C^3 or not C^2

    double param(std::string_view key) const {
        for (const auto& [k, v] : params)
            if (k == key) return v;
        throw domain_error("generator " + name + " has no parameter " + std::string(key));
    }

    double lf() const { return pinsker_constant ? pinsker_constant->value : 0.0; }
};

struct GeneratorValues {
    double f, f1, f2;
};

inline GeneratorValues generator_values(const Generator& g, double t) {
    if (!(t > 0.0)) throw domain_error("generator_values: t must be positive");
    return {g.f(t), g.f1(t), g.f2(t)};
}

inline std::string format_real(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

namespace detail {

using Params = std::map<std::string, double>;

inline double get_param(const Params& ps, const std::string& key, double fallback) {
    auto it = ps.find(key);
    return it == ps.end() ? fallback : it->second;
}

inline void reject_unknown(const Params& ps, std::initializer_list<const char*> allowed, const std::string& name) {
    for (const auto& [k, v] : ps) {
        bool ok = false;
        for (const char* a : allowed) ok = ok || k == a;
        if (!ok) throw domain_error("generator " + name + ": unknown parameter " + k);
    }
}

inline Generator base(std::string family) {
    Generator g;
    g.name = family;
    g.family = std::move(family);
    return g;
}

inline void with_param(Generator& g, const std::string& key, double v) {
    g.params.emplace_back(key, v);
    g.name = g.family + ":" + key + "=" + format_real(v);
}

inline Generator kl() {
    Generator g = base("kl");
    g.f = [](double t) { return t * std::log(t); };
    g.f1 = [](double t) { return std::log(t) + 1.0; };
    g.f2 = [](double t) { return 1.0 / t; };
    g.f_at_zero = 0.0;
    g.fprime_at_inf = inf;
    g.f2_at_zero = inf;
    g.pinsker_constant = PinskerConstant{4.0, 0.0, true};
    g.f2_monotonicity = Monotonicity::nonincreasing;
    g.operator_convex = true;
    g.g_concave = true;
    g.f_over_t_concave = true;
    return g;
}

inline Generator reverse_kl() {
    Generator g = base("reverse_kl");
    g.f = [](double t) { return -std::log(t); };
    g.f1 = [](double t) { return -1.0 / t; };
    g.f2 = [](double t) { return 1.0 / (t * t); };
    g.f_at_zero = inf;
    g.fprime_at_inf = 0.0;
    g.f2_at_zero = inf;
    g.pinsker_constant = PinskerConstant{4.0, 1.0, true};
    g.f2_monotonicity = Monotonicity::nonincreasing;
    g.operator_convex = true;
    return g;
}

inline Monotonicity power_monotonicity(double exponent) {
    if (exponent < 0.0) return Monotonicity::nonincreasing;
    if (exponent > 0.0) return Monotonicity::nondecreasing;
    return Monotonicity::constant;
}

// f''(0+) of a generator with f''(t) = c t^e.
inline double power_at_zero(double c, double e) {
    if (e < 0.0) return inf;
    if (e > 0.0) return 0.0;
    return c;
}

inline Generator renyi_gain(double a) {
    if (!std::isfinite(a)) throw domain_error("renyi_gain: alpha must be finite");
    Generator g = base("renyi_gain");
    with_param(g, "alpha", a);
    if (a == 0.0) {
        g.f = [](double t) { return -std::log(t) + t - 1.0; };
        g.f1 = [](double t) { return 1.0 - 1.0 / t; };
    } else if (a == 1.0) {
        g.f = [](double t) { return t * std::log(t) - t + 1.0; };
        g.f1 = [](double t) { return std::log(t); };
    } else {
        g.f = [a](double t) { return (std::expm1(a * std::log(t)) - a * (t - 1.0)) / (a * (a - 1.0)); };
        g.f1 = [a](double t) { return std::expm1((a - 1.0) * std::log(t)) / (a - 1.0); };
    }
    g.f2 = [a](double t) { return std::pow(t, a - 2.0); };
    g.f_at_zero = a > 0.0 ? 1.0 / a : inf;
    g.fprime_at_inf = a < 1.0 ? 1.0 / (1.0 - a) : inf;
    g.f2_at_zero = power_at_zero(1.0, a - 2.0);
    g.f2_at_zero_finite = a >= 2.0;
    g.f2_monotonicity = power_monotonicity(a - 2.0);
    if (a >= 1.0 && a <= 2.0)
        g.pinsker_constant = PinskerConstant{4.0, 0.0, true};
    else if (a >= -1.0 && a <= 0.0)
        g.pinsker_constant = PinskerConstant{4.0, 1.0, true};
    else if (a > 0.0 && a < 1.0)
        g.pinsker_constant = PinskerConstant{4.0, 0.5, true};
    else
        g.pinsker_constant = PinskerConstant{1.0, 0.0, false};
    g.operator_convex = a >= -1.0 && a <= 2.0;
    g.g_concave = a > 0.0 && a <= 2.0;
    return g;
}

inline Generator hellinger(double a) {
    if (!(a > 0.0) || !std::isfinite(a)) throw domain_error("hellinger: alpha must be positive");
    Generator g = base("hellinger");
    with_param(g, "alpha", a);
    if (a == 1.0) {
        g.f = [](double t) { return t * std::log(t); };
        g.f1 = [](double t) { return std::log(t) + 1.0; };
        g.f_at_zero = 0.0;
    } else {
        g.f = [a](double t) { return std::expm1(a * std::log(t)) / (a - 1.0); };
        g.f1 = [a](double t) { return a * std::pow(t, a - 1.0) / (a - 1.0); };
        g.f_at_zero = -1.0 / (a - 1.0);
    }
    g.f2 = [a](double t) { return a * std::pow(t, a - 2.0); };
    g.fprime_at_inf = a < 1.0 ? 0.0 : inf;
    g.f2_at_zero = power_at_zero(a, a - 2.0);
    g.f2_at_zero_finite = a >= 2.0;
    g.f2_monotonicity = power_monotonicity(a - 2.0);
    if (a >= 1.0 && a <= 2.0)
        g.pinsker_constant = PinskerConstant{4.0 * a, 0.0, true};
    else if (a < 1.0)
        g.pinsker_constant = PinskerConstant{4.0 * a, 0.5, true};
    else
        g.pinsker_constant = PinskerConstant{a, 0.0, false};
    g.operator_convex = a <= 2.0;
    g.g_concave = a <= 2.0;
    g.f_over_t_concave = a >= 1.0 && a <= 2.0;
    return g;
}

inline Generator pearson_chi2() {
    Generator g = base("pearson_chi2");
    g.f = [](double t) { return t * t - 1.0; };
    g.f1 = [](double t) { return 2.0 * t; };
    g.f2 = [](double) { return 2.0; };
    g.f_at_zero = -1.0;
    g.fprime_at_inf = inf;
    g.f2_at_zero = 2.0;
    g.f2_at_zero_finite = true;
    g.pinsker_constant = PinskerConstant{8.0, 0.0, true};
    g.f2_monotonicity = Monotonicity::constant;
    g.operator_convex = true;
    g.g_concave = true;
    g.f_over_t_concave = true;
    return g;
}

inline Generator neyman_chi2() {
    Generator g = base("neyman_chi2");
    g.f = [](double t) { return 1.0 / t - 1.0; };
    g.f1 = [](double t) { return -1.0 / (t * t); };
    g.f2 = [](double t) { return 2.0 / (t * t * t); };
    g.f_at_zero = inf;
    g.fprime_at_inf = 0.0;
    g.pinsker_constant = PinskerConstant{8.0, 1.0, true};
    g.f2_monotonicity = Monotonicity::nonincreasing;
    g.operator_convex = true;
    return g;
}

inline Generator symmetric_chi2() {
    Generator g = base("symmetric_chi2");
    g.f = [](double t) { return (t - 1.0) * (t - 1.0) * (t + 1.0) / t; };
    g.f1 = [](double t) { return 2.0 * t - 1.0 - 1.0 / (t * t); };
    g.f2 = [](double t) { return 2.0 + 2.0 / (t * t * t); };
    g.f_at_zero = inf;
    g.fprime_at_inf = inf;
    g.pinsker_constant = PinskerConstant{16.0, 0.0, true};
    g.f2_monotonicity = Monotonicity::nonincreasing;
    g.operator_convex = true;
    return g;
}

inline Generator ag_mean() {
    Generator g = base("ag_mean");
    g.f = [](double t) { return 0.5 * (t + 1.0) * std::log((t + 1.0) / (2.0 * std::sqrt(t))); };
    g.f1 = [](double t) { return 0.5 * std::log((t + 1.0) / (2.0 * std::sqrt(t))) + (t - 1.0) / (4.0 * t); };
    g.f2 = [](double t) { return (t * t + 1.0) / (4.0 * t * t * (t + 1.0)); };
    g.f_at_zero = inf;
    g.fprime_at_inf = inf;
    g.pinsker_constant = PinskerConstant{1.0, 0.0, true};
    g.f2_monotonicity = Monotonicity::nonincreasing;
    return g;
}

inline Generator jeffrey() {
    Generator g = base("jeffrey");
    g.f = [](double t) { return (t - 1.0) * std::log(t); };
    g.f1 = [](double t) { return std::log(t) + 1.0 - 1.0 / t; };
    g.f2 = [](double t) { return 1.0 / t + 1.0 / (t * t); };
    g.f_at_zero = inf;
    g.fprime_at_inf = inf;
    g.pinsker_constant = PinskerConstant{8.0, 0.5, true};
    g.f2_monotonicity = Monotonicity::nonincreasing;
    g.operator_convex = true;
    return g;
}

inline Generator squared_hellinger() {
    Generator g = base("squared_hellinger");
    g.f = [](double t) {
        double r = std::sqrt(t) - 1.0;
        return 0.5 * r * r;
    };
    g.f1 = [](double t) { return 0.5 * (1.0 - 1.0 / std::sqrt(t)); };
    g.f2 = [](double t) { return 0.25 / (t * std::sqrt(t)); };
    g.f_at_zero = 0.5;
    g.fprime_at_inf = 0.5;
    g.pinsker_constant = PinskerConstant{1.0, 0.5, true};
    g.f2_monotonicity = Monotonicity::nonincreasing;
    g.operator_convex = true;
    g.g_concave = true;
    return g;
}

inline Generator lins(double th) {
    if (!(th >= 0.0 && th <= 1.0)) throw domain_error("lins: theta must lie in [0,1]");
    Generator g = base("lins");
    with_param(g, "theta", th);
    auto xlogx = [](double x) { return x > 0.0 ? x * std::log(x) : 0.0; };
    g.f = [th, xlogx](double t) { return th * t * std::log(t) - xlogx(th * t + 1.0 - th); };
    g.f1 = [th](double t) { return th > 0.0 ? th * (std::log(t) - std::log(th * t + 1.0 - th)) : 0.0; };
    g.f2 = [th](double t) { return th * (1.0 - th) / (t * (th * t + 1.0 - th)); };
    g.f_at_zero = th < 1.0 ? -xlogx(1.0 - th) : 0.0;
    g.fprime_at_inf = th > 0.0 ? -th * std::log(th) : 0.0;
    bool degenerate = th == 0.0 || th == 1.0;
    g.f2_at_zero = degenerate ? 0.0 : inf;
    g.f2_at_zero_finite = degenerate;
    g.strictly_convex = !degenerate;
    g.pinsker_constant = PinskerConstant{4.0 * th * (1.0 - th), 0.5, !degenerate};
    g.f2_monotonicity = degenerate ? Monotonicity::constant : Monotonicity::nonincreasing;
    g.g_concave = true;
    return g;
}

inline Generator jensen_shannon() {
    Generator g = base("jensen_shannon");
    g.f = [](double t) { return 0.5 * (t * std::log(t) - (t + 1.0) * std::log((t + 1.0) / 2.0)); };
    g.f1 = [](double t) { return 0.5 * std::log(2.0 * t / (t + 1.0)); };
    g.f2 = [](double t) { return 1.0 / (2.0 * t * (t + 1.0)); };
    g.f_at_zero = 0.5 * std::log(2.0);
    g.fprime_at_inf = 0.5 * std::log(2.0);
    g.pinsker_constant = PinskerConstant{1.0, 0.5, true};
    g.f2_monotonicity = Monotonicity::nonincreasing;
    g.operator_convex = true;
    g.g_concave = true;
    return g;
}

inline Generator triangular() {
    Generator g = base("triangular");
    g.f = [](double t) { return (t - 1.0) * (t - 1.0) / (t + 1.0); };
    g.f1 = [](double t) { return (t - 1.0) * (t + 3.0) / ((t + 1.0) * (t + 1.0)); };
    g.f2 = [](double t) { return 8.0 / ((t + 1.0) * (t + 1.0) * (t + 1.0)); };
    g.f_at_zero = 1.0;
    g.fprime_at_inf = 1.0;
    g.f2_at_zero = 8.0;
    g.f2_at_zero_finite = true;
    g.pinsker_constant = PinskerConstant{4.0, 0.5, true};
    g.f2_monotonicity = Monotonicity::nonincreasing;
    g.operator_convex = true;
    g.g_concave = true;
    return g;
}

inline Generator piecewise_example() {
    Generator g = base("piecewise_example");
    g.f = [](double t) { return t <= 1.0 ? 0.5 * t * (t - 1.0) : t * std::log(t) - 0.5 * (t - 1.0); };
    g.f1 = [](double t) { return t <= 1.0 ? t - 0.5 : std::log(t) + 0.5; };
    g.f2 = [](double t) { return t <= 1.0 ? 1.0 : 1.0 / t; };
    g.f_at_zero = 0.0;
    g.fprime_at_inf = inf;
    g.f2_at_zero = 1.0;
    g.f2_at_zero_finite = true;
    // infimum 2 is approached toward the corners (0,1) and (1,0)
    g.pinsker_constant = PinskerConstant{2.0, 0.0, false};
    g.f2_monotonicity = Monotonicity::nonincreasing;
    g.g_concave = true;
    g.f_over_t_concave = true;
    g.kinks = {1.0};
    return g;
}

inline Generator chi_alpha(double a) {
    if (!(a >= 1.0) || !std::isfinite(a)) throw domain_error("chi_alpha: alpha must be at least 1");
    Generator g = base("chi_alpha");
    with_param(g, "alpha", a);
    g.f = [a](double t) { return std::pow(std::abs(t - 1.0), a); };
    g.f1 = [a](double t) {
        double s = t > 1.0 ? 1.0 : (t < 1.0 ? -1.0 : 0.0);
        return a * s * std::pow(std::abs(t - 1.0), a - 1.0);
    };
    g.f2 = [a](double t) { return a * (a - 1.0) * std::pow(std::abs(t - 1.0), a - 2.0); };
    g.f_at_zero = 1.0;
    g.fprime_at_inf = a > 1.0 ? inf : 1.0;
    g.f2_at_zero = a * (a - 1.0);
    g.f2_at_zero_finite = true;
    g.strictly_convex = a > 1.0;
    g.twice_continuous = a >= 2.0;
    if (a != 2.0) g.kinks = {1.0};
    g.f2_monotonicity = a == 2.0 ? Monotonicity::constant : Monotonicity::unknown;
    g.operator_convex = a == 2.0;
    g.g_concave = a == 2.0;
    return g;
}

inline Generator one_sided_sq() {
    Generator g = base("one_sided_sq");
    g.f = [](double t) { return t <= 1.0 ? (t - 1.0) * (t - 1.0) : 0.0; };
    g.f1 = [](double t) { return t <= 1.0 ? 2.0 * (t - 1.0) : 0.0; };
    g.f2 = [](double t) { return t <= 1.0 ? 2.0 : 0.0; };
    g.f_at_zero = 1.0;
    g.fprime_at_inf = 0.0;
    g.f2_at_zero = 2.0;
    g.f2_at_zero_finite = true;
    g.strictly_convex = false;
    g.twice_continuous = false;
    g.kinks = {1.0};
    return g;
}

}  // namespace detail

// The fourteen families with a tabulated Pinsker constant.
inline const std::vector<std::string>& registry_names() {
    static const std::vector<std::string> names = {
        "kl",        "reverse_kl",        "renyi_gain", "hellinger",      "pearson_chi2",
        "neyman_chi2", "symmetric_chi2",  "ag_mean",    "jeffrey",        "squared_hellinger",
        "lins",      "jensen_shannon",    "triangular", "piecewise_example"};
    return names;
}

// Families registered for consistency checks only (no Pinsker constant).
inline const std::vector<std::string>& auxiliary_names() {
    static const std::vector<std::string> names = {"chi_alpha", "one_sided_sq"};
    return names;
}

inline Generator make_generator(const std::string& name, const std::map<std::string, double>& params = {}) {
    using namespace detail;
    auto no_params = [&](Generator g) {
        reject_unknown(params, {}, name);
        return g;
    };
    if (name == "kl") return no_params(kl());
    if (name == "reverse_kl") return no_params(reverse_kl());
    if (name == "renyi_gain") {
        reject_unknown(params, {"alpha"}, name);
        return renyi_gain(get_param(params, "alpha", 0.5));
    }
    if (name == "hellinger") {
        reject_unknown(params, {"alpha"}, name);
        return hellinger(get_param(params, "alpha", 1.5));
    }
    if (name == "pearson_chi2") return no_params(pearson_chi2());
    if (name == "neyman_chi2") return no_params(neyman_chi2());
    if (name == "symmetric_chi2") return no_params(symmetric_chi2());
    if (name == "ag_mean") return no_params(ag_mean());
    if (name == "jeffrey") return no_params(jeffrey());
    if (name == "squared_hellinger") return no_params(squared_hellinger());
    if (name == "lins") {
        reject_unknown(params, {"theta"}, name);
        return lins(get_param(params, "theta", 0.25));
    }
    if (name == "jensen_shannon") return no_params(jensen_shannon());
    if (name == "triangular") return no_params(triangular());
    if (name == "piecewise_example") return no_params(piecewise_example());
    if (name == "chi_alpha") {
        reject_unknown(params, {"alpha"}, name);
        return chi_alpha(get_param(params, "alpha", 2.0));
    }
    if (name == "one_sided_sq") return no_params(one_sided_sq());
    throw domain_error("unknown generator: " + name);
}

// Parses "name" or "name:key=value,key=value".
inline Generator parse_generator(std::string_view spec) {
    std::string s(spec);
    auto colon = s.find(':');
    std::string name = s.substr(0, colon);
    std::map<std::string, double> params;
    if (colon != std::string::npos) {
        std::stringstream ss(s.substr(colon + 1));
        std::string item;
        while (std::getline(ss, item, ',')) {
            auto eq = item.find('=');
            if (eq == std::string::npos || eq == 0) throw domain_error("malformed generator parameter: " + item);
            std::string key = item.substr(0, eq);
            std::string val = item.substr(eq + 1);
            double v = 0.0;
            auto res = std::from_chars(val.data(), val.data() + val.size(), v);
            if (res.ec != std::errc() || res.ptr != val.data() + val.size())
                throw domain_error("malformed generator parameter value: " + val);
            params[key] = v;
        }
    }
    return make_generator(name, params);
}

// Canonical instances of the Pinsker tables: one default per family, then parameter variants.
inline std::vector<std::string> table_entries(bool include_variants = true) {
    std::vector<std::string> out = {"kl",
                                    "reverse_kl",
                                    "renyi_gain:alpha=0.5",
                                    "hellinger:alpha=1.5",
                                    "pearson_chi2",
                                    "neyman_chi2",
                                    "symmetric_chi2",
                                    "ag_mean",
                                    "jeffrey",
                                    "squared_hellinger",
                                    "lins:theta=0.25",
                                    "jensen_shannon",
                                    "triangular",
                                    "piecewise_example"};
    if (include_variants) {
        for (const char* v : {"renyi_gain:alpha=-1", "renyi_gain:alpha=-0.5", "renyi_gain:alpha=0", "renyi_gain:alpha=1",
                              "renyi_gain:alpha=1.5", "renyi_gain:alpha=2", "renyi_gain:alpha=3", "hellinger:alpha=0.5",
                              "hellinger:alpha=1", "hellinger:alpha=2", "hellinger:alpha=3", "lins:theta=0.5"})
            out.emplace_back(v);
    }
    return out;
}

// f~(t) = f(t) + c (t - 1). Divergences of equal-sum pairs are unchanged.
inline Generator shift_generator(const Generator& g, double c) {
    if (c == 0.0) return g;
    Generator s = g;
    s.name = g.name + "+shift(" + format_real(c) + ")";
    s.params.emplace_back("shift", c);
    auto f = g.f, f1 = g.f1;
    s.f = [f, c](double t) { return f(t) + c * (t - 1.0); };
    s.f1 = [f1, c](double t) { return f1(t) + c; };
    s.f_at_zero = is_inf(g.f_at_zero) ? inf : g.f_at_zero - c;
    s.fprime_at_inf = is_inf(g.fprime_at_inf) ? inf : g.fprime_at_inf + c;
    // f~/t = f/t + c - c/t
    s.f_over_t_concave = g.f_over_t_concave && c > 0.0;
    return s;
}

struct CustomLimits {
    double f_at_zero = inf;
    double fprime_at_inf = inf;
    double f2_at_zero = inf;
    Monotonicity f2_monotonicity = Monotonicity::unknown;
    std::optional<PinskerConstant> pinsker_constant;
};

// Programmatic constructor from three callables; limits are supplied by the caller.
inline Generator custom_generator(std::string name, RealFn f, RealFn f1, RealFn f2, CustomLimits lim = {}) {
    Generator g = detail::base(std::move(name));
    g.f = std::move(f);
    g.f1 = std::move(f1);
    g.f2 = std::move(f2);
    g.f_at_zero = lim.f_at_zero;
    g.fprime_at_inf = lim.fprime_at_inf;
    g.f2_at_zero = lim.f2_at_zero;
    g.f2_at_zero_finite = std::isfinite(lim.f2_at_zero);
    g.f2_monotonicity = lim.f2_monotonicity;
    g.pinsker_constant = lim.pinsker_constant;
    return g;
}

}  // namespace divlab
