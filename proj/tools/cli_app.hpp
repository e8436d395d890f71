#pragma once

#include "divlab/divlab.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

namespace divlab::cli {

using json = nlohmann::json;

inline constexpr const char* schema_version = "1.0";

enum exit_code : int { ok = 0, input_failure = 1, violation = 2 };

// +inf is not representable in JSON; it is emitted as the string "+inf".
inline json num(double v) {
    if (is_inf(v)) return "+inf";
    if (std::isnan(v)) return "nan";
    return v;
}

inline json opt_num(const std::optional<double>& v) { return v ? num(*v) : json(nullptr); }

inline std::uint64_t fnv1a(const std::string& s, std::uint64_t h = 0xcbf29ce484222325ULL) {
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

inline std::string hex64(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

struct Context {
    std::vector<std::string> args;
    std::vector<std::string> warnings;
    std::uint64_t digest = 0xcbf29ce484222325ULL;
    std::uint64_t seed = 0;
    bool bits = false;
    bool violated = false;

    void absorb(const std::string& data) { digest = fnv1a(data, fnv1a("|", digest)); }

    // Divergence-valued quantities are rescaled to bits at presentation time.
    json div(double v) const { return num(bits && !is_inf(v) ? v / std::log(2.0) : v); }

    json claim(const std::string& bound_id, double lhs, double rhs, bool holds, bool divergence_units = true) {
        if (!holds) violated = true;
        return {{"bound_id", bound_id},
                {"lhs", divergence_units ? div(lhs) : num(lhs)},
                {"rhs", divergence_units ? div(rhs) : num(rhs)},
                {"holds", holds}};
    }
};

inline json structure_json(const ChainStructure& s) {
    json j;
    j["scrambling"] = s.scrambling;
    j["irreducible"] = s.irreducible;
    j["aperiodic"] = s.aperiodic;
    j["indecomposable"] = s.indecomposable ? json(*s.indecomposable) : json(nullptr);
    j["stationary_unique"] = s.stationary_unique;
    j["positivity_index"] = s.positivity_index ? json(*s.positivity_index) : json(nullptr);
    j["periods"] = s.periods;
    if (s.stationary) {
        std::vector<double> pi(s.stationary->vec().data(), s.stationary->vec().data() + s.stationary->size());
        j["stationary"] = pi;
    }
    return j;
}

inline json vec_json(const Vec& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

inline json cmat_json(const CMat& m) {
    json re = json::array(), im = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        json r = json::array(), c = json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            r.push_back(m(i, j).real());
            c.push_back(m(i, j).imag());
        }
        re.push_back(r);
        im.push_back(c);
    }
    return {{"re", re}, {"im", im}};
}

inline json verify_constants(Context& ctx, int grid, double eps, const std::vector<std::string>& names, bool variants) {
    std::vector<std::string> entries = names.empty() ? table_entries(variants) : names;
    json certs = json::array();
    for (const auto& e : entries) {
        Generator g = parse_generator(e);
        if (!g.pinsker_constant) {
            ctx.warnings.push_back(e + ": no Pinsker constant registered");
            continue;
        }
        PinskerCertificate c = certify_constant(g, grid, eps);
        bool good = c.verdict == Verdict::certified && c.attained;
        if (c.verdict == Verdict::violated) ctx.violated = true;
        if (c.verdict == Verdict::inconclusive_boundary)
            ctx.warnings.push_back(e + ": minimum escapes to the boundary ring");
        if (c.verdict == Verdict::certified && !c.attained)
            ctx.warnings.push_back(e + ": certified but the refined minimum exceeds the constant (not tight on the grid)");
        certs.push_back({{"bound_id", "pinsker_constant"},
                         {"generator", c.generator},
                         {"lambda", num(c.lambda)},
                         {"claimed_L", num(c.claimed_L)},
                         {"refined_min", num(c.grid_min)},
                         {"argmin", {c.grid_argmin.first, c.grid_argmin.second}},
                         {"interior_min", num(c.interior_min)},
                         {"ring_min", num(c.ring_min)},
                         {"verdict", to_string(c.verdict)},
                         {"attained", c.attained},
                         {"reproduced", good}});
    }
    return {{"grid", grid}, {"boundary_eps", eps}, {"certificates", certs}};
}

inline json divergence_cmd(Context& ctx, const std::string& gspec, const std::string& ptext, const std::string& qtext) {
    Generator g = parse_generator(gspec);
    WeightVec p(parse_vector(ptext)), q(parse_vector(qtext));
    require_same_alphabet(p, q);
    json j;
    j["generator"] = g.name;
    j["units"] = ctx.bits ? "bits" : "nats";
    const double D = f_divergence(g, p, q);
    j["divergence"] = {{"bound_id", "f_divergence"}, {"value", ctx.div(D)}};
    j["total_variation"] = num(total_variation(p, q));
    j["chi2"] = num(chi_squared(p, q));
    if (!absolutely_continuous(p, q))
        ctx.warnings.push_back("p is not absolutely continuous with respect to q; divergence uses f'(inf) = " +
                               (is_inf(g.fprime_at_inf) ? std::string("+inf") : format_real(g.fprime_at_inf)));
    const bool same_sum = equal_sums(p, q);
    json claims = json::array();
    if (g.pinsker_constant && same_sum && q.sum() > 0.0) {
        PinskerCheck pc = check_pinsker(g, p, q);
        claims.push_back(ctx.claim("pinsker", pc.rhs, pc.lhs, pc.holds));
    }
    if (same_sum || std::abs(g.f1(1.0)) <= 1e-12) {
        SandwichResult s = chi2_sandwich(g, p, q);
        claims.push_back(ctx.claim("chi2_sandwich_lower", s.lower, s.value, s.lower <= s.value + 1e-10 * std::max(1.0, s.value) || is_inf(s.value)));
        claims.push_back(ctx.claim("chi2_sandwich_upper", s.value, s.upper, s.holds));
        j["kappa"] = {{"up", num(s.kappa.kappa_up)}, {"down", num(s.kappa.kappa_down)}};
        if (absolutely_continuous(p, q)) {
            ReversePinskerResult rp = reverse_pinsker(g, p, q);
            claims.push_back(ctx.claim("reverse_pinsker_l2", rp.value, rp.l2_bound, is_inf(rp.l2_bound) || rp.value <= rp.l2_bound + 1e-10 * std::max(1.0, rp.value)));
            claims.push_back(ctx.claim("reverse_pinsker_tv", rp.l2_bound, rp.tv_bound, rp.holds));
        }
    } else {
        ctx.warnings.push_back("p and q have different masses and f'(1) != 0; sandwich bounds skipped");
    }
    if (absolutely_continuous(p, q)) {
        BoundValue b = chi2_reverse_pinsker(p, q);
        claims.push_back(ctx.claim("chi2_reverse_pinsker", b.value, b.bound, b.holds, false));
        Chi2TvUpper u = chi2_tv_upper(p, q);
        claims.push_back(ctx.claim("chi2_tv_upper", u.chi2, u.inf_l1_bound, u.holds, false));
        if (std::abs(p.sum() - 1.0) <= 1e-10 && std::abs(q.sum() - 1.0) <= 1e-10 && g.pinsker_constant) {
            LowerByChi2 l = f_lower_by_chi2(g, ProbVec(p.vec()), ProbVec(q.vec()));
            claims.push_back(ctx.claim("f_lower_by_chi2", l.bound, l.value, l.holds));
        }
    }
    j["claims"] = claims;
    return j;
}

inline json contraction_json(Context& ctx, const Channel& W, const ProbVec& pi, const Generator& g, const SamplerBudget& b) {
    ContractionReport r = contraction_report(W, pi, g, b);
    json j;
    j["eta_chi2"] = {{"bound_id", "eta_chi2_singular_value"}, {"value", num(r.eta_chi2)}};
    j["eta_f_estimate"] = {{"bound_id", "eta_f_sampled_lower"}, {"value", num(r.eta_f_estimate)}};
    if (r.witness) j["witness"] = vec_json(r.witness->vec());
    auto bound = [&](const char* id, const OptionalBound& ob) {
        json x = {{"bound_id", id}, {"value", opt_num(ob.value)}, {"note", ob.note}};
        if (ob.value) {
            bool holds = is_inf(*ob.value) || r.eta_f_estimate <= *ob.value + 1e-9;
            if (!holds) ctx.violated = true;
            x["holds"] = holds;
        }
        return x;
    };
    j["nonlinear_upper"] = bound("eta_f_nonlinear_upper", r.upper.nonlinear);
    j["linear_upper"] = bound("eta_f_linear_upper", r.upper.linear);
    if (g.f2(1.0) > 0.0 && W.inputs() == 2) {
        bool holds = r.eta_f_estimate >= r.eta_chi2 - 1e-6;
        j["eta_f_at_least_eta_chi2"] = ctx.claim("eta_f_ge_eta_chi2", r.eta_chi2, r.eta_f_estimate, holds, false);
    }
    return j;
}

inline json mixing_json(Context& ctx, const Channel& W, double delta, const std::optional<Generator>& g) {
    MixingTimes m = mixing_time_bounds(W, delta, g);
    json j;
    j["delta"] = delta;
    j["eta_chi2"] = num(m.eta_chi2);
    j["pi_min"] = num(m.pi_min);
    j["tv"] = ctx.claim("mixing_time_tv", m.empirical_tv, m.tv_bound, m.empirical_tv <= m.tv_bound, false);
    if (m.f_bound) {
        j["f"] = ctx.claim("mixing_time_f", *m.empirical_f, *m.f_bound, *m.empirical_f <= *m.f_bound, false);
    } else if (g) {
        j["f"] = {{"bound_id", "mixing_time_f"}, {"note", m.f_note}};
    }
    return j;
}

inline void write_profile_csv(const std::string& path, const RateProfile& p) {
    std::ofstream out(path);
    if (!out) throw input_error("cannot write " + path);
    out << "n,eta_estimate,rate,eta_chi2,envelope\n";
    char buf[256];
    for (const auto& pt : p.points) {
        std::snprintf(buf, sizeof buf, "%d,%.17g,%.17g,%.17g,%.17g\n", pt.n, pt.eta_estimate, pt.rate, p.eta_chi2, pt.envelope);
        out << buf;
    }
}

inline json analyze_chain(Context& ctx, const std::string& path, const std::string& gspec, double delta, int n_max,
                          const SamplerBudget& budget, const std::string& profile_csv) {
    std::string text = read_file(path);
    ctx.absorb(text);
    Channel W = parse_matrix_text(text);
    Generator g = parse_generator(gspec);
    json j;
    j["generator"] = g.name;
    if (!W.square()) throw input_error("analyze-chain requires a square matrix");
    ChainStructure s = structure(W);
    j["structure"] = structure_json(s);
    if (!s.stationary_unique) {
        ctx.warnings.push_back("stationary distribution is not unique; contraction analysis uses one stationary point");
    }
    const ProbVec& pi = *s.stationary;
    j["contraction"] = contraction_json(ctx, W, pi, g, budget);
    if (s.stationary_unique && pi.support_size() == pi.size()) {
        try {
            j["mixing"] = mixing_json(ctx, W, delta, g);
        } catch (const domain_error& e) {
            ctx.warnings.push_back(std::string("mixing-time bounds skipped: ") + e.what());
        }
    } else {
        ctx.warnings.push_back("mixing-time bounds need a unique full-support stationary distribution");
    }
    try {
        RateProfile p = contraction_rate_profile(W, g, n_max, budget);
        json pts = json::array();
        for (const auto& pt : p.points) {
            if (!pt.within_envelope) ctx.violated = true;
            pts.push_back({{"n", pt.n},
                           {"eta_estimate", num(pt.eta_estimate)},
                           {"rate", num(pt.rate)},
                           {"envelope", num(pt.envelope)},
                           {"within_envelope", pt.within_envelope}});
        }
        j["rate_profile"] = {{"bound_id", "contraction_rate"}, {"condition", p.condition}, {"eta_chi2", num(p.eta_chi2)}, {"points", pts}};
        if (!profile_csv.empty()) write_profile_csv(profile_csv, p);
    } catch (const domain_error& e) {
        ctx.warnings.push_back(std::string("rate profile skipped: ") + e.what());
    }
    return j;
}

inline json mixing_time_cmd(Context& ctx, const std::string& path, double delta, const std::string& gspec) {
    std::string text = read_file(path);
    ctx.absorb(text);
    Channel W = parse_matrix_text(text);
    std::optional<Generator> g;
    if (!gspec.empty()) g = parse_generator(gspec);
    return mixing_json(ctx, W, delta, g);
}

inline json quantum_analyze(Context& ctx, const std::string& chan_path, const std::string& gspec, double delta,
                            const QuantumBudget& budget, const std::string& rho_path, const std::string& sigma_path) {
    std::string text = read_file(chan_path);
    ctx.absorb(text);
    KrausChannel E = parse_kraus_text(text);
    Generator g = parse_generator(gspec);
    json j;
    j["generator"] = g.name;
    j["d_in"] = E.d_in();
    j["d_out"] = E.d_out();
    j["kraus_count"] = E.kraus().size();
    if (!E.square()) throw input_error("quantum-analyze requires a channel with equal input and output dimensions");
    QuantumStructure qs = channel_structure(E);
    j["structure"] = {{"unique", qs.unique},
                      {"eigenspace_dim", qs.eigenspace_dim},
                      {"mixing", qs.mixing},
                      {"strongly_mixing", qs.strongly_mixing},
                      {"positivity_index", qs.positivity_index ? json(*qs.positivity_index) : json(nullptr)}};
    if (qs.fixed_point) j["structure"]["fixed_point"] = cmat_json(qs.fixed_point->matrix());

    if (!rho_path.empty()) {
        std::string rt = read_file(rho_path);
        ctx.absorb(rt);
        DensityMatrix rho = parse_state_text(rt);
        DensityMatrix sigma = DensityMatrix::maximally_mixed(rho.dim());
        if (!sigma_path.empty()) {
            std::string st = read_file(sigma_path);
            ctx.absorb(st);
            sigma = parse_state_text(st);
        } else if (qs.fixed_point) {
            sigma = *qs.fixed_point;
        }
        json pair;
        pair["petz_divergence"] = {{"bound_id", "petz_f_divergence"}, {"value", ctx.div(petz_f_divergence(g, rho, sigma))}};
        pair["petz_chi2"] = num(petz_chi2(rho, sigma));
        pair["trace_distance"] = num(trace_distance(rho, sigma));
        json checks = json::array();
        for (const auto& b : petz_bounds_report(g, rho, sigma)) {
            if (!b.applicable) {
                checks.push_back({{"bound_id", b.bound_id}, {"applicable", false}, {"note", b.note}});
                continue;
            }
            bool chi_units = b.bound_id == "petz_chi2_hs_upper" || b.bound_id == "petz_chi2_td_upper";
            checks.push_back(ctx.claim(b.bound_id, b.lhs, b.rhs, b.holds, !chi_units));
        }
        pair["claims"] = checks;
        j["state_pair"] = pair;
    }

    if (qs.mixing && qs.fixed_point && lambda_min(*qs.fixed_point) > 0.0) {
        const DensityMatrix& pi = *qs.fixed_point;
        QuantumEtaEstimate est = quantum_eta_estimate(E, pi, g, budget);
        QuantumEtaBounds qb = quantum_eta_bounds(E, pi, g, budget);
        json c;
        c["eta_f_estimate"] = {{"bound_id", "quantum_eta_f_sampled_lower"}, {"value", num(est.estimate)}};
        c["eta_chi2_estimate"] = {{"bound_id", "quantum_eta_chi2_sampled_lower"}, {"value", num(qb.eta_chi2_estimate)}};
        c["nonlinear_upper"] = {{"bound_id", "quantum_eta_f_nonlinear_upper"}, {"value", opt_num(qb.nonlinear.value)}, {"note", qb.nonlinear.note}};
        c["linear_upper"] = {{"bound_id", "quantum_eta_f_linear_upper"}, {"value", opt_num(qb.linear.value)}, {"note", qb.linear.note}};
        j["contraction"] = c;
        try {
            QuantumMixingTimes m = quantum_mixing_time_bounds(E, delta, g, budget);
            json mj;
            mj["delta"] = delta;
            mj["estimate_based"] = m.estimate_based;
            mj["lambda_min"] = num(m.lambda_min);
            mj["td"] = ctx.claim("quantum_mixing_time_td", m.empirical_td, m.td_bound, m.empirical_td <= m.td_bound, false);
            if (m.f_bound)
                mj["f"] = ctx.claim("quantum_mixing_time_f", *m.empirical_f, *m.f_bound, *m.empirical_f <= *m.f_bound, false);
            else
                mj["f"] = {{"bound_id", "quantum_mixing_time_f"}, {"note", m.f_note}};
            j["mixing"] = mj;
            ctx.warnings.push_back("quantum mixing-time bounds use a sampled contraction estimate");
        } catch (const domain_error& e) {
            ctx.warnings.push_back(std::string("quantum mixing-time bounds skipped: ") + e.what());
        }
    } else {
        ctx.warnings.push_back("channel is not mixing with a full-rank fixed point; contraction and mixing analysis skipped");
    }
    return j;
}

// Parses argv (without the program name), emits the JSON report on `out`, returns the exit code.
inline int run(const std::vector<std::string>& argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"divlab: f-divergence inequalities, contraction coefficients and mixing times"};
    app.require_subcommand(1);
    Context ctx;
    ctx.args = argv;
    std::uint64_t seed = 0;
    int workers = 1;
    int samples = 2000;
    app.add_option("--seed", seed, "root seed for sampling")->default_val(0);
    app.add_option("--workers", workers, "worker threads for sampling")->default_val(1);
    app.add_flag("--bits", ctx.bits, "report divergences in bits");

    auto* vc = app.add_subcommand("verify-constants", "certify the tabulated Pinsker constants");
    int grid = 512;
    double eps = 1e-4;
    std::vector<std::string> vc_names;
    bool no_variants = false;
    vc->add_option("--grid", grid, "grid points per axis")->default_val(512);
    vc->add_option("--eps", eps, "distance of the grid from the boundary")->default_val(1e-4);
    vc->add_option("--generator", vc_names, "restrict to these generators");
    vc->add_flag("--no-variants", no_variants, "skip parameter variants");

    auto* dv = app.add_subcommand("divergence", "evaluate an f-divergence and its bounds");
    std::string d_g, d_p, d_q;
    dv->add_option("--g,--generator", d_g, "generator, e.g. kl or hellinger:alpha=1.5")->required();
    dv->add_option("--p", d_p, "comma-separated first vector")->required();
    dv->add_option("--q", d_q, "comma-separated second vector")->required();

    auto* ac = app.add_subcommand("analyze-chain", "structure, contraction and mixing of a Markov chain");
    std::string a_m, a_g = "kl", a_csv;
    double a_delta = 0.01;
    int a_n = 10;
    ac->add_option("--matrix", a_m, "column-stochastic matrix (CSV or JSON)")->required();
    ac->add_option("--generator", a_g, "generator")->default_val("kl");
    ac->add_option("--delta", a_delta, "mixing tolerance")->default_val(0.01);
    ac->add_option("--n-max", a_n, "largest power in the rate profile")->default_val(10);
    ac->add_option("--samples", samples, "Dirichlet samples")->default_val(2000);
    ac->add_option("--profile-csv", a_csv, "write the rate profile as CSV");

    auto* mt = app.add_subcommand("mixing-time", "mixing-time bounds of a Markov chain");
    std::string m_m, m_g;
    double m_delta = 0.01;
    mt->add_option("--matrix", m_m, "column-stochastic matrix (CSV or JSON)")->required();
    mt->add_option("--delta", m_delta, "mixing tolerance")->default_val(0.01);
    mt->add_option("--generator", m_g, "generator for the f-divergence bound");

    auto* qa = app.add_subcommand("quantum-analyze", "Petz divergences, contraction and mixing of a quantum channel");
    std::string q_c, q_g = "kl", q_rho, q_sigma;
    double q_delta = 0.01;
    int q_samples = 400;
    qa->add_option("--channel", q_c, "Kraus operators (JSON)")->required();
    qa->add_option("--generator", q_g, "generator")->default_val("kl");
    qa->add_option("--delta", q_delta, "mixing tolerance")->default_val(0.01);
    qa->add_option("--state", q_rho, "state rho (JSON) for pairwise bounds");
    qa->add_option("--reference", q_sigma, "reference state sigma (JSON)");
    qa->add_option("--samples", q_samples, "Haar-random states")->default_val(400);

    for (auto* sub : {vc, dv, ac, mt, qa}) {
        sub->add_option("--seed", seed, "root seed for sampling");
        sub->add_option("--workers", workers, "worker threads for sampling");
        sub->add_flag("--bits", ctx.bits, "report divergences in bits");
    }

    try {
        std::vector<std::string> rev(argv.rbegin(), argv.rend());
        app.parse(rev);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return ok;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return input_failure;
    }

    if (const char* env = std::getenv("DIVLAB_SEED")) {
        try {
            seed = std::stoull(env);
        } catch (const std::exception&) {
            err << "error: DIVLAB_SEED must be a non-negative integer\n";
            return input_failure;
        }
    }
    ctx.seed = seed;
    for (const auto& a : argv) ctx.absorb(a);

    json report;
    report["schema_version"] = schema_version;
    report["command"] = {{"name", app.get_subcommands().front()->get_name()}, {"args", argv}};
    report["seed"] = seed;
    try {
        json results;
        if (vc->parsed()) {
            results = verify_constants(ctx, grid, eps, vc_names, !no_variants);
        } else if (dv->parsed()) {
            results = divergence_cmd(ctx, d_g, d_p, d_q);
        } else if (ac->parsed()) {
            SamplerBudget b;
            b.seed = seed;
            b.workers = workers;
            b.samples = samples;
            results = analyze_chain(ctx, a_m, a_g, a_delta, a_n, b, a_csv);
        } else if (mt->parsed()) {
            results = mixing_time_cmd(ctx, m_m, m_delta, m_g);
        } else if (qa->parsed()) {
            QuantumBudget b;
            b.seed = seed;
            b.workers = workers;
            b.samples = q_samples;
            results = quantum_analyze(ctx, q_c, q_g, q_delta, b, q_rho, q_sigma);
        }
        report["results"] = results;
    } catch (const input_error& e) {
        err << "error: " << e.what() << "\n";
        return input_failure;
    } catch (const domain_error& e) {
        err << "error: " << e.what() << "\n";
        return input_failure;
    }
    report["inputs_digest"] = hex64(ctx.digest);
    report["warnings"] = ctx.warnings;
    out << report.dump(2) << "\n";
    return ctx.violated ? violation : ok;
}

}  // namespace divlab::cli
