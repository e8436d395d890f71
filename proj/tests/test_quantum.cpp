#include "divlab/quantum.hpp"

#include <gtest/gtest.h>

using namespace divlab;

namespace {

DensityMatrix plus_state() { return DensityMatrix::pure(CVec::Ones(2)); }

QuantumBudget small_budget(std::uint64_t seed = 0) {
    QuantumBudget b;
    b.samples = 100;
    b.seed = seed;
    b.refine_top = 2;
    b.hill_climb_iters = 20;
    return b;
}

std::vector<Generator> operator_convex_generators() {
    std::vector<Generator> out;
    for (const auto& e : table_entries())
        if (Generator g = parse_generator(e); g.operator_convex) out.push_back(g);
    return out;
}

}  // namespace

TEST(DensityMatrix, Validation) {
    CMat nonherm(2, 2);
    nonherm << 0.5, 0.1, 0.0, 0.5;
    EXPECT_THROW(DensityMatrix{nonherm}, domain_error);
    EXPECT_THROW(DensityMatrix{CMat::Identity(2, 2)}, domain_error);
    CMat neg(2, 2);
    neg << 1.5, 0.0, 0.0, -0.5;
    EXPECT_THROW(DensityMatrix{neg}, domain_error);
    EXPECT_NO_THROW(DensityMatrix::maximally_mixed(3));
}

TEST(NS, CommutingDiagonal) {
    NSPair ns = ns_distributions(DensityMatrix::diagonal(ProbVec{0.3, 0.7}), DensityMatrix::diagonal(ProbVec{0.6, 0.4}));
    // eigenvalues come back ascending; compare as sets of diagonal cells
    double pd = 0.0, qd = 0.0;
    for (Eigen::Index x = 0; x < 2; ++x)
        for (Eigen::Index y = 0; y < 2; ++y) {
            double p = ns.p[x * 2 + y], q = ns.q[x * 2 + y];
            if (p > 0.0 || q > 0.0) {
                pd += p;
                qd += q;
            }
        }
    EXPECT_NEAR(pd, 1.0, 1e-12);
    EXPECT_NEAR(qd, 1.0, 1e-12);
    EXPECT_NEAR(f_divergence(make_generator("kl"), ns.p, ns.q), f_divergence(make_generator("kl"), ProbVec{0.3, 0.7}, ProbVec{0.6, 0.4}), 1e-12);
}

TEST(NS, PlusAgainstMaximallyMixed) {
    NSPair ns = ns_distributions(plus_state(), DensityMatrix::maximally_mixed(2));
    EXPECT_NEAR(ns.p.sum(), 1.0, 1e-12);
    EXPECT_NEAR(ns.q.sum(), 1.0, 1e-12);
    for (Eigen::Index i = 0; i < 4; ++i) EXPECT_NEAR(ns.q[i], 0.25, 1e-12);
    // the row of the zero eigenvalue of rho carries no p-mass; the other row is (1/2, 1/2)
    std::vector<double> p(ns.p.vec().data(), ns.p.vec().data() + 4);
    std::sort(p.begin(), p.end());
    EXPECT_NEAR(p[0], 0.0, 1e-12);
    EXPECT_NEAR(p[1], 0.0, 1e-12);
    EXPECT_NEAR(p[2], 0.5, 1e-12);
    EXPECT_NEAR(p[3], 0.5, 1e-12);
}

TEST(Petz, Examples) {
    EXPECT_NEAR(petz_f_divergence(make_generator("kl"), plus_state(), DensityMatrix::maximally_mixed(2)), std::log(2.0), 1e-12);
    DensityMatrix r = DensityMatrix::diagonal(ProbVec{0.6, 0.4});
    EXPECT_NEAR(petz_chi2(r, DensityMatrix::maximally_mixed(2)), 0.04, 1e-14);
    std::mt19937_64 rng(51);
    DensityMatrix s = random_density(3, rng);
    for (const auto& e : table_entries()) EXPECT_NEAR(petz_f_divergence(parse_generator(e), s, s), 0.0, 1e-12) << e;
    EXPECT_NEAR(petz_chi2(s, s), 0.0, 1e-14);
}

TEST(Petz, DiagonalReducesToClassical) {
    std::mt19937_64 rng(52);
    for (const auto& e : table_entries()) {
        Generator g = parse_generator(e);
        for (int k = 0; k < 10; ++k) {
            ProbVec p = sample_dirichlet(3, rng), q = sample_dirichlet(3, rng);
            double c = f_divergence(g, p, q);
            EXPECT_NEAR(petz_f_divergence(g, DensityMatrix::diagonal(p), DensityMatrix::diagonal(q)), c, 1e-10 * std::max(1.0, c)) << e;
        }
    }
}

TEST(Petz, BoundaryTerms) {
    DensityMatrix zero = DensityMatrix::pure(CVec::Unit(2, 0));
    DensityMatrix one = DensityMatrix::pure(CVec::Unit(2, 1));
    EXPECT_TRUE(is_inf(petz_f_divergence(make_generator("kl"), zero, one)));
    EXPECT_TRUE(is_inf(petz_chi2(zero, one)));
    EXPECT_NEAR(petz_f_divergence(make_generator("triangular"), zero, one), 2.0, 1e-12);
    Generator js = make_generator("jensen_shannon");
    EXPECT_NEAR(petz_f_divergence(js, zero, one), f_divergence(js, ProbVec{1.0, 0.0}, ProbVec{0.0, 1.0}), 1e-12);
}

TEST(Petz, Chi2DualRoute) {
    std::mt19937_64 rng(53);
    Generator pearson = make_generator("pearson_chi2");
    for (int d : {2, 3})
        for (int k = 0; k < 50; ++k) {
            DensityMatrix r = random_density(d, rng), s = random_density(d, rng);
            double a = petz_chi2(r, s), b = petz_f_divergence(pearson, r, s);
            EXPECT_NEAR(a, b, 1e-10 * std::max(1.0, a));
        }
}

TEST(Petz, BasisIndependenceUnderDegeneracy) {
    std::mt19937_64 rng(54);
    DensityMatrix rho = random_density(3, rng);
    Vec mu(3);
    mu << 0.25, 0.25, 0.5;
    Spectrum a = spectral_decomposition(rho);
    // two bases of the degenerate eigenspace of sigma = diag(0.25, 0.25, 0.5)
    Spectrum s1{mu, CMat::Identity(3, 3)};
    CMat U = CMat::Identity(3, 3);
    const double c = std::cos(0.7), sn = std::sin(0.7);
    U(0, 0) = c;
    U(1, 0) = cplx(0.0, sn);
    U(0, 1) = cplx(0.0, sn);
    U(1, 1) = c;
    Spectrum s2{mu, U};
    for (const auto& g : operator_convex_generators())
        EXPECT_NEAR(petz_from_spectra(g, a, s1), petz_from_spectra(g, a, s2), 1e-9) << g.name;
}

TEST(Petz, DataProcessingOnRandomChannels) {
    std::mt19937_64 rng(55);
    auto gens = operator_convex_generators();
    for (int k = 0; k < 300; ++k) {
        DensityMatrix r = random_density(2, rng), s = random_density(2, rng);
        KrausChannel E = random_kraus_channel(2, 2, rng);
        const Generator& g = gens[k % gens.size()];
        double before = petz_f_divergence(g, r, s);
        double after = petz_f_divergence(g, apply_channel(E, r), apply_channel(E, s));
        EXPECT_LE(after, before + 1e-9 * std::max(1.0, before)) << g.name;
    }
}

TEST(Channels, KrausValidation) {
    CMat K = CMat::Identity(2, 2) * 0.9;
    EXPECT_THROW(KrausChannel({K}), domain_error);
    EXPECT_THROW(KrausChannel(std::vector<CMat>{}), domain_error);
    EXPECT_THROW(depolarizing(2, 2.0), domain_error);
}

TEST(Channels, Examples) {
    std::mt19937_64 rng(56);
    DensityMatrix r = random_density(3, rng);
    EXPECT_TRUE(apply_channel(identity_qchannel(3), r).matrix().isApprox(r.matrix(), 1e-14));
    EXPECT_TRUE(apply_channel(depolarizing(3, 1.0), r).matrix().isApprox(CMat::Identity(3, 3) / 3.0, 1e-12));
    EXPECT_TRUE(apply_channel(complete_dephasing(2), plus_state()).matrix().isApprox(CMat::Identity(2, 2) / 2.0, 1e-14));
    DensityMatrix s = random_density(3, rng);
    EXPECT_TRUE(apply_channel(replacer(s, 3), r).matrix().isApprox(s.matrix(), 1e-12));
}

TEST(Channels, DepolarizingContractsTraceDistance) {
    std::mt19937_64 rng(57);
    DensityMatrix r = random_density(2, rng), s = random_density(2, rng);
    KrausChannel E = depolarizing(2, 0.3);
    EXPECT_NEAR(trace_distance(apply_channel(E, r), apply_channel(E, s)), 0.7 * trace_distance(r, s), 1e-12);
}

TEST(Channels, ComposeAndPowerAgreeWithSuperoperator) {
    std::mt19937_64 rng(58);
    KrausChannel E = random_kraus_channel(2, 3, rng);
    KrausChannel F = random_kraus_channel(2, 2, rng);
    DensityMatrix r = random_density(2, rng);
    CMat direct = E.apply_raw(F.apply_raw(r.matrix()));
    EXPECT_TRUE(apply_channel(compose(E, F), r).matrix().isApprox(direct, 1e-10));
    CMat S = E.superoperator();
    CMat S3 = S * S * S;
    CVec v = S3 * Eigen::Map<const CVec>(r.matrix().data(), 4);
    CMat via_super = Eigen::Map<const CMat>(v.data(), 2, 2);
    KrausChannel E3 = channel_power(E, 3);
    EXPECT_LE(E3.kraus().size(), 4u);
    EXPECT_TRUE(apply_channel(E3, r).matrix().isApprox(via_super, 1e-10));
}

TEST(Channels, ClassicalEmbeddingActsOnDiagonals) {
    Channel W = bsc(0.2);
    ProbVec p{0.9, 0.1};
    DensityMatrix out = apply_channel(classical_embedding(W), DensityMatrix::diagonal(p));
    ProbVec wp = W.apply(p);
    EXPECT_NEAR(out.matrix()(0, 0).real(), wp[0], 1e-15);
    EXPECT_NEAR(std::abs(out.matrix()(0, 1)), 0.0, 1e-15);
}

TEST(Structure, Depolarizing) {
    QuantumStructure s = channel_structure(depolarizing(2, 0.5));
    EXPECT_TRUE(s.unique);
    EXPECT_TRUE(s.mixing);
    EXPECT_TRUE(s.strongly_mixing);
    ASSERT_TRUE(s.fixed_point.has_value());
    EXPECT_TRUE(s.fixed_point->matrix().isApprox(CMat::Identity(2, 2) / 2.0, 1e-10));
}

TEST(Structure, IdentityNotUnique) {
    QuantumStructure s = channel_structure(identity_qchannel(2));
    EXPECT_FALSE(s.unique);
    EXPECT_FALSE(s.mixing);
}

TEST(Structure, EmbeddedConstantIsMixingNotStrongly) {
    QuantumStructure s = channel_structure(classical_embedding(constant_channel(2, 0)));
    EXPECT_TRUE(s.unique);
    EXPECT_TRUE(s.mixing);
    EXPECT_FALSE(s.strongly_mixing);
    EXPECT_NEAR(s.fixed_point->matrix()(0, 0).real(), 1.0, 1e-10);
}

TEST(Structure, AmplitudeDampingFixedPointIsPure) {
    QuantumStructure s = channel_structure(amplitude_damping(0.5));
    EXPECT_TRUE(s.mixing);
    EXPECT_FALSE(s.strongly_mixing);
    QuantumStructure d = channel_structure(complete_dephasing(2));
    EXPECT_FALSE(d.unique);
}

TEST(BoundsReport, EqualStates) {
    std::mt19937_64 rng(59);
    DensityMatrix s = random_density(2, rng);
    for (const auto& b : petz_bounds_report(make_generator("kl"), s, s)) {
        EXPECT_TRUE(b.holds) << b.bound_id;
        if (b.applicable) EXPECT_NEAR(b.lhs, 0.0, 1e-12) << b.bound_id;
    }
}

TEST(BoundsReport, PearsonSandwichCollapses) {
    std::mt19937_64 rng(60);
    DensityMatrix r = random_density(2, rng), s = random_density(2, rng);
    auto rep = petz_bounds_report(make_generator("pearson_chi2"), r, s);
    EXPECT_EQ(rep[0].bound_id, "petz_chi2_sandwich_lower");
    EXPECT_NEAR(rep[0].lhs, rep[0].rhs, 1e-12);
    EXPECT_NEAR(rep[1].lhs, rep[1].rhs, 1e-12);
}

TEST(BoundsReport, KlPlusState) {
    auto rep = petz_bounds_report(make_generator("kl"), plus_state(), DensityMatrix::maximally_mixed(2));
    auto it = std::find_if(rep.begin(), rep.end(), [](const BoundCheck& b) { return b.bound_id == "quantum_pinsker"; });
    ASSERT_NE(it, rep.end());
    EXPECT_NEAR(it->rhs, std::log(2.0), 1e-12);
    EXPECT_LE(it->lhs, it->rhs);
    EXPECT_TRUE(it->holds);
}

TEST(BoundsReport, RandomQubitPairs) {
    std::mt19937_64 rng(61);
    auto gens = operator_convex_generators();
    for (int k = 0; k < 100; ++k) {
        DensityMatrix r = random_density(2, rng), s = random_density(2, rng);
        for (const auto& g : gens)
            for (const auto& b : petz_bounds_report(g, r, s)) EXPECT_TRUE(b.holds) << g.name << " " << b.bound_id;
    }
}

TEST(BoundsReport, NonOperatorConvexSkipsPinsker) {
    auto rep = petz_bounds_report(make_generator("ag_mean"), plus_state(), DensityMatrix::maximally_mixed(2));
    auto it = std::find_if(rep.begin(), rep.end(), [](const BoundCheck& b) { return b.bound_id == "quantum_pinsker"; });
    EXPECT_FALSE(it->applicable);
}

TEST(QuantumEta, TrivialChannels) {
    DensityMatrix s = DensityMatrix::maximally_mixed(2);
    Generator kl = make_generator("kl");
    EXPECT_NEAR(quantum_eta_estimate(identity_qchannel(2), s, kl, small_budget()).estimate, 1.0, 1e-9);
    EXPECT_NEAR(quantum_eta_estimate(replacer(s, 2), s, kl, small_budget()).estimate, 0.0, 1e-9);
    QuantumBudget tiny;
    tiny.samples = 10;
    EXPECT_THROW(quantum_eta_estimate(identity_qchannel(2), s, kl, tiny), domain_error);
}

TEST(QuantumEta, EmbeddedBscMatchesClassical) {
    double e = quantum_eta_estimate(classical_embedding(bsc(0.3)), DensityMatrix::maximally_mixed(2),
                                    make_generator("pearson_chi2"), small_budget())
                   .estimate;
    EXPECT_NEAR(e, 0.16, 1e-6);
}

TEST(QuantumEta, DeterministicAcrossWorkers) {
    std::mt19937_64 rng(62);
    KrausChannel E = random_kraus_channel(2, 2, rng);
    DensityMatrix s = random_density(2, rng);
    QuantumBudget a = small_budget(3), b = small_budget(3);
    b.workers = 3;
    Generator g = make_generator("squared_hellinger");
    EXPECT_EQ(quantum_eta_estimate(E, s, g, a).estimate, quantum_eta_estimate(E, s, g, b).estimate);
}

TEST(QuantumEta, BoundsDominateEstimate) {
    std::mt19937_64 rng(63);
    DensityMatrix s = DensityMatrix::maximally_mixed(2);
    KrausChannel E = depolarizing(2, 0.4);
    for (const char* name : {"pearson_chi2", "triangular", "kl"}) {
        Generator g = make_generator(name);
        double est = quantum_eta_estimate(E, s, g, small_budget()).estimate;
        QuantumEtaBounds b = quantum_eta_bounds(E, s, g, small_budget());
        if (b.nonlinear.value) EXPECT_LE(est, *b.nonlinear.value + 1e-9) << name;
        if (b.linear.value) EXPECT_LE(est, *b.linear.value + 1e-9) << name;
    }
    QuantumEtaBounds tri = quantum_eta_bounds(E, s, make_generator("triangular"), small_budget());
    EXPECT_FALSE(tri.linear.value.has_value());
    QuantumEtaBounds ag = quantum_eta_bounds(E, s, make_generator("ag_mean"), small_budget());
    EXPECT_FALSE(ag.nonlinear.value.has_value());
    EXPECT_FALSE(ag.linear.value.has_value());
}

TEST(QuantumEta, Submultiplicative) {
    std::mt19937_64 rng(64);
    KrausChannel E = random_kraus_channel(2, 2, rng);
    DensityMatrix s = random_density(2, rng);
    QuantumBudget b = small_budget();
    b.bloch_grid = 12;
    Generator g = make_generator("pearson_chi2");
    double two = quantum_eta_estimate(channel_power(E, 2), s, g, b).estimate;
    double prod = quantum_eta_estimate(E, apply_channel(E, s), g, b).estimate * quantum_eta_estimate(E, s, g, b).estimate;
    EXPECT_LE(two, prod + 1e-3);
}

TEST(QuantumProfile, WithinEnvelope) {
    QuantumRateProfile p = quantum_rate_profile(depolarizing(2, 0.3), make_generator("pearson_chi2"), 3, small_budget());
    for (const auto& pt : p.points) EXPECT_TRUE(pt.within_envelope) << pt.n;
    EXPECT_NEAR(p.eta_chi2_estimate, 0.49, 1e-6);
}

TEST(QuantumMixing, DepolarizingClosedForm) {
    for (double lam : {0.3, 0.5}) {
        QuantumMixingTimes m = quantum_mixing_time_bounds(depolarizing(2, lam), 0.01, std::nullopt, small_budget());
        int expect = static_cast<int>(std::ceil(std::log(0.5 / 0.01) / std::log(1.0 / (1.0 - lam))));
        EXPECT_EQ(m.empirical_td, expect) << lam;
        EXPECT_LE(m.empirical_td, m.td_bound);
        EXPECT_TRUE(m.estimate_based);
    }
}

TEST(QuantumMixing, FourLevelDepolarizing) {
    QuantumMixingTimes m = quantum_mixing_time_bounds(depolarizing(4, 0.3), 0.01, make_generator("kl"), small_budget());
    EXPECT_LE(m.empirical_td, m.td_bound);
    ASSERT_TRUE(m.f_bound.has_value());
    EXPECT_LE(*m.empirical_f, *m.f_bound);
}

TEST(QuantumMixing, EmbeddedBscConsistentWithClassical) {
    QuantumMixingTimes q = quantum_mixing_time_bounds(classical_embedding(bsc(0.25)), 0.01, make_generator("kl"), small_budget());
    MixingTimes c = mixing_time_bounds(bsc(0.25), 0.01, make_generator("kl"));
    EXPECT_NEAR(q.eta_chi2_estimate, c.eta_chi2, 1e-6);
    EXPECT_EQ(q.empirical_td, c.empirical_tv);
    EXPECT_GE(q.td_bound, c.empirical_tv);
    EXPECT_EQ(*q.empirical_f, *c.empirical_f);
}

TEST(QuantumMixing, Preconditions) {
    EXPECT_THROW(quantum_mixing_time_bounds(identity_qchannel(2), 0.1), domain_error);
    EXPECT_THROW(quantum_mixing_time_bounds(amplitude_damping(0.5), 0.1), domain_error);
    QuantumMixingTimes m = quantum_mixing_time_bounds(depolarizing(2, 0.5), 2.0, std::nullopt, small_budget());
    EXPECT_EQ(m.td_bound, 0);
    QuantumMixingTimes r = quantum_mixing_time_bounds(depolarizing(2, 0.5), 0.1, make_generator("squared_hellinger"), small_budget());
    EXPECT_FALSE(r.f_bound.has_value());
}
