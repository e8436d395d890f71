#include "divlab/contraction.hpp"

#include <gtest/gtest.h>

using namespace divlab;

namespace {

SamplerBudget small_budget(std::uint64_t seed = 0) {
    SamplerBudget b;
    b.samples = 300;
    b.seed = seed;
    b.refine_top = 4;
    b.hill_climb_iters = 100;
    return b;
}

}  // namespace

TEST(EtaChi2, BscClosedForm) {
    for (double p : {0.05, 0.1, 0.25, 0.3, 0.45})
        EXPECT_NEAR(eta_chi2(bsc(p), ProbVec::uniform(2)).value, (1 - 2 * p) * (1 - 2 * p), 1e-12) << p;
}

TEST(EtaChi2, TrivialChannels) {
    ProbVec q{0.2, 0.3, 0.5};
    EXPECT_NEAR(eta_chi2(constant_channel(3, 1), q).value, 0.0, 1e-12);
    EXPECT_NEAR(eta_chi2(identity_channel(3), q).value, 1.0, 1e-12);
    EtaChi2Result d = eta_chi2(bsc(0.2), ProbVec{1.0, 0.0});
    EXPECT_TRUE(d.degenerate);
    EXPECT_EQ(d.value, 0.0);
}

TEST(EtaChi2, AtMostOneAndBelowOneForScrambling) {
    std::mt19937_64 rng(41);
    for (int k = 0; k < 50; ++k) {
        Channel W = random_channel(4, 4, rng);
        ProbVec q = sample_dirichlet(4, rng);
        double e = eta_chi2(W, q).value;
        EXPECT_LE(e, 1.0);
        EXPECT_GE(e, 0.0);
        if (structure(W).scrambling) EXPECT_LT(e, 1.0);
    }
}

TEST(EtaF, TrivialChannels) {
    Generator kl = make_generator("kl");
    ProbVec q{0.2, 0.3, 0.5};
    EXPECT_NEAR(eta_f_estimate(identity_channel(3), q, kl, small_budget()).estimate, 1.0, 1e-12);
    EXPECT_NEAR(eta_f_estimate(constant_channel(3, 0), q, kl, small_budget()).estimate, 0.0, 1e-12);
    EXPECT_THROW(eta_f_estimate(bsc(0.1), ProbVec::uniform(2), kl, SamplerBudget{50}), domain_error);
}

TEST(EtaF, PearsonMatchesExactOnBinary) {
    EtaEstimate e = eta_f_estimate(bsc(0.3), ProbVec::uniform(2), make_generator("pearson_chi2"));
    EXPECT_NEAR(e.estimate, 0.16, 1e-6);
    ASSERT_TRUE(e.witness.has_value());
}

TEST(EtaF, PearsonNearExactOnTernary) {
    std::mt19937_64 rng(42);
    Channel W = random_channel(3, 3, rng);
    ProbVec q{0.3, 0.3, 0.4};
    double exact = eta_chi2(W, q).value;
    double est = eta_f_estimate(W, q, make_generator("pearson_chi2"), small_budget()).estimate;
    EXPECT_LE(est, exact + 1e-9);
    EXPECT_GE(est, exact - 1e-3);
}

TEST(EtaF, AtLeastEtaChi2OnBinary) {
    std::mt19937_64 rng(43);
    for (const auto& e : table_entries(false)) {
        Generator g = parse_generator(e);
        if (!(g.f2(1.0) > 0.0)) continue;
        Channel W = random_channel(2, 2, rng);
        ProbVec q = ProbVec::normalized(sample_dirichlet(2, rng).vec() + Vec::Constant(2, 0.05));
        EXPECT_GE(eta_f_estimate(W, q, g).estimate, eta_chi2(W, q).value - 1e-6) << e;
    }
}

TEST(EtaF, DeterministicAcrossWorkers) {
    std::mt19937_64 rng(44);
    Channel W = random_channel(3, 3, rng);
    ProbVec q{0.2, 0.5, 0.3};
    Generator g = make_generator("squared_hellinger");
    SamplerBudget a = small_budget(9), b = small_budget(9);
    b.workers = 4;
    EtaEstimate x = eta_f_estimate(W, q, g, a), y = eta_f_estimate(W, q, g, b);
    EXPECT_EQ(x.estimate, y.estimate);
    EXPECT_EQ(x.witness->vec(), y.witness->vec());
}

TEST(EtaF, Submultiplicative) {
    std::mt19937_64 rng(45);
    Generator g = make_generator("kl");
    for (int k = 0; k < 5; ++k) {
        Channel W = random_channel(2, 2, rng);
        ProbVec q = ProbVec::normalized(sample_dirichlet(2, rng).vec() + Vec::Constant(2, 0.05));
        double two = eta_f_estimate(W.power(2), q, g).estimate;
        double prod = eta_f_estimate(W, W.apply(q), g).estimate * eta_f_estimate(W, q, g).estimate;
        EXPECT_LE(two, prod + 1e-3);
    }
}

TEST(UpperBounds, BoundTheEstimate) {
    std::mt19937_64 rng(46);
    for (const char* name : {"kl", "pearson_chi2", "squared_hellinger", "jensen_shannon", "triangular"}) {
        Generator g = make_generator(name);
        for (int k = 0; k < 3; ++k) {
            Channel W = random_channel(2, 2, rng);
            ProbVec q = ProbVec::normalized(sample_dirichlet(2, rng).vec() + Vec::Constant(2, 0.05));
            ContractionReport r = contraction_report(W, q, g);
            if (r.upper.nonlinear.value && !is_inf(*r.upper.nonlinear.value))
                EXPECT_LE(r.eta_f_estimate, *r.upper.nonlinear.value + 1e-9) << name;
            if (r.upper.linear.value) EXPECT_LE(r.eta_f_estimate, *r.upper.linear.value + 1e-9) << name;
        }
    }
}

TEST(UpperBounds, PearsonNonlinearAboveExact) {
    std::mt19937_64 rng(47);
    for (int k = 0; k < 5; ++k) {
        Channel W = random_channel(3, 3, rng);
        ProbVec q = ProbVec::normalized(sample_dirichlet(3, rng).vec() + Vec::Constant(3, 0.05));
        EtaUpperBounds b = eta_f_upper_bounds(W, q, make_generator("pearson_chi2"), small_budget());
        ASSERT_TRUE(b.nonlinear.value.has_value());
        EXPECT_GE(*b.nonlinear.value, eta_chi2(W, q).value - 1e-12);
    }
}

TEST(UpperBounds, ConstantChannelGivesZero) {
    EtaUpperBounds b = eta_f_upper_bounds(constant_channel(2, 0), ProbVec::uniform(2), make_generator("kl"));
    ASSERT_TRUE(b.nonlinear.value && b.linear.value);
    EXPECT_EQ(*b.nonlinear.value, 0.0);
    EXPECT_EQ(*b.linear.value, 0.0);
}

TEST(UpperBounds, HellingerLinearClosedForm) {
    // f'(1) + f(0) = 1 and L = 4 alpha give 2 eta_chi2 / alpha
    for (double a : {1.25, 1.5, 1.75})
        for (double p : {0.1, 0.3}) {
            EtaUpperBounds b = eta_f_upper_bounds(bsc(p), ProbVec::uniform(2), make_generator("hellinger", {{"alpha", a}}));
            ASSERT_TRUE(b.linear.value.has_value());
            EXPECT_NEAR(*b.linear.value, 2.0 / a * (1 - 2 * p) * (1 - 2 * p), 1e-12);
        }
}

TEST(UpperBounds, Preconditions) {
    EtaUpperBounds b = eta_f_upper_bounds(bsc(0.2), ProbVec{0.5, 0.5}, make_generator("reverse_kl"));
    EXPECT_FALSE(b.linear.value.has_value());
    EXPECT_FALSE(b.linear.note.empty());
    EtaUpperBounds c = eta_f_upper_bounds(bsc(0.2), ProbVec{0.5, 0.5}, make_generator("chi_alpha"));
    EXPECT_FALSE(c.nonlinear.value.has_value());
    EtaUpperBounds d = eta_f_upper_bounds(Channel(Mat::Identity(3, 3)), ProbVec{0.5, 0.5, 0.0}, make_generator("jensen_shannon"));
    EXPECT_FALSE(d.nonlinear.value.has_value());
}

TEST(RateProfile, BscKlApproachesEtaChi2) {
    RateProfile p = contraction_rate_profile(bsc(0.3), make_generator("kl"), 10);
    EXPECT_EQ(p.condition, "irreducible-aperiodic");
    for (const auto& pt : p.points) {
        EXPECT_GE(pt.rate, 0.16 - 1e-6);
        EXPECT_TRUE(pt.within_envelope);
    }
    EXPECT_NEAR(p.points.back().rate, 0.16, 1e-3);
}

TEST(RateProfile, ReversiblePearsonIsFlat) {
    Mat W(3, 3);
    W << 0.5, 0.25, 0.0, 0.5, 0.5, 0.5, 0.0, 0.25, 0.5;
    Channel C(W);
    RateProfile p = contraction_rate_profile(C, make_generator("pearson_chi2"), 4, small_budget());
    for (const auto& pt : p.points) EXPECT_NEAR(pt.rate, p.eta_chi2, 2e-3) << pt.n;
}

TEST(RateProfile, ConstantChannelIsZero) {
    RateProfile p = contraction_rate_profile(constant_channel(2, 0), make_generator("pearson_chi2"), 3, small_budget());
    for (const auto& pt : p.points) EXPECT_EQ(pt.rate, 0.0);
}

TEST(RateProfile, StructuralPreconditions) {
    EXPECT_THROW(contraction_rate_profile(identity_channel(2), make_generator("kl"), 3), domain_error);
    EXPECT_THROW(contraction_rate_profile(uniform_off_diagonal(2), make_generator("kl"), 3), domain_error);
    EXPECT_THROW(contraction_rate_profile(bsc(0.3), make_generator("kl"), 1), domain_error);
}

TEST(Convergence, BscExample) {
    ConvergenceBound c = convergence_bound(bsc(0.3), ProbVec::uniform(2), ProbVec{1.0, 0.0}, 5);
    EXPECT_NEAR(c.tv_actual, 0.00512, 1e-15);
    EXPECT_TRUE(c.holds);
    ASSERT_TRUE(c.bound_full_support.has_value());
    EXPECT_LE(c.tv_actual, c.bound_general + 1e-15);
}

TEST(Convergence, AtStationarity) {
    ConvergenceBound c = convergence_bound(bsc(0.3), ProbVec::uniform(2), ProbVec::uniform(2), 3);
    EXPECT_EQ(c.tv_actual, 0.0);
    EXPECT_EQ(c.bound_general, 0.0);
    EXPECT_TRUE(c.holds);
}

TEST(Convergence, VacuousOutsideSupport) {
    Mat W(2, 2);
    W << 1.0, 0.5, 0.0, 0.5;
    ConvergenceBound c = convergence_bound(Channel(W), ProbVec{1.0, 0.0}, ProbVec{0.0, 1.0}, 2);
    EXPECT_TRUE(c.vacuous);
    EXPECT_TRUE(is_inf(c.bound_general));
    EXPECT_FALSE(c.bound_full_support.has_value());
    EXPECT_THROW(convergence_bound(bsc(0.3), ProbVec{0.9, 0.1}, ProbVec::uniform(2), 1), domain_error);
}

TEST(Mixing, BscQuarter) {
    MixingTimes m = mixing_time_bounds(bsc(0.25), 0.01, make_generator("kl"));
    EXPECT_EQ(m.tv_bound, 7);
    EXPECT_EQ(m.empirical_tv, 6);
    ASSERT_TRUE(m.f_bound && m.empirical_f);
    EXPECT_LE(*m.empirical_f, *m.f_bound);
    EXPECT_TRUE(m.holds);
}

TEST(Mixing, LargeDeltaGivesZero) {
    MixingTimes m = mixing_time_bounds(bsc(0.25), 1.5);
    EXPECT_EQ(m.tv_bound, 0);
    EXPECT_EQ(m.empirical_tv, 0);
}

TEST(Mixing, Preconditions) {
    EXPECT_THROW(mixing_time_bounds(identity_channel(2), 0.1), domain_error);
    EXPECT_THROW(mixing_time_bounds(uniform_off_diagonal(2), 0.1), domain_error);
    EXPECT_THROW(mixing_time_bounds(constant_channel(2, 0), 0.1), domain_error);
    MixingTimes m = mixing_time_bounds(bsc(0.25), 0.01, make_generator("reverse_kl"));
    EXPECT_FALSE(m.f_bound.has_value());
    EXPECT_FALSE(m.f_note.empty());
}
