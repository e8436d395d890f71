#include "divlab/chi2bounds.hpp"

#include <gtest/gtest.h>

using namespace divlab;

TEST(Kappa, PearsonIsConstantTwo) {
    KappaPair k = kappa_bounds(make_generator("pearson_chi2"), ProbVec{0.2, 0.8}, ProbVec{0.6, 0.4});
    EXPECT_DOUBLE_EQ(k.kappa_up, 2.0);
    EXPECT_DOUBLE_EQ(k.kappa_down, 2.0);
}

TEST(Kappa, KlEndpoints) {
    // f'' = 1/t, ratios 0.5 and 1.5 -> kappa_up = 2, kappa_down = 2/3
    KappaPair k = kappa_bounds(make_generator("kl"), ProbVec{0.25, 0.75}, ProbVec{0.5, 0.5});
    EXPECT_NEAR(k.kappa_up, 2.0, 1e-15);
    EXPECT_NEAR(k.kappa_down, 2.0 / 3.0, 1e-15);
    EXPECT_EQ(k.up_index, 0);
}

TEST(Kappa, DenseGridAgreesWithEndpointsForMonotone) {
    Generator g = make_generator("hellinger", {{"alpha", 0.5}});
    ProbVec p{0.1, 0.3, 0.6}, q{0.3, 0.3, 0.4};
    KappaPair a = kappa_bounds(g, p, q, 1025, KappaMethod::endpoints);
    KappaPair b = kappa_bounds(g, p, q, 1025, KappaMethod::dense_grid);
    EXPECT_NEAR(a.kappa_up, b.kappa_up, 1e-12);
    EXPECT_NEAR(a.kappa_down, b.kappa_down, 1e-12);
}

TEST(Kappa, InfiniteWithoutAbsoluteContinuity) {
    KappaPair k = kappa_bounds(make_generator("pearson_chi2"), ProbVec{0.5, 0.5}, ProbVec{1.0, 0.0});
    EXPECT_TRUE(is_inf(k.kappa_up));
    EXPECT_FALSE(k.finite);
    EXPECT_FALSE(k.absolutely_continuous);
}

TEST(Kappa, ZeroRatioUsesLimit) {
    KappaPair k = kappa_bounds(make_generator("kl"), ProbVec{1.0, 0.0}, ProbVec{0.5, 0.5});
    EXPECT_TRUE(is_inf(k.kappa_up));
    KappaPair t = kappa_bounds(make_generator("triangular"), ProbVec{1.0, 0.0}, ProbVec{0.5, 0.5});
    EXPECT_DOUBLE_EQ(t.kappa_up, 8.0);
}

TEST(Sandwich, HoldsOnRandomPairs) {
    std::mt19937_64 rng(21);
    for (const auto& e : table_entries()) {
        Generator g = parse_generator(e);
        for (int k = 0; k < 40; ++k) {
            ProbVec p = sample_dirichlet(4, rng), q = sample_dirichlet(4, rng);
            SandwichResult s = chi2_sandwich(g, p, q);
            EXPECT_TRUE(s.holds) << e << " " << s.lower << " " << s.value << " " << s.upper;
        }
    }
}

TEST(Sandwich, PearsonCollapses) {
    ProbVec p{0.3, 0.7}, q{0.5, 0.5};
    SandwichResult s = chi2_sandwich(make_generator("pearson_chi2"), p, q);
    EXPECT_NEAR(s.lower, s.value, 1e-15);
    EXPECT_NEAR(s.upper, s.value, 1e-15);
}

TEST(Sandwich, VacuousOutsideSupport) {
    SandwichResult s = chi2_sandwich(make_generator("reverse_kl"), ProbVec{0.5, 0.5}, ProbVec{1.0, 0.0});
    EXPECT_TRUE(s.vacuous);
    EXPECT_TRUE(s.holds);
}

TEST(Sandwich, RequiresEqualSums) {
    EXPECT_THROW(chi2_sandwich(make_generator("kl"), WeightVec{0.5, 0.7}, WeightVec{0.5, 0.5}), domain_error);
    EXPECT_NO_THROW(chi2_sandwich(make_generator("renyi_gain"), WeightVec{0.5, 0.7}, WeightVec{0.5, 0.5}));
}

TEST(ReversePinsker, HoldsOnRandomPairs) {
    std::mt19937_64 rng(22);
    for (const auto& e : table_entries()) {
        Generator g = parse_generator(e);
        for (int k = 0; k < 40; ++k) {
            ProbVec p = sample_dirichlet(3, rng), q = sample_dirichlet(3, rng);
            EXPECT_TRUE(reverse_pinsker(g, p, q).holds) << e;
        }
    }
    EXPECT_THROW(reverse_pinsker(make_generator("kl"), ProbVec{0.5, 0.5}, ProbVec{1.0, 0.0}), domain_error);
}

TEST(ReversePinsker, Chi2AndKlBits) {
    std::mt19937_64 rng(23);
    for (int k = 0; k < 200; ++k) {
        ProbVec p = sample_dirichlet(3, rng), q = sample_dirichlet(3, rng);
        EXPECT_TRUE(chi2_reverse_pinsker(p, q).holds);
        EXPECT_TRUE(kl_reverse_pinsker_bits(p, q).holds);
        EXPECT_TRUE(chi2_tv_upper(p, q).holds);
    }
}

TEST(ReversePinsker, KlBitsNearReference) {
    // binary uniform q, p close to q: the tightest regime of the bound
    for (double e : {1e-4, 1e-3, 1e-2, 0.1}) {
        BoundValue b = kl_reverse_pinsker_bits(ProbVec{0.5 + e, 0.5 - e}, ProbVec{0.5, 0.5});
        EXPECT_TRUE(b.holds) << e << " " << b.value << " " << b.bound;
    }
    EXPECT_THROW(kl_reverse_pinsker_bits(ProbVec{1.0, 0.0}, ProbVec{0.5, 0.5}), domain_error);
}

TEST(LowerByChi2, HoldsAndApplicability) {
    std::mt19937_64 rng(24);
    for (const auto& e : table_entries()) {
        Generator g = parse_generator(e);
        for (int k = 0; k < 40; ++k) {
            ProbVec p = sample_dirichlet(3, rng), q = sample_dirichlet(3, rng);
            EXPECT_TRUE(f_lower_by_chi2(g, p, q).holds) << e;
        }
    }
    LowerByChi2 r = f_lower_by_chi2(make_generator("kl"), ProbVec{0.5, 0.5}, ProbVec{1.0, 0.0});
    EXPECT_FALSE(r.applicable);
    EXPECT_THROW(f_lower_by_chi2(make_generator("chi_alpha"), ProbVec{0.5, 0.5}, ProbVec{0.4, 0.6}), domain_error);
}

TEST(Chi2TvUpper, ProbabilityFormOnlyForDistributions) {
    Chi2TvUpper a = chi2_tv_upper(ProbVec{0.6, 0.4}, ProbVec{0.5, 0.5});
    ASSERT_TRUE(a.prob_bound.has_value());
    EXPECT_NEAR(*a.prob_bound, 0.04, 1e-15);
    Chi2TvUpper b = chi2_tv_upper(WeightVec{1.2, 0.8}, WeightVec{1.0, 1.0});
    EXPECT_FALSE(b.prob_bound.has_value());
    EXPECT_TRUE(b.holds);
}
