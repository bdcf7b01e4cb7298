#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include <gtest/gtest.h>

#include "proxyforge/errors.hpp"
#include "proxyforge/ela/design.hpp"
#include "proxyforge/ela/distribution.hpp"
#include "proxyforge/ela/features.hpp"
#include "proxyforge/ela/wasserstein.hpp"
#include "proxyforge/problems/registry.hpp"
#include "proxyforge/problems/synthetic.hpp"

using namespace proxyforge;
using namespace proxyforge::ela;

namespace {

double sorted_matching(std::vector<double> a, std::vector<double> b) {
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    double s = 0;
    for (std::size_t i = 0; i < a.size(); ++i) s += std::abs(a[i] - b[i]);
    return s / static_cast<double>(a.size());
}

// Integral of |F_a(x) - F_b(x)| over x, the CDF form of W1.
double cdf_form(std::vector<double> a, std::vector<double> b) {
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    std::vector<double> all = a;
    all.insert(all.end(), b.begin(), b.end());
    std::sort(all.begin(), all.end());
    double s = 0;
    for (std::size_t i = 0; i + 1 < all.size(); ++i) {
        double x = all[i];
        double fa = double(std::upper_bound(a.begin(), a.end(), x) - a.begin()) / a.size();
        double fb = double(std::upper_bound(b.begin(), b.end(), x) - b.begin()) / b.size();
        s += std::abs(fa - fb) * (all[i + 1] - all[i]);
    }
    return s;
}

DesignSample design_of(const std::string& name, std::size_t coef, std::uint64_t seed) {
    auto p = problems::make_problem(name, 1);
    auto rng = seeded_rng(seed, 0);
    return sample_design(p, coef, rng);
}

FeatureDistribution random_distribution(RandomStream& rng, std::size_t reps) {
    FeatureDistribution d;
    d.samples.assign(feature_names().size(), std::vector<double>(reps));
    for (auto& f : d.samples)
        for (auto& v : f) v = rng.normal(0, 1);
    return d;
}

}  // namespace

TEST(Wasserstein, ListedExamples) {
    std::vector<double> a{0.3, -1.0, 2.0};
    EXPECT_EQ(wasserstein_1d(a, a), 0.0);
    std::vector<double> z{0}, o{1};
    EXPECT_EQ(wasserstein_1d(z, o), 1.0);
    std::vector<double> p{0, 2}, q{1, 3};
    EXPECT_EQ(wasserstein_1d(p, q), 1.0);
}

TEST(Wasserstein, EqualSizesMatchSortedMatching) {
    auto rng = seeded_rng(100, 0);
    for (int t = 0; t < 1000; ++t) {
        std::size_t n = 1 + rng.index(50);
        std::vector<double> a(n), b(n);
        for (auto& v : a) v = rng.normal(0, 3);
        for (auto& v : b) v = rng.uniform(-4, 4);
        ASSERT_NEAR(wasserstein_1d(a, b), sorted_matching(a, b), 1e-12);
    }
}

TEST(Wasserstein, UnequalSizesMatchCdfForm) {
    auto rng = seeded_rng(101, 0);
    for (int t = 0; t < 500; ++t) {
        std::vector<double> a(1 + rng.index(30)), b(1 + rng.index(30));
        for (auto& v : a) v = rng.normal(0, 2);
        for (auto& v : b) v = rng.normal(1, 1);
        ASSERT_NEAR(wasserstein_1d(a, b), cdf_form(a, b), 1e-10);
    }
}

TEST(Wasserstein, MetricProperties) {
    auto rng = seeded_rng(102, 0);
    for (int t = 0; t < 300; ++t) {
        std::vector<double> a(1 + rng.index(20)), b(1 + rng.index(20)), c(1 + rng.index(20));
        for (auto* v : {&a, &b, &c})
            for (auto& x : *v) x = rng.normal(0, 1);
        double ab = wasserstein_1d(a, b), ba = wasserstein_1d(b, a);
        ASSERT_GE(ab, 0.0);
        ASSERT_NEAR(ab, ba, 1e-12);
        ASSERT_LE(ab, wasserstein_1d(a, c) + wasserstein_1d(c, b) + 1e-12);
        std::vector<double> shifted = a;
        for (auto& x : shifted) x += 2.5;
        ASSERT_NEAR(wasserstein_1d(a, shifted), 2.5, 1e-12);
    }
}

TEST(Design, SizeBoundsStrataAndDeterminism) {
    auto p = problems::make_problem("mini-bragg");
    auto r1 = seeded_rng(4, 0), r2 = seeded_rng(4, 0);
    BudgetLedger ledger;
    auto s1 = sample_design(p, 150, r1, &ledger);
    auto s2 = sample_design(p, 150, r2);
    EXPECT_EQ(s1.X.rows(), 1500);
    EXPECT_EQ(s1.y.size(), 1500u);
    EXPECT_EQ(s1.X, s2.X);
    EXPECT_EQ(ledger.characterization_evals(), 1500u);
    EXPECT_EQ(ledger.target_evals(), 0u);
    const auto n = static_cast<std::size_t>(s1.X.rows());
    for (Eigen::Index d = 0; d < s1.X.cols(); ++d) {
        std::vector<int> seen(n, 0);
        for (Eigen::Index i = 0; i < s1.X.rows(); ++i) {
            double v = s1.X(i, d);
            ASSERT_GE(v, p.lower_bounds[d]);
            ASSERT_LE(v, p.upper_bounds[d]);
            auto stratum = static_cast<std::size_t>((v - p.lower_bounds[d]) / (p.upper_bounds[d] - p.lower_bounds[d]) * n);
            seen[std::min(stratum, n - 1)]++;
        }
        for (int c : seen) ASSERT_EQ(c, 1);
    }
}

TEST(Design, SyntheticChargedAsGenerationProxy) {
    auto p = problems::make_problem("synthetic:sphere:3", 2);
    auto rng = seeded_rng(1, 0);
    BudgetLedger ledger;
    sample_design(p, 50, rng, &ledger);
    EXPECT_EQ(ledger.phase(Phase::generation).proxy, 150u);
    EXPECT_EQ(ledger.characterization_evals(), 0u);
}

TEST(Features, NamesCoverSevenSets) {
    const auto& names = feature_names();
    EXPECT_EQ(names.size(), 31u);
    for (const char* prefix : {"ydist.", "level.", "meta.", "disp.", "nbc.", "pca.", "ic."})
        EXPECT_TRUE(std::any_of(names.begin(), names.end(), [&](const auto& n) { return n.rfind(prefix, 0) == 0; }))
            << prefix;
}

TEST(Features, MirroredSampleHasZeroSkewness) {
    auto rng = seeded_rng(7, 0);
    DesignSample s;
    const int half = 100;
    s.X.resize(2 * half, 2);
    for (int i = 0; i < half; ++i) {
        double v = rng.normal(0, 1) * rng.uniform(0.1, 3);
        s.X.row(2 * i) << rng.uniform(-1, 1), rng.uniform(-1, 1);
        s.X.row(2 * i + 1) << rng.uniform(-1, 1), rng.uniform(-1, 1);
        s.y.push_back(5.0 + v);
        s.y.push_back(5.0 - v);
    }
    EXPECT_NEAR(compute_features(s).at("ydist.skewness"), 0.0, 1e-9);
}

TEST(Features, LinearFunctionHasUnitLinearR2) {
    auto rng = seeded_rng(8, 0);
    DesignSample s;
    s.X = latin_hypercube(300, {-5, -5, -5}, {5, 5, 5}, rng);
    for (Eigen::Index i = 0; i < s.X.rows(); ++i) s.y.push_back(2 * s.X(i, 0) - 3 * s.X(i, 1) + 0.5 * s.X(i, 2) + 7);
    EXPECT_NEAR(compute_features(s).at("meta.lin_adj_r2"), 1.0, 1e-6);
}

TEST(Features, SphereDispersionBelowOne) {
    auto s = design_of("synthetic:sphere:5", 150, 9);
    EXPECT_LT(compute_features(s).at("disp.ratio_05"), 1.0);
}

TEST(Features, ConstantSampleIsDegenerate) {
    auto s = design_of("synthetic:sphere:2", 50, 9);
    std::fill(s.y.begin(), s.y.end(), 3.0);
    EXPECT_THROW(compute_features(s), DegenerateSample);
}

TEST(Features, TranslationOfYLeavesGeometryFeatures) {
    auto s = design_of("synthetic:rastrigin:3", 100, 10);
    auto shifted = s;
    for (auto& v : shifted.y) v += 123.0;
    auto a = compute_features(s), b = compute_features(shifted);
    for (const auto& name : feature_names()) {
        bool invariant = name.rfind("disp.", 0) == 0 || name.rfind("nbc.", 0) == 0 || name == "pca.cov_x" ||
                         name == "pca.cor_x" || name.rfind("ic.", 0) == 0;
        if (!invariant) continue;
        double x = a.at(name), y = b.at(name);
        if (std::isnan(x)) {
            EXPECT_TRUE(std::isnan(y)) << name;
            continue;
        }
        EXPECT_NEAR(x, y, 1e-9 * std::max(1.0, std::abs(x))) << name;
    }
}

TEST(Distribution, SubsampleSizeAndRepetitions) {
    auto rng = seeded_rng(3, 0);
    auto plan = draw_subsample_plan(1500, 0.8, 5, rng);
    ASSERT_EQ(plan.subsets.size(), 5u);
    for (const auto& s : plan.subsets) {
        EXPECT_EQ(s.size(), 1200u);
        EXPECT_TRUE(std::is_sorted(s.begin(), s.end()));
        EXPECT_EQ(std::adjacent_find(s.begin(), s.end()), s.end());
    }
}

TEST(Distribution, DeterministicAndFinite) {
    auto s = design_of("synthetic:ackley:3", 60, 11);
    auto r1 = seeded_rng(12, 0), r2 = seeded_rng(12, 0);
    auto d1 = feature_distribution(s, 0.8, 5, r1);
    auto d2 = feature_distribution(s, 0.8, 5, r2);
    EXPECT_EQ(d1.samples, d2.samples);
    EXPECT_EQ(d1.repetitions(), 5u);
    for (const auto& f : d1.samples)
        for (double v : f) EXPECT_TRUE(std::isfinite(v));
}

TEST(Distribution, JsonRoundTrip) {
    auto s = design_of("synthetic:sphere:2", 60, 13);
    auto rng = seeded_rng(1, 0);
    auto d = feature_distribution(s, 0.8, 4, rng);
    d.retained = {"ydist.skewness", "disp.ratio_05"};
    auto back = FeatureDistribution::from_json(d.to_json());
    EXPECT_EQ(back.samples, d.samples);
    EXPECT_EQ(back.retained, d.retained);
    EXPECT_EQ(back.n_ela, d.n_ela);
}

TEST(Imputation, NonFiniteReplacedByWorstPooledValue) {
    auto rng = seeded_rng(14, 0);
    auto a = random_distribution(rng, 5), b = random_distribution(rng, 5);
    a.samples[0][2] = std::numeric_limits<double>::quiet_NaN();
    b.samples[3][0] = std::numeric_limits<double>::infinity();
    for (auto& v : a.samples[5]) v = std::numeric_limits<double>::quiet_NaN();
    for (auto& v : b.samples[5]) v = std::numeric_limits<double>::quiet_NaN();
    FeatureDistribution* pool[] = {&a, &b};
    impute_non_finite(pool);
    for (auto* d : pool)
        for (const auto& f : d->samples)
            for (double v : f) ASSERT_TRUE(std::isfinite(v));
    EXPECT_EQ(a.samples[5][0], kImputationSentinel);
    std::vector<double> col0 = a.samples[0];
    col0.insert(col0.end(), b.samples[0].begin(), b.samples[0].end());
    // The imputed value is one of the observed finite values.
    EXPECT_EQ(std::count(col0.begin(), col0.end(), a.samples[0][2]), 2);
}

TEST(Pruning, DuplicateColumnKeptOnce) {
    auto rng = seeded_rng(15, 0);
    auto a = random_distribution(rng, 5), b = random_distribution(rng, 5);
    a.samples[1] = a.samples[0];
    b.samples[1] = b.samples[0];
    const FeatureDistribution* dists[] = {&a, &b};
    std::vector<std::string> cand = {feature_names()[0], feature_names()[1]};
    auto kept = prune_correlated(dists, 0.9, cand);
    EXPECT_EQ(kept, std::vector<std::string>{feature_names()[0]});
}

TEST(Pruning, OrthogonalColumnsAllKept) {
    // Columns of a Hadamard-like +-1 design are exactly uncorrelated.
    FeatureDistribution a, b;
    const std::size_t nf = 7;
    a.samples.assign(feature_names().size(), std::vector<double>(4, 0.0));
    b.samples = a.samples;
    const int H[8][8] = {{1, 1, 1, 1, 1, 1, 1, 1},     {1, -1, 1, -1, 1, -1, 1, -1}, {1, 1, -1, -1, 1, 1, -1, -1},
                         {1, -1, -1, 1, 1, -1, -1, 1}, {1, 1, 1, 1, -1, -1, -1, -1}, {1, -1, 1, -1, -1, 1, -1, 1},
                         {1, 1, -1, -1, -1, -1, 1, 1}, {1, -1, -1, 1, -1, 1, 1, -1}};
    std::vector<std::string> cand;
    for (std::size_t f = 0; f < nf; ++f) {
        for (int r = 0; r < 4; ++r) {
            a.samples[f][r] = H[r][f + 1];
            b.samples[f][r] = H[r + 4][f + 1];
        }
        cand.push_back(feature_names()[f]);
    }
    const FeatureDistribution* dists[] = {&a, &b};
    EXPECT_EQ(prune_correlated(dists, 0.9, cand), cand);
}

TEST(Pruning, IdempotentAndDefaultThreshold) {
    auto s1 = design_of("synthetic:sphere:3", 60, 16), s2 = design_of("synthetic:rastrigin:3", 60, 16);
    auto r1 = seeded_rng(1, 0), r2 = seeded_rng(2, 0);
    auto a = feature_distribution(s1, 0.8, 5, r1), b = feature_distribution(s2, 0.8, 5, r2);
    FeatureDistribution* pool[] = {&a, &b};
    impute_non_finite(pool);
    const FeatureDistribution* dists[] = {&a, &b};
    EXPECT_EQ(kDefaultThresholdCorr, 0.9);
    auto kept = prune_correlated(dists);
    EXPECT_FALSE(kept.empty());
    EXPECT_EQ(prune_correlated(dists, 0.9, kept), kept);
}

TEST(Pruning, EmptyCandidateListThrows) {
    auto rng = seeded_rng(17, 0);
    auto a = random_distribution(rng, 3), b = random_distribution(rng, 3);
    const FeatureDistribution* dists[] = {&a, &b};
    EXPECT_THROW(prune_correlated(dists, 0.9, {}), EmptyRetention);
}

TEST(LandscapeDistance, PseudometricAndMismatch) {
    auto rng = seeded_rng(18, 0);
    auto a = random_distribution(rng, 5), b = random_distribution(rng, 5);
    std::vector<std::string> ret = {feature_names()[0], feature_names()[4], feature_names()[9]};
    apply_retained(a, ret);
    apply_retained(b, ret);
    EXPECT_EQ(landscape_distance(a, a), 0.0);
    EXPECT_GT(landscape_distance(a, b), 0.0);
    EXPECT_DOUBLE_EQ(landscape_distance(a, b), landscape_distance(b, a));
    auto c = b;
    apply_retained(c, {feature_names()[0]});
    EXPECT_THROW(landscape_distance(a, c), FeatureMismatch);
    EXPECT_THROW(apply_retained(c, {"no.such.feature"}), std::exception);
}

TEST(LandscapeDistance, SphereSamplesCloserThanRastrigin) {
    const std::size_t dim = 5;
    auto design_rng = seeded_rng(19, 0);
    auto X = latin_hypercube(150 * dim, std::vector<double>(dim, -5), std::vector<double>(dim, 5), design_rng);
    auto plan_rng = seeded_rng(19, 1);
    LandscapeContext ctx(X, draw_subsample_plan(X.rows(), 0.8, 5, plan_rng));
    auto sa = problems::synthetic("sphere", dim, 1), sb = problems::synthetic("sphere", dim, 2);
    auto ra = problems::synthetic("rastrigin", dim, 1), rb = problems::synthetic("rastrigin", dim, 2);
    auto da = feature_distribution(ctx, evaluate_on_design(sa, X)), db = feature_distribution(ctx, evaluate_on_design(sb, X));
    auto dr = feature_distribution(ctx, evaluate_on_design(ra, X)), dr2 = feature_distribution(ctx, evaluate_on_design(rb, X));
    FeatureDistribution* pool[] = {&da, &db, &dr, &dr2};
    impute_non_finite(pool);
    const FeatureDistribution* dists[] = {&da, &db, &dr, &dr2};
    auto kept = prune_correlated(dists);
    for (auto* d : pool) apply_retained(*d, kept);
    EXPECT_LT(landscape_distance(da, db), landscape_distance(da, dr));
    EXPECT_LT(landscape_distance(dr, dr2), landscape_distance(dr, da));
}
