#include <algorithm>
#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "proxyforge/algo/config.hpp"
#include "proxyforge/algo/run.hpp"
#include "proxyforge/designer/validation.hpp"
#include "proxyforge/errors.hpp"
#include "proxyforge/problems/registry.hpp"
#include "proxyforge/problems/synthetic.hpp"

using namespace proxyforge;
using namespace proxyforge::algo;

namespace {

ProblemSpec origin_sphere(std::size_t dim) {
    ProblemSpec p;
    p.name = "sphere";
    p.dim = dim;
    p.lower_bounds.assign(dim, -5);
    p.upper_bounds.assign(dim, 5);
    p.known_optimum = 0.0;
    p.objective = [](std::span<const double> x, RandomStream&) {
        double s = 0;
        for (double v : x) s += v * v;
        return s;
    };
    return p;
}

AlgorithmConfig random_valid_config(RandomStream& rng) {
    auto c = default_config();
    for (int i = 0; i < 5; ++i) c = mutate_config(c, rng, Step::large);
    return c;
}

}  // namespace

TEST(Config, DefaultsAndBaselines) {
    auto c = default_config();
    EXPECT_EQ(c.family, Family::DE);
    EXPECT_EQ(c.mutation, Mutation::rand1);
    EXPECT_EQ(c.F, 0.5);
    EXPECT_EQ(c.CR, 0.9);
    EXPECT_FALSE(c.population_size.has_value());
    EXPECT_EQ(auto_population(1), 5u);
    EXPECT_EQ(auto_population(10), 4u + static_cast<std::size_t>(std::floor(3 * std::log(10.0))));

    auto de = de_baseline(5, 250);
    EXPECT_EQ(de.population_size, 50u);
    EXPECT_EQ(de_baseline(10, 500).population_size, 100u);
    auto ls = lshade_baseline(5, 250);
    EXPECT_EQ(ls.family, Family::LSHADE);
    EXPECT_EQ(ls.population_size, 50u);  // 18*5 capped at 250/5
    EXPECT_NO_THROW(ls.validate());
}

TEST(Config, InvariantsRejected) {
    auto c = default_config();
    c.population_size = 3;
    EXPECT_THROW(c.validate(), InvalidConfig);
    c = default_config();
    c.F = 2.5;
    EXPECT_THROW(c.validate(), InvalidConfig);
    c = default_config();
    c.CR = -0.1;
    EXPECT_THROW(c.validate(), InvalidConfig);
    c = lshade_baseline(5, 250);
    c.archive = false;
    EXPECT_THROW(c.validate(), InvalidConfig);
    EXPECT_NO_THROW(c.normalized().validate());
    auto rs = random_search_config();
    rs.F = 100.0;  // ignored for RS
    EXPECT_NO_THROW(rs.validate());
}

TEST(Config, JsonRoundTripIsExact) {
    auto rng = seeded_rng(80, 0);
    for (int i = 0; i < 500; ++i) {
        auto c = random_valid_config(rng);
        auto j = c.to_json();
        EXPECT_EQ(AlgorithmConfig::from_json(j), c) << j.dump();
        EXPECT_EQ(AlgorithmConfig::from_json(nlohmann::json::parse(c.key())), c);
    }
}

TEST(Config, JsonIsStrict) {
    auto j = default_config().to_json();
    auto missing = j;
    missing.erase("CR");
    EXPECT_THROW(AlgorithmConfig::from_json(missing), InvalidConfig);
    auto unknown = j;
    unknown["family"] = "CMAES";
    EXPECT_THROW(AlgorithmConfig::from_json(unknown), InvalidConfig);
    auto extra = j;
    extra["sigma"] = 0.3;
    EXPECT_THROW(AlgorithmConfig::from_json(extra), InvalidConfig);
    auto wrong_type = j;
    wrong_type["F"] = "half";
    EXPECT_THROW(AlgorithmConfig::from_json(wrong_type), InvalidConfig);
    auto ls = lshade_baseline(5, 250).to_json();
    ls["archive"] = false;
    EXPECT_THROW(AlgorithmConfig::from_json(ls), InvalidConfig);
    EXPECT_TRUE(AlgorithmConfig::from_json(ls, true).archive);
    EXPECT_THROW(AlgorithmConfig::from_json(nlohmann::json::array()), InvalidConfig);
}

TEST(Config, SchemaListsEveryField) {
    const auto& schema = algorithm_config_schema();
    auto j = default_config().to_json();
    for (const auto& [key, value] : j.items()) EXPECT_TRUE(schema["properties"].contains(key)) << key;
}

TEST(Mutate, SmallStepScalesFWithinTwentyPercent) {
    auto rng = seeded_rng(81, 0);
    for (int i = 0; i < 2000; ++i) {
        auto c = default_config();
        auto m = mutate_config(c, rng, Step::small);
        EXPECT_NO_THROW(m.validate());
        if (m.F && m.family == Family::DE) {
            EXPECT_GE(*m.F, 0.4 - 1e-12);
            EXPECT_LE(*m.F, 0.6 + 1e-12);
        }
    }
}

TEST(Mutate, ThousandRandomWalksStayValid) {
    auto rng = seeded_rng(82, 0);
    for (int walk = 0; walk < 1000; ++walk) {
        auto c = default_config();
        for (int s = 0; s < 20; ++s) {
            c = mutate_config(c, rng, rng.bernoulli(0.3) ? Step::large : Step::small);
            ASSERT_NO_THROW(c.validate()) << c.key();
            ASSERT_NO_THROW(AlgorithmConfig::from_json(c.to_json()));
        }
    }
}

TEST(Run, RandomSearchContract) {
    BudgetedEvaluator ev(origin_sphere(2), 100);
    auto rec = run(random_search_config(), ev, 5);
    ASSERT_EQ(rec.trace.size(), 100u);
    for (std::size_t i = 1; i < rec.trace.size(); ++i) ASSERT_LE(rec.trace[i].best, rec.trace[i - 1].best);
    EXPECT_EQ(ev.used(), 100u);
    EXPECT_GE(rec.aocc, 0.0);
    EXPECT_LE(rec.aocc, 1.0);
}

TEST(Run, DeAtOptimumStaysThere) {
    auto p = origin_sphere(3);
    RunOptions opts;
    opts.initial_population.assign(8, std::vector<double>(3, 0.0));
    std::vector<double> gen_best;
    opts.on_generation = [&](double b) { gen_best.push_back(b); };
    auto c = default_config();
    c.population_size = 8;
    BudgetedEvaluator ev(p, 200);
    auto rec = run(c, ev, 1, opts);
    EXPECT_EQ(rec.best, 0.0);
    ASSERT_FALSE(gen_best.empty());
    for (double b : gen_best) EXPECT_EQ(b, 0.0);
}

TEST(Run, EveryConfigUsesExactBudgetAndIsReproducible) {
    auto rng = seeded_rng(83, 0);
    for (int i = 0; i < 150; ++i) {
        auto c = random_valid_config(rng);
        std::size_t budget = 10 + rng.index(300);
        auto p = problems::synthetic("rastrigin", 1 + rng.index(6), i);
        BudgetedEvaluator e1(p, budget), e2(p, budget);
        auto r1 = run(c, e1, i);
        auto r2 = run(c, e2, i);
        ASSERT_EQ(e1.used(), budget) << c.key();
        ASSERT_EQ(r1.trace, r2.trace) << c.key();
        ASSERT_EQ(r1.aocc, r2.aocc);
        for (const auto& e : r1.trace) ASSERT_TRUE(std::isfinite(e.best));
    }
}

TEST(Run, DeGenerationBestNonIncreasing) {
    auto rng = seeded_rng(84, 0);
    for (int i = 0; i < 100; ++i) {
        auto c = random_valid_config(rng);
        if (c.family == Family::RS) continue;
        std::vector<double> gen_best;
        RunOptions opts;
        opts.on_generation = [&](double b) { gen_best.push_back(b); };
        auto p = problems::synthetic("ackley", 4, i);
        BudgetedEvaluator ev(p, 400);
        run(c, ev, i, opts);
        for (std::size_t g = 1; g < gen_best.size(); ++g) ASSERT_LE(gen_best[g], gen_best[g - 1]) << c.key();
    }
}

TEST(Run, RecordCarriesLedgerAndLabel) {
    auto p = problems::make_problem("mini-bragg");
    BudgetedEvaluator ev(p, 50);
    RunOptions opts;
    opts.phase = Phase::validation;
    opts.label = "champion-0";
    auto rec = run(default_config(), ev, 3, opts);
    EXPECT_EQ(rec.ledger.target_evals(), 50u);
    EXPECT_EQ(rec.algorithm, "champion-0");
    EXPECT_EQ(rec.budget, 50u);
    EXPECT_EQ(rec.best_x.size(), 10u);
}

TEST(Run, UsedEvaluatorRejected) {
    BudgetedEvaluator ev(origin_sphere(2), 10);
    std::vector<double> x{1, 1};
    ev.evaluate(x);
    EXPECT_THROW(run(default_config(), ev, 1), std::invalid_argument);
}

TEST(Run, LshadeBeatsRandomSearchOnSphere) {
    auto p = problems::synthetic("sphere", 5, 1);
    const std::size_t budget = 250;
    std::vector<double> ls, rs;
    for (std::uint64_t s = 0; s < 10; ++s) {
        BudgetedEvaluator a(p, budget), b(p, budget);
        ls.push_back(run(lshade_baseline(5, budget), a, s).best);
        rs.push_back(run(random_search_config(), b, s).best);
    }
    EXPECT_LT(designer::median(ls), designer::median(rs));
}
