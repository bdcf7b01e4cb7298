#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <vector>

#include <gtest/gtest.h>

#include "proxyforge/algo/config.hpp"
#include "proxyforge/designer/pipeline.hpp"
#include "proxyforge/designer/proposer.hpp"
#include "proxyforge/designer/session.hpp"
#include "proxyforge/designer/validation.hpp"
#include "proxyforge/errors.hpp"
#include "proxyforge/problems/registry.hpp"
#include "proxyforge/problems/synthetic.hpp"
#include "proxyforge/stub/stub_server.hpp"

using namespace proxyforge;
using namespace proxyforge::designer;

namespace {

ela::FeatureDistribution sample_distribution(const std::string& problem, std::uint64_t seed,
                                             const ela::LandscapeContext& ctx) {
    auto p = problems::make_problem(problem, seed);
    return ela::feature_distribution(ctx, ela::evaluate_on_design(p, ctx.X()));
}

ela::LandscapeContext context_5d(std::uint64_t seed) {
    auto r = seeded_rng(seed, 0);
    auto X = ela::latin_hypercube(500, std::vector<double>(5, -5), std::vector<double>(5, 5), r);
    auto rp = seeded_rng(seed, 1);
    return ela::LandscapeContext(X, ela::draw_subsample_plan(X.rows(), 0.8, 5, rp));
}

ProblemSpec solved_problem() {
    ProblemSpec p;
    p.name = "solved";
    p.dim = 2;
    p.lower_bounds = {-1, -1};
    p.upper_bounds = {1, 1};
    p.known_optimum = 0.0;
    p.objective = [](std::span<const double>, RandomStream&) { return 0.0; };
    return p;
}

ProposerRequest sample_request() {
    ProposerRequest r;
    r.task_description = task_description(10, 500);
    r.incumbent_config = algo::default_config();
    r.incumbent_score = 0.4;
    r.schema = algo::algorithm_config_schema();
    return r;
}

LlmSettings stub_settings(const stub::StubServer& s) {
    LlmSettings l;
    l.endpoint = s.endpoint();
    l.timeout = std::chrono::milliseconds(5000);
    return l;
}

}  // namespace

TEST(SelectProxies, TargetRanksFirstAndSphereBeatsRastrigin) {
    auto ctx = context_5d(90);
    auto target = sample_distribution("synthetic:sphere:5", 1, ctx);
    auto sphere_a = sample_distribution("synthetic:sphere:5", 2, ctx);
    auto rastrigin = sample_distribution("synthetic:rastrigin:5", 2, ctx);
    std::vector<std::pair<std::string, ela::FeatureDistribution>> pool = {
        {"rastrigin", rastrigin}, {"sphere-a", sphere_a}, {"self", target}};
    std::vector<ela::FeatureDistribution*> all = {&target};
    for (auto& [n, d] : pool) all.push_back(&d);
    ela::impute_non_finite(all);
    std::vector<const ela::FeatureDistribution*> call(all.begin(), all.end());
    auto kept = ela::prune_correlated(call);
    for (auto* d : all) ela::apply_retained(*d, kept);

    auto top = select_proxies(target, pool, 3);
    ASSERT_EQ(top.size(), 3u);
    EXPECT_EQ(top[0], "self");
    EXPECT_EQ(top[1], "sphere-a");
    EXPECT_EQ(top[2], "rastrigin");
    EXPECT_EQ(select_proxies(target, pool, 1), std::vector<std::string>{"self"});
}

TEST(SelectProxies, TiesBrokenByName) {
    auto ctx = context_5d(91);
    auto d = sample_distribution("synthetic:sphere:5", 1, ctx);
    d.retained = {"ydist.skewness", "disp.ratio_05"};
    std::vector<std::pair<std::string, ela::FeatureDistribution>> pool = {{"b", d}, {"c", d}, {"a", d}};
    EXPECT_EQ(select_proxies(d, pool, 3), (std::vector<std::string>{"a", "b", "c"}));
}

TEST(ScoreCandidate, DeterministicAndChargedByExpense) {
    auto p1 = problems::synthetic("sphere", 3, 1), p2 = problems::synthetic("rastrigin", 3, 1);
    BudgetLedger l1, l2;
    double a = score_candidate(algo::default_config(), {p1, p2}, 150, 3, 42, Phase::discovery, &l1);
    double b = score_candidate(algo::default_config(), {p1, p2}, 150, 3, 42, Phase::discovery, &l2);
    EXPECT_EQ(a, b);
    EXPECT_EQ(l1.proxy_evals(), 2u * 3u * 150u);
    EXPECT_EQ(l1.target_evals(), 0u);

    auto target = problems::make_problem("mini-bragg");
    BudgetLedger l3;
    score_candidate(algo::default_config(), {target}, 50, 2, 1, Phase::discovery, &l3);
    EXPECT_EQ(l3.target_evals(), 100u);
}

TEST(ScoreCandidate, InstantOptimumScoresOne) {
    EXPECT_DOUBLE_EQ(score_candidate(algo::random_search_config(), {solved_problem()}, 20, 3, 1, Phase::discovery,
                                     nullptr),
                     1.0);
}

TEST(ScoreCandidate, LshadeBeatsRandomSearchOnSmoothProxies) {
    std::vector<ProblemSpec> proxies = {problems::synthetic("sphere", 5, 3), problems::synthetic("rosenbrock", 5, 3)};
    int wins = 0;
    for (std::uint64_t s = 0; s < 10; ++s) {
        double ls = score_candidate(algo::lshade_baseline(5, 250), proxies, 250, 3, s, Phase::discovery, nullptr);
        double rs = score_candidate(algo::random_search_config(), proxies, 250, 3, s, Phase::discovery, nullptr);
        wins += ls > rs;
    }
    EXPECT_GE(wins, 8);
}

TEST(Discover, IdentityProposerKeepsInitialConfigAndScore) {
    IdentityProposer identity;
    SessionSettings settings;
    settings.iterations = 10;
    settings.budget_multiplier = 20;
    auto r = discover(Condition::proxy_driven, {problems::synthetic("sphere", 3, 1)}, settings, identity, 5);
    EXPECT_EQ(r.champion, r.initial);
    EXPECT_EQ(r.champion_score, r.initial_score);
    ASSERT_EQ(r.history.size(), 10u);
    for (const auto& e : r.history) EXPECT_EQ(e.incumbent_score, r.initial_score);
}

TEST(Discover, OfflineMutatorIsElitistAndDecoupled) {
    OfflineMutator offline;
    SessionSettings settings;
    settings.iterations = 100;
    settings.repetitions = 3;
    settings.budget_multiplier = 20;
    auto r = discover(Condition::proxy_driven, {problems::synthetic("sphere", 3, 2)}, settings, offline, 6);
    EXPECT_GE(r.champion_score, r.initial_score);
    ASSERT_EQ(r.history.size(), 100u);
    double prev = r.initial_score;
    for (const auto& e : r.history) {
        ASSERT_GE(e.incumbent_score, prev);
        prev = e.incumbent_score;
        EXPECT_EQ(e.accepted, e.score >= (&e == &r.history.front() ? r.initial_score : (&e)[-1].incumbent_score));
    }
    EXPECT_EQ(r.ledger.target_evals(), 0u);
    EXPECT_EQ(r.hypothetical_direct_evals(), 100u * 3u * 60u);
}

TEST(Discover, ReproducibleWithOfflineMutator) {
    OfflineMutator m1, m2;
    SessionSettings settings;
    settings.iterations = 25;
    settings.budget_multiplier = 20;
    std::vector<ProblemSpec> proxies = {problems::synthetic("ackley", 2, 1)};
    auto a = discover(Condition::benchmark_driven, proxies, settings, m1, 9);
    auto b = discover(Condition::benchmark_driven, proxies, settings, m2, 9);
    EXPECT_EQ(a.champion, b.champion);
    EXPECT_EQ(a.champion_score, b.champion_score);
    ASSERT_EQ(a.history.size(), b.history.size());
    for (std::size_t i = 0; i < a.history.size(); ++i) EXPECT_EQ(a.history[i].to_json(), b.history[i].to_json());
}

TEST(Discover, DirectConditionChargesTarget) {
    OfflineMutator offline;
    SessionSettings settings;
    settings.iterations = 3;
    settings.repetitions = 1;
    settings.budget_multiplier = 5;
    auto target = problems::make_problem("mini-bragg");
    auto r = discover(Condition::real_world_direct, {target}, settings, offline, 1);
    EXPECT_GT(r.ledger.target_evals(), 0u);
    EXPECT_EQ(r.ledger.proxy_evals(), 0u);
    EXPECT_EQ(r.ledger.target_evals() % 50, 0u);
}

TEST(Discover, ChampionsAreDistinct) {
    OfflineMutator offline;
    SessionSettings settings;
    settings.iterations = 30;
    settings.budget_multiplier = 10;
    auto r = discover(Condition::proxy_driven, {problems::synthetic("sphere", 2, 1)}, settings, offline, 3);
    auto ch = r.champions();
    ASSERT_EQ(ch.size(), 3u);
    EXPECT_EQ(ch[0], r.champion);
    EXPECT_NE(ch[0].key(), ch[1].key());
    EXPECT_NE(ch[1].key(), ch[2].key());
    EXPECT_NE(ch[0].key(), ch[2].key());
}

TEST(History, JsonRoundTrip) {
    HistoryEntry e;
    e.iteration = 4;
    e.config = algo::lshade_baseline(3, 150);
    e.score = 0.25;
    e.accepted = true;
    e.incumbent_score = 0.25;
    e.proposer = {{"name", "offline"}, {"fallback", false}};
    auto back = HistoryEntry::from_json(e.to_json());
    EXPECT_EQ(back.to_json(), e.to_json());
    EXPECT_EQ(back.config, e.config);
}

TEST(Validate, RunCountsAndH2Arithmetic) {
    auto target = problems::make_problem("mini-bragg");
    DiscoveryResult d;
    d.iterations = 100;
    d.repetitions = 3;
    d.inner_budget = 500;
    ValidationSettings vs;
    auto one = validate({algo::default_config()}, target, vs, 7, &d);
    ASSERT_EQ(one.champions.size(), 1u);
    EXPECT_EQ(one.champions[0].runs.size(), 10u);
    EXPECT_EQ(one.ledger.target_evals(), 10u * 50u * 10u);
    EXPECT_DOUBLE_EQ(one.h2_ratio(), 30.0);

    auto three = validate({algo::default_config(), algo::random_search_config(), algo::lshade_baseline(10, 500)},
                          target, vs, 7, &d, 1500, true);
    EXPECT_EQ(three.ledger.target_evals(), 3u * 10u * 500u);
    EXPECT_DOUBLE_EQ(three.h2_ratio(), 10.0);
    EXPECT_DOUBLE_EQ(three.h2_ratio_inclusive(), 150000.0 / 16500.0);
    ASSERT_EQ(three.baselines.size(), 3u);
    EXPECT_EQ(three.baselines[0].name, "RS");
    EXPECT_EQ(three.baselines[1].name, "DE");
    EXPECT_EQ(three.baselines[2].name, "LSHADE");
    EXPECT_EQ(three.baseline_ledger.target_evals(), 3u * 10u * 500u);
    auto j = three.to_json();
    EXPECT_TRUE(j.contains("h2"));
    EXPECT_EQ(j["champions"].size(), 3u);
    // Run j of every algorithm faces the same seed.
    EXPECT_EQ(three.champions[0].runs[4].seed, three.champions[1].runs[4].seed);
}

TEST(Validate, EmptyChampionsRejected) {
    EXPECT_THROW(validate({}, problems::make_problem("mini-bragg"), ValidationSettings{}, 1, nullptr),
                 std::invalid_argument);
}

TEST(Validate, MedianAndIqr) {
    EXPECT_EQ(median({3, 1, 2}), 2.0);
    EXPECT_EQ(median({4, 1, 2, 3}), 2.5);
    // Quartiles of 1..5 with linear interpolation: 2 and 4.
    EXPECT_EQ(iqr({5, 4, 3, 2, 1}), 2.0);
    EXPECT_EQ(iqr({1, 2, 3, 4}), 1.5);
}

TEST(Calibration, MonotoneAndAnchored) {
    std::vector<double> py{10, 20, 30, 40, 50}, ty{0.5, 0.6, 0.7, 0.8, 0.9};
    ValueCalibration cal(py, ty, 0.0, 0.1);
    EXPECT_DOUBLE_EQ(cal(0.0), 0.1);
    EXPECT_DOUBLE_EQ(cal(10.0), 0.5);
    EXPECT_DOUBLE_EQ(cal(50.0), 0.9);
    EXPECT_DOUBLE_EQ(cal(1e9), 0.9);
    EXPECT_NEAR(cal(5.0), 0.3, 1e-12);
    EXPECT_NEAR(cal(25.0), 0.65, 1e-12);
    double prev = cal(-1.0);
    for (double v = -1.0; v < 60; v += 0.01) {
        double c = cal(v);
        ASSERT_GE(c, prev);
        prev = c;
    }
}

TEST(Calibration, ProxyTakesTargetOptimumAndScale) {
    auto target = problems::make_problem("mini-bragg");
    target.known_optimum = 0.01;
    target.aocc_scale = 2.0;
    auto proxy = problems::synthetic("sphere", 10, 1);
    ValueCalibration cal({1, 2, 3}, {0.2, 0.3, 0.4}, 0.0, 0.01);
    auto c = calibrate_to_target(proxy, cal, target);
    EXPECT_EQ(c.known_optimum, 0.01);
    EXPECT_EQ(c.aocc_scale, 2.0);
    EXPECT_FALSE(c.expensive);
}

TEST(Pipeline, CharacterizeSyntheticTarget) {
    auto target = problems::make_problem("synthetic:sphere:2", 4);
    ElaSettings es;
    es.coef_ela = 60;
    auto ch = characterize(target, es, 3);
    EXPECT_EQ(ch.design.X.rows(), 120);
    EXPECT_EQ(ch.pool.size(), problems::synthetic_function_ids().size());
    EXPECT_FALSE(ch.target.retained.empty());
    for (const auto& [name, d] : ch.pool) EXPECT_EQ(d.retained, ch.target.retained);
    auto dist = ch.pool_distances();
    EXPECT_EQ(dist.size(), ch.pool.size());
    auto back = Characterization::from_json(ch.to_json());
    EXPECT_EQ(back.to_json(), ch.to_json());
    EXPECT_EQ(back.pool_distances(), dist);

    auto bench = benchmark_proxies(ch, target, 3);
    ASSERT_EQ(bench.size(), 3u);
    auto names = select_proxies(ch.target, ch.pool, 3);
    for (std::size_t i = 0; i < 3; ++i) EXPECT_EQ(bench[i].name, names[i]);
}

TEST(Llm, ExtractFirstJsonObject) {
    EXPECT_EQ(extract_first_json_object("no json here"), std::nullopt);
    auto j = extract_first_json_object("text {broken {\"a\": 1} and {\"b\": {\"c\": \"}\"}} tail");
    ASSERT_TRUE(j.has_value());
    EXPECT_EQ(*j, nlohmann::json({{"a", 1}}));
    auto k = extract_first_json_object("```json\n{\"x\": [1, 2]}\n```");
    ASSERT_TRUE(k.has_value());
    EXPECT_EQ((*k)["x"].size(), 2u);
}

TEST(Llm, ParseReplyForms) {
    auto cfg = algo::lshade_baseline(5, 250).to_json();
    EXPECT_EQ(parse_reply(cfg.dump()).config, algo::lshade_baseline(5, 250));
    nlohmann::json wrapped = {{"config", cfg}, {"rationale", "adaptive"}};
    auto r = parse_reply("Sure! " + wrapped.dump() + " Good luck.");
    EXPECT_EQ(r.rationale, "adaptive");
    EXPECT_THROW(parse_reply("no config"), MalformedResponse);
    cfg["family"] = "CMAES";
    EXPECT_THROW(parse_reply(cfg.dump()), MalformedResponse);
}

TEST(Llm, RequestCarriesOnlyProxyInformation) {
    auto j = sample_request().to_json();
    for (const char* key : {"task_description", "incumbent_config", "incumbent_score", "recent_history", "schema"})
        EXPECT_TRUE(j.contains(key)) << key;
    EXPECT_EQ(j.size(), 5u);
}

TEST(Llm, StubValidReply) {
    stub::StubServer server(stub::Mode::valid);
    server.start();
    auto r = llm_propose(sample_request(), stub_settings(server), "key");
    EXPECT_EQ(r.config.to_json(), nlohmann::json::parse(stub::valid_reply()));
    EXPECT_EQ(server.requests(), 1u);
}

TEST(Llm, StubProseReply) {
    stub::StubServer server(stub::Mode::prose);
    server.start();
    auto r = llm_propose(sample_request(), stub_settings(server), "key");
    EXPECT_EQ(r.config.to_json(), nlohmann::json::parse(stub::valid_reply()));
    EXPECT_FALSE(r.rationale.empty());
}

TEST(Llm, StubInvalidReply) {
    stub::StubServer server(stub::Mode::invalid);
    server.start();
    EXPECT_THROW(llm_propose(sample_request(), stub_settings(server), "key"), MalformedResponse);
}

TEST(Llm, StubUnavailableAndAuth) {
    stub::StubServer down(stub::Mode::unavailable);
    down.start();
    EXPECT_THROW(llm_propose(sample_request(), stub_settings(down), "key"), ProposerUnavailable);

    stub::StubServer locked(stub::Mode::valid, "secret");
    locked.start();
    EXPECT_THROW(llm_propose(sample_request(), stub_settings(locked), "wrong"), ProposerUnavailable);
    EXPECT_NO_THROW(llm_propose(sample_request(), stub_settings(locked), "secret"));

    LlmSettings closed;
    closed.endpoint = "http://127.0.0.1:1/v1/chat/completions";
    closed.timeout = std::chrono::milliseconds(1000);
    EXPECT_THROW(llm_propose(sample_request(), closed, "key"), ProposerUnavailable);
}

TEST(Llm, ProposerRetriesThenRethrows) {
    stub::StubServer down(stub::Mode::unavailable);
    down.start();
    LlmProposer proposer(stub_settings(down), "key");
    auto rng = seeded_rng(1, 1);
    EXPECT_THROW(proposer.propose(sample_request(), rng), ProposerUnavailable);
    EXPECT_EQ(proposer.attempts_made(), 4u);
    EXPECT_EQ(down.requests(), 4u);
}

TEST(Llm, SessionFallsBackWhenUnavailable) {
    stub::StubServer down(stub::Mode::unavailable);
    down.start();
    LlmProposer proposer(stub_settings(down), "key");
    SessionSettings settings;
    settings.iterations = 5;
    settings.budget_multiplier = 10;
    auto r = discover(Condition::proxy_driven, {problems::synthetic("sphere", 2, 1)}, settings, proposer, 2);
    ASSERT_EQ(r.history.size(), 5u);
    for (const auto& e : r.history) {
        EXPECT_TRUE(e.proposer["fallback"].get<bool>());
        EXPECT_EQ(e.proposer["error"], "ProposerUnavailable");
    }
    EXPECT_EQ(down.requests(), 20u);
}

TEST(Llm, SessionWithValidStubUsesReplies) {
    stub::StubServer server(stub::Mode::valid);
    server.start();
    LlmProposer proposer(stub_settings(server), "key");
    SessionSettings settings;
    settings.iterations = 3;
    settings.budget_multiplier = 10;
    auto r = discover(Condition::proxy_driven, {problems::synthetic("sphere", 2, 1)}, settings, proposer, 2);
    for (const auto& e : r.history) EXPECT_FALSE(e.proposer["fallback"].get<bool>());
    EXPECT_EQ(r.history.front().config.to_json(), nlohmann::json::parse(stub::valid_reply()));
}
