#include "proxyforge/designer/session.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>

#include <tbb/parallel_for.h>

#include "proxyforge/algo/run.hpp"
#include "proxyforge/errors.hpp"

namespace proxyforge::designer {

const char* to_string(Condition c) {
    switch (c) {
        case Condition::proxy_driven: return "proxy-driven";
        case Condition::benchmark_driven: return "benchmark-driven";
        case Condition::real_world_direct: return "real-world-direct";
    }
    return "?";
}

Condition condition_from_string(std::string_view name) {
    for (auto c : {Condition::proxy_driven, Condition::benchmark_driven, Condition::real_world_direct})
        if (name == to_string(c)) return c;
    throw std::invalid_argument("unknown condition '" + std::string(name) + "'");
}

std::vector<std::string> select_proxies(const ela::FeatureDistribution& target,
                                        const std::vector<std::pair<std::string, ela::FeatureDistribution>>& pool,
                                        std::size_t k) {
    if (pool.empty()) throw std::invalid_argument("select_proxies: empty pool");
    std::vector<std::pair<double, std::string>> ranked;
    for (const auto& [name, dist] : pool) ranked.emplace_back(ela::landscape_distance(target, dist), name);
    std::sort(ranked.begin(), ranked.end());
    std::vector<std::string> out;
    for (std::size_t i = 0; i < std::min(k, ranked.size()); ++i) out.push_back(ranked[i].second);
    return out;
}

double score_candidate(const algo::AlgorithmConfig& config, const std::vector<ProblemSpec>& proxies,
                       std::size_t inner_budget, std::size_t repetitions, std::uint64_t seed, Phase phase,
                       BudgetLedger* ledger, const AoccSettings& aocc) {
    if (proxies.empty()) throw std::invalid_argument("score_candidate: no proxies");
    if (repetitions == 0) throw std::invalid_argument("score_candidate: repetitions must be positive");
    config.validate();
    const std::size_t jobs = proxies.size() * repetitions;
    std::vector<double> scores(jobs);
    std::vector<BudgetLedger> ledgers(jobs);
    tbb::parallel_for(std::size_t{0}, jobs, [&](std::size_t job) {
        const std::size_t p = job / repetitions;
        const std::uint64_t run_seed = mix_seed(seed, job);
        BudgetedEvaluator evaluator(proxies[p], inner_budget, run_seed);
        algo::RunOptions options;
        options.phase = phase;
        options.aocc = aocc;
        auto record = algo::run(config, evaluator, run_seed, options);
        scores[job] = record.aocc;
        ledgers[job] = record.ledger;
    });
    double total = 0.0;
    for (std::size_t job = 0; job < jobs; ++job) {
        total += scores[job];
        if (ledger) ledger->merge(ledgers[job]);
    }
    return total / static_cast<double>(jobs);
}

std::vector<algo::AlgorithmConfig> DiscoveryResult::champions(std::size_t extra) const {
    std::vector<algo::AlgorithmConfig> out{champion};
    std::set<std::string> seen{champion.key()};
    std::vector<const HistoryEntry*> ranked;
    for (const auto& e : history) ranked.push_back(&e);
    std::stable_sort(ranked.begin(), ranked.end(),
                     [](const HistoryEntry* a, const HistoryEntry* b) { return a->score > b->score; });
    for (const auto* e : ranked) {
        if (out.size() >= extra + 1) break;
        if (seen.insert(e->config.key()).second) out.push_back(e->config);
    }
    return out;
}

DiscoveryResult discover(Condition condition, const std::vector<ProblemSpec>& proxies, const SessionSettings& settings,
                         Proposer& proposer, std::uint64_t seed, const algo::AlgorithmConfig& initial) {
    if (proxies.empty()) throw std::invalid_argument("discover: no proxies");
    const std::size_t dim = proxies.front().dim;
    const std::size_t budget = settings.inner_budget(dim);
    // Iteration i scores its candidate on run seeds derived from i, so the
    // search cannot tune itself to one fixed set of runs.
    const std::uint64_t scoring_seed = mix_seed(seed, 0x73636f7265ULL);
    RandomStream rng(seed, 0x64697363ULL);

    DiscoveryResult result;
    result.condition = condition;
    result.iterations = settings.iterations;
    result.repetitions = settings.repetitions;
    result.inner_budget = budget;
    for (const auto& p : proxies) result.proxy_names.push_back(p.name);

    auto score = [&](const algo::AlgorithmConfig& c, std::size_t it) {
        return score_candidate(c, proxies, budget, settings.repetitions, mix_seed(scoring_seed, it), Phase::discovery,
                               &result.ledger, settings.aocc);
    };

    algo::AlgorithmConfig incumbent = initial.normalized();
    double incumbent_score = score(incumbent, 0);
    result.initial = incumbent;
    result.initial_score = incumbent_score;

    const std::string task = task_description(dim, budget);
    for (std::size_t it = 1; it <= settings.iterations; ++it) {
        ProposerRequest request;
        request.task_description = task;
        request.incumbent_config = incumbent;
        request.incumbent_score = incumbent_score;
        const std::size_t from = result.history.size() > kRecentHistory ? result.history.size() - kRecentHistory : 0;
        request.recent_history.assign(result.history.begin() + static_cast<long>(from), result.history.end());
        request.schema = algo::algorithm_config_schema();

        HistoryEntry entry;
        entry.iteration = it;
        entry.proposer = {{"name", proposer.name()}, {"fallback", false}};
        try {
            auto response = proposer.propose(request, rng);
            entry.config = response.config;
            entry.proposer["rationale"] = response.rationale;
        } catch (const ProposerError& e) {
            entry.config = algo::mutate_config(incumbent, rng, algo::Step::small);
            entry.proposer["fallback"] = true;
            entry.proposer["error"] = dynamic_cast<const ProposerUnavailable*>(&e) ? "ProposerUnavailable"
                                                                                    : "MalformedResponse";
            entry.proposer["message"] = e.what();
        }
        entry.config = entry.config.normalized();
        if (entry.config == incumbent) {
            // Re-running the incumbent would only resample its noise.
            entry.score = incumbent_score;
            entry.proposer["reused_incumbent_score"] = true;
        } else {
            entry.score = score(entry.config, it);
        }
        entry.accepted = entry.score >= incumbent_score;
        if (entry.accepted) {
            incumbent = entry.config;
            incumbent_score = entry.score;
        }
        entry.incumbent_score = incumbent_score;
        result.history.push_back(std::move(entry));
    }
    result.champion = incumbent;
    result.champion_score = incumbent_score;
    return result;
}

DiscoveryResult discover_sessions(Condition condition, const std::vector<ProblemSpec>& proxies,
                                  const SessionSettings& settings, Proposer& proposer, std::uint64_t seed,
                                  std::size_t sessions) {
    if (sessions == 0) throw std::invalid_argument("discover_sessions: sessions must be positive");
    if (sessions == 1) return discover(condition, proxies, settings, proposer, seed);
    std::optional<DiscoveryResult> best;
    BudgetLedger ledger;
    std::vector<HistoryEntry> all;
    for (std::size_t s = 0; s < sessions; ++s) {
        auto r = discover(condition, proxies, settings, proposer, mix_seed(seed, s));
        ledger.merge(r.ledger);
        for (auto& e : r.history) {
            e.proposer["session"] = s;
            all.push_back(e);
        }
        if (!best || r.champion_score > best->champion_score) best = std::move(r);
    }
    best->ledger = ledger;
    best->history = std::move(all);
    best->iterations = settings.iterations * sessions;
    return *best;
}

}  // namespace proxyforge::designer
