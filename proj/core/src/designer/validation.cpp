#include "proxyforge/designer/validation.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

#include "proxyforge/algo/run.hpp"

namespace proxyforge::designer {

namespace {

double quantile(std::vector<double> v, double q) {
    if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
    std::sort(v.begin(), v.end());
    const double pos = q * static_cast<double>(v.size() - 1);
    const auto lo = static_cast<std::size_t>(pos);
    const std::size_t hi = std::min(lo + 1, v.size() - 1);
    return v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

}  // namespace

double median(std::vector<double> v) { return quantile(std::move(v), 0.5); }

double iqr(std::vector<double> v) { return quantile(v, 0.75) - quantile(v, 0.25); }

std::vector<double> AlgorithmValidation::aoccs() const {
    std::vector<double> out;
    for (const auto& r : runs) out.push_back(r.aocc);
    return out;
}

double AlgorithmValidation::median_aocc() const { return median(aoccs()); }

nlohmann::json AlgorithmValidation::summary() const {
    nlohmann::json best_solutions = nlohmann::json::array();
    std::vector<double> bests;
    for (const auto& r : runs) {
        best_solutions.push_back({{"seed", r.seed}, {"best", r.best}, {"x", r.best_x}});
        bests.push_back(r.best);
    }
    return {{"name", name},
            {"label", config.label()},
            {"config", config.to_json()},
            {"aocc", aoccs()},
            {"median_aocc", median_aocc()},
            {"iqr_aocc", iqr(aoccs())},
            {"median_best", median(bests)},
            {"best_solutions", best_solutions}};
}

double ValidationReport::h2_ratio() const {
    const auto actual = ledger.target_evals();
    return actual == 0 ? std::numeric_limits<double>::infinity()
                       : static_cast<double>(hypothetical_direct_evals) / static_cast<double>(actual);
}

double ValidationReport::h2_ratio_inclusive() const {
    const auto actual = ledger.target_evals() + characterization_evals;
    return actual == 0 ? std::numeric_limits<double>::infinity()
                       : static_cast<double>(hypothetical_direct_evals) / static_cast<double>(actual);
}

nlohmann::json ValidationReport::to_json() const {
    nlohmann::json champs = nlohmann::json::array();
    for (const auto& c : champions) champs.push_back(c.summary());
    nlohmann::json base = nlohmann::json::array();
    for (const auto& b : baselines) base.push_back(b.summary());
    nlohmann::json j = {{"problem", problem},
                        {"budget", budget},
                        {"runs", runs},
                        {"champions", champs},
                        {"ledger", ledger},
                        {"h2",
                         {{"hypothetical_direct_target_evals", hypothetical_direct_evals},
                          {"target_evals", ledger.target_evals()},
                          {"ratio", h2_ratio()},
                          {"characterization_evals", characterization_evals},
                          {"ratio_including_characterization", h2_ratio_inclusive()}}}};
    if (!baselines.empty()) {
        j["baselines"] = base;
        j["baseline_ledger"] = baseline_ledger;
    }
    return j;
}

AlgorithmValidation validate_algorithm(const std::string& name, const algo::AlgorithmConfig& config,
                                       const ProblemSpec& target, const ValidationSettings& settings,
                                       std::uint64_t seed) {
    AlgorithmValidation v{name, config, {}};
    const std::size_t budget = settings.budget_multiplier * target.dim;
    for (std::size_t j = 0; j < settings.runs; ++j) {
        const std::uint64_t run_seed = mix_seed(seed, j);
        BudgetedEvaluator evaluator(target, budget, run_seed);
        algo::RunOptions options;
        options.phase = Phase::validation;
        options.aocc = settings.aocc;
        options.label = name;
        v.runs.push_back(algo::run(config, evaluator, run_seed, options));
    }
    return v;
}

std::vector<AlgorithmValidation> validate_baselines(const ProblemSpec& target, const ValidationSettings& settings,
                                                    std::uint64_t seed) {
    const std::size_t budget = settings.budget_multiplier * target.dim;
    return {validate_algorithm("RS", algo::random_search_config(), target, settings, seed),
            validate_algorithm("DE", algo::de_baseline(target.dim, budget), target, settings, seed),
            validate_algorithm("LSHADE", algo::lshade_baseline(target.dim, budget), target, settings, seed)};
}

ValidationReport validate(const std::vector<algo::AlgorithmConfig>& champions, const ProblemSpec& target,
                          const ValidationSettings& settings, std::uint64_t seed, const DiscoveryResult* discovery,
                          std::size_t characterization_evals, bool with_baselines) {
    if (champions.empty()) throw std::invalid_argument("validate: no champions");
    ValidationReport report;
    report.problem = target.name;
    report.budget = settings.budget_multiplier * target.dim;
    report.runs = settings.runs;
    report.characterization_evals = characterization_evals;
    if (discovery) {
        report.ledger = discovery->ledger;
        report.hypothetical_direct_evals = discovery->hypothetical_direct_evals();
    }
    for (std::size_t i = 0; i < champions.size(); ++i) {
        auto v = validate_algorithm("champion-" + std::to_string(i), champions[i], target, settings, seed);
        for (const auto& r : v.runs) report.ledger.merge(r.ledger);
        report.champions.push_back(std::move(v));
    }
    if (with_baselines) {
        report.baselines = validate_baselines(target, settings, seed);
        for (const auto& b : report.baselines)
            for (const auto& r : b.runs) report.baseline_ledger.merge(r.ledger);
    }
    return report;
}

}  // namespace proxyforge::designer
