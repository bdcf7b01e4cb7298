#include "proxyforge/run_record.hpp"

#include <charconv>
#include <cmath>
#include <ostream>

namespace proxyforge {

namespace {

nlohmann::json phase_json(const PhaseCounts& c) { return {{"proxy", c.proxy}, {"target", c.target}}; }

}  // namespace

std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

void to_json(nlohmann::json& j, const BudgetLedger& ledger) {
    j = {{"proxy_evals", ledger.proxy_evals()},
         {"target_evals", ledger.target_evals()},
         {"characterization_evals", ledger.characterization_evals()},
         {"phases",
          {{"generation", phase_json(ledger.phase(Phase::generation))},
           {"discovery", phase_json(ledger.phase(Phase::discovery))},
           {"validation", phase_json(ledger.phase(Phase::validation))}}}};
}

void from_json(const nlohmann::json& j, BudgetLedger& ledger) {
    ledger = BudgetLedger{};
    const auto& phases = j.at("phases");
    for (Phase p : {Phase::generation, Phase::discovery, Phase::validation}) {
        const auto& c = phases.at(to_string(p));
        ledger.charge(p, false, c.at("proxy").get<std::size_t>());
        std::size_t target = c.at("target").get<std::size_t>();
        if (target > 0) ledger.charge(p, true, target);
    }
    ledger.charge_characterization(j.value("characterization_evals", std::size_t{0}));
}

void to_json(nlohmann::json& j, const RunRecord& r) {
    nlohmann::json trace = nlohmann::json::array();
    for (const auto& e : r.trace) trace.push_back({e.eval, e.raw, e.best});
    j = {{"problem", r.problem}, {"algorithm", r.algorithm}, {"config", r.config},
         {"seed", r.seed},       {"budget", r.budget},       {"ledger", r.ledger},
         {"trace", trace},       {"aocc", r.aocc},           {"best", r.best},
         {"best_x", r.best_x}};
}

void from_json(const nlohmann::json& j, RunRecord& r) {
    r.problem = j.at("problem").get<std::string>();
    r.algorithm = j.value("algorithm", std::string{});
    r.config = j.value("config", nlohmann::json::object());
    r.seed = j.at("seed").get<std::uint64_t>();
    r.budget = j.at("budget").get<std::size_t>();
    r.ledger = j.at("ledger").get<BudgetLedger>();
    r.trace.clear();
    for (const auto& e : j.at("trace"))
        r.trace.push_back({e.at(0).get<std::size_t>(), e.at(1).get<double>(), e.at(2).get<double>()});
    r.aocc = j.at("aocc").get<double>();
    r.best = j.value("best", r.trace.empty() ? 0.0 : r.trace.back().best);
    r.best_x = j.value("best_x", std::vector<double>{});
}

void write_trace_csv(std::ostream& out, const std::vector<TraceEntry>& trace) {
    out << "eval,raw,best\n";
    for (const auto& e : trace) out << e.eval << ',' << format_double(e.raw) << ',' << format_double(e.best) << '\n';
}

}  // namespace proxyforge
