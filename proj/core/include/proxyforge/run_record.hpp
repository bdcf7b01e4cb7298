#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "proxyforge/problem.hpp"

namespace proxyforge {

/// Persistence unit for one optimizer run.
struct RunRecord {
    std::string problem;
    std::string algorithm;
    nlohmann::json config;
    std::uint64_t seed = 0;
    std::size_t budget = 0;
    BudgetLedger ledger;
    std::vector<TraceEntry> trace;
    double aocc = 0.0;
    double best = 0.0;
    std::vector<double> best_x;
};

void to_json(nlohmann::json& j, const BudgetLedger& ledger);
void from_json(const nlohmann::json& j, BudgetLedger& ledger);
void to_json(nlohmann::json& j, const RunRecord& record);
void from_json(const nlohmann::json& j, RunRecord& record);

/// CSV with header `eval,raw,best`.
void write_trace_csv(std::ostream& out, const std::vector<TraceEntry>& trace);

/// Shortest round-trip decimal form of a double, used by every text writer.
std::string format_double(double v);

}  // namespace proxyforge
