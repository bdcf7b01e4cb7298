#include "proxyforge/cli/commands.hpp"

#include <algorithm>
#include <chrono>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <memory>
#include <sstream>

#include <nlohmann/json.hpp>

#include "proxyforge/designer/pipeline.hpp"
#include "proxyforge/designer/validation.hpp"
#include "proxyforge/errors.hpp"
#include "proxyforge/problems/registry.hpp"
#include "proxyforge/run_record.hpp"

namespace proxyforge::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr std::uint64_t kObjectiveTag = 0x6f626a;
constexpr std::uint64_t kValidationTag = 0x76616c69;

std::string condition_tag(designer::Condition c) { return designer::to_string(c); }

json read_json(const fs::path& path, const std::string& hint) {
    if (!fs::exists(path)) throw std::runtime_error("missing " + path.string() + " (" + hint + ")");
    return json::parse(read_text(path));
}

std::string dump(const json& j) { return j.dump(1) + "\n"; }

void write_traces(const fs::path& dir, const std::vector<designer::AlgorithmValidation>& algorithms) {
    fs::create_directories(dir);
    for (const auto& a : algorithms) {
        for (std::size_t j = 0; j < a.runs.size(); ++j) {
            std::ostringstream name;
            name << a.name << "-run" << std::setw(2) << std::setfill('0') << j << ".csv";
            std::ostringstream csv;
            write_trace_csv(csv, a.runs[j].trace);
            write_text(dir / name.str(), csv.str());
        }
    }
}

std::string runs_jsonl(const std::vector<designer::AlgorithmValidation>& algorithms) {
    std::string out;
    for (const auto& a : algorithms)
        for (const auto& r : a.runs) out += json(r).dump() + "\n";
    return out;
}

double mean_of(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

}  // namespace

Workspace::Workspace(const PipelineConfig& config)
    : dir_(config.out / (config.problem + "-" + config.hash())), hash_(config.hash()) {
    // Problem names such as synthetic:sphere:5 are not portable path parts.
    std::string leaf = dir_.filename().string();
    std::replace(leaf.begin(), leaf.end(), ':', '_');
    dir_ = dir_.parent_path() / leaf;
    fs::create_directories(dir_);
    const auto ini = file("config", ".ini");
    if (!fs::exists(ini)) write_text(ini, config.hashed_ini());
}

fs::path Workspace::file(const std::string& stem, const std::string& extension) const {
    return dir_ / (stem + "-" + hash_ + extension);
}

void Workspace::record(const fs::path& artifact, const std::string& command) const {
    const auto path = dir_ / "manifest.json";
    json manifest = fs::exists(path) ? json::parse(read_text(path)) : json::object();
    manifest["config_hash"] = hash_;
    manifest["artifacts"][fs::relative(artifact, dir_).generic_string()] = {{"command", command},
                                                                            {"config_hash", hash_}};
    manifest["artifacts"]["config-" + hash_ + ".ini"] = {{"command", "config"}, {"config_hash", hash_}};
    write_text(path, dump(manifest));
}

void Workspace::log(const std::string& command, const std::string& message) const {
    std::ofstream out(dir_ / "run.log", std::ios::app);
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    out << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ") << " [" << command << "] " << message << "\n";
}

void write_text(const fs::path& path, const std::string& text) {
    const fs::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write " + path.string());
        out << text;
    }
    fs::rename(tmp, path);
}

std::string read_text(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + path.string());
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

namespace {

// Whatever the config names is the expensive instance, synthetic or not.
ProblemSpec load_target(const PipelineConfig& config) {
    auto target = problems::make_problem(config.problem, config.seed);
    target.expensive = true;
    return target;
}

}  // namespace

void cmd_ela(const PipelineConfig& config, std::ostream& out, std::ostream&) {
    Workspace ws(config);
    const auto target = load_target(config);
    const auto ch = designer::characterize(target, config.ela, config.seed);

    json j = ch.to_json();
    j["config_hash"] = ws.hash();
    json distances = json::object();
    const auto d = ch.pool_distances();
    for (std::size_t i = 0; i < d.size(); ++i) distances[ch.pool[i].first] = d[i];
    j["pool_distances"] = distances;
    const auto path = ws.file("ela", ".json");
    write_text(path, dump(j));
    ws.record(path, "ela");
    ws.log("ela", "wrote " + path.filename().string());

    out << "design rows: " << ch.design.y.size() << "\n";
    out << "retained features: " << ch.target.retained.size() << "\n";
    out << "ledger: characterization_evals=" << ch.ledger.characterization_evals()
        << " target_evals=" << ch.ledger.target_evals() << " proxy_evals=" << ch.ledger.proxy_evals() << "\n";
    out << "output: " << path.string() << "\n";
}

void cmd_gen_proxies(const PipelineConfig& config, std::ostream& out, std::ostream&) {
    Workspace ws(config);
    const auto ch = designer::Characterization::from_json(read_json(ws.file("ela", ".json"), "run `ela` first"));
    const auto gen = designer::generate_proxies(ch, config.gp, config.seed);

    json proxies = json::array();
    for (std::size_t i = 0; i < gen.top.size(); ++i) {
        const auto& c = gen.top[i];
        proxies.push_back({{"rank", i},
                           {"tree", c.tree.to_string()},
                           {"skeleton", c.tree.skeleton()},
                           {"fitness", c.fitness},
                           {"replica_correlation", c.replica_correlation}});
    }
    const json j = {{"problem", config.problem},
                    {"config_hash", ws.hash()},
                    {"eval_seed", gen.evolution.eval_seed},
                    {"initial_median", gen.evolution.initial_median},
                    {"best_curve", gen.evolution.best_curve},
                    {"archive_size", gen.evolution.archive.size()},
                    {"proxies", proxies},
                    {"ledger", gen.ledger}};
    const auto path = ws.file("proxies", ".json");
    write_text(path, dump(j));
    ws.record(path, "gen-proxies");

    std::ostringstream csv;
    csv << "generation,best_fitness\n";
    for (std::size_t g = 0; g < gen.evolution.best_curve.size(); ++g)
        csv << g << "," << format_double(gen.evolution.best_curve[g]) << "\n";
    const auto curve = ws.file("gp-curve", ".csv");
    write_text(curve, csv.str());
    ws.record(curve, "gen-proxies");
    ws.log("gen-proxies", "wrote " + path.filename().string());

    out << csv.str();
    for (const auto& p : proxies)
        out << "proxy " << p["rank"].get<std::size_t>() << " fitness=" << format_double(p["fitness"].get<double>())
            << " " << p["tree"].get<std::string>() << "\n";
    out << "output: " << path.string() << "\n";
}

void cmd_discover(const PipelineConfig& config, std::ostream& out, std::ostream& err) {
    Workspace ws(config);
    const auto target = load_target(config);
    const std::string tag = condition_tag(config.condition);

    std::optional<designer::Characterization> ch;
    std::vector<gp::ExpressionTree> trees;
    if (config.condition != designer::Condition::real_world_direct)
        ch = designer::Characterization::from_json(read_json(ws.file("ela", ".json"), "run `ela` first"));
    if (config.condition == designer::Condition::proxy_driven) {
        const auto proxies = read_json(ws.file("proxies", ".json"), "run `gen-proxies` first");
        for (const auto& p : proxies.at("proxies")) trees.push_back(gp::ExpressionTree::parse(p.at("tree").get<std::string>()));
    }
    BudgetLedger objective_ledger;
    const auto objectives =
        designer::session_objectives(config.condition, target, ch ? &*ch : nullptr, &trees, config.gp.top_k,
                                     mix_seed(config.seed, kObjectiveTag), &objective_ledger);

    std::unique_ptr<designer::Proposer> proposer;
    if (config.proposer == "llm") {
        proposer = std::make_unique<designer::LlmProposer>(config.llm);
    } else {
        proposer = std::make_unique<designer::OfflineMutator>();
    }
    const auto result = designer::discover_sessions(config.condition, objectives, config.session_settings(),
                                                    *proposer, config.seed, config.sessions);

    std::size_t fallbacks = 0;
    std::string history;
    for (const auto& e : result.history) {
        if (e.proposer.value("fallback", false)) ++fallbacks;
        history += e.to_json().dump() + "\n";
    }
    json champions = json::array();
    for (const auto& c : result.champions()) champions.push_back(c.to_json());
    const json champion = {{"problem", config.problem},
                           {"condition", tag},
                           {"config_hash", ws.hash()},
                           {"initial", result.initial.to_json()},
                           {"initial_score", result.initial_score},
                           {"champion", result.champion.to_json()},
                           {"champion_label", result.champion.label()},
                           {"champion_score", result.champion_score},
                           {"champions", champions}};
    const json summary = {{"problem", config.problem},
                          {"condition", tag},
                          {"config_hash", ws.hash()},
                          {"objectives", result.proxy_names},
                          {"iterations", result.iterations},
                          {"repetitions", result.repetitions},
                          {"inner_budget", result.inner_budget},
                          {"sessions", config.sessions},
                          {"hypothetical_direct_target_evals", result.hypothetical_direct_evals()},
                          {"proposer", proposer->name()},
                          {"fallbacks", fallbacks},
                          {"ledger", result.ledger},
                          {"objective_setup_ledger", objective_ledger}};

    const auto champion_path = ws.file("champion-" + tag, ".json");
    const auto history_path = ws.file("history-" + tag, ".jsonl");
    const auto summary_path = ws.file("discovery-" + tag, ".json");
    write_text(champion_path, dump(champion));
    write_text(history_path, history);
    write_text(summary_path, dump(summary));
    for (const auto& p : {champion_path, history_path, summary_path}) ws.record(p, "discover");
    ws.log("discover", tag + ": champion score " + format_double(result.champion_score));

    if (fallbacks > 0)
        err << "warning: proposer failed in " << fallbacks << " of " << result.history.size()
            << " iterations; offline fallback engaged\n";
    out << "condition: " << tag << "\n";
    out << "champion: " << result.champion.label() << "\n";
    out << "score: " << format_double(result.initial_score) << " -> " << format_double(result.champion_score) << "\n";
    out << "ledger: target_evals=" << result.ledger.target_evals() << " proxy_evals=" << result.ledger.proxy_evals()
        << "\n";
    out << "output: " << champion_path.string() << "\n";
}

void cmd_validate(const PipelineConfig& config, std::ostream& out, std::ostream&) {
    Workspace ws(config);
    const auto target = load_target(config);
    const std::string tag = condition_tag(config.condition);

    const auto champion = read_json(ws.file("champion-" + tag, ".json"), "run `discover` first");
    std::vector<algo::AlgorithmConfig> champions;
    for (const auto& c : champion.at("champions")) champions.push_back(algo::AlgorithmConfig::from_json(c));

    designer::DiscoveryResult discovery;
    const auto summary_path = ws.file("discovery-" + tag, ".json");
    if (fs::exists(summary_path)) {
        const auto s = json::parse(read_text(summary_path));
        discovery.ledger = s.at("ledger").get<BudgetLedger>();
        discovery.iterations = s.at("iterations").get<std::size_t>();
        discovery.repetitions = s.at("repetitions").get<std::size_t>();
        discovery.inner_budget = s.at("inner_budget").get<std::size_t>();
    }
    std::size_t characterization = 0;
    const auto ela_path = ws.file("ela", ".json");
    if (fs::exists(ela_path))
        characterization = json::parse(read_text(ela_path)).at("ledger").get<BudgetLedger>().characterization_evals();

    const auto report =
        designer::validate(champions, target, config.validation_settings(), mix_seed(config.seed, kValidationTag),
                           &discovery, characterization, config.with_baselines);

    json j = report.to_json();
    j["condition"] = tag;
    j["config_hash"] = ws.hash();
    const std::string stem = "validation-" + tag + (config.with_baselines ? "-baselines" : "");
    const auto path = ws.file(stem, ".json");
    write_text(path, dump(j));
    ws.record(path, "validate");
    const auto runs_path = ws.file("runs-" + tag, ".jsonl");
    write_text(runs_path, runs_jsonl(report.champions));
    ws.record(runs_path, "validate");
    const auto traces = ws.file("traces-" + tag, "");
    write_traces(traces, report.champions);
    ws.record(traces, "validate");
    if (!report.baselines.empty()) {
        const auto baseline_traces = ws.file("traces-baseline", "");
        write_traces(baseline_traces, report.baselines);
        ws.record(baseline_traces, "validate");
    }
    ws.log("validate", tag + ": wrote " + path.filename().string());

    for (const auto& c : report.champions)
        out << c.name << " " << c.config.label() << " median_aocc=" << format_double(c.median_aocc()) << "\n";
    for (const auto& b : report.baselines) out << b.name << " median_aocc=" << format_double(b.median_aocc()) << "\n";
    out << "ledger: target_evals=" << report.ledger.target_evals() << " h2_ratio=" << format_double(report.h2_ratio())
        << "\n";
    out << "output: " << path.string() << "\n";
}

void cmd_baseline(const PipelineConfig& config, std::ostream& out, std::ostream&) {
    Workspace ws(config);
    const auto target = load_target(config);
    const auto settings = config.validation_settings();
    const auto baselines = designer::validate_baselines(target, settings, mix_seed(config.seed, kValidationTag));
    json rows = json::array();
    BudgetLedger ledger;
    for (const auto& b : baselines) {
        rows.push_back(b.summary());
        for (const auto& r : b.runs) ledger.merge(r.ledger);
    }
    const json j = {{"problem", config.problem},
                    {"config_hash", ws.hash()},
                    {"budget", settings.budget_multiplier * target.dim},
                    {"runs", settings.runs},
                    {"baselines", rows},
                    {"ledger", ledger}};
    const auto path = ws.file("baseline", ".json");
    write_text(path, dump(j));
    ws.record(path, "baseline");
    const auto traces = ws.file("traces-baseline", "");
    write_traces(traces, baselines);
    ws.record(traces, "baseline");
    ws.log("baseline", "wrote " + path.filename().string());
    for (const auto& b : baselines) out << b.name << " median_aocc=" << format_double(b.median_aocc()) << "\n";
    out << "output: " << path.string() << "\n";
}

void cmd_report(const fs::path& dir, std::ostream& out, std::ostream& err) {
    if (!fs::is_directory(dir)) throw std::runtime_error("not a directory: " + dir.string());

    struct Row {
        std::string problem, algorithm, config_hash, label;
        std::size_t runs;
        double median, iqr;
    };
    std::map<std::tuple<std::string, std::string, std::string>, Row> rows;
    struct Distances {
        std::string problem, config_hash;
        std::vector<double> proxy;
        std::vector<double> pool;
    };
    std::map<std::pair<std::string, std::string>, Distances> tables;
    std::size_t skipped = 0;
    std::size_t files = 0;

    auto add_rows = [&](const json& doc, const json& list, const std::string& prefix) {
        const auto problem = doc.value("problem", std::string{});
        const auto hash = doc.value("config_hash", std::string{});
        for (const auto& rec : list) {
            if (!rec.contains("aocc") || !rec["aocc"].is_array() || rec["aocc"].empty()) {
                ++skipped;
                continue;
            }
            const auto aocc = rec["aocc"].get<std::vector<double>>();
            const std::string algorithm = prefix + rec.value("name", std::string{"?"});
            rows[{problem, algorithm, hash}] = Row{problem,
                                                   algorithm,
                                                   hash,
                                                   rec.value("label", std::string{}),
                                                   aocc.size(),
                                                   designer::median(aocc),
                                                   designer::iqr(aocc)};
        }
    };

    std::vector<fs::path> paths;
    for (const auto& entry : fs::recursive_directory_iterator(dir))
        if (entry.is_regular_file() && entry.path().extension() == ".json") paths.push_back(entry.path());
    std::sort(paths.begin(), paths.end());
    for (const auto& path : paths) {
        const std::string name = path.filename().string();
        const bool validation = name.rfind("validation-", 0) == 0;
        const bool baseline = name.rfind("baseline-", 0) == 0;
        const bool ela = name.rfind("ela-", 0) == 0;
        const bool proxies = name.rfind("proxies-", 0) == 0;
        if (!validation && !baseline && !ela && !proxies) continue;
        json doc;
        try {
            doc = json::parse(read_text(path));
        } catch (const json::exception&) {
            ++skipped;
            continue;
        }
        ++files;
        const auto problem = doc.value("problem", std::string{});
        const auto hash = doc.value("config_hash", std::string{});
        if (validation) {
            add_rows(doc, doc.value("champions", json::array()), doc.value("condition", std::string{}) + "/");
            add_rows(doc, doc.value("baselines", json::array()), "");
        } else if (baseline) {
            add_rows(doc, doc.value("baselines", json::array()), "");
        } else if (ela) {
            auto& t = tables[{problem, hash}];
            t.problem = problem;
            t.config_hash = hash;
            const json distances = doc.value("pool_distances", json::object());
            for (const auto& [name, d] : distances.items()) t.pool.push_back(d.get<double>());
        } else {
            auto& t = tables[{problem, hash}];
            t.problem = problem;
            t.config_hash = hash;
            for (const auto& p : doc.value("proxies", json::array())) t.proxy.push_back(p.at("fitness").get<double>());
        }
    }
    if (files == 0) throw std::runtime_error("no run records found in " + dir.string());

    std::ostringstream summary;
    summary << "problem,algorithm,config_hash,label,runs,median_aocc,iqr_aocc\n";
    for (const auto& [key, r] : rows)
        summary << r.problem << "," << r.algorithm << "," << r.config_hash << ",\"" << r.label << "\"," << r.runs << ","
                << format_double(r.median) << "," << format_double(r.iqr) << "\n";
    write_text(dir / "summary-aocc.csv", summary.str());

    std::ostringstream table;
    table << "problem,config_hash,k,proxy_mean_distance,synthetic_nearest_mean_distance,synthetic_pool_mean_distance\n";
    for (auto& [key, t] : tables) {
        if (t.proxy.empty() || t.pool.empty()) continue;
        auto pool = t.pool;
        std::sort(pool.begin(), pool.end());
        const std::size_t k = std::min(t.proxy.size(), pool.size());
        const std::vector<double> nearest(pool.begin(), pool.begin() + static_cast<long>(k));
        table << t.problem << "," << t.config_hash << "," << k << "," << format_double(mean_of(t.proxy)) << ","
              << format_double(mean_of(nearest)) << "," << format_double(mean_of(t.pool)) << "\n";
    }
    write_text(dir / "wasserstein-table.csv", table.str());

    if (skipped > 0) err << "warning: skipped " << skipped << " records without AOCC values\n";
    out << "rows: " << rows.size() << "\n";
    out << "output: " << (dir / "summary-aocc.csv").string() << ", " << (dir / "wasserstein-table.csv").string() << "\n";
}

}  // namespace proxyforge::cli
