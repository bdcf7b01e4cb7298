// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.
//
//   proxyforge_acceptance [--work-dir DIR] [--only 1,3,8]

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <map>
#include <numeric>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "proxyforge/algo/config.hpp"
#include "proxyforge/algo/run.hpp"
#include "proxyforge/aocc.hpp"
#include "proxyforge/cli/commands.hpp"
#include "proxyforge/cli/pipeline_config.hpp"
#include "proxyforge/designer/pipeline.hpp"
#include "proxyforge/designer/proposer.hpp"
#include "proxyforge/designer/session.hpp"
#include "proxyforge/designer/validation.hpp"
#include "proxyforge/ela/design.hpp"
#include "proxyforge/ela/distribution.hpp"
#include "proxyforge/ela/features.hpp"
#include "proxyforge/ela/wasserstein.hpp"
#include "proxyforge/errors.hpp"
#include "proxyforge/gp/evolve.hpp"
#include "proxyforge/problems/photonics.hpp"
#include "proxyforge/problems/registry.hpp"
#include "proxyforge/problems/tmm.hpp"
#include "proxyforge/stub/stub_server.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace proxyforge;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

struct Criterion {
    int id;
    std::string name;
    double limit_s;  // 0: no runtime limit
    std::function<Outcome()> run;
};

fs::path g_work;

std::string fmt(double v, int precision = 4) {
    std::ostringstream s;
    s << std::setprecision(precision) << v;
    return s.str();
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), {}};
}

int cli(const std::vector<std::string>& args) {
    std::vector<const char*> argv{"proxyforge"};
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    int code = cli::run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
    if (code != 0) std::cerr << "proxyforge";
    if (code != 0)
        for (const auto& a : args) std::cerr << " " << a;
    if (code != 0) std::cerr << " -> exit " << code << "\n" << err.str();
    return code;
}

// 1 ------------------------------------------------------------------------
Outcome physics_oracle() {
    const double nl = std::sqrt(problems::kBraggPermittivityLow), nh = std::sqrt(problems::kBraggPermittivityHigh);
    std::vector<double> t;
    for (int i = 0; i < 20; ++i) t.push_back(i % 2 == 0 ? 600.0 / (4 * nl) : 600.0 / (4 * nh));
    const double R = problems::tmm_reflectance(problems::bragg_stack(t), 600.0);
    const double rho = (1.5 / 1.0) * std::pow(nl / nh, 20);
    const double analytic = std::pow((1 - rho) / (1 + rho), 2);

    problems::LayerStack empty;
    empty.ambient_index = 1.0;
    empty.substrate_index = 1.5;
    const double fresnel = problems::tmm_reflectance(empty, 600.0);

    const double e1 = std::abs(R - analytic), e2 = std::abs(fresnel - 0.04);
    return {e1 <= 1e-9 && e2 <= 1e-12, "|R-analytic|=" + fmt(e1, 3) + " (tol 1e-9), |R_empty-0.04|=" + fmt(e2, 3) +
                                           " (tol 1e-12), R=" + fmt(R, 12)};
}

// 2 ------------------------------------------------------------------------
Outcome wasserstein_correctness() {
    auto rng = seeded_rng(2024, 2);
    double worst = 0.0;
    for (int pair = 0; pair < 1000; ++pair) {
        const std::size_t n = 1 + rng.index(200);
        std::vector<double> a(n), b(n);
        for (auto& v : a) v = rng.normal(0, 1) * rng.uniform(0.1, 10);
        for (auto& v : b) v = rng.uniform(-10, 10);
        auto sa = a, sb = b;
        std::sort(sa.begin(), sa.end());
        std::sort(sb.begin(), sb.end());
        double oracle = 0;
        for (std::size_t i = 0; i < n; ++i) oracle += std::abs(sa[i] - sb[i]);
        oracle /= static_cast<double>(n);
        worst = std::max(worst, std::abs(ela::wasserstein_1d(a, b) - oracle));
    }
    std::vector<double> same{0.5, -2.0, 3.25}, zero{0}, one{1}, p{0, 2}, q{1, 3};
    const bool examples =
        ela::wasserstein_1d(same, same) == 0.0 && ela::wasserstein_1d(zero, one) == 1.0 && ela::wasserstein_1d(p, q) == 1.0;
    return {worst <= 1e-12 && examples,
            "max |W1-oracle| over 1000 pairs=" + fmt(worst, 3) + " (tol 1e-12), examples exact=" + (examples ? "yes" : "no")};
}

// 3 ------------------------------------------------------------------------
Outcome landscape_separation() {
    const std::uint64_t seed = 1;
    auto target = problems::make_problem("synthetic:sphere:5", seed);
    auto ch = designer::characterize(target, designer::ElaSettings{}, seed);
    auto gen = designer::generate_proxies(ch, gp::GpParams{}, seed);
    if (gen.top.size() < 3) return {false, "fewer than 3 proxies extracted"};

    gp::FitnessFunction fitness(*ch.context, ch.target);
    double proxy_mean = 0;
    for (const auto& c : gen.top) {
        auto noise = gp::fitness_noise(gen.evolution.eval_seed, c.tree);
        proxy_mean += fitness(c.tree, noise);
    }
    proxy_mean /= 3.0;
    double logged_mean = (gen.top[0].fitness + gen.top[1].fitness + gen.top[2].fitness) / 3.0;

    auto dist = ch.pool_distances();
    std::vector<std::pair<double, std::string>> ranked;
    for (std::size_t i = 0; i < dist.size(); ++i) ranked.emplace_back(dist[i], ch.pool[i].first);
    std::sort(ranked.begin(), ranked.end());
    const double nearest_mean = (ranked[0].first + ranked[1].first + ranked[2].first) / 3.0;
    const bool sphere_min = ranked.front().second.rfind("synthetic:sphere:", 0) == 0;

    std::string detail = "proxy top-3 mean=" + fmt(logged_mean) + " (recomputed " + fmt(proxy_mean) +
                         "), 3 nearest synthetics mean=" + fmt(nearest_mean) + " [" + ranked[0].second + ", " +
                         ranked[1].second + ", " + ranked[2].second + "], pool minimum=" + ranked.front().second +
                         " at " + fmt(ranked.front().first);
    return {logged_mean < nearest_mean && sphere_min, detail};
}

// 4 ------------------------------------------------------------------------
Outcome gp_progress() {
    std::ostringstream detail;
    bool pass = true;
    for (const std::string name : {"synthetic:sphere:5", "synthetic:rastrigin:5"}) {
        int ok = 0;
        std::ostringstream seeds;
        for (std::uint64_t seed = 1; seed <= 10; ++seed) {
            auto target = problems::make_problem(name, seed);
            auto ch = designer::characterize(target, designer::ElaSettings{}, seed);
            auto gen = designer::generate_proxies(ch, gp::GpParams{}, seed);
            const double best = gen.evolution.archive.front().fitness;
            const bool improved = best < gen.evolution.initial_median;
            ok += improved;
            seeds << (improved ? "+" : "-");
        }
        pass = pass && ok >= 9;
        detail << name << ": " << ok << "/10 [" << seeds.str() << "] ";
    }
    detail << "(need >= 9/10 each)";
    return {pass, detail.str()};
}

// 5 ------------------------------------------------------------------------
Outcome ela_sanity() {
    auto rng = seeded_rng(55, 5);
    ela::DesignSample mirrored;
    mirrored.X = ela::latin_hypercube(400, std::vector<double>(3, -5), std::vector<double>(3, 5), rng);
    for (int i = 0; i < 200; ++i) {
        double v = rng.normal(0, 2);
        mirrored.y.push_back(1.0 + v);
        mirrored.y.push_back(1.0 - v);
    }
    const double skew = ela::compute_features(mirrored).at("ydist.skewness");

    ela::DesignSample linear;
    linear.X = mirrored.X;
    for (Eigen::Index i = 0; i < linear.X.rows(); ++i)
        linear.y.push_back(3 * linear.X(i, 0) - 2 * linear.X(i, 1) + 0.5 * linear.X(i, 2) - 4);
    const double r2 = ela::compute_features(linear).at("meta.lin_adj_r2");

    ela::FeatureDistribution a, b;
    a.samples.assign(ela::feature_names().size(), std::vector<double>(5));
    b.samples = a.samples;
    for (auto* d : {&a, &b})
        for (auto& f : d->samples)
            for (auto& v : f) v = rng.normal(0, 1);
    a.samples[1] = a.samples[0];
    b.samples[1] = b.samples[0];
    const ela::FeatureDistribution* pair[] = {&a, &b};
    auto kept = ela::prune_correlated(pair, 0.9);
    const bool dup_pruned = std::count(kept.begin(), kept.end(), ela::feature_names()[0]) == 1 &&
                            std::count(kept.begin(), kept.end(), ela::feature_names()[1]) == 0;

    std::size_t checked = 0, non_finite = 0;
    for (const std::string name : {"mini-bragg", "synthetic:rastrigin:3", "ellipsometry"}) {
        auto ch = designer::characterize(problems::make_problem(name, 1), designer::ElaSettings{}, 3);
        std::vector<const ela::FeatureDistribution*> all{&ch.target};
        for (const auto& [n, d] : ch.pool) all.push_back(&d);
        for (const auto* d : all)
            for (const auto& f : d->samples)
                for (double v : f) {
                    ++checked;
                    non_finite += !std::isfinite(v);
                }
    }
    const bool pass = std::abs(skew) <= 1e-9 && std::abs(r2 - 1.0) <= 1e-6 && dup_pruned && non_finite == 0;
    return {pass, "skewness=" + fmt(skew, 3) + " (tol 1e-9), linear adj R2-1=" + fmt(r2 - 1.0, 3) +
                      " (tol 1e-6), duplicate pruned=" + (dup_pruned ? "yes" : "no") + ", non-finite " +
                      std::to_string(non_finite) + "/" + std::to_string(checked)};
}

// 6 ------------------------------------------------------------------------
Outcome optimizer_dominance() {
    std::ostringstream detail;
    bool pass = true;
    std::size_t de_runs = 0, de_violations = 0;
    for (const std::string name : {"synthetic:sphere:5", "mini-bragg"}) {
        auto p = problems::make_problem(name, 1);
        const std::size_t budget = 50 * p.dim;
        std::vector<double> ls, rs;
        for (std::uint64_t seed = 0; seed < 10; ++seed) {
            BudgetedEvaluator e1(p, budget), e2(p, budget), e3(p, budget);
            ls.push_back(algo::run(algo::lshade_baseline(p.dim, budget), e1, seed).aocc);
            rs.push_back(algo::run(algo::random_search_config(), e2, seed).aocc);
            auto de = algo::run(algo::de_baseline(p.dim, budget), e3, seed);
            ++de_runs;
            for (std::size_t i = 1; i < de.trace.size(); ++i)
                if (de.trace[i].best > de.trace[i - 1].best) {
                    ++de_violations;
                    break;
                }
        }
        const double mls = designer::median(ls), mrs = designer::median(rs);
        pass = pass && mls > mrs;
        detail << name << ": median AOCC LSHADE=" << fmt(mls) << " RS=" << fmt(mrs) << "; ";
    }
    pass = pass && de_violations == 0;
    detail << "DE runs with increasing best-so-far: " << de_violations << "/" << de_runs;
    return {pass, detail.str()};
}

// 7 ------------------------------------------------------------------------
Outcome budget_decoupling() {
    const std::uint64_t seed = 1;
    auto target = problems::make_problem("mini-bragg");
    auto ch = designer::characterize(target, designer::ElaSettings{}, seed);
    auto gen = designer::generate_proxies(ch, gp::GpParams{}, seed);
    std::vector<gp::ExpressionTree> trees;
    for (const auto& c : gen.top) trees.push_back(c.tree);
    BudgetLedger generation = ch.ledger;
    generation.merge(gen.ledger);
    auto objectives = designer::session_objectives(designer::Condition::proxy_driven, target, &ch, &trees, 3,
                                                   mix_seed(seed, 0x6f626a), &generation);
    if (objectives.size() != 3) return {false, "expected 3 proxy objectives"};

    designer::SessionSettings settings;  // 100 iterations, 3 repetitions, 50*D
    designer::OfflineMutator proposer;
    auto d = designer::discover(designer::Condition::proxy_driven, objectives, settings, proposer, seed);
    const std::size_t before = d.ledger.target_evals() + generation.target_evals();
    if (before != 0) return {false, "target_evals before validation = " + std::to_string(before)};

    auto champions = d.champions();
    auto report = designer::validate(champions, target, designer::ValidationSettings{}, mix_seed(seed, 0x76616c69), &d,
                                     ch.ledger.characterization_evals());
    const double h2 = report.h2_ratio();
    const std::size_t expected = champions.size() * 10 * 50 * target.dim;
    const bool pass = h2 >= 10.0 && report.ledger.target_evals() == expected && champions.size() == 3;
    return {pass, "target_evals before validation=0, after=" + std::to_string(report.ledger.target_evals()) +
                      " (expected " + std::to_string(expected) + "), hypothetical direct=" +
                      std::to_string(d.hypothetical_direct_evals()) + ", H2=" + fmt(h2) +
                      " (need >= 10), H2 incl. characterization=" + fmt(report.h2_ratio_inclusive()) +
                      ", proxy evals=" + std::to_string(report.ledger.proxy_evals() + generation.proxy_evals())};
}

// 8 ------------------------------------------------------------------------
Outcome end_to_end_h1() {
    // Statistical smoke test, not a proof: the proxy-driven champion must
    // match or beat the benchmark-driven champion on >= 7 of 10 master seeds.
    const fs::path root = g_work / "ac8";
    fs::remove_all(root);
    int wins = 0;
    std::ostringstream detail;
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        const std::vector<std::string> base = {"--problem", "mini-bragg", "--seed", std::to_string(seed), "--out",
                                               root.string()};
        auto with = [&](std::vector<std::string> extra) {
            auto args = base;
            args.insert(args.end(), extra.begin(), extra.end());
            return args;
        };
        if (cli(with({"ela"})) || cli(with({"gen-proxies"})) ||
            cli(with({"--condition", "proxy-driven", "discover"})) ||
            cli(with({"--condition", "proxy-driven", "validate"})) ||
            cli(with({"--condition", "benchmark-driven", "discover"})) ||
            cli(with({"--condition", "benchmark-driven", "validate"})))
            return {false, "pipeline failed for seed " + std::to_string(seed)};
        cli::PipelineConfig config;
        config.seed = seed;
        config.out = root;
        cli::Workspace ws(config);
        auto med = [&](const std::string& cond) {
            auto j = json::parse(slurp(ws.file("validation-" + cond, ".json")));
            return j["champions"][0]["median_aocc"].get<double>();
        };
        const double proxy = med("proxy-driven"), bench = med("benchmark-driven");
        wins += proxy >= bench;
        detail << "s" << seed << ":" << fmt(proxy) << (proxy >= bench ? ">=" : "<") << fmt(bench) << " ";
    }
    return {wins >= 7, std::to_string(wins) + "/10 seeds proxy >= benchmark (need >= 7); " + detail.str()};
}

// 9 ------------------------------------------------------------------------
Outcome determinism() {
    const fs::path root = g_work / "ac9";
    fs::remove_all(root);
    cli::PipelineConfig config;
    config.out = root;
    cli::Workspace ws(config);
    const std::vector<std::string> base = {"--out", root.string()};
    const std::vector<std::pair<std::string, std::vector<std::string>>> steps = {
        {"ela", {"ela-" + ws.hash() + ".json"}},
        {"gen-proxies", {"proxies-" + ws.hash() + ".json", "gp-curve-" + ws.hash() + ".csv"}},
        {"discover",
         {"champion-proxy-driven-" + ws.hash() + ".json", "history-proxy-driven-" + ws.hash() + ".jsonl",
          "discovery-proxy-driven-" + ws.hash() + ".json"}},
        {"validate", {"validation-proxy-driven-" + ws.hash() + ".json", "runs-proxy-driven-" + ws.hash() + ".jsonl"}},
    };
    std::map<std::string, std::string> first;
    std::size_t compared = 0;
    std::vector<std::string> differing;
    for (int pass = 0; pass < 2; ++pass) {
        for (const auto& [cmd, files] : steps) {
            auto args = base;
            args.push_back(cmd);
            if (cli(args) != 0) return {false, cmd + " failed"};
            for (const auto& f : files) {
                auto bytes = slurp(ws.dir() / f);
                if (bytes.empty()) return {false, f + " missing or empty"};
                if (pass == 0)
                    first[f] = bytes;
                else {
                    ++compared;
                    if (first[f] != bytes) differing.push_back(f);
                }
            }
        }
        // Convergence traces of the validation runs are primary outputs as well.
        for (const auto& e : fs::directory_iterator(ws.dir() / ("traces-proxy-driven-" + ws.hash()))) {
            const auto key = "traces/" + e.path().filename().string();
            if (pass == 0) {
                first[key] = slurp(e.path());
            } else {
                ++compared;
                if (!first.count(key) || first[key] != slurp(e.path())) differing.push_back(key);
            }
        }
    }
    std::string detail = std::to_string(compared) + " primary outputs (including trace CSVs) compared byte-for-byte, " +
                         std::to_string(differing.size()) + " differ";
    for (const auto& f : differing) detail += " " + f;
    return {differing.empty() && compared > 8, detail};
}

// 10 -----------------------------------------------------------------------
Outcome llm_contract() {
    designer::ProposerRequest request;
    request.task_description = designer::task_description(10, 500);
    request.incumbent_config = algo::default_config();
    request.incumbent_score = 0.3;
    request.schema = algo::algorithm_config_schema();
    auto settings_for = [](const stub::StubServer& s) {
        designer::LlmSettings l;
        l.endpoint = s.endpoint();
        l.timeout = std::chrono::milliseconds(5000);
        return l;
    };
    const auto expected = algo::AlgorithmConfig::from_json(json::parse(stub::valid_reply()));
    std::ostringstream detail;
    bool pass = true;

    {
        stub::StubServer s(stub::Mode::valid);
        s.start();
        bool ok = designer::llm_propose(request, settings_for(s), "k").config == expected;
        pass &= ok;
        detail << "valid=" << (ok ? "parsed" : "WRONG") << ", ";
    }
    {
        stub::StubServer s(stub::Mode::prose);
        s.start();
        bool ok = designer::llm_propose(request, settings_for(s), "k").config == expected;
        pass &= ok;
        detail << "prose=" << (ok ? "extracted" : "WRONG") << ", ";
    }
    {
        stub::StubServer s(stub::Mode::invalid);
        s.start();
        bool ok = false;
        try {
            designer::llm_propose(request, settings_for(s), "k");
        } catch (const MalformedResponse&) {
            ok = true;
        }
        pass &= ok;
        detail << "schema violation=" << (ok ? "MalformedResponse" : "WRONG") << ", ";
    }
    {
        stub::StubServer s(stub::Mode::unavailable);
        s.start();
        designer::LlmProposer proposer(settings_for(s), "k");
        designer::SessionSettings settings;  // 100 iterations
        auto d = designer::discover(designer::Condition::proxy_driven, {problems::make_problem("synthetic:sphere:5", 1)},
                                    settings, proposer, 10);
        std::size_t fallbacks = 0;
        for (const auto& e : d.history) fallbacks += e.proposer.value("fallback", false);
        const bool ok = d.history.size() == 100 && fallbacks == 100 && s.requests() == 400;
        pass &= ok;
        detail << "unavailable: " << d.history.size() << " iterations, " << fallbacks << " offline fallbacks, "
               << s.requests() << " requests (1 + 3 retries each)";
    }
    return {pass, detail.str()};
}

}  // namespace

int main(int argc, char** argv) {
    g_work = fs::temp_directory_path() / "proxyforge-acceptance";
    std::set<int> only;
    for (int i = 1; i < argc; ++i) {
        std::string a = argv[i];
        if (a == "--work-dir" && i + 1 < argc) {
            g_work = argv[++i];
        } else if (a == "--only" && i + 1 < argc) {
            std::stringstream list(argv[++i]);
            for (std::string item; std::getline(list, item, ',');) only.insert(std::stoi(item));
        } else {
            std::cerr << "usage: proxyforge_acceptance [--work-dir DIR] [--only 1,2,...]\n";
            return 2;
        }
    }
    fs::create_directories(g_work);

    const std::vector<Criterion> criteria = {
        {1, "physics oracle", 1, physics_oracle},
        {2, "Wasserstein correctness", 5, wasserstein_correctness},
        {3, "landscape-distance separation", 600, landscape_separation},
        {4, "GP progress", 1800, gp_progress},
        {5, "ELA sanity suite", 60, ela_sanity},
        {6, "optimizer dominance", 120, optimizer_dominance},
        {7, "budget decoupling (H2)", 1200, budget_decoupling},
        {8, "end-to-end directional H1", 7200, end_to_end_h1},
        {9, "determinism", 0, determinism},
        {10, "LLM contract", 0, llm_contract},
    };

    int failed = 0;
    json summary = json::array();
    for (const auto& c : criteria) {
        if (!only.empty() && !only.count(c.id)) continue;
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        const bool in_time = c.limit_s <= 0 || secs < c.limit_s;
        const bool pass = o.pass && in_time;
        failed += !pass;
        std::ostringstream timing;
        timing << std::fixed << std::setprecision(2) << secs << " s";
        if (c.limit_s > 0) timing << " / limit " << c.limit_s << " s" << (in_time ? "" : " EXCEEDED");
        std::cout << "AC" << c.id << " " << (pass ? "PASS" : "FAIL") << "  " << c.name << ": " << o.detail << " ["
                  << timing.str() << "]" << std::endl;
        summary.push_back({{"criterion", c.id}, {"name", c.name}, {"pass", pass}, {"seconds", secs}, {"detail", o.detail}});
    }
    std::ofstream(g_work / "acceptance-summary.json") << summary.dump(2) << "\n";
    std::cout << (failed == 0 ? "all criteria passed" : std::to_string(failed) + " criterion(s) failed") << std::endl;
    return failed == 0 ? 0 : 1;
}
