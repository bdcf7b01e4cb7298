#include <iostream>
#include <optional>

#include <CLI11.hpp>

#include "proxyforge/cli/commands.hpp"
#include "proxyforge/errors.hpp"

namespace proxyforge::cli {

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Proxy-driven optimizer design pipeline", "proxyforge"};
    app.require_subcommand(1);

    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> problem;
    std::optional<std::string> condition;
    std::optional<std::string> out_dir;
    bool with_baselines = false;
    app.add_option("--config", config_path, "INI config file")->check(CLI::ExistingFile);
    app.add_option("--seed", seed, "Master seed");
    app.add_option("--problem", problem, "Target problem name");
    app.add_option("--condition", condition, "proxy-driven | benchmark-driven | real-world-direct");
    app.add_flag("--with-baselines", with_baselines, "Also validate RS, DE and LSHADE");
    app.add_option("--out", out_dir, "Output root directory");

    const char* names[] = {"ela", "gen-proxies", "discover", "validate", "baseline", "report"};
    const char* help[] = {"Characterize the target landscape",
                          "Evolve proxy functions",
                          "Run the configuration search",
                          "Validate champions on the target",
                          "Run RS / DE / LSHADE on the target",
                          "Aggregate run records into CSV tables"};
    std::string report_dir;
    for (int i = 0; i < 6; ++i) {
        auto* sub = app.add_subcommand(names[i], help[i]);
        sub->fallthrough();
        if (std::string(names[i]) == "report") sub->add_option("dir", report_dir, "Run directory (default: --out)");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
    const std::string command = app.get_subcommands().front()->get_name();

    PipelineConfig config;
    try {
        if (!config_path.empty()) config = PipelineConfig::load(config_path);
        if (seed) config.seed = *seed;
        if (problem) config.problem = *problem;
        if (out_dir) config.out = *out_dir;
        if (condition) {
            try {
                config.condition = designer::condition_from_string(*condition);
            } catch (const std::invalid_argument& e) {
                throw ConfigError(e.what());
            }
        }
        if (with_baselines) config.with_baselines = true;
        config.validate();
    } catch (const ConfigError& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }

    try {
        if (command == "ela") cmd_ela(config, out, err);
        else if (command == "gen-proxies") cmd_gen_proxies(config, out, err);
        else if (command == "discover") cmd_discover(config, out, err);
        else if (command == "validate") cmd_validate(config, out, err);
        else if (command == "baseline") cmd_baseline(config, out, err);
        else cmd_report(report_dir.empty() ? config.out : std::filesystem::path(report_dir), out, err);
    } catch (const ConfigError& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    } catch (const InvalidConfig& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    } catch (const UnknownProblem& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}

}  // namespace proxyforge::cli
