#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "proxyforge/cli/pipeline_config.hpp"

namespace proxyforge::cli {

/// Output directory of one configuration: `<out>/<problem>-<hash>/`.
///
/// Every artifact name carries the config hash. manifest.json lists the
/// artifacts with the command that produced them; run.log collects
/// timestamped messages and is the only file whose bytes vary between
/// identical invocations.
class Workspace {
public:
    explicit Workspace(const PipelineConfig& config);

    const std::filesystem::path& dir() const { return dir_; }
    const std::string& hash() const { return hash_; }

    /// dir / "<stem>-<hash><extension>"
    std::filesystem::path file(const std::string& stem, const std::string& extension) const;

    void record(const std::filesystem::path& artifact, const std::string& command) const;
    void log(const std::string& command, const std::string& message) const;

private:
    std::filesystem::path dir_;
    std::string hash_;
};

void write_text(const std::filesystem::path& path, const std::string& text);
std::string read_text(const std::filesystem::path& path);

/// Characterizes the target and the synthetic pool.
void cmd_ela(const PipelineConfig& config, std::ostream& out, std::ostream& err);
/// Evolves proxies against the stored characterization.
void cmd_gen_proxies(const PipelineConfig& config, std::ostream& out, std::ostream& err);
/// Runs the discovery session(s) for config.condition.
void cmd_discover(const PipelineConfig& config, std::ostream& out, std::ostream& err);
/// Validates the champions of config.condition on the target.
void cmd_validate(const PipelineConfig& config, std::ostream& out, std::ostream& err);
/// RS / DE / LSHADE on the target.
void cmd_baseline(const PipelineConfig& config, std::ostream& out, std::ostream& err);
/// Aggregates every record below `dir` into summary-aocc.csv and
/// wasserstein-table.csv inside `dir`.
void cmd_report(const std::filesystem::path& dir, std::ostream& out, std::ostream& err);

/// Entry point shared by the executable and the tests. Returns 0 on
/// success, 1 on usage or config errors and 2 on runtime failures.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace proxyforge::cli
