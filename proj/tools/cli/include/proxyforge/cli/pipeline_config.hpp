#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>

#include "proxyforge/aocc.hpp"
#include "proxyforge/designer/pipeline.hpp"
#include "proxyforge/designer/proposer.hpp"
#include "proxyforge/designer/session.hpp"
#include "proxyforge/designer/validation.hpp"
#include "proxyforge/gp/evolve.hpp"

namespace proxyforge::cli {

/// Bad config file, bad flag value or unknown name. Maps to exit code 1.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct PipelineConfig {
    std::string problem = "mini-bragg";
    std::uint64_t seed = 1;
    std::filesystem::path out = "runs";
    std::size_t budget_multiplier = 50;

    designer::ElaSettings ela;
    gp::GpParams gp;

    designer::Condition condition = designer::Condition::proxy_driven;
    std::size_t iterations = 100;
    std::size_t repetitions = 3;
    std::size_t sessions = 1;
    std::string proposer = "offline";
    designer::LlmSettings llm;

    std::size_t validation_runs = 10;
    bool with_baselines = false;

    AoccSettings aocc;

    /// Reads an INI file on top of the defaults. Unknown sections or keys
    /// and unparsable values throw ConfigError.
    static PipelineConfig load(const std::filesystem::path& path);
    static PipelineConfig parse(const std::string& ini_text);

    /// Throws ConfigError on out-of-range values or unknown names.
    void validate() const;

    /// Canonical INI text of every setting, in a fixed order.
    std::string to_ini() const;
    /// The canonical text the hash is computed from.
    std::string hashed_ini() const;

    /// First 12 hex digits of the SHA-256 of the canonical text without the
    /// output directory, the condition and the baseline switch (those
    /// appear in file names instead).
    std::string hash() const;

    designer::SessionSettings session_settings() const;
    designer::ValidationSettings validation_settings() const;
};

/// SHA-256 of the bytes as lowercase hex.
std::string sha256_hex(const std::string& bytes);

}  // namespace proxyforge::cli
