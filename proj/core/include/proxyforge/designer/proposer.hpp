#pragma once

#include <chrono>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "proxyforge/algo/config.hpp"
#include "proxyforge/random.hpp"

namespace proxyforge::designer {

/// One iteration of a discovery session.
struct HistoryEntry {
    std::size_t iteration = 0;
    algo::AlgorithmConfig config;
    double score = 0.0;
    bool accepted = false;
    double incumbent_score = 0.0;  // after this iteration
    nlohmann::json proposer = nlohmann::json::object();

    nlohmann::json to_json() const;
    static HistoryEntry from_json(const nlohmann::json& j);
};

struct ProposerRequest {
    std::string task_description;
    algo::AlgorithmConfig incumbent_config;
    double incumbent_score = 0.0;
    std::vector<HistoryEntry> recent_history;  // at most the last 5
    nlohmann::json schema;

    nlohmann::json to_json() const;
};

struct ProposerResponse {
    algo::AlgorithmConfig config;
    std::string rationale;
};

inline constexpr std::size_t kRecentHistory = 5;

/// Task text sent to language-model proposers for a problem of dimension dim.
std::string task_description(std::size_t dim, std::size_t inner_budget);

class Proposer {
public:
    virtual ~Proposer() = default;
    virtual std::string name() const = 0;
    /// Throws ProposerUnavailable or MalformedResponse on failure.
    virtual ProposerResponse propose(const ProposerRequest& request, RandomStream& rng) = 0;
};

/// Offline proposer: mutate_config with a large step with probability p_large.
class OfflineMutator : public Proposer {
public:
    explicit OfflineMutator(double p_large = 0.2) : p_large_(p_large) {}
    std::string name() const override { return "offline"; }
    ProposerResponse propose(const ProposerRequest& request, RandomStream& rng) override;

private:
    double p_large_;
};

/// Always proposes the incumbent.
class IdentityProposer : public Proposer {
public:
    std::string name() const override { return "identity"; }
    ProposerResponse propose(const ProposerRequest& request, RandomStream& rng) override;
};

struct LlmSettings {
    std::string endpoint = "http://127.0.0.1:8765/v1/chat/completions";
    std::string model = "gpt-4o";
    std::chrono::milliseconds timeout{30000};
    /// Further attempts after a failed one.
    std::size_t retries = 3;
    std::string credential_env = "PROXYFORGE_LLM_KEY";
};

/// First syntactically valid JSON object embedded in text, if any.
std::optional<nlohmann::json> extract_first_json_object(std::string_view text);

/// Parses a model reply into a response. The JSON object may be the config
/// itself or {"config": {...}, "rationale": "..."}. Throws MalformedResponse.
ProposerResponse parse_reply(std::string_view content);

/// Single chat-completion request. Throws ProposerUnavailable on transport
/// or authentication failure and MalformedResponse on unusable replies.
ProposerResponse llm_propose(const ProposerRequest& request, const LlmSettings& settings,
                             const std::string& credentials);

/// Proposer backed by llm_propose; retries `settings.retries` times before
/// rethrowing the last error. Credentials come from the configured
/// environment variable at construction.
class LlmProposer : public Proposer {
public:
    explicit LlmProposer(LlmSettings settings);
    LlmProposer(LlmSettings settings, std::string credentials);
    std::string name() const override { return "llm"; }
    ProposerResponse propose(const ProposerRequest& request, RandomStream& rng) override;
    std::size_t attempts_made() const { return attempts_; }

private:
    LlmSettings settings_;
    std::string credentials_;
    std::size_t attempts_ = 0;
};

}  // namespace proxyforge::designer
