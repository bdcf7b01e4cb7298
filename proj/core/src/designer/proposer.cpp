#include "proxyforge/designer/proposer.hpp"

#include <cstdlib>
#include <sstream>

#include "proxyforge/errors.hpp"

namespace proxyforge::designer {

nlohmann::json HistoryEntry::to_json() const {
    return {{"iteration", iteration}, {"config", config.to_json()},       {"score", score},
            {"accepted", accepted},   {"incumbent_score", incumbent_score}, {"proposer", proposer}};
}

HistoryEntry HistoryEntry::from_json(const nlohmann::json& j) {
    HistoryEntry e;
    e.iteration = j.at("iteration").get<std::size_t>();
    e.config = algo::AlgorithmConfig::from_json(j.at("config"));
    e.score = j.at("score").get<double>();
    e.accepted = j.at("accepted").get<bool>();
    e.incumbent_score = j.at("incumbent_score").get<double>();
    e.proposer = j.value("proposer", nlohmann::json::object());
    return e;
}

nlohmann::json ProposerRequest::to_json() const {
    nlohmann::json history = nlohmann::json::array();
    for (const auto& e : recent_history)
        history.push_back({{"iteration", e.iteration}, {"config", e.config.to_json()}, {"score", e.score}});
    return {{"task_description", task_description},
            {"incumbent_config", incumbent_config.to_json()},
            {"incumbent_score", incumbent_score},
            {"recent_history", history},
            {"schema", schema}};
}

std::string task_description(std::size_t dim, std::size_t inner_budget) {
    std::ostringstream out;
    out << "You are tuning a population-based optimizer for a family of box-constrained, minimization "
           "problems of dimension "
        << dim << ". Each run may call the objective at most " << inner_budget
        << " times. Candidates are scored by the mean area over the convergence curve (AOCC, in [0, 1], "
           "higher is better) on cheap stand-in functions that resemble the real problem. "
           "Propose one new configuration that you expect to score higher than the incumbent. "
           "Reply with a single JSON object {\"config\": <AlgorithmConfig>, \"rationale\": \"<one line>\"}; "
           "the config must satisfy the JSON schema given in the request.";
    return out.str();
}

ProposerResponse OfflineMutator::propose(const ProposerRequest& request, RandomStream& rng) {
    const auto step = rng.bernoulli(p_large_) ? algo::Step::large : algo::Step::small;
    return {algo::mutate_config(request.incumbent_config, rng, step),
            step == algo::Step::large ? "large mutation" : "small mutation"};
}

ProposerResponse IdentityProposer::propose(const ProposerRequest& request, RandomStream&) {
    return {request.incumbent_config, "identity"};
}

std::optional<nlohmann::json> extract_first_json_object(std::string_view text) {
    for (std::size_t start = text.find('{'); start != std::string_view::npos; start = text.find('{', start + 1)) {
        // Find the brace that closes this one, skipping string contents.
        int depth = 0;
        bool in_string = false;
        bool escaped = false;
        for (std::size_t i = start; i < text.size(); ++i) {
            const char ch = text[i];
            if (in_string) {
                if (escaped)
                    escaped = false;
                else if (ch == '\\')
                    escaped = true;
                else if (ch == '"')
                    in_string = false;
                continue;
            }
            if (ch == '"') {
                in_string = true;
            } else if (ch == '{') {
                ++depth;
            } else if (ch == '}' && --depth == 0) {
                auto parsed = nlohmann::json::parse(text.substr(start, i - start + 1), nullptr, false);
                if (!parsed.is_discarded() && parsed.is_object()) return parsed;
                break;
            }
        }
    }
    return std::nullopt;
}

ProposerResponse parse_reply(std::string_view content) {
    auto object = extract_first_json_object(content);
    if (!object) throw MalformedResponse("reply contains no JSON object");
    const nlohmann::json* config = &*object;
    std::string rationale;
    if (object->contains("config")) {
        config = &object->at("config");
        if (object->contains("rationale") && object->at("rationale").is_string())
            rationale = object->at("rationale").get<std::string>();
    }
    try {
        return {algo::AlgorithmConfig::from_json(*config, true), rationale};
    } catch (const InvalidConfig& e) {
        throw MalformedResponse(std::string("config violates the schema: ") + e.what());
    }
}

LlmProposer::LlmProposer(LlmSettings settings) : settings_(std::move(settings)) {
    if (const char* key = std::getenv(settings_.credential_env.c_str())) credentials_ = key;
}

LlmProposer::LlmProposer(LlmSettings settings, std::string credentials)
    : settings_(std::move(settings)), credentials_(std::move(credentials)) {}

ProposerResponse LlmProposer::propose(const ProposerRequest& request, RandomStream&) {
    for (std::size_t attempt = 0;; ++attempt) {
        ++attempts_;
        try {
            return llm_propose(request, settings_, credentials_);
        } catch (const ProposerError&) {
            if (attempt >= settings_.retries) throw;
        }
    }
}

}  // namespace proxyforge::designer
