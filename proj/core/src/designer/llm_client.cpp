#include <httplib.h>

#include "proxyforge/designer/proposer.hpp"
#include "proxyforge/errors.hpp"

namespace proxyforge::designer {

namespace {

struct Endpoint {
    std::string origin;  // scheme://host[:port]
    std::string path;
};

Endpoint split_endpoint(const std::string& url) {
    const auto scheme_end = url.find("://");
    if (scheme_end == std::string::npos) throw ProposerUnavailable("endpoint must start with http:// or https://");
    const auto path_start = url.find('/', scheme_end + 3);
    if (path_start == std::string::npos) return {url, "/"};
    return {url.substr(0, path_start), url.substr(path_start)};
}

}  // namespace

ProposerResponse llm_propose(const ProposerRequest& request, const LlmSettings& settings,
                             const std::string& credentials) {
    if (credentials.empty())
        throw ProposerUnavailable("no credentials: environment variable " + settings.credential_env + " is empty");
    const Endpoint endpoint = split_endpoint(settings.endpoint);

    nlohmann::json payload = request.to_json();
    const std::string task = payload["task_description"].get<std::string>();
    payload.erase("task_description");
    const nlohmann::json body = {{"model", settings.model},
                                 {"messages",
                                  {{{"role", "system"}, {"content", task}},
                                   {{"role", "user"}, {"content", payload.dump()}}}}};

    httplib::Client client(endpoint.origin);
    const auto secs = std::chrono::duration_cast<std::chrono::seconds>(settings.timeout);
    const auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(settings.timeout - secs);
    client.set_connection_timeout(secs.count(), usecs.count());
    client.set_read_timeout(secs.count(), usecs.count());
    client.set_write_timeout(secs.count(), usecs.count());
    httplib::Headers headers{{"Authorization", "Bearer " + credentials}};

    auto result = client.Post(endpoint.path, headers, body.dump(), "application/json");
    if (!result) throw ProposerUnavailable("request failed: " + httplib::to_string(result.error()));
    if (result->status != 200)
        throw ProposerUnavailable("endpoint answered HTTP " + std::to_string(result->status));

    auto reply = nlohmann::json::parse(result->body, nullptr, false);
    if (reply.is_discarded()) throw MalformedResponse("reply body is not JSON");
    std::string content;
    try {
        content = reply.at("choices").at(0).at("message").at("content").get<std::string>();
    } catch (const nlohmann::json::exception&) {
        throw MalformedResponse("reply has no choices[0].message.content");
    }
    return parse_reply(content);
}

}  // namespace proxyforge::designer
