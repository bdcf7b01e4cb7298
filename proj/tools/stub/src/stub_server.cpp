#include "proxyforge/stub/stub_server.hpp"

#include <stdexcept>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "proxyforge/algo/config.hpp"

namespace proxyforge::stub {

namespace {

nlohmann::json proposal() {
    algo::AlgorithmConfig c = algo::default_config();
    c.family = algo::Family::DE;
    c.mutation = algo::Mutation::current_to_pbest;
    c.pbest = 0.1;
    c.population_size = 12;
    c.F.reset();
    c.CR.reset();
    c.archive = true;
    return c.to_json();
}

std::string content_for(Mode mode) {
    switch (mode) {
        case Mode::valid:
            return valid_reply();
        case Mode::prose:
            return "Adaptive parameters should help on this landscape.\n\n```json\n" +
                   nlohmann::json{{"config", proposal()}, {"rationale", "adaptive pbest search"}}.dump(2) +
                   "\n```\n\nLet me know how it scores.";
        case Mode::invalid: {
            auto c = proposal();
            c["family"] = "CMAES";
            return c.dump();
        }
        case Mode::unavailable:
            break;
    }
    return {};
}

}  // namespace

Mode mode_from_string(std::string_view name) {
    if (name == "valid") return Mode::valid;
    if (name == "prose") return Mode::prose;
    if (name == "invalid") return Mode::invalid;
    if (name == "unavailable") return Mode::unavailable;
    throw std::invalid_argument("unknown stub mode: " + std::string(name));
}

std::string valid_reply() { return proposal().dump(); }

struct StubServer::Impl {
    httplib::Server server;
};

StubServer::StubServer(Mode mode, std::string api_key)
    : impl_(std::make_unique<Impl>()), mode_(mode), api_key_(std::move(api_key)) {}

StubServer::~StubServer() { stop(); }

int StubServer::start(int port) {
    impl_->server.Post("/v1/chat/completions", [this](const httplib::Request& req, httplib::Response& res) {
        ++requests_;
        if (!api_key_.empty() && req.get_header_value("Authorization") != "Bearer " + api_key_) {
            res.status = 401;
            res.set_content(R"({"error":"unauthorized"})", "application/json");
            return;
        }
        if (mode_ == Mode::unavailable) {
            res.status = 503;
            res.set_content(R"({"error":"unavailable"})", "application/json");
            return;
        }
        nlohmann::json body;
        try {
            body = nlohmann::json::parse(req.body);
        } catch (const nlohmann::json::exception&) {
            res.status = 400;
            return;
        }
        const nlohmann::json reply = {
            {"model", body.value("model", std::string{"stub"})},
            {"choices", {{{"index", 0}, {"message", {{"role", "assistant"}, {"content", content_for(mode_)}}}}}}};
        res.set_content(reply.dump(), "application/json");
    });
    port_ = port == 0 ? impl_->server.bind_to_any_port("127.0.0.1") : port;
    if (port != 0 && !impl_->server.bind_to_port("127.0.0.1", port)) port_ = -1;
    if (port_ < 0) throw std::runtime_error("stub server: cannot bind");
    thread_ = std::thread([this] { impl_->server.listen_after_bind(); });
    impl_->server.wait_until_ready();
    return port_;
}

void StubServer::stop() {
    if (thread_.joinable()) {
        impl_->server.stop();
        thread_.join();
    }
}

std::string StubServer::endpoint() const {
    return "http://127.0.0.1:" + std::to_string(port_) + "/v1/chat/completions";
}

}  // namespace proxyforge::stub
