#pragma once

#include <atomic>
#include <memory>
#include <string>
#include <string_view>
#include <thread>

namespace proxyforge::stub {

/// What the stub answers to every chat-completion request.
enum class Mode {
    valid,        // a bare JSON config
    prose,        // a config wrapped in prose and a fenced block
    invalid,      // JSON with an unknown family
    unavailable,  // HTTP 503
};

Mode mode_from_string(std::string_view name);

/// Reply content the stub sends in valid mode.
std::string valid_reply();

/// Loopback chat-completion server speaking the same wire format as the
/// LLM client. When `api_key` is non-empty, requests without the matching
/// bearer token get HTTP 401.
class StubServer {
public:
    explicit StubServer(Mode mode, std::string api_key = "");
    ~StubServer();
    StubServer(const StubServer&) = delete;
    StubServer& operator=(const StubServer&) = delete;

    /// Binds to 127.0.0.1 (port 0 picks a free port) and serves on a
    /// background thread. Returns the bound port.
    int start(int port = 0);
    void stop();

    std::string endpoint() const;
    std::size_t requests() const { return requests_.load(); }

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
    Mode mode_;
    std::string api_key_;
    int port_ = -1;
    std::thread thread_;
    std::atomic<std::size_t> requests_{0};
};

}  // namespace proxyforge::stub
