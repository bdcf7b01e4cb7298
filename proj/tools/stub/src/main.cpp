#include <csignal>
#include <cstdlib>
#include <iostream>
#include <thread>

#include <CLI11.hpp>

#include "proxyforge/stub/stub_server.hpp"

namespace {
volatile std::sig_atomic_t stop_requested = 0;
}

int main(int argc, char** argv) {
    CLI::App app{"Stub chat-completion server for offline tests", "proxyforge_stub_llm"};
    std::string mode = "valid";
    int port = 8765;
    std::string api_key;
    app.add_option("--mode", mode, "valid | prose | invalid | unavailable");
    app.add_option("--port", port, "Port on 127.0.0.1 (0 picks a free one)");
    app.add_option("--api-key", api_key, "Required bearer token (empty accepts any)");
    CLI11_PARSE(app, argc, argv);

    try {
        proxyforge::stub::StubServer server(proxyforge::stub::mode_from_string(mode), api_key);
        server.start(port);
        std::cout << server.endpoint() << std::endl;
        std::signal(SIGINT, [](int) { stop_requested = 1; });
        std::signal(SIGTERM, [](int) { stop_requested = 1; });
        while (!stop_requested) std::this_thread::sleep_for(std::chrono::milliseconds(100));
        server.stop();
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
