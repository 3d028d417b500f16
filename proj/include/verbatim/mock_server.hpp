#pragma once

#include <memory>
#include <thread>

#include "verbatim/mock_provider.hpp"

namespace verbatim {

// Serves a MockProvider over local HTTP speaking the OpenAI-style dialect,
// so wire clients can be exercised end to end without a real provider.
class MockHttpServer {
  public:
    explicit MockHttpServer(std::shared_ptr<MockProvider> provider);
    ~MockHttpServer();

    MockHttpServer(const MockHttpServer&) = delete;
    MockHttpServer& operator=(const MockHttpServer&) = delete;

    // Binds 127.0.0.1 on an ephemeral port and serves until stop().
    void start();
    void stop();

    int port() const { return port_; }
    std::string base_url() const { return "http://127.0.0.1:" + std::to_string(port_); }

  private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
    std::shared_ptr<MockProvider> provider_;
    std::thread thread_;
    int port_ = 0;
};

}  // namespace verbatim
