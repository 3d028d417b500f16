#pragma once

#include <memory>
#include <vector>

#include "verbatim/provider.hpp"

namespace verbatim {

// Wire dialects for the JSON chat-completion request/response bodies.
enum class Dialect { OpenAI, Anthropic };

struct RetryPolicy {
    unsigned attempts = 3;
    std::vector<std::chrono::milliseconds> backoff{std::chrono::milliseconds(1000),
                                                   std::chrono::milliseconds(4000),
                                                   std::chrono::milliseconds(16000)};

    std::chrono::milliseconds delay(unsigned attempt) const {
        if (backoff.empty()) return std::chrono::milliseconds(0);
        return backoff[std::min<std::size_t>(attempt, backoff.size() - 1)];
    }
};

struct HttpProviderConfig {
    std::string name;
    Dialect dialect = Dialect::OpenAI;
    std::string base_url;     // e.g. "https://api.openai.com" or "http://127.0.0.1:8089"
    std::string path;         // empty = dialect default
    std::string api_key_env;  // credential comes from this environment variable
    ProviderConstraints constraints;
    RetryPolicy retry;
};

// Chat-completion client over a provider HTTP API. Transient transport
// errors, 429 and 5xx are retried with the configured backoff; auth
// failures, malformed bodies and content-filter stops are terminal.
// Latency is wall clock from request send to the final byte; the first
// byte is timestamped separately for diagnostics.
class HttpProvider final : public Provider {
  public:
    explicit HttpProvider(HttpProviderConfig config);

    CompletionResult complete(const Conversation& conv, const CompletionParams& params) override;
    const ProviderConstraints& constraints() const override;
    const std::string& name() const override;

    // Request body encoding per dialect; exposed for tests.
    static std::string encode_request(Dialect dialect, const Conversation& conv,
                                      const CompletionParams& params,
                                      const ProviderConstraints& constraints);
    static CompletionResult parse_response(Dialect dialect, const std::string& body,
                                           const std::string& request_id);

  private:
    HttpProviderConfig config_;
    Throttle throttle_;
};

}  // namespace verbatim
