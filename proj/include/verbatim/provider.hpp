#pragma once

#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <deque>
#include <mutex>
#include <optional>
#include <string>

#include "verbatim/attack.hpp"

namespace verbatim {

struct CompletionParams {
    std::string model;
    double temperature = 0.0;  // 0 = deterministic decoding
    std::size_t max_output_tokens = 2048;
    std::chrono::milliseconds timeout{120000};
};

enum class StopReason { Length, Stop, ContentFilter, Other };

std::string_view stop_reason_name(StopReason r);

struct CompletionResult {
    std::string text;
    StopReason stop_reason = StopReason::Other;
    std::string stop_reason_raw;  // provider's own vocabulary, kept for Other
    std::chrono::microseconds latency{0};
    std::chrono::microseconds first_byte_latency{0};
    std::size_t output_chars = 0;
    std::optional<std::size_t> output_tokens;
    std::string request_id;
    std::int64_t sent_at_ms = 0;
    std::int64_t received_at_ms = 0;

    double chars_per_second() const;
};

// Request pacing shared by every call into one provider: a sliding-window
// rate limit on request starts plus an in-flight cap.
class Throttle {
  public:
    Throttle(unsigned rate_limit, std::chrono::milliseconds window, unsigned max_in_flight);

    class Guard {
      public:
        explicit Guard(Throttle* t) : t_(t) {}
        Guard(Guard&& o) noexcept : t_(o.t_) { o.t_ = nullptr; }
        Guard(const Guard&) = delete;
        Guard& operator=(const Guard&) = delete;
        Guard& operator=(Guard&&) = delete;
        ~Guard();

      private:
        Throttle* t_;
    };

    Guard acquire();

  private:
    friend class Guard;
    void release();

    std::mutex mu_;
    std::condition_variable cv_;
    std::deque<std::chrono::steady_clock::time_point> starts_;
    unsigned rate_limit_;
    std::chrono::milliseconds window_;
    unsigned max_in_flight_;
    unsigned in_flight_ = 0;
};

// Uniform chat-completion client.
class Provider {
  public:
    virtual ~Provider() = default;

    // conv must already be adapted for this provider's constraints.
    virtual CompletionResult complete(const Conversation& conv, const CompletionParams& params) = 0;

    virtual const ProviderConstraints& constraints() const = 0;
    virtual const std::string& name() const = 0;
};

}  // namespace verbatim
