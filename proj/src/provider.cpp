#include "verbatim/provider.hpp"

namespace verbatim {

std::string_view stop_reason_name(StopReason r) {
    switch (r) {
        case StopReason::Length: return "length";
        case StopReason::Stop: return "stop";
        case StopReason::ContentFilter: return "content_filter";
        case StopReason::Other: return "other";
    }
    return "other";
}

double CompletionResult::chars_per_second() const {
    const double seconds = static_cast<double>(latency.count()) / 1e6;
    if (seconds <= 0.0) return 0.0;
    return static_cast<double>(output_chars) / seconds;
}

Throttle::Throttle(unsigned rate_limit, std::chrono::milliseconds window, unsigned max_in_flight)
    : rate_limit_(rate_limit == 0 ? 1 : rate_limit),
      window_(window),
      max_in_flight_(max_in_flight == 0 ? 1 : max_in_flight) {}

Throttle::Guard Throttle::acquire() {
    std::unique_lock lock(mu_);
    while (true) {
        const auto now = std::chrono::steady_clock::now();
        while (!starts_.empty() && now - starts_.front() >= window_) starts_.pop_front();
        if (in_flight_ < max_in_flight_ && starts_.size() < rate_limit_) {
            starts_.push_back(now);
            ++in_flight_;
            return Guard(this);
        }
        if (in_flight_ >= max_in_flight_) {
            cv_.wait(lock);
        } else {
            cv_.wait_until(lock, starts_.front() + window_);
        }
    }
}

Throttle::Guard::~Guard() {
    if (t_ != nullptr) t_->release();
}

void Throttle::release() {
    {
        std::lock_guard lock(mu_);
        --in_flight_;
    }
    cv_.notify_all();
}

}  // namespace verbatim
