#pragma once

#include <atomic>
#include <memory>
#include <unordered_map>

#include "verbatim/corpus.hpp"
#include "verbatim/provider.hpp"

namespace verbatim {

enum class MemorizationMode { Verbatim, Noisy, Paraphrase, Ignorant };

std::string_view memorization_mode_name(MemorizationMode m);
std::optional<MemorizationMode> memorization_mode_from_name(std::string_view name);

struct ArticleBehavior {
    MemorizationMode mode = MemorizationMode::Verbatim;
    double noise_p = 0.0;  // per-character corruption probability, Noisy only
};

// Full description of how the mock responds. All sampling is derived from
// (seed, model, conversation digest), so a run is a pure function of its
// configuration regardless of scheduling, and replays are byte-identical.
struct MockBehavior {
    ArticleBehavior default_behavior;
    std::unordered_map<std::string, ArticleBehavior> per_article;  // by article id

    // One uniform draw per request: filter first, then refusal, so the
    // measured rates match these probabilities exactly in expectation.
    double refusal_prob = 0.0;
    double filter_prob = 0.0;
    double transport_error_prob = 0.0;

    // When false, a filtered response keeps stop_reason "stop" and is only
    // observable through its throttled speed (exercises the timing path).
    bool filter_sets_stop_reason = true;

    double base_cps_mean = 100.0;
    double base_cps_std = 5.0;
    double filtered_cps_mean = 20.0;
    double filtered_cps_std = 2.0;

    unsigned chars_per_token = 4;
    std::uint64_t seed = 0;
    unsigned transport_attempts = 3;

    void validate() const;  // throws InvalidBehavior
};

class MockProvider final : public Provider {
  public:
    MockProvider(std::string name, MockBehavior behavior);

    void set_corpus(const Corpus& corpus);
    void add_article(std::string id, std::string title, std::string body);
    void set_constraints(ProviderConstraints constraints);

    CompletionResult complete(const Conversation& conv, const CompletionParams& params) override;
    const ProviderConstraints& constraints() const override;
    const std::string& name() const override;

    const MockBehavior& behavior() const { return behavior_; }

    // Peak number of concurrent complete() calls, for concurrency tests.
    unsigned max_observed_in_flight() const { return max_in_flight_seen_; }

    static constexpr const char* kRefusalText = "I'm sorry, as an AI, I can not do this...";

  private:
    struct StoredArticle {
        std::string title;
        std::string body;
    };

    const StoredArticle* resolve_article(const Conversation& conv) const;

    std::string name_;
    MockBehavior behavior_;
    ProviderConstraints constraints_;
    std::unordered_map<std::string, StoredArticle> by_id_;
    std::unordered_map<std::string, std::string> id_by_title_;
    std::atomic<unsigned> in_flight_{0};
    std::atomic<unsigned> max_in_flight_seen_{0};
};

// Builds a configured mock provider handle. Throws InvalidBehavior.
std::shared_ptr<MockProvider> mock_configure(MockBehavior behavior,
                                             const Corpus* corpus = nullptr,
                                             std::string name = "mock");

}  // namespace verbatim
