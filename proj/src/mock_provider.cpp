#include "verbatim/mock_provider.hpp"

#include <algorithm>
#include <cmath>

#include "verbatim/errors.hpp"
#include "verbatim/unicode.hpp"
#include "verbatim/util.hpp"

namespace verbatim {

namespace {

// splitmix64: stateless-friendly generator so every draw is a pure
// function of the seed chain.
struct Rng {
    std::uint64_t state;

    explicit Rng(std::uint64_t seed) : state(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state += 0x9E3779B97F4A7C15ull);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    double normal(double mean, double std) {
        const double u1 = std::max(uniform(), 1e-12);
        const double u2 = uniform();
        return mean + std * std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
    }
};

constexpr std::int64_t kMockEpochMs = 1735689600000;  // 2025-01-01T00:00:00Z

const char* kFillerWords[] = {"indeed",  "reportedly", "notably",    "essentially",
                              "broadly", "apparently", "supposedly", "evidently"};

const char* kBabbleWords[] = {"zephyr", "quartz", "lattice", "meadow", "cobalt", "drizzle",
                              "harbor", "velvet", "ember",   "willow", "prism",  "fable",
                              "onyx",   "tundra", "saffron", "glade"};

std::string babble(Rng& rng, std::size_t approx_chars) {
    std::string out;
    while (out.size() < approx_chars) {
        if (!out.empty()) out += ' ';
        out += kBabbleWords[rng.next() % std::size(kBabbleWords)];
    }
    return out;
}

// First n whitespace-separated words, re-joined with double spaces: keeps
// the word n-gram intact while capping character-level common runs at
// roughly one word.
std::string double_spaced_head(std::string_view text, std::size_t n_words) {
    std::string out;
    std::size_t i = 0, words = 0;
    while (i < text.size() && words < n_words) {
        while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
        std::size_t start = i;
        while (i < text.size() && !std::isspace(static_cast<unsigned char>(text[i]))) ++i;
        if (i == start) break;
        if (!out.empty()) out += "  ";
        out += std::string(text.substr(start, i - start));
        ++words;
    }
    return out;
}

std::string truncate_to_chars(std::string_view text, std::size_t max_chars, bool& truncated) {
    const std::size_t total = uni::char_count(text);
    if (total <= max_chars) {
        truncated = false;
        return std::string(text);
    }
    truncated = true;
    return std::string(text.substr(0, uni::byte_offset_of_char(text, max_chars)));
}

}  // namespace

std::string_view memorization_mode_name(MemorizationMode m) {
    switch (m) {
        case MemorizationMode::Verbatim: return "verbatim";
        case MemorizationMode::Noisy: return "noisy";
        case MemorizationMode::Paraphrase: return "paraphrase";
        case MemorizationMode::Ignorant: return "ignorant";
    }
    return "unknown";
}

std::optional<MemorizationMode> memorization_mode_from_name(std::string_view name) {
    if (name == "verbatim") return MemorizationMode::Verbatim;
    if (name == "noisy") return MemorizationMode::Noisy;
    if (name == "paraphrase") return MemorizationMode::Paraphrase;
    if (name == "ignorant") return MemorizationMode::Ignorant;
    return std::nullopt;
}

void MockBehavior::validate() const {
    const auto check_prob = [](double p, const char* what) {
        if (p < 0.0 || p > 1.0) {
            throw InvalidBehavior(std::string(what) + " must be within [0, 1], got " +
                                  std::to_string(p));
        }
    };
    check_prob(refusal_prob, "refusal_prob");
    check_prob(filter_prob, "filter_prob");
    check_prob(transport_error_prob, "transport_error_prob");
    check_prob(default_behavior.noise_p, "noise_p");
    for (const auto& [id, b] : per_article) check_prob(b.noise_p, "noise_p");
    if (refusal_prob + filter_prob > 1.0) {
        throw InvalidBehavior("refusal_prob + filter_prob must not exceed 1");
    }
    if (base_cps_mean <= 0.0 || filtered_cps_mean <= 0.0) {
        throw InvalidBehavior("chars-per-second means must be positive");
    }
    if (base_cps_std < 0.0 || filtered_cps_std < 0.0) {
        throw InvalidBehavior("chars-per-second deviations must be non-negative");
    }
    if (chars_per_token == 0) throw InvalidBehavior("chars_per_token must be >= 1");
}

MockProvider::MockProvider(std::string name, MockBehavior behavior)
    : name_(std::move(name)), behavior_(std::move(behavior)) {
    behavior_.validate();
    constraints_.user_first = false;
    constraints_.supports_system_role = true;
    constraints_.rate_limit = 100000;
    constraints_.rate_window = std::chrono::milliseconds(1000);
    constraints_.max_in_flight = 1024;
}

void MockProvider::set_corpus(const Corpus& corpus) {
    for (const auto& a : corpus.articles()) add_article(a.id, a.title, a.body);
}

void MockProvider::add_article(std::string id, std::string title, std::string body) {
    id_by_title_[title] = id;
    by_id_[std::move(id)] = StoredArticle{std::move(title), std::move(body)};
}

void MockProvider::set_constraints(ProviderConstraints constraints) {
    constraints_ = constraints;
}

const ProviderConstraints& MockProvider::constraints() const { return constraints_; }
const std::string& MockProvider::name() const { return name_; }

const MockProvider::StoredArticle* MockProvider::resolve_article(const Conversation& conv) const {
    if (!conv.article_id.empty()) {
        auto it = by_id_.find(conv.article_id);
        if (it != by_id_.end()) return &it->second;
    }
    for (const auto& m : conv.messages) {
        if (m.role != Role::System) continue;
        for (const auto& [title, id] : id_by_title_) {
            if (m.content.find(title) != std::string::npos) return &by_id_.at(id);
        }
    }
    return nullptr;
}

CompletionResult MockProvider::complete(const Conversation& conv,
                                        const CompletionParams& params) {
    const unsigned current = in_flight_.fetch_add(1) + 1;
    unsigned seen = max_in_flight_seen_.load();
    while (current > seen && !max_in_flight_seen_.compare_exchange_weak(seen, current)) {
    }
    struct InFlight {
        std::atomic<unsigned>* counter;
        ~InFlight() { counter->fetch_sub(1); }
    } in_flight_guard{&in_flight_};

    const std::uint64_t cell_seed =
        fnv1a64(params.model, behavior_.seed ^ 0x6D6F636Bull) ^ conv.digest();
    const std::string request_id = "mock-" + to_hex(cell_seed);

    // Transport failures are sampled per attempt so a retrying caller sees
    // the same final outcome as an uninterrupted one.
    if (behavior_.transport_error_prob > 0.0) {
        bool delivered = false;
        for (unsigned attempt = 0; attempt < std::max(1u, behavior_.transport_attempts);
             ++attempt) {
            Rng attempt_rng(cell_seed ^ (0xA77E397ull + attempt));
            if (attempt_rng.uniform() >= behavior_.transport_error_prob) {
                delivered = true;
                break;
            }
        }
        if (!delivered) {
            throw Timeout("mock transport failure after " +
                              std::to_string(behavior_.transport_attempts) + " attempts",
                          request_id);
        }
    }

    const std::size_t max_chars = params.max_output_tokens * behavior_.chars_per_token;

    // Probe request: echo the quoted candidate back.
    const Message* first_user = nullptr;
    for (const auto& m : conv.messages) {
        if (m.role == Role::User) {
            first_user = &m;
            break;
        }
    }
    const bool is_probe =
        first_user != nullptr && first_user->content.rfind("Repeat after me:", 0) == 0;

    CompletionResult result;
    result.request_id = request_id;
    result.sent_at_ms = kMockEpochMs + static_cast<std::int64_t>(cell_seed % 86400000ull);

    Rng rng(cell_seed);
    std::string text;
    double cps;
    StopReason stop = StopReason::Stop;
    std::string stop_raw = "stop";

    if (is_probe) {
        std::string_view content = first_user->content;
        std::string_view candidate = content.substr(16);
        const auto q0 = content.find('"');
        const auto q1 = content.rfind('"');
        if (q0 != std::string_view::npos && q1 != std::string_view::npos && q1 > q0) {
            candidate = content.substr(q0 + 1, q1 - q0 - 1);
        }
        const bool filtered = rng.uniform() < behavior_.filter_prob;
        if (filtered && behavior_.filter_sets_stop_reason) {
            text.clear();
            stop = StopReason::ContentFilter;
            stop_raw = "content_filter";
            cps = std::max(1.0, rng.normal(behavior_.filtered_cps_mean, behavior_.filtered_cps_std));
            result.latency = std::chrono::microseconds(static_cast<std::int64_t>(
                1e6 * static_cast<double>(uni::char_count(candidate)) / cps));
        } else {
            bool truncated = false;
            text = truncate_to_chars(candidate, max_chars, truncated);
            if (truncated) {
                stop = StopReason::Length;
                stop_raw = "length";
            }
            cps = filtered
                      ? std::max(1.0, rng.normal(behavior_.filtered_cps_mean,
                                                 behavior_.filtered_cps_std))
                      : std::max(1.0, rng.normal(behavior_.base_cps_mean, behavior_.base_cps_std));
        }
    } else if (const StoredArticle* article = resolve_article(conv)) {
        // Attack request against a known article.
        std::string_view expected = article->body;
        if (!conv.messages.empty() && conv.messages.back().role == Role::Assistant) {
            const std::string& prefix = conv.messages.back().content;
            if (expected.size() > prefix.size() && expected.substr(0, prefix.size()) == prefix) {
                expected = expected.substr(prefix.size());
            }
        }

        const double u = rng.uniform();
        if (u < behavior_.filter_prob) {
            if (behavior_.filter_sets_stop_reason) {
                text.clear();
                stop = StopReason::ContentFilter;
                stop_raw = "content_filter";
            } else {
                bool truncated = false;
                text = truncate_to_chars(expected, max_chars, truncated);
                stop = truncated ? StopReason::Length : StopReason::Stop;
                stop_raw = truncated ? "length" : "stop";
            }
            cps = std::max(1.0,
                           rng.normal(behavior_.filtered_cps_mean, behavior_.filtered_cps_std));
            result.latency = std::chrono::microseconds(static_cast<std::int64_t>(
                1e6 * std::max<std::size_t>(1, uni::char_count(expected)) / cps));
        } else if (u < behavior_.filter_prob + behavior_.refusal_prob) {
            text = kRefusalText;
            cps = std::max(1.0, rng.normal(behavior_.base_cps_mean, behavior_.base_cps_std));
        } else {
            ArticleBehavior ab = behavior_.default_behavior;
            if (!conv.article_id.empty()) {
                auto it = behavior_.per_article.find(conv.article_id);
                if (it != behavior_.per_article.end()) ab = it->second;
            }
            std::string raw;
            switch (ab.mode) {
                case MemorizationMode::Verbatim:
                    raw = std::string(expected);
                    break;
                case MemorizationMode::Noisy: {
                    const auto chars = uni::decode_utf8_or_throw(std::string(expected));
                    std::u32string corrupted;
                    corrupted.reserve(chars.size());
                    for (char32_t c : chars) {
                        if (rng.uniform() < ab.noise_p) {
                            corrupted.push_back(U'a' + static_cast<char32_t>(rng.next() % 26));
                        } else {
                            corrupted.push_back(c);
                        }
                    }
                    raw = uni::encode_utf8(corrupted);
                    break;
                }
                case MemorizationMode::Paraphrase: {
                    std::size_t i = 0;
                    while (i < expected.size()) {
                        while (i < expected.size() &&
                               std::isspace(static_cast<unsigned char>(expected[i]))) {
                            ++i;
                        }
                        std::size_t start = i;
                        while (i < expected.size() &&
                               !std::isspace(static_cast<unsigned char>(expected[i]))) {
                            ++i;
                        }
                        if (i == start) break;
                        if (!raw.empty()) raw += ' ';
                        if (rng.uniform() < 0.25) {
                            raw += kFillerWords[rng.next() % std::size(kFillerWords)];
                        } else {
                            raw += std::string(expected.substr(start, i - start));
                        }
                    }
                    break;
                }
                case MemorizationMode::Ignorant: {
                    // Vaguely topical: quotes the opening words (double
                    // spaced) inside unrelated filler.
                    const std::size_t target =
                        std::min<std::size_t>(800, std::max<std::size_t>(120,
                                                                         expected.size() / 2));
                    raw = babble(rng, target / 2);
                    raw += " it opens with " + double_spaced_head(expected, 6) + " ";
                    raw += babble(rng, target / 2);
                    break;
                }
            }
            bool truncated = false;
            text = truncate_to_chars(raw, max_chars, truncated);
            if (truncated) {
                stop = StopReason::Length;
                stop_raw = "length";
            }
            cps = std::max(1.0, rng.normal(behavior_.base_cps_mean, behavior_.base_cps_std));
        }
    } else {
        // Benign prompt (baseline benchmarking): deterministic filler.
        const std::size_t target = 400 + rng.next() % 1200;
        bool truncated = false;
        text = truncate_to_chars(babble(rng, target), max_chars, truncated);
        if (truncated) {
            stop = StopReason::Length;
            stop_raw = "length";
        }
        cps = std::max(1.0, rng.normal(behavior_.base_cps_mean, behavior_.base_cps_std));
    }

    result.text = std::move(text);
    result.stop_reason = stop;
    result.stop_reason_raw = stop_raw;
    result.output_chars = uni::char_count(result.text);
    result.output_tokens =
        (result.output_chars + behavior_.chars_per_token - 1) / behavior_.chars_per_token;
    if (result.latency.count() == 0) {
        result.latency = std::chrono::microseconds(static_cast<std::int64_t>(
            1e6 * std::max<std::size_t>(1, result.output_chars) / cps));
    }
    if (result.latency.count() <= 0) result.latency = std::chrono::microseconds(1);
    result.first_byte_latency = result.latency / 10;
    result.received_at_ms = result.sent_at_ms + result.latency.count() / 1000;
    return result;
}

std::shared_ptr<MockProvider> mock_configure(MockBehavior behavior, const Corpus* corpus,
                                             std::string name) {
    auto provider = std::make_shared<MockProvider>(std::move(name), std::move(behavior));
    if (corpus != nullptr) provider->set_corpus(*corpus);
    return provider;
}

}  // namespace verbatim
