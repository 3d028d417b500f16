#pragma once

#include <string>
#include <vector>

#include "verbatim/metrics.hpp"
#include "verbatim/provider.hpp"

namespace verbatim {

enum class VerdictKind { Included, Refusal, ZeroSimilarity, ContentFilter };

std::string_view verdict_kind_name(VerdictKind k);
std::optional<VerdictKind> verdict_kind_from_name(std::string_view name);

struct ExclusionVerdict {
    VerdictKind kind = VerdictKind::Included;
    std::string evidence;  // matched pattern, zeroed metric, or stop reason
};

// Refusal openers matched case-insensitively at the start of a response,
// after folding typographic apostrophes.
class RefusalPatterns {
  public:
    static RefusalPatterns defaults();
    // One pattern per line; '#' comments and blank lines allowed.
    static RefusalPatterns load(const std::string& path);
    static RefusalPatterns from_lines(std::vector<std::string> patterns);

    bool match(std::string_view text, std::string* matched = nullptr) const;
    const std::vector<std::string>& patterns() const { return patterns_; }
    std::uint64_t digest() const;

  private:
    std::vector<std::string> patterns_;
};

// Verdict precedence: ContentFilter over Refusal over ZeroSimilarity.
ExclusionVerdict classify(const CompletionResult& result, const MetricReport& metrics,
                          const RefusalPatterns& patterns);

}  // namespace verbatim
