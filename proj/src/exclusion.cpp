#include "verbatim/exclusion.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>

#include "verbatim/errors.hpp"
#include "verbatim/util.hpp"

namespace verbatim {

std::string_view verdict_kind_name(VerdictKind k) {
    switch (k) {
        case VerdictKind::Included: return "included";
        case VerdictKind::Refusal: return "refusal";
        case VerdictKind::ZeroSimilarity: return "zero_similarity";
        case VerdictKind::ContentFilter: return "content_filter";
    }
    return "unknown";
}

std::optional<VerdictKind> verdict_kind_from_name(std::string_view name) {
    if (name == "included") return VerdictKind::Included;
    if (name == "refusal") return VerdictKind::Refusal;
    if (name == "zero_similarity") return VerdictKind::ZeroSimilarity;
    if (name == "content_filter") return VerdictKind::ContentFilter;
    return std::nullopt;
}

namespace {

// Lowercase ASCII and fold typographic apostrophes so "I’m sorry" matches
// the "I'm sorry" pattern.
std::string fold_for_match(std::string_view text) {
    std::string out;
    out.reserve(text.size());
    for (std::size_t i = 0; i < text.size(); ++i) {
        const unsigned char c = static_cast<unsigned char>(text[i]);
        // U+2018 / U+2019 in UTF-8: E2 80 98 / E2 80 99
        if (c == 0xE2 && i + 2 < text.size() &&
            static_cast<unsigned char>(text[i + 1]) == 0x80 &&
            (static_cast<unsigned char>(text[i + 2]) == 0x98 ||
             static_cast<unsigned char>(text[i + 2]) == 0x99)) {
            out.push_back('\'');
            i += 2;
            continue;
        }
        out.push_back(static_cast<char>(std::tolower(c)));
    }
    return out;
}

}  // namespace

RefusalPatterns RefusalPatterns::defaults() {
    return from_lines({
        "I'm sorry, as an AI",
        "I'm sorry",
        "I am sorry",
        "I apologize",
        "I cannot assist",
        "I can't assist",
        "I cannot help",
        "I can't help",
        "I cannot provide",
        "I can't provide",
        "I cannot reproduce",
        "I can't reproduce",
        "I can not do this",
        "Sorry, but I",
        "As an AI, I cannot",
        "As an AI, I can not",
        "Unfortunately, I cannot",
        "Unfortunately, I can't",
        "I'm unable to",
        "I am unable to",
    });
}

RefusalPatterns RefusalPatterns::from_lines(std::vector<std::string> patterns) {
    RefusalPatterns p;
    for (auto& line : patterns) {
        const auto t = trim(line);
        if (t.empty() || t.front() == '#') continue;
        p.patterns_.emplace_back(t);
    }
    return p;
}

RefusalPatterns RefusalPatterns::load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open refusal pattern file: " + path);
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) lines.push_back(line);
    return from_lines(std::move(lines));
}

bool RefusalPatterns::match(std::string_view text, std::string* matched) const {
    std::string_view body = trim(text);
    const std::string folded = fold_for_match(body);
    for (const auto& pattern : patterns_) {
        const std::string fp = fold_for_match(pattern);
        if (folded.size() >= fp.size() && folded.compare(0, fp.size(), fp) == 0) {
            if (matched != nullptr) *matched = pattern;
            return true;
        }
    }
    return false;
}

std::uint64_t RefusalPatterns::digest() const {
    std::uint64_t h = fnv1a64("refusal-patterns");
    for (const auto& p : patterns_) {
        h = fnv1a64(p, h);
        h = fnv1a64("\x1e", h);
    }
    return h;
}

ExclusionVerdict classify(const CompletionResult& result, const MetricReport& metrics,
                          const RefusalPatterns& patterns) {
    if (result.stop_reason == StopReason::ContentFilter) {
        return {VerdictKind::ContentFilter, "stop_reason=content_filter"};
    }
    std::string matched;
    if (patterns.match(result.text, &matched)) {
        return {VerdictKind::Refusal, "pattern: " + matched};
    }
    if (result.text.empty()) {
        return {VerdictKind::ZeroSimilarity, "empty output"};
    }
    if (metrics.lcs_chars == 0) return {VerdictKind::ZeroSimilarity, "lcs_chars=0"};
    if (metrics.lccs_chars == 0) return {VerdictKind::ZeroSimilarity, "lccs_chars=0"};
    if (metrics.bleu4 == 0.0) return {VerdictKind::ZeroSimilarity, "bleu4=0"};
    if (metrics.cosine_sim == 0.0) return {VerdictKind::ZeroSimilarity, "cosine_sim=0"};
    return {VerdictKind::Included, ""};
}

}  // namespace verbatim
