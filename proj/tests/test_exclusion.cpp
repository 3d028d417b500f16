#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "test_support.hpp"
#include "verbatim/exclusion.hpp"
#include "verbatim/report.hpp"

using namespace verbatim;

namespace {

CompletionResult result_with(std::string text, StopReason stop = StopReason::Stop) {
    CompletionResult r;
    r.text = std::move(text);
    r.stop_reason = stop;
    r.output_chars = r.text.size();
    r.latency = std::chrono::microseconds(1000);
    return r;
}

MetricReport nonzero_metrics() {
    MetricReport m;
    m.levenshtein_normalized = 0.4;
    m.lcs_chars = 100;
    m.lccs_chars = 40;
    m.bleu4 = 0.2;
    m.cosine_sim = 0.7;
    m.expected_len_chars = 500;
    m.output_len_chars = 480;
    return m;
}

}  // namespace

TEST_CASE("content filter stop reason wins") {
    const auto v = classify(result_with("any text", StopReason::ContentFilter),
                            nonzero_metrics(), RefusalPatterns::defaults());
    CHECK(v.kind == VerdictKind::ContentFilter);
    CHECK(v.evidence == "stop_reason=content_filter");
}

TEST_CASE("the canonical refusal form is detected") {
    const auto v = classify(result_with("I'm sorry, as an AI, I can not do this..."),
                            nonzero_metrics(), RefusalPatterns::defaults());
    CHECK(v.kind == VerdictKind::Refusal);
    CHECK(v.evidence.find("pattern:") == 0);
}

TEST_CASE("refusal matching is case-insensitive, anchored, apostrophe-folded") {
    const auto patterns = RefusalPatterns::defaults();
    std::string matched;
    CHECK(patterns.match("  i'M SORRY, as an ai, whatever", &matched));
    CHECK(patterns.match("I’m sorry but no", &matched));  // curly apostrophe
    CHECK_FALSE(patterns.match("He said I'm sorry later in the text", &matched));
    CHECK_FALSE(patterns.match("Here is the article: ...", &matched));
}

TEST_CASE("empty output is zero similarity") {
    MetricReport m;  // all zero
    const auto v = classify(result_with(""), m, RefusalPatterns::defaults());
    CHECK(v.kind == VerdictKind::ZeroSimilarity);
    CHECK(v.evidence == "empty output");
}

TEST_CASE("any zeroed metric excludes, with the metric named") {
    auto m = nonzero_metrics();
    m.bleu4 = 0.0;
    const auto v = classify(result_with("some text"), m, RefusalPatterns::defaults());
    CHECK(v.kind == VerdictKind::ZeroSimilarity);
    CHECK(v.evidence == "bleu4=0");

    auto m2 = nonzero_metrics();
    m2.lccs_chars = 0;
    CHECK(classify(result_with("t"), m2, RefusalPatterns::defaults()).evidence == "lccs_chars=0");
}

TEST_CASE("levenshtein alone never excludes") {
    auto m = nonzero_metrics();
    m.levenshtein_normalized = 1.0;
    CHECK(classify(result_with("text"), m, RefusalPatterns::defaults()).kind ==
          VerdictKind::Included);
}

TEST_CASE("precedence on constructed collisions") {
    const auto patterns = RefusalPatterns::defaults();
    // Refusal text that also has zeroed metrics: refusal wins.
    MetricReport zeroed;
    const auto refusal = classify(result_with("I'm sorry, as an AI, I can not do this..."),
                                  zeroed, patterns);
    CHECK(refusal.kind == VerdictKind::Refusal);
    // Content filter plus refusal text plus zero metrics: filter wins.
    const auto filtered = classify(
        result_with("I'm sorry, as an AI, I can not do this...", StopReason::ContentFilter),
        zeroed, patterns);
    CHECK(filtered.kind == VerdictKind::ContentFilter);
    // classify is a pure function: same inputs, same verdict.
    const auto again = classify(
        result_with("I'm sorry, as an AI, I can not do this...", StopReason::ContentFilter),
        zeroed, patterns);
    CHECK(again.kind == filtered.kind);
    CHECK(again.evidence == filtered.evidence);
}

TEST_CASE("pattern files support comments") {
    test_support::TempDir dir("patterns");
    const auto path = dir.str("p.txt");
    {
        std::ofstream out(path);
        out << "# comment line\n\nNo dice\n";
    }
    const auto patterns = RefusalPatterns::load(path);
    REQUIRE(patterns.patterns().size() == 1);
    CHECK(patterns.match("no dice, friend"));
    CHECK_FALSE(patterns.match("# comment line"));
}

namespace {

ExperimentRecord record_with_verdict(const std::string& model, AttackId attack, Category cat,
                                     VerdictKind kind, const std::string& id) {
    ExperimentRecord r;
    r.key = {"mock", model, attack, std::nullopt, id};
    r.category = cat;
    r.completion = result_with(kind == VerdictKind::ZeroSimilarity ? "" : "text");
    r.metrics = nonzero_metrics();
    r.verdict = ExclusionVerdict{kind, ""};
    return r;
}

}  // namespace

TEST_CASE("exclusion rates: 69 of 100 excluded displays as 69%") {
    std::vector<ExperimentRecord> records;
    for (int i = 0; i < 100; ++i) {
        records.push_back(record_with_verdict(
            "gpt-x", AttackId::A3, Category::Lawsuit,
            i < 69 ? VerdictKind::Refusal : VerdictKind::Included, "a" + std::to_string(i)));
    }
    const auto rows = exclusion_rates(records);
    REQUIRE(rows.size() == 1);
    CHECK(rows[0].n_total == 100);
    CHECK(rows[0].n_excluded == 69);
    CHECK(percent_display(rows[0].n_excluded, rows[0].n_total) == 69);
}

TEST_CASE("exclusion rates: all included is 0%") {
    std::vector<ExperimentRecord> records;
    for (int i = 0; i < 10; ++i) {
        records.push_back(record_with_verdict("m", AttackId::A1, Category::New,
                                              VerdictKind::Included, "b" + std::to_string(i)));
    }
    const auto rows = exclusion_rates(records);
    REQUIRE(rows.size() == 1);
    CHECK(rows[0].n_excluded == 0);
    CHECK(percent_display(0, 10) == 0);
}

TEST_CASE("exclusion rates: 3 of 8 displays as 38% and keeps the exact ratio") {
    std::vector<ExperimentRecord> records;
    for (int i = 0; i < 8; ++i) {
        records.push_back(record_with_verdict(
            "m", AttackId::A2, Category::Arbitrary,
            i < 3 ? VerdictKind::ZeroSimilarity : VerdictKind::Included,
            "c" + std::to_string(i)));
    }
    const auto rows = exclusion_rates(records);
    REQUIRE(rows.size() == 1);
    CHECK(rows[0].n_excluded == 3);
    CHECK(rows[0].n_total == 8);
    CHECK(percent_display(3, 8) == 38);
}

TEST_CASE("breakdown counts sum to the exclusion total") {
    std::vector<ExperimentRecord> records;
    int n = 0;
    for (const auto kind : {VerdictKind::ContentFilter, VerdictKind::Refusal,
                            VerdictKind::ZeroSimilarity, VerdictKind::Included}) {
        for (int i = 0; i <= n; ++i) {
            records.push_back(record_with_verdict("m", AttackId::A1, Category::Lawsuit, kind,
                                                  "d" + std::to_string(n) + "-" +
                                                      std::to_string(i)));
        }
        ++n;
    }
    const auto rows = exclusion_rates(records);
    REQUIRE(rows.size() == 1);
    CHECK(rows[0].n_content_filter + rows[0].n_refusal + rows[0].n_zero_similarity ==
          rows[0].n_excluded);
    CHECK(rows[0].n_content_filter == 1);
    CHECK(rows[0].n_refusal == 2);
    CHECK(rows[0].n_zero_similarity == 3);
    CHECK(rows[0].n_total == 10);
}

TEST_CASE("transport errors are counted apart, empty groups flagged") {
    ExperimentRecord err;
    err.key = {"mock", "m", AttackId::A1, std::nullopt, "e1"};
    err.category = Category::New;
    err.error_class = "Timeout";
    const auto rows = exclusion_rates(std::vector<ExperimentRecord>{err});
    REQUIRE(rows.size() == 1);
    CHECK(rows[0].n_transport_error == 1);
    CHECK(rows[0].n_total == 0);
    CHECK(rows[0].empty_group);
}

TEST_CASE("percent display rounds half up") {
    CHECK(percent_display(1, 8) == 13);   // 12.5 -> 13
    CHECK(percent_display(1, 200) == 1);  // 0.5 -> 1
    CHECK(percent_display(1, 201) == 0);  // 0.497... -> 0
    CHECK(percent_display(0, 0) == 0);
}
