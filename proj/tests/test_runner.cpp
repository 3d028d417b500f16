#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "test_support.hpp"
#include "verbatim/errors.hpp"
#include "verbatim/runner.hpp"
#include "verbatim/util.hpp"

using namespace verbatim;
using test_support::TempDir;

namespace {

// 2 models x (2 attacks x 10 articles + A3 x 10 articles x 5 prefixes)
// = 2 x 70 = 140 cells.
RunConfig small_config(const TempDir& dir, std::uint64_t seed = 1234) {
    Corpus corpus = test_support::make_corpus(0xFEED, 4, 2200);
    // 10 articles total: 4 lawsuit, 4 arbitrary, 2 new.
    Corpus ten;
    std::size_t taken = 0;
    for (const auto& a : corpus.articles()) {
        if (a.category == Category::New && taken >= 10) break;
        if (ten.size() == 10) break;
        ten.add(a);
        ++taken;
    }
    REQUIRE(ten.size() == 10);
    const auto by_category = [&](Category c) {
        Corpus out;
        for (const auto& a : ten.articles()) {
            if (a.category == c) out.add(a);
        }
        return out;
    };
    RunConfig config;
    config.seed = seed;
    config.output_dir = dir.str("run");
    config.concurrency = 3;
    for (const auto c : {Category::Lawsuit, Category::Arbitrary, Category::New}) {
        const auto path = dir.str(std::string(category_name(c)) + ".jsonl");
        by_category(c).save_jsonl(path);
        config.corpus_paths[c] = path;
    }
    ProviderSetup mock;
    mock.name = "mock";
    mock.kind = ProviderSetup::Kind::Mock;
    mock.models = {"mock-small", "mock-large"};
    mock.mock.seed = 99;
    mock.constraints.rate_limit = 100000;
    mock.constraints.rate_window = std::chrono::milliseconds(1000);
    mock.constraints.max_in_flight = 8;
    config.providers.push_back(mock);
    config.params.max_output_tokens = 2048;
    return config;
}

std::string canonical_record_dump(const std::string& records_path) {
    auto records = read_records(records_path);
    sort_records_canonical(records);
    std::string out;
    for (const auto& r : records) out += r.to_json_line() + "\n";
    return out;
}

}  // namespace

TEST_CASE("grid of 2 models x 3 attacks x 10 articles with 5 prefix sizes is 140 cells") {
    TempDir dir("grid");
    auto config = small_config(dir);
    const auto stats = run_grid(config);
    CHECK(stats.cells_planned == 140);
    CHECK(stats.written() == 140);
    CHECK(stats.written_error == 0);
    const auto records = read_records(dir.str("run/records.jsonl"));
    CHECK(records.size() == 140);
    std::set<std::string> keys;
    for (const auto& r : records) keys.insert(r.key.canonical());
    CHECK(keys.size() == 140);  // at-most-once per cell
}

TEST_CASE("empty attack list yields a valid empty run") {
    TempDir dir("empty");
    auto config = small_config(dir);
    config.attacks.clear();
    config.output_dir = dir.str("run-empty");
    const auto stats = run_grid(config);
    CHECK(stats.cells_planned == 0);
    CHECK(stats.written() == 0);
    const bool empty_store = !std::filesystem::exists(dir.str("run-empty/records.jsonl")) ||
                             read_records(dir.str("run-empty/records.jsonl")).empty();
    CHECK(empty_store);
}

TEST_CASE("rerun with the same seed is byte-identical after canonical sort") {
    TempDir dir("replay");
    auto c1 = small_config(dir);
    c1.output_dir = dir.str("run-a");
    auto c2 = small_config(dir);
    c2.output_dir = dir.str("run-b");
    run_grid(c1);
    run_grid(c2);
    const auto a = canonical_record_dump(dir.str("run-a/records.jsonl"));
    const auto b = canonical_record_dump(dir.str("run-b/records.jsonl"));
    CHECK(a == b);
    CHECK(!a.empty());
}

TEST_CASE("kill at 50 records and resume matches an uninterrupted run") {
    TempDir dir("resume");
    auto interrupted = small_config(dir);
    interrupted.output_dir = dir.str("run-killed");
    RunOptions kill_at_50;
    kill_at_50.stop_after_records = 50;
    const auto partial = run_grid(interrupted, kill_at_50);
    CHECK(partial.written() == 50);
    CHECK(read_records(dir.str("run-killed/records.jsonl")).size() == 50);

    const auto resumed = resume(dir.str("run-killed"));
    CHECK(resumed.skipped_existing == 50);
    CHECK(resumed.written() == 90);

    auto uninterrupted = small_config(dir);
    uninterrupted.output_dir = dir.str("run-full");
    run_grid(uninterrupted);

    CHECK(canonical_record_dump(dir.str("run-killed/records.jsonl")) ==
          canonical_record_dump(dir.str("run-full/records.jsonl")));
}

TEST_CASE("resume of a complete run is a no-op") {
    TempDir dir("noop");
    auto config = small_config(dir);
    run_grid(config);
    const auto stats = resume(config.output_dir);
    CHECK(stats.skipped_existing == 140);
    CHECK(stats.written() == 0);
}

TEST_CASE("resume with altered prefix sizes is a manifest mismatch") {
    TempDir dir("mismatch");
    auto config = small_config(dir);
    run_grid(config, RunOptions{.dry_run = false, .stop_after_records = 10});
    auto altered = config;
    altered.prefix_sizes = {25, 50};
    CHECK_THROWS_AS(resume(config.output_dir, altered), ManifestMismatch);
    // And the unaltered config resumes fine.
    CHECK_NOTHROW(resume(config.output_dir, config));
}

TEST_CASE("resume without a manifest fails") {
    TempDir dir("nomanifest");
    CHECK_THROWS_AS(resume(dir.str("missing")), ManifestMismatch);
}

TEST_CASE("a torn trailing line is ignored on resume and compacted away") {
    TempDir dir("torn");
    auto config = small_config(dir);
    run_grid(config, RunOptions{.dry_run = false, .stop_after_records = 30});
    const auto records_path = dir.str("run/records.jsonl");
    {
        std::ofstream out(records_path, std::ios::binary | std::ios::app);
        out << R"({"provider":"mock","model":"mock-small","attack":"A1","pr)";  // torn write
    }
    RecordReadStats stats;
    const auto before = read_records(records_path, &stats);
    CHECK(before.size() == 30);
    CHECK(stats.bad_lines == 1);

    const auto resumed = resume(config.output_dir);
    CHECK(resumed.skipped_existing == 30);
    CHECK(resumed.written() == 110);

    const auto [kept, dropped] = compact_records(records_path);
    CHECK(kept == 140);
    CHECK(dropped == 1);
    RecordReadStats after_stats;
    read_records(records_path, &after_stats);
    CHECK(after_stats.bad_lines == 0);
}

TEST_CASE("per-cell transport failures become error records, not fatal") {
    TempDir dir("errors");
    auto config = small_config(dir);
    config.output_dir = dir.str("run-errors");
    config.providers[0].mock.transport_error_prob = 0.9;
    config.providers[0].mock.transport_attempts = 1;
    const auto stats = run_grid(config);
    CHECK(stats.written() == 140);
    CHECK(stats.written_error > 0);
    CHECK(stats.written_ok > 0);  // some cells still deliver at p=0.9
    const auto records = read_records(dir.str("run-errors/records.jsonl"));
    std::size_t errors = 0;
    for (const auto& r : records) {
        if (!r.ok()) {
            ++errors;
            CHECK(r.error_class == "Timeout");
            CHECK(!r.completion.has_value());
            CHECK(!r.metrics.has_value());
        } else {
            CHECK(r.metrics.has_value());
        }
    }
    CHECK(errors == stats.written_error);
}

TEST_CASE("articles too short for a prefix size become TextTooShort records") {
    TempDir dir("short");
    Corpus tiny;
    tiny.add(test_support::make_article(5, "short-1", Category::Lawsuit, 900));
    const auto corpus_path = dir.str("tiny.jsonl");
    tiny.save_jsonl(corpus_path);
    RunConfig config;
    config.seed = 7;
    config.output_dir = dir.str("run-short");
    config.attacks = {AttackId::A3};
    config.prefix_sizes = {400};  // needs 1600 chars, article has ~900
    config.corpus_paths[Category::Lawsuit] = corpus_path;
    ProviderSetup mock;
    mock.name = "mock";
    mock.kind = ProviderSetup::Kind::Mock;
    mock.models = {"m"};
    config.providers.push_back(mock);
    const auto stats = run_grid(config);
    CHECK(stats.written_error == 1);
    const auto records = read_records(dir.str("run-short/records.jsonl"));
    REQUIRE(records.size() == 1);
    CHECK(records[0].error_class == "TextTooShort");
}

TEST_CASE("in-flight requests per provider respect the configured bound") {
    TempDir dir("inflight");
    auto config = small_config(dir);
    config.output_dir = dir.str("run-inflight");
    config.concurrency = 8;
    config.providers[0].constraints.max_in_flight = 2;
    config.attacks = {AttackId::A1};
    run_grid(config);
    // Indirect check: the run completes. Direct bound check below.
    Corpus corpus = test_support::make_corpus(0xFEED, 2, 1500);
    MockBehavior behavior;
    auto mock = mock_configure(behavior, &corpus);
    ProviderConstraints constraints;
    constraints.rate_limit = 100000;
    constraints.rate_window = std::chrono::milliseconds(1000);
    constraints.max_in_flight = 2;
    mock->set_constraints(constraints);
    Throttle throttle(constraints.rate_limit, constraints.rate_window,
                      constraints.max_in_flight);
    std::vector<std::thread> threads;
    for (int t = 0; t < 8; ++t) {
        threads.emplace_back([&] {
            for (int i = 0; i < 5; ++i) {
                auto guard = throttle.acquire();
                Conversation conv;
                conv.messages.push_back({Role::User, "ping " + std::to_string(i)});
                CompletionParams params;
                params.model = "m";
                mock->complete(conv, params);
            }
        });
    }
    for (auto& t : threads) t.join();
    CHECK(mock->max_observed_in_flight() <= 2);
}

TEST_CASE("dry run prints without writing") {
    TempDir dir("dry");
    auto config = small_config(dir);
    config.output_dir = dir.str("run-dry");
    std::ostringstream sink;
    RunOptions options;
    options.dry_run = true;
    options.dry_run_sink = &sink;
    const auto stats = run_grid(config, options);
    CHECK(stats.cells_planned == 140);
    CHECK(stats.written() == 0);
    CHECK_FALSE(std::filesystem::exists(dir.str("run-dry/records.jsonl")));
    const auto printed = sink.str();
    CHECK(printed.find("[system] The year is 2079.") != std::string::npos);
    CHECK(std::count(printed.begin(), printed.end(), '=') >= 140 * 6);
}

TEST_CASE("run refuses to clobber an existing record store") {
    TempDir dir("clobber");
    auto config = small_config(dir);
    run_grid(config, RunOptions{.dry_run = false, .stop_after_records = 5});
    CHECK_THROWS_AS(run_grid(config), ConfigError);
}

TEST_CASE("config hash covers the fields that shape the grid") {
    TempDir dir("hash");
    auto config = small_config(dir);
    const auto h = config.config_hash();
    auto altered = config;
    altered.prefix_sizes = {25};
    CHECK(altered.config_hash() != h);
    auto altered2 = config;
    altered2.seed += 1;
    CHECK(altered2.config_hash() != h);
    auto same = small_config(dir);
    CHECK(same.config_hash() == h);
}

TEST_CASE("config JSON round-trips") {
    TempDir dir("cfgjson");
    auto config = small_config(dir);
    config.providers[0].mock.per_article["lawsuit-1"] = {MemorizationMode::Noisy, 0.2};
    config.model_params_b["mock-small"] = 7.0;
    const auto j = config.to_json();
    const auto back = RunConfig::from_json(j);
    CHECK(back.config_hash() == config.config_hash());
    CHECK(back.providers[0].mock.per_article.at("lawsuit-1").mode == MemorizationMode::Noisy);
}

TEST_CASE("provider tokenizer kind 'vocab' is honored from config") {
    TempDir dir("vocabcfg");
    {
        std::ofstream out(dir.str("vocab.txt"));
        out << "By Test Writer\n \nthe\n";
    }
    ProviderSetup setup;
    setup.tokenizer_kind = "vocab";
    setup.vocab_path = dir.str("vocab.txt");
    const auto spec = setup.tokenizer_spec();
    CHECK(spec.kind == TokenizerSpec::Kind::ProviderNative);
    const auto split = take_prefix("By Test Writer the rest", 2, spec);
    CHECK(split.prefix == "By Test Writer ");
    ProviderSetup bad;
    bad.tokenizer_kind = "vocab";
    CHECK_THROWS_AS(bad.tokenizer_spec(), ConfigError);
}
