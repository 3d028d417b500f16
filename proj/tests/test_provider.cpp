#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <thread>

#include "test_support.hpp"
#include "verbatim/errors.hpp"
#include "verbatim/http_provider.hpp"
#include "verbatim/mock_provider.hpp"
#include "verbatim/mock_server.hpp"
#include "verbatim/util.hpp"

#include <json.hpp>

using namespace verbatim;

namespace {

const TokenizerSpec kSpec = TokenizerSpec::char_approx(4);

struct MockFixture {
    Corpus corpus = test_support::make_corpus(0xF00D, 2, 1600);
    MockBehavior behavior;
    std::shared_ptr<MockProvider> provider;

    explicit MockFixture(MockBehavior b = {}) : behavior(std::move(b)) {
        behavior.seed = 42;
        provider = mock_configure(behavior, &corpus);
    }

    CompletionParams params(const std::string& model = "mock-small") const {
        CompletionParams p;
        p.model = model;
        return p;
    }
};

}  // namespace

TEST_CASE("verbatim mock continues an A3 conversation exactly") {
    MockFixture fx;
    const auto& article = fx.corpus.articles().front();
    const auto built = build_attack(AttackId::A3, article, 50, kSpec);
    const auto result = fx.provider->complete(built.conversation, fx.params());
    CHECK(result.text == built.expected_completion);
    CHECK(result.stop_reason == StopReason::Stop);
    CHECK(result.output_chars == built.expected_completion.size());
    CHECK(result.latency.count() > 0);
}

TEST_CASE("verbatim mock truncates at max_output_tokens") {
    MockFixture fx;
    const auto& article = fx.corpus.articles().front();
    const auto built = build_attack(AttackId::A2, article, std::nullopt, kSpec);
    auto params = fx.params();
    params.max_output_tokens = 50;  // 200 chars
    const auto result = fx.provider->complete(built.conversation, params);
    CHECK(result.text == built.expected_completion.substr(0, 200));
    CHECK(result.stop_reason == StopReason::Length);
}

TEST_CASE("filter-configured mock sets the content_filter stop reason") {
    MockBehavior b;
    b.filter_prob = 1.0;
    MockFixture fx(b);
    const auto built =
        build_attack(AttackId::A1, fx.corpus.articles().front(), std::nullopt, kSpec);
    const auto result = fx.provider->complete(built.conversation, fx.params());
    CHECK(result.stop_reason == StopReason::ContentFilter);
    CHECK(result.text.empty());
}

TEST_CASE("refusal probability 1 yields the refusal string") {
    MockBehavior b;
    b.refusal_prob = 1.0;
    MockFixture fx(b);
    const auto built =
        build_attack(AttackId::A2, fx.corpus.articles().front(), std::nullopt, kSpec);
    const auto result = fx.provider->complete(built.conversation, fx.params());
    CHECK(result.text == "I'm sorry, as an AI, I can not do this...");
    CHECK(result.stop_reason == StopReason::Stop);
}

TEST_CASE("noisy mode replays identically under one seed") {
    MockBehavior b;
    b.default_behavior = {MemorizationMode::Noisy, 0.05};
    b.seed = 777;
    Corpus corpus = test_support::make_corpus(0xF00D, 1, 1600);
    auto p1 = mock_configure(b, &corpus);
    auto p2 = mock_configure(b, &corpus);
    const auto built = build_attack(AttackId::A3, corpus.articles().front(), 25, kSpec);
    CompletionParams params;
    params.model = "m";
    const auto r1 = p1->complete(built.conversation, params);
    const auto r2 = p2->complete(built.conversation, params);
    CHECK(r1.text == r2.text);
    CHECK(r1.latency == r2.latency);
    CHECK(fnv1a64(r1.text) == fnv1a64(r2.text));
    CHECK(r1.text != built.expected_completion);  // noise actually applied

    MockBehavior b2 = b;
    b2.seed = 778;
    auto p3 = mock_configure(b2, &corpus);
    CHECK(p3->complete(built.conversation, params).text != r1.text);
}

TEST_CASE("mock results do not depend on request order") {
    MockBehavior b;
    b.refusal_prob = 0.5;
    MockFixture fx(b);
    const auto& articles = fx.corpus.articles();
    const auto c1 = build_attack(AttackId::A1, articles[0], std::nullopt, kSpec);
    const auto c2 = build_attack(AttackId::A1, articles[1], std::nullopt, kSpec);
    const auto r12a = fx.provider->complete(c1.conversation, fx.params());
    const auto r12b = fx.provider->complete(c2.conversation, fx.params());
    MockFixture fy(b);
    const auto r21b = fy.provider->complete(c2.conversation, fy.params());
    const auto r21a = fy.provider->complete(c1.conversation, fy.params());
    CHECK(r12a.text == r21a.text);
    CHECK(r12b.text == r21b.text);
    CHECK(r12a.sent_at_ms == r21a.sent_at_ms);
}

TEST_CASE("invalid behavior is rejected") {
    MockBehavior b;
    b.refusal_prob = 1.2;
    CHECK_THROWS_AS(b.validate(), InvalidBehavior);
    b.refusal_prob = 0.8;
    b.filter_prob = 0.5;
    CHECK_THROWS_AS(b.validate(), InvalidBehavior);
    b.filter_prob = -0.1;
    CHECK_THROWS_AS(b.validate(), InvalidBehavior);
    b.filter_prob = 0.1;
    CHECK_NOTHROW(b.validate());
}

TEST_CASE("throttle caps request starts per window") {
    Throttle throttle(5, std::chrono::milliseconds(200), 16);
    std::vector<std::chrono::steady_clock::time_point> starts(20);
    std::vector<std::thread> threads;
    std::atomic<std::size_t> idx{0};
    for (int t = 0; t < 4; ++t) {
        threads.emplace_back([&] {
            while (true) {
                const std::size_t i = idx.fetch_add(1);
                if (i >= starts.size()) return;
                auto guard = throttle.acquire();
                starts[i] = std::chrono::steady_clock::now();
            }
        });
    }
    for (auto& t : threads) t.join();
    std::sort(starts.begin(), starts.end());
    for (std::size_t i = 0; i + 5 < starts.size(); ++i) {
        // Any 6 consecutive starts must span more than one window.
        CHECK(starts[i + 5] - starts[i] >= std::chrono::milliseconds(190));
    }
}

TEST_CASE("openai dialect round-trips through the wire mock") {
    MockFixture fx;
    MockHttpServer server(fx.provider);
    server.start();

    HttpProviderConfig cfg;
    cfg.name = "wire";
    cfg.dialect = Dialect::OpenAI;
    cfg.base_url = server.base_url();
    cfg.retry.backoff = {std::chrono::milliseconds(10)};
    HttpProvider provider(std::move(cfg));

    const auto& article = fx.corpus.articles().front();
    const auto built = build_attack(AttackId::A3, article, 25, kSpec);
    auto params = fx.params();
    const auto wire = provider.complete(built.conversation, params);
    const auto direct = fx.provider->complete(built.conversation, params);
    CHECK(wire.text == direct.text);
    CHECK(wire.stop_reason == direct.stop_reason);
    CHECK(wire.output_tokens == direct.output_tokens);
    CHECK(wire.latency.count() > 0);
    CHECK(wire.first_byte_latency.count() >= 0);
    CHECK(wire.request_id == direct.request_id);  // mock id travels back
    server.stop();
}

TEST_CASE("unreachable endpoint times out after the retry budget") {
    HttpProviderConfig cfg;
    cfg.name = "dead";
    cfg.base_url = "http://127.0.0.1:1";  // nothing listens there
    cfg.retry.attempts = 2;
    cfg.retry.backoff = {std::chrono::milliseconds(5), std::chrono::milliseconds(5)};
    HttpProvider provider(std::move(cfg));
    Conversation conv;
    conv.messages.push_back({Role::User, "hello"});
    CompletionParams params;
    params.model = "m";
    params.timeout = std::chrono::milliseconds(2000);
    CHECK_THROWS_AS(provider.complete(conv, params), Timeout);
}

TEST_CASE("openai request encoding carries roles, model and knobs") {
    Conversation conv;
    conv.messages = {{Role::System, "sys"}, {Role::Assistant, "ack"}, {Role::User, "go"}};
    CompletionParams params;
    params.model = "gpt-test";
    params.temperature = 0.0;
    params.max_output_tokens = 77;
    const auto body = nlohmann::json::parse(
        HttpProvider::encode_request(Dialect::OpenAI, conv, params, ProviderConstraints{}));
    CHECK(body.at("model") == "gpt-test");
    CHECK(body.at("temperature") == 0.0);
    CHECK(body.at("max_tokens") == 77);
    REQUIRE(body.at("messages").size() == 3);
    CHECK(body.at("messages")[0].at("role") == "system");
    CHECK(body.at("messages")[1].at("role") == "assistant");
    CHECK(body.at("messages")[2].at("role") == "user");
}

TEST_CASE("anthropic dialect hoists system text to the top-level field") {
    Conversation conv;
    conv.messages = {{Role::System, "sys text"}, {Role::Assistant, "ack"}, {Role::User, "go"}};
    CompletionParams params;
    params.model = "claude-test";
    const auto body = nlohmann::json::parse(
        HttpProvider::encode_request(Dialect::Anthropic, conv, params, ProviderConstraints{}));
    CHECK(body.at("system") == "sys text");
    REQUIRE(body.at("messages").size() == 2);
    CHECK(body.at("messages")[0].at("role") == "assistant");
    CHECK(body.at("messages")[1].at("role") == "user");
}

TEST_CASE("anthropic response parsing normalizes stop reasons") {
    const auto r = HttpProvider::parse_response(
        Dialect::Anthropic,
        R"({"id":"msg_1","content":[{"type":"text","text":"hello "},{"type":"text","text":"there"}],)"
        R"("stop_reason":"end_turn","usage":{"output_tokens":2}})",
        "rid");
    CHECK(r.text == "hello there");
    CHECK(r.stop_reason == StopReason::Stop);
    CHECK(r.output_tokens == 2);
    CHECK(r.request_id == "msg_1");

    const auto filtered = HttpProvider::parse_response(
        Dialect::OpenAI,
        R"({"choices":[{"message":{"content":null},"finish_reason":"content_filter"}]})", "rid");
    CHECK(filtered.stop_reason == StopReason::ContentFilter);
    CHECK(filtered.text.empty());

    const auto other = HttpProvider::parse_response(
        Dialect::OpenAI,
        R"({"choices":[{"message":{"content":"x"},"finish_reason":"tool_calls"}]})", "rid");
    CHECK(other.stop_reason == StopReason::Other);
    CHECK(other.stop_reason_raw == "tool_calls");
}

TEST_CASE("malformed bodies raise MalformedResponse with the request id") {
    try {
        HttpProvider::parse_response(Dialect::OpenAI, "not json at all", "req-9");
        FAIL("expected MalformedResponse");
    } catch (const MalformedResponse& e) {
        CHECK(e.request_id == "req-9");
    }
    CHECK_THROWS_AS(HttpProvider::parse_response(Dialect::OpenAI, R"({"choices":[]})", "r"),
                    MalformedResponse);
}

TEST_CASE("missing credential raises AuthError before any request") {
    HttpProviderConfig cfg;
    cfg.name = "auth";
    cfg.base_url = "http://127.0.0.1:1";
    cfg.api_key_env = "VERBATIM_TEST_KEY_THAT_IS_UNSET";
    HttpProvider provider(std::move(cfg));
    Conversation conv;
    conv.messages.push_back({Role::User, "hello"});
    CompletionParams params;
    params.model = "m";
    CHECK_THROWS_AS(provider.complete(conv, params), AuthError);
}
