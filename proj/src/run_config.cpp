#include "verbatim/run_config.hpp"

#include "verbatim/errors.hpp"
#include "verbatim/util.hpp"

namespace verbatim {

using nlohmann::json;
using nlohmann::ordered_json;

TokenizerSpec ProviderSetup::tokenizer_spec() const {
    if (tokenizer_kind == "chars") return TokenizerSpec::char_approx(chars_per_token);
    if (tokenizer_kind == "vocab") {
        if (vocab_path.empty()) throw ConfigError("tokenizer 'vocab' needs vocab_path");
        return TokenizerSpec::provider_native(GreedyVocabTokenizer::from_file(vocab_path));
    }
    throw ConfigError("unknown tokenizer kind '" + tokenizer_kind + "'");
}

namespace {

ordered_json constraints_to_json(const ProviderConstraints& c) {
    ordered_json j;
    j["user_first"] = c.user_first;
    j["supports_system_role"] = c.supports_system_role;
    j["rate_limit"] = c.rate_limit;
    j["rate_window_ms"] = c.rate_window.count();
    j["max_in_flight"] = c.max_in_flight;
    return j;
}

ProviderConstraints constraints_from_json(const json& j) {
    ProviderConstraints c;
    c.user_first = j.value("user_first", false);
    c.supports_system_role = j.value("supports_system_role", true);
    c.rate_limit = j.value("rate_limit", 60u);
    if (c.rate_limit == 0) throw ConfigError("rate_limit must be positive");
    c.rate_window = std::chrono::milliseconds(j.value("rate_window_ms", std::int64_t(60000)));
    c.max_in_flight = j.value("max_in_flight", 4u);
    return c;
}

ordered_json mock_to_json(const MockBehavior& m) {
    ordered_json j;
    j["seed"] = m.seed;
    j["default_mode"] = std::string(memorization_mode_name(m.default_behavior.mode));
    j["default_noise_p"] = m.default_behavior.noise_p;
    ordered_json per = ordered_json::object();
    std::vector<std::string> ids;
    ids.reserve(m.per_article.size());
    for (const auto& [id, b] : m.per_article) ids.push_back(id);
    std::sort(ids.begin(), ids.end());
    for (const auto& id : ids) {
        const auto& b = m.per_article.at(id);
        per[id] = {{"mode", std::string(memorization_mode_name(b.mode))},
                   {"noise_p", b.noise_p}};
    }
    j["per_article"] = std::move(per);
    j["refusal_prob"] = m.refusal_prob;
    j["filter_prob"] = m.filter_prob;
    j["transport_error_prob"] = m.transport_error_prob;
    j["filter_sets_stop_reason"] = m.filter_sets_stop_reason;
    j["base_cps_mean"] = m.base_cps_mean;
    j["base_cps_std"] = m.base_cps_std;
    j["filtered_cps_mean"] = m.filtered_cps_mean;
    j["filtered_cps_std"] = m.filtered_cps_std;
    j["chars_per_token"] = m.chars_per_token;
    return j;
}

MockBehavior mock_from_json(const json& j) {
    MockBehavior m;
    m.seed = j.value("seed", std::uint64_t(0));
    if (j.contains("default_mode")) {
        auto mode = memorization_mode_from_name(j.at("default_mode").get<std::string>());
        if (!mode) throw ConfigError("unknown memorization mode");
        m.default_behavior.mode = *mode;
    }
    m.default_behavior.noise_p = j.value("default_noise_p", 0.0);
    if (j.contains("per_article")) {
        for (const auto& [id, b] : j.at("per_article").items()) {
            ArticleBehavior ab;
            auto mode = memorization_mode_from_name(b.at("mode").get<std::string>());
            if (!mode) throw ConfigError("unknown memorization mode for article " + id);
            ab.mode = *mode;
            ab.noise_p = b.value("noise_p", 0.0);
            m.per_article[id] = ab;
        }
    }
    m.refusal_prob = j.value("refusal_prob", 0.0);
    m.filter_prob = j.value("filter_prob", 0.0);
    m.transport_error_prob = j.value("transport_error_prob", 0.0);
    m.filter_sets_stop_reason = j.value("filter_sets_stop_reason", true);
    m.base_cps_mean = j.value("base_cps_mean", 100.0);
    m.base_cps_std = j.value("base_cps_std", 5.0);
    m.filtered_cps_mean = j.value("filtered_cps_mean", 20.0);
    m.filtered_cps_std = j.value("filtered_cps_std", 2.0);
    m.chars_per_token = j.value("chars_per_token", 4u);
    m.validate();
    return m;
}

}  // namespace

RunConfig RunConfig::from_json(const json& j) {
    RunConfig c;
    c.seed = j.value("seed", std::uint64_t(0));
    c.output_dir = j.value("output_dir", "");
    if (j.contains("attacks")) {
        c.attacks.clear();
        for (const auto& a : j.at("attacks")) {
            auto id = attack_from_name(a.get<std::string>());
            if (!id) throw ConfigError("unknown attack '" + a.get<std::string>() + "'");
            c.attacks.push_back(*id);
        }
    }
    if (j.contains("prefix_sizes")) {
        c.prefix_sizes.clear();
        for (const auto& p : j.at("prefix_sizes")) {
            const auto v = p.get<std::size_t>();
            if (v == 0) throw ConfigError("prefix sizes must be positive");
            c.prefix_sizes.push_back(v);
        }
    }
    if (j.contains("corpus")) {
        for (const auto& [name, path] : j.at("corpus").items()) {
            auto cat = category_from_name(name);
            if (!cat) throw ConfigError("unknown corpus category '" + name + "'");
            c.corpus_paths[*cat] = path.get<std::string>();
        }
    }
    if (j.contains("params")) {
        const auto& p = j.at("params");
        c.params.temperature = p.value("temperature", 0.0);
        if (c.params.temperature < 0) throw ConfigError("temperature must be >= 0");
        c.params.max_output_tokens = p.value("max_output_tokens", std::size_t(2048));
        c.params.timeout =
            std::chrono::milliseconds(p.value("timeout_ms", std::int64_t(120000)));
    }
    c.concurrency = j.value("concurrency", 4u);
    if (j.contains("providers")) {
        for (const auto& pj : j.at("providers")) {
            ProviderSetup p;
            p.name = pj.at("name").get<std::string>();
            const auto kind = pj.value("kind", "mock");
            if (kind == "mock") {
                p.kind = ProviderSetup::Kind::Mock;
            } else if (kind == "openai" || kind == "anthropic" || kind == "http") {
                p.kind = ProviderSetup::Kind::Http;
                p.dialect = kind == "anthropic" ? Dialect::Anthropic : Dialect::OpenAI;
            } else {
                throw ConfigError("unknown provider kind '" + kind + "'");
            }
            for (const auto& m : pj.at("models")) p.models.push_back(m.get<std::string>());
            if (p.models.empty()) throw ConfigError("provider " + p.name + " has no models");
            if (pj.contains("constraints")) {
                p.constraints = constraints_from_json(pj.at("constraints"));
            }
            if (pj.contains("tokenizer")) {
                const auto& t = pj.at("tokenizer");
                p.tokenizer_kind = t.value("kind", "chars");
                p.chars_per_token = t.value("chars_per_token", 4u);
                if (p.chars_per_token == 0) throw ConfigError("chars_per_token must be >= 1");
                p.vocab_path = t.value("vocab_path", "");
            }
            p.base_url = pj.value("base_url", "");
            p.api_key_env = pj.value("api_key_env", "");
            if (pj.contains("retry")) {
                const auto& r = pj.at("retry");
                p.retry.attempts = r.value("attempts", 3u);
                if (r.contains("backoff_ms")) {
                    p.retry.backoff.clear();
                    for (const auto& ms : r.at("backoff_ms")) {
                        p.retry.backoff.emplace_back(ms.get<std::int64_t>());
                    }
                }
            }
            if (pj.contains("mock")) p.mock = mock_from_json(pj.at("mock"));
            if (p.kind == ProviderSetup::Kind::Http && p.base_url.empty()) {
                throw ConfigError("http provider " + p.name + " needs base_url");
            }
            c.providers.push_back(std::move(p));
        }
    }
    if (j.contains("model_params_b")) {
        for (const auto& [model, billions] : j.at("model_params_b").items()) {
            c.model_params_b[model] = billions.get<double>();
        }
    }
    c.templates_dir = j.value("templates_dir", "");
    c.refusal_patterns_path = j.value("refusal_patterns", "");
    return c;
}

RunConfig RunConfig::load(const std::string& path) {
    json j;
    try {
        j = json::parse(read_file(path));
    } catch (const json::exception& e) {
        throw ConfigError("config " + path + " is not valid JSON: " + e.what());
    }
    try {
        return from_json(j);
    } catch (const json::exception& e) {
        throw ConfigError("config " + path + ": " + e.what());
    }
}

ordered_json RunConfig::to_json() const {
    ordered_json j;
    j["seed"] = seed;
    j["output_dir"] = output_dir;
    auto attacks_json = ordered_json::array();
    for (const auto a : attacks) attacks_json.push_back(std::string(attack_name(a)));
    j["attacks"] = std::move(attacks_json);
    j["prefix_sizes"] = prefix_sizes;
    ordered_json corpus = ordered_json::object();
    for (const auto& [cat, path] : corpus_paths) corpus[std::string(category_name(cat))] = path;
    j["corpus"] = std::move(corpus);
    j["params"] = {{"temperature", params.temperature},
                   {"max_output_tokens", params.max_output_tokens},
                   {"timeout_ms", params.timeout.count()}};
    j["concurrency"] = concurrency;
    auto providers_json = ordered_json::array();
    for (const auto& p : providers) {
        ordered_json pj;
        pj["name"] = p.name;
        pj["kind"] = p.kind == ProviderSetup::Kind::Mock
                         ? "mock"
                         : (p.dialect == Dialect::Anthropic ? "anthropic" : "openai");
        pj["models"] = p.models;
        pj["constraints"] = constraints_to_json(p.constraints);
        pj["tokenizer"] = {{"kind", p.tokenizer_kind},
                           {"chars_per_token", p.chars_per_token},
                           {"vocab_path", p.vocab_path}};
        if (p.kind == ProviderSetup::Kind::Http) {
            pj["base_url"] = p.base_url;
            pj["api_key_env"] = p.api_key_env;
            auto backoff = ordered_json::array();
            for (const auto& ms : p.retry.backoff) backoff.push_back(ms.count());
            pj["retry"] = {{"attempts", p.retry.attempts}, {"backoff_ms", std::move(backoff)}};
        } else {
            pj["mock"] = mock_to_json(p.mock);
        }
        providers_json.push_back(std::move(pj));
    }
    j["providers"] = std::move(providers_json);
    ordered_json sizes = ordered_json::object();
    for (const auto& [model, billions] : model_params_b) sizes[model] = billions;
    j["model_params_b"] = std::move(sizes);
    j["templates_dir"] = templates_dir;
    j["refusal_patterns"] = refusal_patterns_path;
    return j;
}

std::uint64_t RunConfig::config_hash() const { return fnv1a64(to_json().dump()); }

}  // namespace verbatim
