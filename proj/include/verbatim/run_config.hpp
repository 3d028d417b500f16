#pragma once

#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "verbatim/http_provider.hpp"
#include "verbatim/mock_provider.hpp"
#include "verbatim/provider.hpp"
#include "verbatim/tokenize.hpp"

namespace verbatim {

struct ProviderSetup {
    enum class Kind { Mock, Http };

    std::string name;
    Kind kind = Kind::Mock;
    std::vector<std::string> models;
    ProviderConstraints constraints;

    // tokenization used to slice A3 prefixes for this provider
    std::string tokenizer_kind = "chars";  // "chars" | "vocab"
    unsigned chars_per_token = 4;
    std::string vocab_path;

    // http only
    Dialect dialect = Dialect::OpenAI;
    std::string base_url;
    std::string api_key_env;
    RetryPolicy retry;

    // mock only
    MockBehavior mock;

    TokenizerSpec tokenizer_spec() const;
};

struct RunConfig {
    std::uint64_t seed = 0;
    std::string output_dir;
    std::vector<AttackId> attacks{AttackId::A1, AttackId::A2, AttackId::A3};
    std::vector<std::size_t> prefix_sizes{25, 50, 100, 200, 400};
    std::map<Category, std::string> corpus_paths;
    CompletionParams params;  // model field is filled per cell
    unsigned concurrency = 4;
    std::vector<ProviderSetup> providers;
    std::map<std::string, double> model_params_b;  // model -> parameter count, billions
    std::string templates_dir;           // empty = builtin default texts
    std::string refusal_patterns_path;   // empty = built-in defaults

    static RunConfig from_json(const nlohmann::json& j);
    static RunConfig load(const std::string& path);
    nlohmann::ordered_json to_json() const;

    // Hash of the canonical JSON form; resuming requires an exact match.
    std::uint64_t config_hash() const;
};

}  // namespace verbatim
