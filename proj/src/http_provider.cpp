#include "verbatim/http_provider.hpp"

#include <atomic>
#include <cstdlib>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "verbatim/errors.hpp"
#include "verbatim/unicode.hpp"
#include "verbatim/util.hpp"

namespace verbatim {

namespace {

using nlohmann::json;

std::string next_local_request_id() {
    static std::atomic<std::uint64_t> counter{0};
    return "local-" + to_hex(fnv1a64("req") ^ counter.fetch_add(1));
}

StopReason normalize_stop_reason(std::string_view raw) {
    if (raw == "stop" || raw == "end_turn" || raw == "stop_sequence") return StopReason::Stop;
    if (raw == "length" || raw == "max_tokens") return StopReason::Length;
    if (raw == "content_filter" || raw == "content-filter" || raw == "contentFiltered") {
        return StopReason::ContentFilter;
    }
    return StopReason::Other;
}

}  // namespace

HttpProvider::HttpProvider(HttpProviderConfig config)
    : config_(std::move(config)),
      throttle_(config_.constraints.rate_limit, config_.constraints.rate_window,
                config_.constraints.max_in_flight) {
    if (config_.path.empty()) {
        config_.path =
            config_.dialect == Dialect::OpenAI ? "/v1/chat/completions" : "/v1/messages";
    }
}

const ProviderConstraints& HttpProvider::constraints() const { return config_.constraints; }
const std::string& HttpProvider::name() const { return config_.name; }

std::string HttpProvider::encode_request(Dialect dialect, const Conversation& conv,
                                         const CompletionParams& params,
                                         const ProviderConstraints& constraints) {
    nlohmann::ordered_json j;
    j["model"] = params.model;
    j["temperature"] = params.temperature;
    j["max_tokens"] = params.max_output_tokens;
    if (dialect == Dialect::OpenAI) {
        auto& messages = j["messages"] = json::array();
        for (const auto& m : conv.messages) {
            Role role = m.role;
            if (role == Role::System && !constraints.supports_system_role) role = Role::User;
            messages.push_back({{"role", std::string(role_name(role))}, {"content", m.content}});
        }
    } else {
        // System turns ride in the top-level field for this dialect.
        std::string system;
        auto& messages = j["messages"] = json::array();
        for (const auto& m : conv.messages) {
            if (m.role == Role::System) {
                if (!system.empty()) system += "\n";
                system += m.content;
            } else {
                messages.push_back(
                    {{"role", std::string(role_name(m.role))}, {"content", m.content}});
            }
        }
        if (!system.empty()) j["system"] = system;
    }
    return j.dump();
}

CompletionResult HttpProvider::parse_response(Dialect dialect, const std::string& body,
                                              const std::string& request_id) {
    json j;
    try {
        j = json::parse(body);
    } catch (const json::exception& e) {
        throw MalformedResponse(std::string("response body is not JSON: ") + e.what(), request_id);
    }
    CompletionResult result;
    result.request_id = request_id;
    try {
        if (dialect == Dialect::OpenAI) {
            const auto& choices = j.at("choices");
            if (!choices.is_array() || choices.empty()) {
                throw MalformedResponse("response has no choices", request_id);
            }
            const auto& choice = choices.at(0);
            const auto& message = choice.at("message");
            if (message.contains("content") && !message.at("content").is_null()) {
                result.text = message.at("content").get<std::string>();
            }
            if (choice.contains("finish_reason") && choice.at("finish_reason").is_string()) {
                result.stop_reason_raw = choice.at("finish_reason").get<std::string>();
            }
            if (j.contains("usage") && j.at("usage").contains("completion_tokens")) {
                result.output_tokens = j.at("usage").at("completion_tokens").get<std::size_t>();
            }
            if (j.contains("id") && j.at("id").is_string()) {
                result.request_id = j.at("id").get<std::string>();
            }
        } else {
            if (j.contains("content") && j.at("content").is_array()) {
                for (const auto& block : j.at("content")) {
                    if (block.contains("text")) result.text += block.at("text").get<std::string>();
                }
            }
            if (j.contains("stop_reason") && j.at("stop_reason").is_string()) {
                result.stop_reason_raw = j.at("stop_reason").get<std::string>();
            }
            if (j.contains("usage") && j.at("usage").contains("output_tokens")) {
                result.output_tokens = j.at("usage").at("output_tokens").get<std::size_t>();
            }
            if (j.contains("id") && j.at("id").is_string()) {
                result.request_id = j.at("id").get<std::string>();
            }
        }
    } catch (const json::exception& e) {
        throw MalformedResponse(std::string("unexpected response shape: ") + e.what(), request_id);
    }
    result.stop_reason = normalize_stop_reason(result.stop_reason_raw);
    result.output_chars = uni::char_count(result.text);
    return result;
}

CompletionResult HttpProvider::complete(const Conversation& conv,
                                        const CompletionParams& params) {
    const auto guard = throttle_.acquire();
    const std::string request_body =
        encode_request(config_.dialect, conv, params, config_.constraints);
    const std::string request_id = next_local_request_id();

    httplib::Headers headers;
    if (!config_.api_key_env.empty()) {
        const char* key = std::getenv(config_.api_key_env.c_str());
        if (key == nullptr || key[0] == '\0') {
            throw AuthError("credential environment variable " + config_.api_key_env +
                                " is not set",
                            request_id);
        }
        if (config_.dialect == Dialect::OpenAI) {
            headers.emplace("Authorization", std::string("Bearer ") + key);
        } else {
            headers.emplace("x-api-key", key);
            headers.emplace("anthropic-version", "2023-06-01");
        }
    }

    std::string last_transport_error;
    bool saw_rate_limit = false;
    for (unsigned attempt = 0; attempt < std::max(1u, config_.retry.attempts); ++attempt) {
        if (attempt > 0) std::this_thread::sleep_for(config_.retry.delay(attempt - 1));

        httplib::Client client(config_.base_url);
        const auto timeout_s = std::chrono::duration_cast<std::chrono::seconds>(params.timeout);
        client.set_connection_timeout(timeout_s.count(), 0);
        client.set_read_timeout(timeout_s.count(), 0);
        client.set_write_timeout(timeout_s.count(), 0);

        const auto sent_at = now_unix_ms();
        const auto t0 = std::chrono::steady_clock::now();
        std::chrono::steady_clock::time_point first_byte = t0;
        bool got_byte = false;
        auto res = client.Post(config_.path, headers, request_body, "application/json",
                               [&](std::uint64_t, std::uint64_t) {
                                   if (!got_byte) {
                                       first_byte = std::chrono::steady_clock::now();
                                       got_byte = true;
                                   }
                                   return true;
                               });
        const auto t1 = std::chrono::steady_clock::now();
        const std::string body = res ? res->body : std::string();

        if (!res) {
            last_transport_error = httplib::to_string(res.error());
            continue;
        }
        if (res->status == 401 || res->status == 403) {
            throw AuthError("authentication rejected (HTTP " + std::to_string(res->status) + ")",
                            request_id);
        }
        if (res->status == 429) {
            saw_rate_limit = true;
            continue;
        }
        if (res->status >= 500) {
            last_transport_error = "HTTP " + std::to_string(res->status);
            continue;
        }
        if (res->status != 200) {
            throw MalformedResponse("unexpected HTTP status " + std::to_string(res->status) +
                                        ": " + body.substr(0, 200),
                                    request_id);
        }

        std::string rid = request_id;
        if (res->has_header("x-request-id")) rid = res->get_header_value("x-request-id");
        auto result = parse_response(config_.dialect, body, rid);
        result.latency = std::chrono::duration_cast<std::chrono::microseconds>(t1 - t0);
        result.first_byte_latency =
            std::chrono::duration_cast<std::chrono::microseconds>(first_byte - t0);
        if (result.latency.count() <= 0) result.latency = std::chrono::microseconds(1);
        result.sent_at_ms = sent_at;
        result.received_at_ms = now_unix_ms();
        return result;
    }
    if (saw_rate_limit) {
        throw RateLimited("rate limited after " + std::to_string(config_.retry.attempts) +
                              " attempts",
                          request_id);
    }
    throw Timeout("transport failed after " + std::to_string(config_.retry.attempts) +
                      " attempts: " + last_transport_error,
                  request_id);
}

}  // namespace verbatim
