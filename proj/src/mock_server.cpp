#include "verbatim/mock_server.hpp"

#include <httplib.h>
#include <json.hpp>

#include "verbatim/errors.hpp"

namespace verbatim {

struct MockHttpServer::Impl {
    httplib::Server server;
};

MockHttpServer::MockHttpServer(std::shared_ptr<MockProvider> provider)
    : impl_(std::make_unique<Impl>()), provider_(std::move(provider)) {}

MockHttpServer::~MockHttpServer() { stop(); }

void MockHttpServer::start() {
    using nlohmann::json;
    impl_->server.Post("/v1/chat/completions", [this](const httplib::Request& req,
                                                      httplib::Response& res) {
        json body;
        try {
            body = json::parse(req.body);
        } catch (const json::exception&) {
            res.status = 400;
            res.set_content(R"({"error":"request body is not JSON"})", "application/json");
            return;
        }
        try {
            Conversation conv;
            for (const auto& m : body.at("messages")) {
                auto role = role_from_name(m.at("role").get<std::string>());
                if (!role) throw Error("unknown role");
                conv.messages.push_back({*role, m.at("content").get<std::string>()});
            }
            CompletionParams params;
            params.model = body.value("model", "mock");
            params.temperature = body.value("temperature", 0.0);
            params.max_output_tokens = body.value("max_tokens", std::size_t(2048));

            const auto result = provider_->complete(conv, params);

            std::string finish = "stop";
            switch (result.stop_reason) {
                case StopReason::Length: finish = "length"; break;
                case StopReason::Stop: finish = "stop"; break;
                case StopReason::ContentFilter: finish = "content_filter"; break;
                case StopReason::Other: finish = result.stop_reason_raw; break;
            }
            nlohmann::ordered_json out;
            out["id"] = result.request_id;
            out["object"] = "chat.completion";
            out["model"] = params.model;
            out["choices"] = json::array({{{"index", 0},
                                           {"message", {{"role", "assistant"},
                                                        {"content", result.text}}},
                                           {"finish_reason", finish}}});
            out["usage"] = {{"completion_tokens", result.output_tokens.value_or(0)}};
            res.set_content(out.dump(), "application/json");
        } catch (const ProviderError& e) {
            res.status = 503;
            res.set_content(std::string(R"({"error":")") + e.what() + R"("})",
                            "application/json");
        } catch (const std::exception& e) {
            res.status = 400;
            res.set_content(std::string(R"({"error":")") + e.what() + R"("})",
                            "application/json");
        }
    });

    port_ = impl_->server.bind_to_any_port("127.0.0.1");
    if (port_ <= 0) throw IoError("mock server could not bind a local port");
    thread_ = std::thread([this] { impl_->server.listen_after_bind(); });
    impl_->server.wait_until_ready();
}

void MockHttpServer::stop() {
    if (thread_.joinable()) {
        impl_->server.stop();
        thread_.join();
    }
}

}  // namespace verbatim
