// Chat-completion adapter over plain HTTP. The endpoint and model come from
// configuration; the credential is read from an environment variable and
// sent as a bearer token.
#pragma once

#include <cstdlib>
#include <string>

#include <httplib.h>
#include <json.hpp>

#include "skirmish/gen/provider.hpp"

namespace skirmish::gen {

struct HttpProviderConfig {
    std::string endpoint = "http://localhost:8000/v1/chat/completions";
    std::string model = "default";
    std::string api_key_env = "SKIRMISH_PROVIDER_KEY";
    int timeout_seconds = 120;
};

class HttpProvider : public TextProvider {
public:
    explicit HttpProvider(HttpProviderConfig config) : config_(std::move(config)) {
        auto scheme_end = config_.endpoint.find("://");
        if (scheme_end == std::string::npos) {
            throw ConfigError("provider endpoint must be a full URL");
        }
        auto host_start = scheme_end + 3;
        auto path_start = config_.endpoint.find('/', host_start);
        host_ = config_.endpoint.substr(0, path_start);
        path_ = path_start == std::string::npos ? "/" : config_.endpoint.substr(path_start);
    }

    std::string name() const override { return "http:" + config_.model; }

    ProviderResponse complete(const ProviderRequest& request) override {
        nlohmann::json messages = nlohmann::json::array();
        if (!request.prompt.system.empty()) {
            messages.push_back({{"role", "system"}, {"content", request.prompt.system}});
        }
        for (const auto& [role, text] : request.prompt.messages) {
            messages.push_back({{"role", role}, {"content", text}});
        }
        nlohmann::json body{{"model", config_.model},
                            {"messages", messages},
                            {"temperature", request.temperature},
                            {"max_tokens", request.max_tokens}};

        httplib::Client client(host_);
        client.set_read_timeout(config_.timeout_seconds, 0);
        httplib::Headers headers;
        if (const char* key = std::getenv(config_.api_key_env.c_str())) {
            headers.emplace("Authorization", std::string("Bearer ") + key);
        }
        auto result = client.Post(path_, headers, body.dump(), "application/json");
        if (!result) {
            throw ProviderError("provider transport failure: " +
                                httplib::to_string(result.error()));
        }
        if (result->status < 200 || result->status >= 300) {
            throw ProviderError("provider returned HTTP " + std::to_string(result->status));
        }
        try {
            nlohmann::json j = nlohmann::json::parse(result->body);
            const auto& choice = j.at("choices").at(0);
            return {choice.at("message").at("content").get<std::string>(),
                    choice.value("finish_reason", "stop")};
        } catch (const nlohmann::json::exception& e) {
            throw GenerationError(std::string("malformed provider response: ") + e.what());
        }
    }

private:
    HttpProviderConfig config_;
    std::string host_;
    std::string path_;
};

}  // namespace skirmish::gen
