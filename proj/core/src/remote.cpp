#include <chrono>
#include <cstdlib>
#include <thread>

#include "httplib.h"
#include "json.hpp"
#include "vml/backend.hpp"

namespace vml {
namespace {

const char* role_name(Role r) {
  switch (r) {
    case Role::system: return "system";
    case Role::user: return "user";
    case Role::assistant: return "assistant";
  }
  return "user";
}

// Splits "http://host:port/v1" into origin and path prefix.
struct UrlParts {
  std::string origin;
  std::string prefix;
};

UrlParts split_url(const std::string& url) {
  auto scheme = url.find("://");
  size_t host_start = scheme == std::string::npos ? 0 : scheme + 3;
  auto slash = url.find('/', host_start);
  if (slash == std::string::npos) return {url, ""};
  std::string prefix = url.substr(slash);
  while (!prefix.empty() && prefix.back() == '/') prefix.pop_back();
  return {url.substr(0, slash), prefix};
}

class RemoteBackend : public Backend {
 public:
  explicit RemoteBackend(RemoteConfig cfg) : cfg_(std::move(cfg)) {
    if (cfg_.api_key.empty()) {
      const char* k = std::getenv("VML_API_KEY");
      if (k) cfg_.api_key = k;
    }
  }

  std::string chat(const std::vector<ChatMessage>& messages,
                   const SamplingParams& sampling) override {
    validate_chat_messages(messages);
    nlohmann::json body{{"model", cfg_.model},
                        {"temperature", sampling.temperature},
                        {"max_tokens", sampling.max_tokens}};
    auto& msgs = body["messages"] = nlohmann::json::array();
    for (const auto& m : messages)
      msgs.push_back({{"role", role_name(m.role)}, {"content", m.content}});

    UrlParts url = split_url(cfg_.base_url);
    std::string last_error = "no attempt made";
    for (int attempt = 0; attempt <= sampling.retries; ++attempt) {
      if (attempt > 0)
        std::this_thread::sleep_for(std::chrono::milliseconds(
            cfg_.backoff_base_ms * (1 << (attempt - 1))));
      httplib::Client client(url.origin);
      client.set_connection_timeout(
          std::chrono::duration_cast<std::chrono::seconds>(sampling.timeout));
      client.set_read_timeout(
          std::chrono::duration_cast<std::chrono::seconds>(sampling.timeout));
      httplib::Headers headers;
      if (!cfg_.api_key.empty())
        headers.emplace("Authorization", "Bearer " + cfg_.api_key);
      auto res = client.Post(url.prefix + "/chat/completions", headers,
                             body.dump(), "application/json");
      if (!res) {
        last_error = "network error: " + httplib::to_string(res.error());
        continue;  // retryable
      }
      if (res->status == 429 || res->status >= 500) {
        last_error = "status " + std::to_string(res->status);
        continue;  // retryable
      }
      if (res->status < 200 || res->status >= 300) {
        std::string detail = res->body;
        try {
          auto j = nlohmann::json::parse(res->body);
          if (j.contains("error") && j["error"].contains("message"))
            detail = j["error"]["message"].get<std::string>();
        } catch (...) {
        }
        throw Error(ErrorCode::backend_unavailable,
                    "provider error, status " + std::to_string(res->status) +
                        ": " + detail);
      }
      try {
        auto j = nlohmann::json::parse(res->body);
        return j.at("choices").at(0).at("message").at("content")
            .get<std::string>();
      } catch (const std::exception& e) {
        throw Error(ErrorCode::backend_unavailable,
                    std::string("malformed provider response: ") + e.what());
      }
    }
    throw Error(ErrorCode::backend_unavailable,
                "remote backend unavailable after " +
                    std::to_string(sampling.retries + 1) +
                    " attempts; last error: " + last_error);
  }

 private:
  RemoteConfig cfg_;
};

}  // namespace

std::unique_ptr<Backend> make_remote_backend(RemoteConfig cfg) {
  return std::make_unique<RemoteBackend>(std::move(cfg));
}

}  // namespace vml
