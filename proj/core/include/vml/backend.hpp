#pragma once

#include <chrono>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "vml/domain.hpp"

namespace vml {

enum class Role { system, user, assistant };

struct ChatMessage {
  Role role = Role::user;
  std::string content;
};

struct SamplingParams {
  double temperature = 0.0;
  int max_tokens = 2048;
  int retries = 3;
  std::chrono::milliseconds timeout{30000};
};

class Backend {
 public:
  virtual ~Backend() = default;
  // messages must be non-empty and end with a user message.
  virtual std::string chat(const std::vector<ChatMessage>& messages,
                           const SamplingParams& sampling) = 0;
};

void validate_chat_messages(const std::vector<ChatMessage>& messages);

// Replays a fixed list of responses in order. In strict mode each call's
// final user message must equal the paired expected prompt.
class ScriptedBackend : public Backend {
 public:
  explicit ScriptedBackend(std::vector<std::string> script);
  ScriptedBackend(std::vector<std::string> script,
                  std::vector<std::string> expected_prompts);

  std::string chat(const std::vector<ChatMessage>& messages,
                   const SamplingParams& sampling) override;

  size_t calls() const;

 private:
  std::vector<std::string> script_;
  std::vector<std::string> expected_;
  bool strict_ = false;
  size_t next_ = 0;
  mutable std::mutex mu_;
};

enum class OracleRole { learner, optimizer };

// Interprets symbolic parameter texts exactly: affine/quadratic formulas for
// regression, threshold and circle rules for 2-D label classification. Fails
// loudly (oracle_cannot_interpret) on anything else.
std::unique_ptr<Backend> make_oracle_backend(OracleRole role,
                                             const TaskSpec& task);

struct RemoteConfig {
  std::string base_url;  // e.g. "http://host:8000/v1"
  std::string model;
  std::string api_key;            // empty -> read VML_API_KEY
  int backoff_base_ms = 1000;     // 1s/2s/4s by default
};

// OpenAI-compatible chat-completions client.
std::unique_ptr<Backend> make_remote_backend(RemoteConfig cfg);

}  // namespace vml
