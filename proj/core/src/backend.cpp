#include "vml/backend.hpp"

#include <sstream>

namespace vml {

void validate_chat_messages(const std::vector<ChatMessage>& messages) {
  if (messages.empty())
    throw Error(ErrorCode::invalid_argument, "chat: empty message list");
  if (messages.back().role != Role::user)
    throw Error(ErrorCode::invalid_argument,
                "chat: last message must have role user");
  for (const auto& m : messages)
    if (m.content.empty())
      throw Error(ErrorCode::invalid_argument, "chat: empty message content");
}

ScriptedBackend::ScriptedBackend(std::vector<std::string> script)
    : script_(std::move(script)) {
  if (script_.empty())
    throw Error(ErrorCode::invalid_argument, "scripted backend: empty script");
}

ScriptedBackend::ScriptedBackend(std::vector<std::string> script,
                                 std::vector<std::string> expected_prompts)
    : script_(std::move(script)),
      expected_(std::move(expected_prompts)),
      strict_(true) {
  if (script_.empty())
    throw Error(ErrorCode::invalid_argument, "scripted backend: empty script");
  if (expected_.size() != script_.size())
    throw Error(ErrorCode::invalid_argument,
                "scripted backend: script/expected size mismatch");
}

namespace {

// First differing line, for actionable mismatch reports.
std::string first_diff(const std::string& got, const std::string& want) {
  std::istringstream g(got), w(want);
  std::string gl, wl;
  int line = 0;
  while (true) {
    ++line;
    bool hg = static_cast<bool>(std::getline(g, gl));
    bool hw = static_cast<bool>(std::getline(w, wl));
    if (!hg && !hw) return "(no difference found; lengths differ?)";
    if (!hg) gl = "<end of text>";
    if (!hw) wl = "<end of text>";
    if (gl != wl) {
      std::ostringstream os;
      os << "line " << line << ":\n  got:      " << gl
         << "\n  expected: " << wl;
      return os.str();
    }
  }
}

}  // namespace

std::string ScriptedBackend::chat(const std::vector<ChatMessage>& messages,
                                  const SamplingParams&) {
  validate_chat_messages(messages);
  std::lock_guard<std::mutex> lock(mu_);
  if (next_ >= script_.size())
    throw Error(ErrorCode::script_exhausted,
                "scripted backend: call " + std::to_string(next_ + 1) +
                    " exceeds script of " + std::to_string(script_.size()));
  if (strict_ && messages.back().content != expected_[next_])
    throw Error(ErrorCode::script_mismatch,
                "scripted backend: prompt mismatch at call " +
                    std::to_string(next_ + 1) + ", " +
                    first_diff(messages.back().content, expected_[next_]));
  return script_[next_++];
}

size_t ScriptedBackend::calls() const {
  std::lock_guard<std::mutex> lock(mu_);
  return next_;
}

}  // namespace vml
