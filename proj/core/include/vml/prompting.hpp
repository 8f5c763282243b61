#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "vml/backend.hpp"
#include "vml/domain.hpp"

namespace vml {

struct PromptFixtureSet {
  std::string learner_template;    // placeholders {theta} {input} {format_rules}
  std::string optimizer_template;  // {inputs} {theta} {predictions} {targets}
                                   // {loss_line} {format_rules}
  std::string learner_format_rules;
  std::string optimizer_format_rules;
};

// One template directory: templates plus task metadata and the initial
// parameter texts.
struct TaskFixture {
  TaskSpec task;
  PromptFixtureSet prompts;
  std::string theta0;
  std::string prior;  // empty when the variant ships no prior
};

TaskFixture load_task_fixture(const std::filesystem::path& dir);

// A completed optimizer exchange kept as conversation history.
struct Exchange {
  std::string prompt;
  std::string response;
};

// Input rendered the way the prompts show it: "[1.26]", "[-2.178  9.99 ]",
// or the raw text for text tasks.
std::string format_input(const TaskSpec& task, const Input& input);

// Batch blocks for the optimizer prompt.
std::string format_input_block(const TaskSpec& task,
                               const std::vector<Input>& inputs);
std::string format_value_block(const TaskSpec& task,
                               const std::vector<Value>& values);

// "** Overall Loss: ** <repr>\n\n"
std::string format_loss_line(double loss);

std::vector<ChatMessage> render_learner_prompt(const PromptFixtureSet& fx,
                                               const TaskSpec& task,
                                               const std::string& theta_full,
                                               const Input& input);

std::vector<ChatMessage> render_optimizer_prompt(
    const PromptFixtureSet& fx, const TaskSpec& task,
    const std::string& theta_full, const std::vector<Input>& inputs,
    const std::vector<Prediction>& predictions,
    const std::vector<Value>& targets, const OptimizerConfig& cfg,
    const std::vector<Exchange>& history, std::optional<double> loss);

}  // namespace vml
