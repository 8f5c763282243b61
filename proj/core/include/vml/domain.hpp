#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "vml/error.hpp"

namespace vml {

enum class TaskFamily {
  regression_1d,
  classification_2d_prob,
  classification_2d_label,
  classification_text,
};

TaskFamily family_from_string(const std::string& s);
const char* to_string(TaskFamily f);

struct TaskSpec {
  TaskFamily family = TaskFamily::regression_1d;
  int decimals = 2;
  int label_count = 0;  // classification only
  std::string template_variant;
};

// A data point input: numeric vector (1-D or 2-D) or a text string.
using Input = std::variant<std::vector<double>, std::string>;

// A target or prediction value: real, probability vector, or integer label.
using Value = std::variant<double, std::vector<double>, int>;

struct DataPoint {
  Input input;
  Value target;
};

struct Prediction {
  Value value;
  std::string raw_text;
  bool parse_ok = false;
};

struct OptimizerUpdate {
  std::string reasoning;
  std::string new_theta;
};

enum class UpdateStrategy { replace, append, append_summarized };

UpdateStrategy strategy_from_string(const std::string& s);
const char* to_string(UpdateStrategy s);

struct OptimizerConfig {
  int history_window = 1;
  bool include_loss_value = false;
  UpdateStrategy update_strategy = UpdateStrategy::replace;
  int summary_length_cap = 256;
  double temperature = 0.0;
};

// The verbalized model: an immutable prior plus the learnable description.
struct ModelParams {
  std::string prior_text;
  std::string learned_text;
};

inline ModelParams make_model_params(std::string prior, std::string theta0) {
  if (theta0.empty())
    throw Error(ErrorCode::invalid_argument, "theta0 must be non-empty");
  return ModelParams{std::move(prior), std::move(theta0)};
}

inline std::string full_theta_text(const ModelParams& p) {
  if (p.prior_text.empty()) return p.learned_text;
  return p.prior_text + " " + p.learned_text;
}

struct StepRecord {
  int epoch = 0;
  int step = 0;  // 1-based, global across epochs
  std::vector<Input> inputs;
  std::vector<Value> targets;
  std::vector<Prediction> predictions;
  std::string raw_optimizer_prompt;
  std::string raw_optimizer_response;
  std::optional<double> loss_mse;
  std::optional<double> loss_ce;
  std::optional<double> loss_zero_one;
  std::optional<double> accuracy;
  std::string theta_before;
  std::string theta_after;
  std::string reasoning;
  int parse_failures = 0;
  double duration_ms = 0.0;
};

struct RunConfig {
  TaskSpec task;
  int n = 100;
  int batch_size = 10;
  int epochs = 2;
  std::uint64_t seed = 0;
  OptimizerConfig optimizer;
  double learner_temperature = 0.0;
  std::string output_dir;
};

}  // namespace vml
