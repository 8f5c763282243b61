#pragma once

#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "vml/backend.hpp"
#include "vml/datasets.hpp"
#include "vml/domain.hpp"
#include "vml/prompting.hpp"

namespace vml {

// ---- losses ----

double loss_mse(const std::vector<double>& preds,
                const std::vector<double>& targets);

// -(1/(N*K)) sum y*ln(p + 1e-8); matches the logged classification loss.
double loss_cross_entropy(const std::vector<std::vector<double>>& preds,
                          const std::vector<std::vector<double>>& targets);

double loss_zero_one(const std::vector<int>& preds,
                     const std::vector<int>& targets);

// First index of the maximum (ties go to the lower index).
int argmax(const std::vector<double>& v);

struct StepLosses {
  std::optional<double> mse, ce, zero_one, accuracy;
};

StepLosses compute_losses(const TaskSpec& task,
                          const std::vector<Prediction>& preds,
                          const std::vector<Value>& targets);

// Replaces failed-parse placeholder values with the declared fallbacks:
// regression -> batch-mean target; prob classification -> uniform vector;
// label classification -> sentinel counted wrong.
void apply_parse_fallbacks(std::vector<Prediction>& preds,
                           const std::vector<Value>& targets,
                           const TaskSpec& task);

// ---- Algorithm steps ----

std::vector<Prediction> forward_batch(Backend& learner, const TaskSpec& task,
                                      const PromptFixtureSet& fx,
                                      const ModelParams& params,
                                      const std::vector<Input>& inputs,
                                      const SamplingParams& sampling = {});

struct OptimizerStepResult {
  OptimizerUpdate update;
  std::string prompt;    // final rendered user prompt (after any retry)
  std::string response;  // raw backend response
};

// Renders the optimizer prompt, calls the backend, parses. A parse failure is
// retried once with a corrective instruction appended; the second failure
// propagates as optimizer_parse_failure.
OptimizerStepResult optimizer_step(
    Backend& optimizer, const TaskSpec& task, const PromptFixtureSet& fx,
    const std::string& theta_full, const std::vector<Input>& inputs,
    const std::vector<Prediction>& preds, const std::vector<Value>& targets,
    const OptimizerConfig& cfg, const std::vector<Exchange>& history,
    std::optional<double> loss);

std::string apply_update(UpdateStrategy strategy, const std::string& old_theta,
                         const OptimizerUpdate& update,
                         Backend* summarizer = nullptr,
                         int summary_length_cap = 256);

// Keeps the most recent `cap` exchanges; returns the log line
// "Shortening the state from {old} to {new}" when anything was dropped.
std::optional<std::string> truncate_history(std::vector<Exchange>& history,
                                            int cap);

// ---- full runs ----

struct RunLog {
  RunConfig config;
  std::vector<StepRecord> steps;
  ModelParams final_params;
};

struct TrainSession {
  RunConfig config;
  PromptFixtureSet fixtures;
  Dataset dataset;
  Backend* learner = nullptr;
  Backend* optimizer = nullptr;
  Backend* summarizer = nullptr;  // required for append_summarized
  std::function<void(const StepRecord&)> on_step;
  std::function<void(const std::string&)> on_log;
};

RunLog train(TrainSession& session, ModelParams params);

struct EvalResult {
  StepLosses losses;
  std::vector<Prediction> predictions;
  int parse_failures = 0;
};

EvalResult evaluate(Backend& learner, const TaskSpec& task,
                    const PromptFixtureSet& fx, const ModelParams& params,
                    const std::vector<DataPoint>& eval_set,
                    const SamplingParams& sampling = {});

// ---- persistence ----

std::string step_to_jsonl(const StepRecord& rec);

struct RunLogRow {
  int epoch = 0;
  int step = 0;
  std::optional<double> loss_mse, loss_ce, loss_zero_one, accuracy;
};

// Throws ingestion_error naming the offending line on corrupt input.
std::vector<RunLogRow> load_run_rows(const std::filesystem::path& path);

// ---- transcript replay ----

// A recorded run: the batches, every learner/optimizer response in order,
// the expected parameter chain, and (where recorded) the expected loss.
struct ReplayBundle {
  RunConfig config;
  Dataset dataset;
  std::string theta0;
  std::vector<std::string> learner_script;
  std::vector<std::string> optimizer_script;
  std::vector<std::optional<double>> expect_loss;  // per step
  std::vector<std::string> expect_theta;           // theta_after per step
};

ReplayBundle load_replay(const std::filesystem::path& dir);

}  // namespace vml
