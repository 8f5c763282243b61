#include "vml/training.hpp"

#include <chrono>
#include <cmath>
#include <fstream>

#include "json.hpp"
#include "vml/parsing.hpp"

namespace vml {

double loss_mse(const std::vector<double>& preds,
                const std::vector<double>& targets) {
  if (preds.empty() || preds.size() != targets.size())
    throw Error(ErrorCode::invalid_argument, "loss_mse: length mismatch");
  double sum = 0;
  for (size_t i = 0; i < preds.size(); ++i) {
    double d = targets[i] - preds[i];
    sum += d * d;
  }
  return sum / static_cast<double>(preds.size());
}

double loss_cross_entropy(const std::vector<std::vector<double>>& preds,
                          const std::vector<std::vector<double>>& targets) {
  if (preds.empty() || preds.size() != targets.size())
    throw Error(ErrorCode::invalid_argument,
                "loss_cross_entropy: length mismatch");
  double sum = 0;
  size_t k = targets[0].size();
  for (size_t i = 0; i < preds.size(); ++i) {
    if (preds[i].size() != k || targets[i].size() != k)
      throw Error(ErrorCode::invalid_argument,
                  "loss_cross_entropy: width mismatch");
    for (size_t j = 0; j < k; ++j)
      sum -= targets[i][j] * std::log(preds[i][j] + 1e-8);
  }
  return sum / static_cast<double>(preds.size() * k);
}

double loss_zero_one(const std::vector<int>& preds,
                     const std::vector<int>& targets) {
  if (preds.empty() || preds.size() != targets.size())
    throw Error(ErrorCode::invalid_argument, "loss_zero_one: length mismatch");
  int wrong = 0;
  for (size_t i = 0; i < preds.size(); ++i)
    if (preds[i] != targets[i]) ++wrong;
  return static_cast<double>(wrong) / static_cast<double>(preds.size());
}

int argmax(const std::vector<double>& v) {
  int best = 0;
  for (size_t i = 1; i < v.size(); ++i)
    if (v[i] > v[best]) best = static_cast<int>(i);
  return best;
}

StepLosses compute_losses(const TaskSpec& task,
                          const std::vector<Prediction>& preds,
                          const std::vector<Value>& targets) {
  StepLosses out;
  switch (task.family) {
    case TaskFamily::regression_1d: {
      std::vector<double> p, t;
      for (const auto& pr : preds) p.push_back(std::get<double>(pr.value));
      for (const auto& tv : targets) t.push_back(std::get<double>(tv));
      out.mse = loss_mse(p, t);
      break;
    }
    case TaskFamily::classification_2d_prob: {
      std::vector<std::vector<double>> p, t;
      std::vector<int> pl, tl;
      for (const auto& pr : preds) {
        p.push_back(std::get<std::vector<double>>(pr.value));
        pl.push_back(argmax(p.back()));
      }
      for (const auto& tv : targets) {
        t.push_back(std::get<std::vector<double>>(tv));
        tl.push_back(argmax(t.back()));
      }
      out.ce = loss_cross_entropy(p, t);
      out.zero_one = loss_zero_one(pl, tl);
      out.accuracy = 1.0 - *out.zero_one;
      break;
    }
    default: {
      std::vector<int> p, t;
      for (const auto& pr : preds) p.push_back(std::get<int>(pr.value));
      for (const auto& tv : targets) t.push_back(std::get<int>(tv));
      out.zero_one = loss_zero_one(p, t);
      out.accuracy = 1.0 - *out.zero_one;
      break;
    }
  }
  return out;
}

void apply_parse_fallbacks(std::vector<Prediction>& preds,
                           const std::vector<Value>& targets,
                           const TaskSpec& task) {
  if (task.family != TaskFamily::regression_1d) return;  // placeholders from
  // the parser already carry the classification fallbacks; the regression
  // fallback (batch-mean target) needs the batch.
  double mean = 0;
  for (const auto& t : targets) mean += std::get<double>(t);
  mean /= static_cast<double>(targets.size());
  for (auto& p : preds)
    if (!p.parse_ok) p.value = mean;
}

std::vector<Prediction> forward_batch(Backend& learner, const TaskSpec& task,
                                      const PromptFixtureSet& fx,
                                      const ModelParams& params,
                                      const std::vector<Input>& inputs,
                                      const SamplingParams& sampling) {
  if (inputs.empty())
    throw Error(ErrorCode::invalid_argument, "forward_batch: empty batch");
  std::vector<Prediction> out;
  std::optional<Error> outage;
  std::string theta = full_theta_text(params);
  for (const auto& in : inputs) {
    auto messages = render_learner_prompt(fx, task, theta, in);
    try {
      std::string text = learner.chat(messages, sampling);
      out.push_back(parse_learner_output(text, task));
    } catch (const Error& e) {
      if (e.code() == ErrorCode::backend_unavailable) {
        // Keep settling the batch so partial results can be logged, then
        // propagate the outage.
        if (!outage) outage = e;
        out.push_back(parse_learner_output("", task));
      } else if (e.code() == ErrorCode::oracle_cannot_interpret) {
        // An uninterpretable parameter text is a bad generation, not an
        // infrastructure failure: record it as a parse failure.
        Prediction p = parse_learner_output("", task);
        p.raw_text = e.what();
        out.push_back(std::move(p));
      } else {
        throw;
      }
    }
  }
  if (outage) throw *outage;
  return out;
}

OptimizerStepResult optimizer_step(
    Backend& optimizer, const TaskSpec& task, const PromptFixtureSet& fx,
    const std::string& theta_full, const std::vector<Input>& inputs,
    const std::vector<Prediction>& preds, const std::vector<Value>& targets,
    const OptimizerConfig& cfg, const std::vector<Exchange>& history,
    std::optional<double> loss) {
  auto messages = render_optimizer_prompt(fx, task, theta_full, inputs, preds,
                                          targets, cfg, history, loss);
  SamplingParams sampling;
  sampling.temperature = cfg.temperature;
  OptimizerStepResult res;
  res.prompt = messages.back().content;
  res.response = optimizer.chat(messages, sampling);
  try {
    res.update = parse_optimizer_output(res.response, task);
    return res;
  } catch (const Error& e) {
    if (e.code() != ErrorCode::optimizer_parse_failure) throw;
  }
  // One corrective retry with the format reminder appended.
  messages.back().content +=
      "\n\nYour previous reply did not follow the required format. Reply "
      "again with a 'Reasoning:' section followed by the new descriptions "
      "section, exactly as instructed above.";
  res.prompt = messages.back().content;
  res.response = optimizer.chat(messages, sampling);
  res.update = parse_optimizer_output(res.response, task);  // may throw
  return res;
}

std::string apply_update(UpdateStrategy strategy, const std::string& old_theta,
                         const OptimizerUpdate& update, Backend* summarizer,
                         int summary_length_cap) {
  switch (strategy) {
    case UpdateStrategy::replace:
      return update.new_theta;
    case UpdateStrategy::append:
      return old_theta + "\n" + update.new_theta;
    case UpdateStrategy::append_summarized: {
      if (!summarizer)
        throw Error(ErrorCode::invalid_argument,
                    "append_summarized requires a summarizer backend");
      std::vector<ChatMessage> messages{
          {Role::user,
           "Summarize the following model description in at most " +
               std::to_string(summary_length_cap) +
               " tokens, keeping every exact parameter value:\n\n" +
               old_theta}};
      std::string summary = summarizer->chat(messages, SamplingParams{});
      return summary + "\n" + update.new_theta;
    }
  }
  throw Error(ErrorCode::invalid_argument, "unknown update strategy");
}

std::optional<std::string> truncate_history(std::vector<Exchange>& history,
                                            int cap) {
  if (cap < 0)
    throw Error(ErrorCode::invalid_argument, "history cap must be >= 0");
  size_t old_size = history.size();
  if (old_size <= static_cast<size_t>(cap)) return std::nullopt;
  history.erase(history.begin(),
                history.end() - static_cast<std::ptrdiff_t>(cap));
  return "Shortening the state from " + std::to_string(old_size) + " to " +
         std::to_string(cap);
}

namespace {

nlohmann::json value_to_json(const Value& v) {
  if (std::holds_alternative<double>(v)) return std::get<double>(v);
  if (std::holds_alternative<int>(v)) return std::get<int>(v);
  return std::get<std::vector<double>>(v);
}

nlohmann::json input_to_json(const Input& in) {
  if (std::holds_alternative<std::string>(in))
    return std::get<std::string>(in);
  return std::get<std::vector<double>>(in);
}

std::optional<double> step_loss_for_prompt(const TaskSpec& task,
                                           const StepLosses& l) {
  switch (task.family) {
    case TaskFamily::regression_1d: return l.mse;
    case TaskFamily::classification_2d_prob: return l.ce;
    default: return l.zero_one;
  }
}

}  // namespace

std::string step_to_jsonl(const StepRecord& rec) {
  nlohmann::json j;
  j["epoch"] = rec.epoch;
  j["step"] = rec.step;
  j["inputs"] = nlohmann::json::array();
  for (const auto& in : rec.inputs) j["inputs"].push_back(input_to_json(in));
  j["targets"] = nlohmann::json::array();
  for (const auto& t : rec.targets) j["targets"].push_back(value_to_json(t));
  j["predictions"] = nlohmann::json::array();
  j["raw_texts"] = nlohmann::json::array();
  for (const auto& p : rec.predictions) {
    j["predictions"].push_back(value_to_json(p.value));
    j["raw_texts"].push_back(p.raw_text);
  }
  if (rec.loss_mse) j["loss_mse"] = *rec.loss_mse;
  if (rec.loss_ce) j["loss_ce"] = *rec.loss_ce;
  if (rec.loss_zero_one) j["loss_zero_one"] = *rec.loss_zero_one;
  if (rec.accuracy) j["accuracy"] = *rec.accuracy;
  j["theta_before"] = rec.theta_before;
  j["theta_after"] = rec.theta_after;
  j["reasoning"] = rec.reasoning;
  j["parse_failures"] = rec.parse_failures;
  j["duration_ms"] = rec.duration_ms;
  return j.dump();
}

std::vector<RunLogRow> load_run_rows(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in)
    throw Error(ErrorCode::io_error, "cannot open run log " + path.string());
  std::vector<RunLogRow> rows;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
      RunLogRow r;
      r.epoch = j.at("epoch").get<int>();
      r.step = j.at("step").get<int>();
      if (j.contains("loss_mse")) r.loss_mse = j["loss_mse"].get<double>();
      if (j.contains("loss_ce")) r.loss_ce = j["loss_ce"].get<double>();
      if (j.contains("loss_zero_one"))
        r.loss_zero_one = j["loss_zero_one"].get<double>();
      if (j.contains("accuracy")) r.accuracy = j["accuracy"].get<double>();
      rows.push_back(r);
    } catch (const std::exception& e) {
      throw Error(ErrorCode::ingestion_error,
                  "corrupt run log at line " + std::to_string(lineno) + ": " +
                      e.what());
    }
  }
  return rows;
}

RunLog train(TrainSession& s, ModelParams params) {
  const RunConfig& cfg = s.config;
  if (cfg.batch_size < 1)
    throw Error(ErrorCode::invalid_argument, "batch size must be >= 1");
  if (static_cast<int>(s.dataset.points.size()) < cfg.batch_size)
    throw Error(ErrorCode::invalid_argument,
                "dataset smaller than one batch");

  std::ofstream log_out;
  if (!cfg.output_dir.empty()) {
    std::filesystem::create_directories(cfg.output_dir);
    log_out.open(std::filesystem::path(cfg.output_dir) / "run.jsonl",
                 std::ios::trunc);
    if (!log_out)
      throw Error(ErrorCode::io_error,
                  "cannot open run log in " + cfg.output_dir);
  }

  RunLog log;
  log.config = cfg;
  std::vector<Exchange> history;
  int steps_per_epoch =
      static_cast<int>(s.dataset.points.size()) / cfg.batch_size;
  int step = 0;
  SamplingParams learner_sampling;
  learner_sampling.temperature = cfg.learner_temperature;

  auto persist = [&](const StepRecord& rec) {
    log.steps.push_back(rec);
    if (log_out) {
      log_out << step_to_jsonl(rec) << '\n';
      log_out.flush();
    }
    if (s.on_step) s.on_step(rec);
  };

  for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
    for (int b = 0; b < steps_per_epoch; ++b) {
      ++step;
      auto t0 = std::chrono::steady_clock::now();
      StepRecord rec;
      rec.epoch = epoch;
      rec.step = step;
      for (int i = 0; i < cfg.batch_size; ++i) {
        const auto& p = s.dataset.points[b * cfg.batch_size + i];
        rec.inputs.push_back(p.input);
        rec.targets.push_back(p.target);
      }
      rec.theta_before = params.learned_text;

      try {
        rec.predictions = forward_batch(*s.learner, cfg.task, s.fixtures,
                                        params, rec.inputs, learner_sampling);
      } catch (const Error& e) {
        rec.theta_after = params.learned_text;
        persist(rec);  // flush the partial step, then abort the run
        throw;
      }
      apply_parse_fallbacks(rec.predictions, rec.targets, cfg.task);
      for (const auto& p : rec.predictions)
        if (!p.parse_ok) ++rec.parse_failures;

      StepLosses losses = compute_losses(cfg.task, rec.predictions,
                                         rec.targets);
      rec.loss_mse = losses.mse;
      rec.loss_ce = losses.ce;
      rec.loss_zero_one = losses.zero_one;
      rec.accuracy = losses.accuracy;

      try {
        auto opt = optimizer_step(
            *s.optimizer, cfg.task, s.fixtures, full_theta_text(params),
            rec.inputs, rec.predictions, rec.targets, cfg.optimizer, history,
            step_loss_for_prompt(cfg.task, losses));
        rec.raw_optimizer_prompt = opt.prompt;
        rec.raw_optimizer_response = opt.response;
        rec.reasoning = opt.update.reasoning;
        params.learned_text =
            apply_update(cfg.optimizer.update_strategy, params.learned_text,
                         opt.update, s.summarizer,
                         cfg.optimizer.summary_length_cap);
        history.push_back({opt.prompt, opt.response});
        if (auto msg = truncate_history(history, cfg.optimizer.history_window);
            msg && s.on_log)
          s.on_log(*msg);
      } catch (const Error& e) {
        if (e.code() == ErrorCode::backend_unavailable) {
          rec.theta_after = params.learned_text;
          persist(rec);
          throw;
        }
        if (e.code() != ErrorCode::optimizer_parse_failure) throw;
        // Both attempts unusable: keep the current parameters and move on.
        ++rec.parse_failures;
        if (s.on_log)
          s.on_log(std::string("optimizer step failed, parameters kept: ") +
                   e.what());
      }
      rec.theta_after = params.learned_text;
      rec.duration_ms = std::chrono::duration<double, std::milli>(
                            std::chrono::steady_clock::now() - t0)
                            .count();
      persist(rec);
    }
  }
  log.final_params = params;
  return log;
}

EvalResult evaluate(Backend& learner, const TaskSpec& task,
                    const PromptFixtureSet& fx, const ModelParams& params,
                    const std::vector<DataPoint>& eval_set,
                    const SamplingParams& sampling) {
  if (eval_set.empty())
    throw Error(ErrorCode::invalid_argument, "evaluate: empty eval set");
  std::vector<Input> inputs;
  std::vector<Value> targets;
  for (const auto& p : eval_set) {
    inputs.push_back(p.input);
    targets.push_back(p.target);
  }
  EvalResult res;
  res.predictions = forward_batch(learner, task, fx, params, inputs, sampling);
  apply_parse_fallbacks(res.predictions, targets, task);
  for (const auto& p : res.predictions)
    if (!p.parse_ok) ++res.parse_failures;
  res.losses = compute_losses(task, res.predictions, targets);
  return res;
}

ReplayBundle load_replay(const std::filesystem::path& dir) {
  std::ifstream in(dir / "steps.json");
  if (!in)
    throw Error(ErrorCode::io_error,
                "cannot open replay file " + (dir / "steps.json").string());
  nlohmann::json j = nlohmann::json::parse(in);

  ReplayBundle rb;
  std::string variant = j.at("task").get<std::string>();
  rb.config.n = j.at("n").get<int>();
  rb.config.batch_size = j.at("batch_size").get<int>();
  rb.config.epochs = j.at("epochs").get<int>();
  rb.theta0 = j.at("theta0").get<std::string>();

  // Replayed runs are regression transcripts; the dataset is rebuilt from
  // the first epoch's recorded batches (later epochs revisit the same
  // points because batching is sequential without reshuffling).
  rb.config.task = {TaskFamily::regression_1d, variant == "linear" ? 2 : 1, 0,
                    variant};
  rb.dataset.task = rb.config.task;
  rb.dataset.generator_id = "replay:" + variant;

  int steps_per_epoch = rb.config.n / rb.config.batch_size;
  int idx = 0;
  for (const auto& st : j.at("steps")) {
    if (idx < steps_per_epoch) {
      auto inputs = st.at("inputs");
      auto targets = st.at("targets");
      for (size_t i = 0; i < inputs.size(); ++i) {
        DataPoint p;
        p.input = inputs[i].get<std::vector<double>>();
        p.target = targets[i][0].get<double>();
        rb.dataset.points.push_back(std::move(p));
      }
    }
    for (const auto& r : st.at("learner_responses"))
      rb.learner_script.push_back(r.get<std::string>());
    rb.optimizer_script.push_back(st.at("optimizer_response").get<std::string>());
    rb.expect_theta.push_back(st.at("theta_after").get<std::string>());
    if (st.contains("expect_loss") && !st.at("expect_loss").is_null())
      rb.expect_loss.push_back(st.at("expect_loss").get<double>());
    else
      rb.expect_loss.push_back(std::nullopt);
    ++idx;
  }
  return rb;
}

}  // namespace vml
