#include "vml/prompting.hpp"

#include <fstream>

#include "json.hpp"
#include "vml/numfmt.hpp"

namespace vml {
namespace {

std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in)
    throw Error(ErrorCode::io_error, "cannot read " + p.string());
  return std::string(std::istreambuf_iterator<char>(in), {});
}

std::string read_file_or_empty(const std::filesystem::path& p) {
  return std::filesystem::exists(p) ? read_file(p) : std::string();
}

// Each placeholder must appear exactly once; a template with zero or
// duplicate occurrences is a broken fixture, not a rendering choice.
std::string replace_once(std::string tpl, const std::string& key,
                         const std::string& value) {
  std::string token = "{" + key + "}";
  size_t pos = tpl.find(token);
  if (pos == std::string::npos)
    throw Error(ErrorCode::invalid_argument,
                "template missing placeholder " + token);
  if (tpl.find(token, pos + 1) != std::string::npos)
    throw Error(ErrorCode::invalid_argument,
                "template has duplicate placeholder " + token);
  tpl.replace(pos, token.size(), value);
  return tpl;
}

const std::vector<double>& numeric_input(const Input& in) {
  if (!std::holds_alternative<std::vector<double>>(in))
    throw Error(ErrorCode::invalid_argument,
                "numeric input expected for this task family");
  return std::get<std::vector<double>>(in);
}

}  // namespace

TaskFixture load_task_fixture(const std::filesystem::path& dir) {
  TaskFixture f;
  auto meta = nlohmann::json::parse(read_file(dir / "task.json"));
  f.task.family = family_from_string(meta.at("family").get<std::string>());
  f.task.decimals = meta.at("decimals").get<int>();
  f.task.label_count = meta.at("label_count").get<int>();
  f.task.template_variant = meta.at("template_variant").get<std::string>();
  f.prompts.learner_template = read_file(dir / "learner.txt");
  f.prompts.optimizer_template = read_file(dir / "optimizer.txt");
  f.prompts.learner_format_rules = read_file(dir / "learner_format_rules.txt");
  f.prompts.optimizer_format_rules =
      read_file(dir / "optimizer_format_rules.txt");
  f.theta0 = read_file(dir / "theta0.txt");
  f.prior = read_file_or_empty(dir / "prior.txt");
  return f;
}

std::string format_input(const TaskSpec& task, const Input& input) {
  if (task.family == TaskFamily::classification_text) {
    if (!std::holds_alternative<std::string>(input))
      throw Error(ErrorCode::invalid_argument,
                  "text input expected for text classification");
    return std::get<std::string>(input);
  }
  return format_vector(numeric_input(input), task.decimals);
}

std::string format_input_block(const TaskSpec& task,
                               const std::vector<Input>& inputs) {
  if (task.family == TaskFamily::classification_text) {
    std::vector<std::string> items;
    for (const auto& in : inputs)
      items.push_back(std::get<std::string>(in));
    return format_text_list(items);
  }
  std::vector<std::vector<double>> rows;
  for (const auto& in : inputs) rows.push_back(numeric_input(in));
  return format_batch(rows, task.decimals);
}

std::string format_value_block(const TaskSpec& task,
                               const std::vector<Value>& values) {
  switch (task.family) {
    case TaskFamily::regression_1d: {
      std::vector<std::vector<double>> rows;
      for (const auto& v : values) rows.push_back({std::get<double>(v)});
      return format_batch(rows, task.decimals);
    }
    case TaskFamily::classification_2d_prob: {
      // Learners reply with two-decimal probabilities regardless of the
      // input precision, and the prompts align the block the same way.
      std::vector<std::vector<double>> rows;
      for (const auto& v : values)
        rows.push_back(std::get<std::vector<double>>(v));
      return format_batch(rows, 2);
    }
    default: {
      std::vector<int> labels;
      for (const auto& v : values) labels.push_back(std::get<int>(v));
      return format_label_batch(labels);
    }
  }
}

std::string format_loss_line(double loss) {
  return "** Overall Loss: ** " + format_shortest(loss) + "\n\n";
}

std::vector<ChatMessage> render_learner_prompt(const PromptFixtureSet& fx,
                                               const TaskSpec& task,
                                               const std::string& theta_full,
                                               const Input& input) {
  if (theta_full.empty())
    throw Error(ErrorCode::invalid_argument, "theta_full must be non-empty");
  std::string body = fx.learner_template;
  body = replace_once(std::move(body), "theta", theta_full);
  body = replace_once(std::move(body), "input", format_input(task, input));
  body = replace_once(std::move(body), "format_rules",
                      fx.learner_format_rules);
  return {ChatMessage{Role::user, std::move(body)}};
}

std::vector<ChatMessage> render_optimizer_prompt(
    const PromptFixtureSet& fx, const TaskSpec& task,
    const std::string& theta_full, const std::vector<Input>& inputs,
    const std::vector<Prediction>& predictions,
    const std::vector<Value>& targets, const OptimizerConfig& cfg,
    const std::vector<Exchange>& history, std::optional<double> loss) {
  if (inputs.size() != predictions.size() ||
      inputs.size() != targets.size())
    throw Error(ErrorCode::invalid_argument,
                "optimizer prompt: inputs/predictions/targets size mismatch");

  std::vector<Value> pred_values;
  for (const auto& p : predictions) pred_values.push_back(p.value);

  std::string body = fx.optimizer_template;
  body = replace_once(std::move(body), "inputs",
                      format_input_block(task, inputs));
  body = replace_once(std::move(body), "theta", theta_full);
  body = replace_once(std::move(body), "predictions",
                      format_value_block(task, pred_values));
  body = replace_once(std::move(body), "targets",
                      format_value_block(task, targets));
  body = replace_once(std::move(body), "loss_line",
                      cfg.include_loss_value && loss ? format_loss_line(*loss)
                                                     : "");
  body = replace_once(std::move(body), "format_rules",
                      fx.optimizer_format_rules);

  std::vector<ChatMessage> messages;
  size_t window = std::min<size_t>(
      cfg.history_window < 0 ? 0 : cfg.history_window, history.size());
  for (size_t i = history.size() - window; i < history.size(); ++i) {
    messages.push_back({Role::user, history[i].prompt});
    messages.push_back({Role::assistant, history[i].response});
  }
  messages.push_back({Role::user, std::move(body)});
  return messages;
}

}  // namespace vml
