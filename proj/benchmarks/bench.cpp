// Microbenchmarks for the hot paths: response parsing, prompt rendering,
// numeric block formatting, dataset generation, and loss computation.

#include <benchmark/benchmark.h>

#include "vml/datasets.hpp"
#include "vml/numfmt.hpp"
#include "vml/parsing.hpp"
#include "vml/prompting.hpp"
#include "vml/training.hpp"

namespace {

const vml::TaskSpec kRegression{vml::TaskFamily::regression_1d, 2, 0,
                                "linear"};

vml::TaskFixture& linear_fixture() {
  static vml::TaskFixture fx = vml::load_task_fixture(
      std::string(VML_FIXTURES_DIR) + "/templates/linear");
  return fx;
}

void BM_ParseLearnerOutput(benchmark::State& state) {
  const std::string response =
      "The pattern is affine, so I evaluate it at the input.\n"
      "Output: [10.56]";
  for (auto _ : state)
    benchmark::DoNotOptimize(vml::parse_learner_output(response, kRegression));
}
BENCHMARK(BM_ParseLearnerOutput);

void BM_ParseOptimizerOutput(benchmark::State& state) {
  const std::string response =
      "Reasoning:\n\nThe residuals shrink when the slope moves toward 3.\n\n"
      "New Pattern Descriptions:\n\ny = 3.00x + 4.00";
  for (auto _ : state)
    benchmark::DoNotOptimize(
        vml::parse_optimizer_output(response, kRegression));
}
BENCHMARK(BM_ParseOptimizerOutput);

void BM_RenderLearnerPrompt(benchmark::State& state) {
  auto& fx = linear_fixture();
  vml::Input x = std::vector<double>{1.23};
  for (auto _ : state)
    benchmark::DoNotOptimize(vml::render_learner_prompt(
        fx.prompts, fx.task, "y = 3.00x + 4.00", x));
}
BENCHMARK(BM_RenderLearnerPrompt);

void BM_RenderOptimizerPrompt(benchmark::State& state) {
  auto& fx = linear_fixture();
  std::vector<vml::Input> inputs;
  std::vector<vml::Prediction> preds;
  std::vector<vml::Value> targets;
  for (int i = 0; i < 10; ++i) {
    inputs.push_back(std::vector<double>{0.17 * i});
    preds.push_back({vml::Value{3.0 * 0.17 * i + 4.1}, "", true});
    targets.push_back(vml::Value{3.0 * 0.17 * i + 4.0});
  }
  vml::OptimizerConfig cfg;
  for (auto _ : state)
    benchmark::DoNotOptimize(vml::render_optimizer_prompt(
        fx.prompts, fx.task, "y = 3.00x + 4.00", inputs, preds, targets, cfg,
        {}, std::nullopt));
}
BENCHMARK(BM_RenderOptimizerPrompt);

void BM_FormatBatch(benchmark::State& state) {
  std::vector<std::vector<double>> rows;
  vml::Rng rng(11);
  for (int i = 0; i < 10; ++i)
    rows.push_back({rng.uniform(-10, 10), rng.uniform(-10, 10)});
  for (auto _ : state)
    benchmark::DoNotOptimize(vml::format_batch(rows, 3));
}
BENCHMARK(BM_FormatBatch);

void BM_GenLinear(benchmark::State& state) {
  std::uint64_t seed = 0;
  for (auto _ : state)
    benchmark::DoNotOptimize(vml::gen_linear(100, ++seed));
}
BENCHMARK(BM_GenLinear);

void BM_LossCrossEntropy(benchmark::State& state) {
  std::vector<std::vector<double>> preds(100), targets(100);
  vml::Rng rng(12);
  for (int i = 0; i < 100; ++i) {
    double p = rng.uniform(0.01, 0.99);
    preds[i] = {p, 1.0 - p};
    targets[i] = (i % 2) ? std::vector<double>{0.0, 1.0}
                         : std::vector<double>{1.0, 0.0};
  }
  for (auto _ : state)
    benchmark::DoNotOptimize(vml::loss_cross_entropy(preds, targets));
}
BENCHMARK(BM_LossCrossEntropy);

}  // namespace

BENCHMARK_MAIN();
