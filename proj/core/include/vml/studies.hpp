#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "vml/backend.hpp"
#include "vml/domain.hpp"
#include "vml/prompting.hpp"
#include "vml/training.hpp"

namespace vml {

struct GridPointStats {
  Input input;
  double mean = 0.0;
  double stdev = 0.0;
  int n_ok = 0;
  int n_fail = 0;
  bool single_sample = false;  // stdev reported as 0 from one sample
  std::vector<double> samples;
};

using GridTable = std::vector<GridPointStats>;

// `repeats` independent learner calls per grid point; parse failures are
// excluded from the statistics and counted. A point where every repeat fails
// is flagged (n_ok=0), never fatal.
GridTable grid_eval(Backend& backend, const TaskSpec& task,
                    const PromptFixtureSet& fx, const std::string& theta,
                    const std::vector<Input>& grid, int repeats,
                    double temperature);

struct ErrorRow {
  double x = 0.0;
  double mean = 0.0;
  double truth = 0.0;
  double error = 0.0;  // mean - f(x)
};

struct ErrorReport {
  std::vector<ErrorRow> rows;
  double mae = 0.0;
  double max_abs = 0.0;
};

// ground_truth_id: linear_3x4 (3x+4), poly_3x2x2 (3x^2+x+2), sin (sin x + 2).
ErrorReport numerical_error_report(const GridTable& table,
                                   const std::string& ground_truth_id);

struct InvarianceResult {
  std::vector<GridTable> tables;  // one per variant
  struct Pair {
    int a = 0, b = 0;
    double max_mean_discrepancy = 0.0;
    int skipped_points = 0;  // grid points where a side had no samples
  };
  std::vector<Pair> pairs;
};

InvarianceResult invariance_study(Backend& backend, const TaskSpec& task,
                                  const PromptFixtureSet& fx,
                                  const std::vector<std::string>& variants,
                                  const std::vector<Input>& grid, int repeats);

struct EnsembleResult {
  std::optional<double> mean;                 // regression
  std::optional<double> stdev;                // regression
  std::optional<std::vector<double>> probs;   // classification, renormalized
  std::vector<Prediction> samples;
  int n_fail = 0;
};

EnsembleResult ensemble_predict(Backend& backend, const TaskSpec& task,
                                const PromptFixtureSet& fx,
                                const ModelParams& params, const Input& input,
                                int samples, double temperature);

struct RunComparison {
  struct Row {
    int step = 0;
    double loss_a = 0.0, loss_b = 0.0, delta = 0.0;
  };
  std::vector<Row> rows;
  double final_delta = 0.0;
  double auc_delta = 0.0;  // sum of per-step deltas
};

RunComparison compare_runs(const std::vector<RunLogRow>& a,
                           const std::vector<RunLogRow>& b);

void write_grid_csv(const GridTable& table, const std::filesystem::path& path);
void write_error_csv(const GridTable& table, const ErrorReport& report,
                     const std::filesystem::path& path);
std::string invariance_report_text(const InvarianceResult& result);

// 41 equispaced points over [lo, hi], the default study grid.
std::vector<Input> default_grid(double lo, double hi, int points = 41);

}  // namespace vml
