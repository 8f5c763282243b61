#include "vml/studies.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "vml/numfmt.hpp"
#include "vml/parsing.hpp"

namespace vml {
namespace {

double scalar_of(const Prediction& p) {
  if (std::holds_alternative<double>(p.value))
    return std::get<double>(p.value);
  if (std::holds_alternative<int>(p.value))
    return static_cast<double>(std::get<int>(p.value));
  throw Error(ErrorCode::invalid_argument,
              "grid statistics need scalar predictions");
}

double input_x(const Input& in) {
  const auto& v = std::get<std::vector<double>>(in);
  return v.empty() ? 0.0 : v[0];
}

}  // namespace

GridTable grid_eval(Backend& backend, const TaskSpec& task,
                    const PromptFixtureSet& fx, const std::string& theta,
                    const std::vector<Input>& grid, int repeats,
                    double temperature) {
  if (repeats < 1)
    throw Error(ErrorCode::invalid_argument, "grid_eval: repeats must be >= 1");
  SamplingParams sampling;
  sampling.temperature = temperature;
  GridTable table;
  for (const auto& in : grid) {
    GridPointStats st;
    st.input = in;
    auto messages = render_learner_prompt(fx, task, theta, in);
    for (int r = 0; r < repeats; ++r) {
      Prediction p;
      try {
        p = parse_learner_output(backend.chat(messages, sampling), task);
      } catch (const Error& e) {
        if (e.code() == ErrorCode::oracle_cannot_interpret ||
            e.code() == ErrorCode::backend_unavailable) {
          ++st.n_fail;
          continue;
        }
        throw;
      }
      if (!p.parse_ok) {
        ++st.n_fail;
        continue;
      }
      st.samples.push_back(scalar_of(p));
      ++st.n_ok;
    }
    if (st.n_ok > 0) {
      // a zero-temperature backend returns identical samples; keep the mean
      // exact in that common case instead of accumulating rounding error
      bool all_equal = true;
      for (double v : st.samples) all_equal &= (v == st.samples[0]);
      if (all_equal) {
        st.mean = st.samples[0];
        st.stdev = 0.0;
      } else {
        double sum = 0;
        for (double v : st.samples) sum += v;
        st.mean = sum / st.n_ok;
        double ss = 0;
        for (double v : st.samples) ss += (v - st.mean) * (v - st.mean);
        st.stdev = std::sqrt(ss / st.n_ok);
      }
      st.single_sample = st.n_ok == 1;
    }
    table.push_back(std::move(st));
  }
  return table;
}

ErrorReport numerical_error_report(const GridTable& table,
                                   const std::string& ground_truth_id) {
  double (*f)(double) = nullptr;
  if (ground_truth_id == "linear_3x4")
    f = [](double x) { return 3.0 * x + 4.0; };
  else if (ground_truth_id == "poly_3x2x2")
    f = [](double x) { return 3.0 * x * x + x + 2.0; };
  else if (ground_truth_id == "sin")
    f = [](double x) { return std::sin(x) + 2.0; };
  else
    throw Error(ErrorCode::invalid_argument,
                "unknown ground truth id: " + ground_truth_id);

  ErrorReport rep;
  double sum = 0;
  int counted = 0;
  for (const auto& st : table) {
    if (st.n_ok == 0) continue;  // flagged points carry no error value
    ErrorRow row;
    row.x = input_x(st.input);
    row.mean = st.mean;
    row.truth = f(row.x);
    row.error = st.mean - row.truth;
    sum += std::abs(row.error);
    rep.max_abs = std::max(rep.max_abs, std::abs(row.error));
    rep.rows.push_back(row);
    ++counted;
  }
  rep.mae = counted ? sum / counted : 0.0;
  return rep;
}

InvarianceResult invariance_study(Backend& backend, const TaskSpec& task,
                                  const PromptFixtureSet& fx,
                                  const std::vector<std::string>& variants,
                                  const std::vector<Input>& grid,
                                  int repeats) {
  if (variants.size() < 2)
    throw Error(ErrorCode::invalid_argument,
                "invariance study needs at least two variants");
  InvarianceResult res;
  for (const auto& theta : variants)
    res.tables.push_back(
        grid_eval(backend, task, fx, theta, grid, repeats, 0.0));
  for (size_t a = 0; a < variants.size(); ++a) {
    for (size_t b = a + 1; b < variants.size(); ++b) {
      InvarianceResult::Pair pr;
      pr.a = static_cast<int>(a);
      pr.b = static_cast<int>(b);
      for (size_t g = 0; g < grid.size(); ++g) {
        const auto& sa = res.tables[a][g];
        const auto& sb = res.tables[b][g];
        if (sa.n_ok == 0 || sb.n_ok == 0) {
          ++pr.skipped_points;
          continue;
        }
        pr.max_mean_discrepancy =
            std::max(pr.max_mean_discrepancy, std::abs(sa.mean - sb.mean));
      }
      res.pairs.push_back(pr);
    }
  }
  return res;
}

EnsembleResult ensemble_predict(Backend& backend, const TaskSpec& task,
                                const PromptFixtureSet& fx,
                                const ModelParams& params, const Input& input,
                                int samples, double temperature) {
  if (samples < 1)
    throw Error(ErrorCode::invalid_argument, "ensemble: samples must be >= 1");
  SamplingParams sampling;
  sampling.temperature = temperature;
  auto messages = render_learner_prompt(fx, task, full_theta_text(params),
                                        input);
  EnsembleResult res;
  std::vector<double> scalars;
  std::vector<std::vector<double>> vectors;
  for (int s = 0; s < samples; ++s) {
    Prediction p = parse_learner_output(backend.chat(messages, sampling),
                                        task);
    res.samples.push_back(p);
    if (!p.parse_ok) {
      ++res.n_fail;
      continue;
    }
    if (task.family == TaskFamily::classification_2d_prob)
      vectors.push_back(std::get<std::vector<double>>(p.value));
    else
      scalars.push_back(scalar_of(p));
  }
  if (res.n_fail == samples)
    throw Error(ErrorCode::ensemble_failure,
                "every ensemble sample was unparseable");
  if (task.family == TaskFamily::classification_2d_prob) {
    std::vector<double> mean(vectors[0].size(), 0.0);
    for (const auto& v : vectors)
      for (size_t i = 0; i < v.size(); ++i) mean[i] += v[i];
    double sum = 0;
    for (double& m : mean) sum += m;
    for (double& m : mean) m /= sum;  // entry-wise mean, renormalized
    res.probs = std::move(mean);
  } else {
    double sum = 0;
    for (double v : scalars) sum += v;
    double mean = sum / scalars.size();
    double ss = 0;
    for (double v : scalars) ss += (v - mean) * (v - mean);
    res.mean = mean;
    res.stdev = scalars.size() > 1 ? std::sqrt(ss / scalars.size()) : 0.0;
  }
  return res;
}

namespace {

double primary_loss(const RunLogRow& r) {
  if (r.loss_mse) return *r.loss_mse;
  if (r.loss_ce) return *r.loss_ce;
  if (r.loss_zero_one) return *r.loss_zero_one;
  throw Error(ErrorCode::invalid_argument, "run log row carries no loss");
}

}  // namespace

RunComparison compare_runs(const std::vector<RunLogRow>& a,
                           const std::vector<RunLogRow>& b) {
  if (a.empty() || a.size() != b.size())
    throw Error(ErrorCode::invalid_argument,
                "compare_runs: step counts differ");
  RunComparison cmp;
  for (size_t i = 0; i < a.size(); ++i) {
    if (a[i].step != b[i].step)
      throw Error(ErrorCode::invalid_argument,
                  "compare_runs: misaligned steps");
    RunComparison::Row row;
    row.step = a[i].step;
    row.loss_a = primary_loss(a[i]);
    row.loss_b = primary_loss(b[i]);
    row.delta = row.loss_a - row.loss_b;
    cmp.auc_delta += row.delta;
    cmp.rows.push_back(row);
  }
  cmp.final_delta = cmp.rows.back().delta;
  return cmp;
}

void write_grid_csv(const GridTable& table,
                    const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::io_error, "cannot write " + path.string());
  out << "x,mean,stdev,n_ok,n_fail\n";
  for (const auto& st : table)
    out << format_shortest(input_x(st.input)) << ','
        << format_shortest(st.mean) << ',' << format_shortest(st.stdev) << ','
        << st.n_ok << ',' << st.n_fail << '\n';
}

void write_error_csv(const GridTable& table, const ErrorReport& report,
                     const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::io_error, "cannot write " + path.string());
  out << "x,mean,stdev,n_ok,n_fail,error\n";
  size_t r = 0;
  for (const auto& st : table) {
    out << format_shortest(input_x(st.input)) << ','
        << format_shortest(st.mean) << ',' << format_shortest(st.stdev) << ','
        << st.n_ok << ',' << st.n_fail << ',';
    if (st.n_ok > 0 && r < report.rows.size())
      out << format_shortest(report.rows[r++].error);
    out << '\n';
  }
}

std::string invariance_report_text(const InvarianceResult& result) {
  std::ostringstream os;
  os << "variants: " << result.tables.size() << "\n";
  for (const auto& p : result.pairs) {
    os << "pair (" << p.a << ", " << p.b
       << "): max mean discrepancy = " << format_shortest(
              p.max_mean_discrepancy);
    if (p.skipped_points)
      os << " (skipped " << p.skipped_points << " points with no samples)";
    os << "\n";
  }
  return os.str();
}

std::vector<Input> default_grid(double lo, double hi, int points) {
  if (points < 2)
    throw Error(ErrorCode::invalid_argument, "grid needs at least 2 points");
  std::vector<Input> grid;
  for (int i = 0; i < points; ++i)
    grid.push_back(std::vector<double>{lo + (hi - lo) * i / (points - 1)});
  return grid;
}

}  // namespace vml
