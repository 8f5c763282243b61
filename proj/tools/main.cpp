// Command-line front end: train runs, transcript replays, appendix-style
// studies, and run-log export.

#include <cmath>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>

#include "CLI11.hpp"
#include "json.hpp"
#include "vml/backend.hpp"
#include "vml/datasets.hpp"
#include "vml/numfmt.hpp"
#include "vml/studies.hpp"
#include "vml/training.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;

using nlohmann::json;

std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in)
    throw vml::Error(vml::ErrorCode::io_error, "cannot read " + p.string());
  return std::string(std::istreambuf_iterator<char>(in), {});
}

// "oracle" | "scripted:DIR" | "openai:URL:MODEL"
struct BackendSpec {
  std::string kind;
  std::string arg1, arg2;
};

BackendSpec parse_backend_spec(const std::string& s) {
  BackendSpec spec;
  auto c1 = s.find(':');
  spec.kind = s.substr(0, c1);
  if (spec.kind == "oracle") return spec;
  if (c1 == std::string::npos)
    throw vml::Error(vml::ErrorCode::invalid_argument,
                     "backend spec needs an argument: " + s);
  if (spec.kind == "scripted") {
    spec.arg1 = s.substr(c1 + 1);
    return spec;
  }
  if (spec.kind == "openai") {
    auto c2 = s.rfind(':');
    if (c2 == c1)
      throw vml::Error(vml::ErrorCode::invalid_argument,
                       "openai backend spec is openai:URL:MODEL");
    spec.arg1 = s.substr(c1 + 1, c2 - c1 - 1);
    spec.arg2 = s.substr(c2 + 1);
    return spec;
  }
  throw vml::Error(vml::ErrorCode::invalid_argument,
                   "unknown backend kind: " + spec.kind);
}

std::vector<std::string> load_script_file(const std::filesystem::path& p) {
  auto j = json::parse(read_file(p));
  return j.get<std::vector<std::string>>();
}

std::unique_ptr<vml::Backend> make_backend(const BackendSpec& spec,
                                           vml::OracleRole role,
                                           const vml::TaskSpec& task) {
  if (spec.kind == "oracle") return vml::make_oracle_backend(role, task);
  if (spec.kind == "scripted") {
    std::filesystem::path dir = spec.arg1;
    std::filesystem::path file =
        role == vml::OracleRole::learner ? dir / "learner.json"
                                         : dir / "optimizer.json";
    if (!std::filesystem::exists(file)) file = dir / "script.json";
    return std::make_unique<vml::ScriptedBackend>(load_script_file(file));
  }
  vml::RemoteConfig rc;
  rc.base_url = spec.arg1;
  rc.model = spec.arg2;
  return vml::make_remote_backend(rc);
}

vml::Dataset build_dataset(const std::string& variant, int n,
                           std::uint64_t seed, bool noise,
                           const std::string& text_path) {
  if (variant == "linear") return vml::gen_linear(n, seed, noise);
  if (variant == "polynomial") return vml::gen_polynomial(n, seed, noise);
  if (variant == "sinusoid") return vml::gen_sinusoid(n, seed, noise);
  if (variant == "two_blobs") return vml::gen_two_blobs(n, seed);
  if (variant == "two_circles" || variant == "two_circles_prior")
    return vml::gen_two_circles(n, seed, noise);
  if (variant == "text_classification") {
    if (text_path.empty())
      throw vml::Error(vml::ErrorCode::invalid_argument,
                       "text task needs a text_dataset path in the config");
    return vml::load_text_dataset(text_path);
  }
  throw vml::Error(vml::ErrorCode::invalid_argument,
                   "unknown task variant: " + variant);
}

void print_step(const vml::StepRecord& rec) {
  std::cout << "*********** Epoch " << rec.epoch << " - Step " << rec.step
            << " ***********\n";
  if (rec.loss_mse)
    std::cout << "** Overall Loss: ** " << vml::format_shortest(*rec.loss_mse)
              << "\n";
  if (rec.loss_ce)
    std::cout << "** Overall Loss: ** " << vml::format_shortest(*rec.loss_ce)
              << "\n";
  if (rec.accuracy)
    std::cout << "Training Accuracy " << vml::format_shortest(*rec.accuracy)
              << "\n";
  std::cout << "Updated Theta:\n" << rec.theta_after << "\n\n";
}

struct TrainArgs {
  std::string config_path;
  std::string backend_spec;
  std::string out_dir;
  std::optional<std::uint64_t> seed;
  std::string replay_dir;
  bool include_loss = false;
  std::optional<int> history;
  std::string update_strategy;
};

int run_replay(const TrainArgs& args) {
  auto bundle = vml::load_replay(args.replay_dir);
  std::filesystem::path templates =
      std::filesystem::path(args.replay_dir).parent_path().parent_path() /
      "templates" / bundle.config.task.template_variant;
  auto fixture = vml::load_task_fixture(templates);

  vml::ScriptedBackend learner(bundle.learner_script);
  vml::ScriptedBackend optimizer(bundle.optimizer_script);

  vml::TrainSession session;
  session.config = bundle.config;
  session.config.output_dir = args.out_dir;
  session.fixtures = fixture.prompts;
  session.dataset = bundle.dataset;
  session.learner = &learner;
  session.optimizer = &optimizer;
  session.on_step = print_step;
  session.on_log = [](const std::string& m) { std::cout << m << "\n"; };

  auto log = vml::train(session,
                        vml::make_model_params(fixture.prior, bundle.theta0));

  int mismatches = 0;
  for (size_t i = 0; i < log.steps.size(); ++i) {
    const auto& rec = log.steps[i];
    if (bundle.expect_loss[i] && rec.loss_mse &&
        std::abs(*rec.loss_mse - *bundle.expect_loss[i]) > 1e-9) {
      std::cerr << "step " << rec.step << ": loss "
                << vml::format_shortest(*rec.loss_mse) << " != recorded "
                << vml::format_shortest(*bundle.expect_loss[i]) << "\n";
      ++mismatches;
    }
    if (rec.theta_after != bundle.expect_theta[i]) {
      std::cerr << "step " << rec.step
                << ": updated parameters differ from the recording\n";
      ++mismatches;
    }
  }
  if (mismatches) {
    std::cerr << mismatches << " step(s) diverged from the recording\n";
    return kExitRuntime;
  }
  std::cout << "replay matched all " << log.steps.size() << " steps\n";
  return kExitOk;
}

int run_train(const TrainArgs& args) {
  if (!args.replay_dir.empty()) return run_replay(args);

  auto cfg_json = json::parse(read_file(args.config_path));
  std::string variant = cfg_json.at("task").get<std::string>();
  std::filesystem::path templates =
      cfg_json.value("templates_dir", std::string("fixtures/templates"));
  auto fixture = vml::load_task_fixture(templates / variant);

  vml::RunConfig rc;
  rc.task = fixture.task;
  rc.n = cfg_json.value("n", 100);
  rc.batch_size = cfg_json.value("batch_size", 10);
  rc.epochs = cfg_json.value("epochs", 2);
  rc.seed = cfg_json.value("seed", 0);
  rc.learner_temperature = cfg_json.value("learner_temperature", 0.0);
  rc.output_dir = cfg_json.value("output_dir", std::string());
  rc.optimizer.history_window = cfg_json.value("history_window", 1);
  rc.optimizer.include_loss_value = cfg_json.value("include_loss_value", false);
  rc.optimizer.temperature = cfg_json.value("temperature", 0.0);
  if (cfg_json.contains("update_strategy"))
    rc.optimizer.update_strategy =
        vml::strategy_from_string(cfg_json["update_strategy"]);

  if (args.seed) rc.seed = *args.seed;
  if (!args.out_dir.empty()) rc.output_dir = args.out_dir;
  if (args.include_loss) rc.optimizer.include_loss_value = true;
  if (args.history) rc.optimizer.history_window = *args.history;
  if (!args.update_strategy.empty())
    rc.optimizer.update_strategy =
        vml::strategy_from_string(args.update_strategy);

  std::string backend_str = !args.backend_spec.empty()
                                ? args.backend_spec
                                : cfg_json.value("backend", std::string());
  if (backend_str.empty())
    throw vml::Error(vml::ErrorCode::invalid_argument,
                     "no backend given (config key 'backend' or --backend)");
  auto spec = parse_backend_spec(backend_str);
  auto opt_spec = cfg_json.contains("optimizer_backend")
                      ? parse_backend_spec(cfg_json["optimizer_backend"])
                      : spec;

  auto learner = make_backend(spec, vml::OracleRole::learner, rc.task);
  auto optimizer = make_backend(opt_spec, vml::OracleRole::optimizer, rc.task);

  vml::TrainSession session;
  session.config = rc;
  session.fixtures = fixture.prompts;
  session.dataset =
      build_dataset(variant, rc.n, rc.seed, cfg_json.value("noise", true),
                    cfg_json.value("text_dataset", std::string()));
  session.learner = learner.get();
  session.optimizer = optimizer.get();
  session.on_step = print_step;
  session.on_log = [](const std::string& m) { std::cout << m << "\n"; };

  auto log =
      vml::train(session, vml::make_model_params(fixture.prior, fixture.theta0));
  if (!rc.output_dir.empty()) {
    std::ofstream theta(std::filesystem::path(rc.output_dir) / "theta.txt");
    theta << log.final_params.learned_text << "\n";
  }
  return kExitOk;
}

int run_study_numeric(const std::string& fn, const std::string& backend_spec,
                      const std::string& templates_dir,
                      const std::string& theta_arg, int repeats,
                      const std::string& out_path) {
  std::string variant = fn == "linear_3x4"    ? "linear"
                        : fn == "poly_3x2x2" ? "polynomial"
                                              : "sinusoid";
  auto fixture = vml::load_task_fixture(
      std::filesystem::path(templates_dir) / variant);
  std::string theta = theta_arg;
  if (theta.empty()) {
    if (fn == "linear_3x4") theta = "y = 3.00x + 4.00";
    else if (fn == "poly_3x2x2") theta = "y = 3.00x^2 + 1.00x + 2.00";
    else
      throw vml::Error(vml::ErrorCode::invalid_argument,
                       "--fn sin needs an explicit --theta (the sine map has "
                       "no affine form the oracle can evaluate)");
  }
  auto backend = make_backend(parse_backend_spec(backend_spec),
                              vml::OracleRole::learner, fixture.task);
  std::vector<vml::Input> grid =
      fn == "linear_3x4" ? vml::default_grid(0.0, 2.0)
      : fn == "poly_3x2x2" ? vml::default_grid(-3.0, 1.0)
                           : vml::default_grid(-2.0, 2.0);
  auto table = vml::grid_eval(*backend, fixture.task, fixture.prompts, theta,
                              grid, repeats, 0.0);
  auto report = vml::numerical_error_report(table, fn);
  vml::write_error_csv(table, report, out_path);
  std::cout << "MAE " << vml::format_shortest(report.mae) << ", max |error| "
            << vml::format_shortest(report.max_abs) << "\n";
  return kExitOk;
}

std::vector<std::string> load_variants(const std::filesystem::path& p) {
  std::string text = read_file(p);
  std::vector<std::string> variants;
  std::string cur;
  std::istringstream in(text);
  std::string line;
  auto flush = [&] {
    while (!cur.empty() && cur.back() == '\n') cur.pop_back();
    if (!cur.empty()) variants.push_back(cur);
    cur.clear();
  };
  while (std::getline(in, line)) {
    if (line.rfind("-----", 0) == 0) {
      flush();
      continue;
    }
    cur += line;
    cur += '\n';
  }
  flush();
  return variants;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"verbalized-model training and study harness"};
  app.require_subcommand(1);

  TrainArgs targs;
  auto* train = app.add_subcommand("train", "run or replay a training loop");
  train->add_option("--config", targs.config_path, "config file (JSON)");
  train->add_option("--backend", targs.backend_spec,
                    "openai:URL:MODEL | oracle | scripted:DIR");
  train->add_option("--out", targs.out_dir, "output directory");
  train->add_option("--seed", targs.seed, "dataset seed");
  train->add_option("--replay", targs.replay_dir,
                    "replay a recorded run from this directory");
  train->add_flag("--include-loss", targs.include_loss,
                  "show the numeric loss to the optimizer");
  train->add_option("--history", targs.history, "history window");
  train->add_option("--update-strategy", targs.update_strategy,
                    "replace | append | append-summarized");

  auto* study = app.add_subcommand("study", "appendix-style studies");
  study->require_subcommand(1);
  std::string fn = "linear_3x4", sbackend = "oracle",
              stemplates = "fixtures/templates", stheta, sout = "study.csv";
  int repeats = 10;
  auto* numeric = study->add_subcommand("numeric-error",
                                        "grid fidelity vs ground truth");
  numeric->add_option("--fn", fn, "linear_3x4 | poly_3x2x2 | sin");
  numeric->add_option("--backend", sbackend, "backend spec");
  numeric->add_option("--templates", stemplates, "template fixture root");
  numeric->add_option("--theta", stheta, "parameter text to evaluate");
  numeric->add_option("--repeats", repeats, "calls per grid point");
  numeric->add_option("--out", sout, "CSV output path");

  std::string vfile, ivariant = "linear";
  auto* invariance =
      study->add_subcommand("invariance", "rephrased-parameter agreement");
  invariance->add_option("--variants", vfile, "variant file (----- separated)")
      ->required();
  invariance->add_option("--task", ivariant, "template variant");
  invariance->add_option("--backend", sbackend, "backend spec");
  invariance->add_option("--templates", stemplates, "template fixture root");
  invariance->add_option("--repeats", repeats, "calls per grid point");
  invariance->add_option("--out", sout, "report output path");

  int samples = 10;
  double temperature = 0.7, einput = 1.0;
  std::string etheta;
  auto* ensemble =
      study->add_subcommand("ensemble", "Monte-Carlo prediction at fixed "
                            "parameters");
  ensemble->add_option("--samples", samples, "number of samples");
  ensemble->add_option("--temperature", temperature, "sampling temperature");
  ensemble->add_option("--backend", sbackend, "backend spec")->required();
  ensemble->add_option("--templates", stemplates, "template fixture root");
  ensemble->add_option("--task", ivariant, "template variant");
  ensemble->add_option("--theta", etheta, "parameter text");
  ensemble->add_option("--input", einput, "input value");

  std::string elog, ecsv = "run.csv", emetric = "loss";
  auto* exp = app.add_subcommand("export", "run log to CSV");
  exp->add_option("--log", elog, "run.jsonl path")->required();
  exp->add_option("--out", ecsv, "CSV output path");
  exp->add_option("--metric", emetric, "loss | accuracy");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (*train) {
      if (targs.replay_dir.empty() && targs.config_path.empty())
        throw vml::Error(vml::ErrorCode::invalid_argument,
                         "train needs --config or --replay");
      return run_train(targs);
    }
    if (*numeric)
      return run_study_numeric(fn, sbackend, stemplates, stheta, repeats,
                               sout);
    if (*invariance) {
      auto variants = load_variants(vfile);
      if (variants.size() < 2)
        throw vml::Error(vml::ErrorCode::invalid_argument,
                         "invariance study needs at least two variants");
      auto fixture = vml::load_task_fixture(
          std::filesystem::path(stemplates) / ivariant);
      auto backend = make_backend(parse_backend_spec(sbackend),
                                  vml::OracleRole::learner, fixture.task);
      auto result = vml::invariance_study(*backend, fixture.task,
                                          fixture.prompts, variants,
                                          vml::default_grid(0.0, 2.0),
                                          repeats);
      std::string report = vml::invariance_report_text(result);
      std::ofstream(sout) << report;
      std::cout << report;
      return kExitOk;
    }
    if (*ensemble) {
      auto fixture = vml::load_task_fixture(
          std::filesystem::path(stemplates) / ivariant);
      auto backend = make_backend(parse_backend_spec(sbackend),
                                  vml::OracleRole::learner, fixture.task);
      auto params = vml::make_model_params(
          fixture.prior, etheta.empty() ? fixture.theta0 : etheta);
      auto res = vml::ensemble_predict(*backend, fixture.task,
                                       fixture.prompts, params,
                                       std::vector<double>{einput}, samples,
                                       temperature);
      if (res.mean)
        std::cout << "mean " << vml::format_shortest(*res.mean) << ", stdev "
                  << vml::format_shortest(*res.stdev) << "\n";
      return kExitOk;
    }
    if (*exp) {
      auto rows = vml::load_run_rows(elog);
      std::ofstream out(ecsv);
      if (!out)
        throw vml::Error(vml::ErrorCode::io_error, "cannot write " + ecsv);
      out << "step,loss,accuracy\n";
      for (const auto& r : rows) {
        std::optional<double> loss =
            r.loss_mse ? r.loss_mse : (r.loss_ce ? r.loss_ce : r.loss_zero_one);
        if (emetric == "accuracy" && !r.accuracy)
          throw vml::Error(vml::ErrorCode::invalid_argument,
                           "metric 'accuracy' absent from this run log");
        out << r.step << ',' << (loss ? vml::format_shortest(*loss) : "")
            << ',' << (r.accuracy ? vml::format_shortest(*r.accuracy) : "")
            << '\n';
      }
      return kExitOk;
    }
  } catch (const vml::Error& e) {
    std::cerr << "error (" << vml::to_string(e.code()) << "): " << e.what()
              << "\n";
    switch (e.code()) {
      case vml::ErrorCode::invalid_argument:
      case vml::ErrorCode::ingestion_error:
      case vml::ErrorCode::io_error:
        return kExitConfig;
      default:
        return kExitRuntime;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitConfig;
}
