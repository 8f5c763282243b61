#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include "catch2/catch_amalgamated.hpp"
#include "json.hpp"

namespace {

namespace fs = std::filesystem;

struct CmdResult {
  int exit_code = -1;
  std::string output;
};

CmdResult run_cli(const std::string& args) {
  std::string cmd = std::string(VML_CLI_PATH) + " " + args + " 2>&1";
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  CmdResult res;
  char buf[4096];
  while (size_t n = fread(buf, 1, sizeof(buf), pipe))
    res.output.append(buf, n);
  int status = pclose(pipe);
  res.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return res;
}

fs::path scratch() {
  auto dir = fs::temp_directory_path() / "vml_cli_test";
  fs::create_directories(dir);
  return dir;
}

fs::path write_config(const nlohmann::json& j) {
  auto p = scratch() / "config.json";
  std::ofstream(p) << j.dump(2);
  return p;
}

nlohmann::json base_config() {
  return {{"task", "linear"},
          {"templates_dir", std::string(VML_FIXTURES_DIR) + "/templates"},
          {"n", 30},
          {"batch_size", 10},
          {"epochs", 1},
          {"seed", 1},
          {"noise", false},
          {"backend", "oracle"}};
}

}  // namespace

TEST_CASE("train: oracle end-to-end run exits 0 and writes artifacts") {
  auto out = scratch() / "run_oracle";
  fs::remove_all(out);
  auto cfg = write_config(base_config());
  auto res = run_cli("train --config " + cfg.string() + " --out " +
                     out.string());
  INFO(res.output);
  CHECK(res.exit_code == 0);
  CHECK(res.output.find("** Overall Loss: **") != std::string::npos);
  CHECK(res.output.find("Updated Theta:") != std::string::npos);
  CHECK(fs::exists(out / "run.jsonl"));
  CHECK(fs::exists(out / "theta.txt"));
}

TEST_CASE("train: missing config exits 2") {
  auto res = run_cli("train --config /nonexistent/nope.json");
  CHECK(res.exit_code == 2);
  auto res2 = run_cli("train");
  CHECK(res2.exit_code == 2);
}

TEST_CASE("train: replay of the recorded linear run matches") {
  auto res = run_cli("train --replay " + std::string(VML_FIXTURES_DIR) +
                     "/replay/linear");
  INFO(res.output);
  CHECK(res.exit_code == 0);
  CHECK(res.output.find("replay matched all 20 steps") != std::string::npos);
  CHECK(res.output.find("** Overall Loss: ** 36.34138") != std::string::npos);
  CHECK(res.output.find("Shortening the state") != std::string::npos);
}

TEST_CASE("export: CSV from a run log, bad metric and corrupt line exit 2") {
  auto out = scratch() / "run_export";
  fs::remove_all(out);
  auto cfg = write_config(base_config());
  REQUIRE(run_cli("train --config " + cfg.string() + " --out " + out.string())
              .exit_code == 0);

  auto csv = scratch() / "run.csv";
  auto res = run_cli("export --log " + (out / "run.jsonl").string() +
                     " --out " + csv.string());
  CHECK(res.exit_code == 0);
  std::ifstream in(csv);
  std::string header;
  std::getline(in, header);
  CHECK(header == "step,loss,accuracy");
  int rows = 0;
  for (std::string line; std::getline(in, line);)
    if (!line.empty()) ++rows;
  CHECK(rows == 3);

  // regression logs carry no accuracy column values
  res = run_cli("export --log " + (out / "run.jsonl").string() +
                " --out " + csv.string() + " --metric accuracy");
  CHECK(res.exit_code == 2);

  auto corrupt = scratch() / "corrupt.jsonl";
  {
    std::ifstream src(out / "run.jsonl");
    std::ofstream dst(corrupt);
    std::string line;
    int n = 0;
    while (std::getline(src, line))
      dst << (++n == 2 ? "{broken" : line) << "\n";
  }
  res = run_cli("export --log " + corrupt.string() + " --out " +
                csv.string());
  CHECK(res.exit_code == 2);
  CHECK(res.output.find("line 2") != std::string::npos);
}

TEST_CASE("study numeric-error: oracle grid gives a near-zero error column") {
  auto csv = scratch() / "numeric.csv";
  auto res = run_cli("study numeric-error --fn linear_3x4 --backend oracle "
                     "--templates " +
                     std::string(VML_FIXTURES_DIR) + "/templates --out " +
                     csv.string());
  INFO(res.output);
  CHECK(res.exit_code == 0);
  auto pos = res.output.find("MAE ");
  REQUIRE(pos != std::string::npos);
  CHECK(std::stod(res.output.substr(pos + 4)) < 1e-9);
  std::ifstream in(csv);
  std::string header;
  std::getline(in, header);
  CHECK(header == "x,mean,stdev,n_ok,n_fail,error");
}

TEST_CASE("study invariance: needs at least two variants") {
  auto one = scratch() / "one_variant.txt";
  std::ofstream(one) << "y = 3.00x + 4.00\n";
  auto res = run_cli("study invariance --variants " + one.string() +
                     " --templates " + std::string(VML_FIXTURES_DIR) +
                     "/templates");
  CHECK(res.exit_code == 2);

  auto two = scratch() / "two_variants.txt";
  std::ofstream(two) << "y = 3.00x + 4.00\n-----\n"
                     << "Output = 4.00 + 3.00 * Input\n";
  auto report = scratch() / "invariance.txt";
  res = run_cli("study invariance --variants " + two.string() +
                " --templates " + std::string(VML_FIXTURES_DIR) +
                "/templates --backend oracle --out " + report.string());
  INFO(res.output);
  CHECK(res.exit_code == 0);
  CHECK(res.output.find("max mean discrepancy = 0") != std::string::npos);
}

TEST_CASE("study ensemble: scripted statistics") {
  auto dir = scratch() / "script";
  fs::create_directories(dir);
  nlohmann::json script = nlohmann::json::array();
  for (int i = 0; i < 2; ++i) {
    script.push_back("Output: [1.0]");
    script.push_back("Output: [3.0]");
  }
  std::ofstream(dir / "script.json") << script.dump();
  auto res = run_cli("study ensemble --samples 4 --temperature 0.7 "
                     "--backend scripted:" +
                     dir.string() + " --templates " +
                     std::string(VML_FIXTURES_DIR) +
                     "/templates --task linear --theta irrelevant");
  INFO(res.output);
  CHECK(res.exit_code == 0);
  CHECK(res.output.find("mean 2.0, stdev 1.0") != std::string::npos);
}

TEST_CASE("unknown backend kind exits 2") {
  auto cfg_json = base_config();
  cfg_json["backend"] = "quantum:foo";
  auto cfg = write_config(cfg_json);
  auto res = run_cli("train --config " + cfg.string());
  CHECK(res.exit_code == 2);
}
