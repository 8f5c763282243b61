#include "vml/datasets.hpp"

#include <cmath>
#include <fstream>
#include <numbers>

#include "vml/numfmt.hpp"

namespace vml {
namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

void check_n(int n) {
  if (n < 1)
    throw Error(ErrorCode::invalid_argument, "dataset size must be >= 1");
}

}  // namespace

Rng::Rng(std::uint64_t seed, std::uint64_t stream)
    : engine_(splitmix64(seed + splitmix64(stream))) {}

std::uint64_t Rng::next_u64() { return engine_(); }

double Rng::uniform() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double Rng::uniform(double lo, double hi) {
  return lo + (hi - lo) * uniform();
}

double Rng::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  double u1, u2;
  do {
    u1 = uniform();
  } while (u1 <= 0.0);
  u2 = uniform();
  double mag = std::sqrt(-2.0 * std::log(u1));
  spare_ = mag * std::sin(2.0 * std::numbers::pi * u2);
  has_spare_ = true;
  return mag * std::cos(2.0 * std::numbers::pi * u2);
}

namespace {

Dataset gen_regression(int n, std::uint64_t seed, bool with_noise,
                       const char* id, int decimals, double lo, double hi,
                       double noise_scale, double (*f)(double)) {
  check_n(n);
  Dataset ds;
  ds.task = {TaskFamily::regression_1d, decimals, 0, id};
  ds.seed = seed;
  ds.generator_id = id;
  Rng rng(seed);
  for (int i = 0; i < n; ++i) {
    double x = round_to(rng.uniform(lo, hi), decimals);
    double noise = rng.normal();  // always drawn, so with/without noise
                                  // share the same x sequence
    double y = f(x) + (with_noise ? noise_scale * noise : 0.0);
    ds.points.push_back({Input{std::vector<double>{x}},
                         Value{round_to(y, decimals)}});
  }
  return ds;
}

}  // namespace

Dataset gen_linear(int n, std::uint64_t seed, bool with_noise) {
  return gen_regression(n, seed, with_noise, "linear", 2, 0.0, 2.0, 1.0,
                        [](double x) { return 3.0 * x + 4.0; });
}

Dataset gen_polynomial(int n, std::uint64_t seed, bool with_noise) {
  return gen_regression(n, seed, with_noise, "polynomial", 1, -3.0, 1.0, 1.0,
                        [](double x) { return 3.0 * x * x + x + 2.0; });
}

Dataset gen_sinusoid(int n, std::uint64_t seed, bool with_noise) {
  return gen_regression(n, seed, with_noise, "sinusoid", 1, -3.0, 3.0, 0.01,
                        [](double x) { return std::sin(x) + 2.0; });
}

Dataset gen_two_blobs(int n, std::uint64_t seed) {
  check_n(n);
  if (n % 2 != 0)
    throw Error(ErrorCode::invalid_argument, "blob dataset size must be even");
  Dataset ds;
  ds.task = {TaskFamily::classification_2d_prob, 3, 2, "two_blobs"};
  ds.seed = seed;
  ds.generator_id = "two_blobs";
  Rng rng(seed);
  const double centers[2][2] = {{-3.0, 9.0}, {4.5, 2.2}};
  const double sigma = 0.9;
  for (int cls = 0; cls < 2; ++cls) {
    for (int i = 0; i < n / 2; ++i) {
      double x = round_to(centers[cls][0] + sigma * rng.normal(), 3);
      double y = round_to(centers[cls][1] + sigma * rng.normal(), 3);
      std::vector<double> onehot(2, 0.0);
      onehot[cls] = 1.0;
      ds.points.push_back(
          {Input{std::vector<double>{x, y}}, Value{std::move(onehot)}});
    }
  }
  rng.shuffle(ds.points);
  return ds;
}

Dataset gen_two_circles(int n, std::uint64_t seed, bool with_noise) {
  check_n(n);
  if (n % 2 != 0)
    throw Error(ErrorCode::invalid_argument,
                "circle dataset size must be even");
  Dataset ds;
  ds.task = {TaskFamily::classification_2d_label, 3, 2, "two_circles"};
  ds.seed = seed;
  ds.generator_id = "two_circles";
  Rng rng(seed);
  const double radii[2] = {1.0, 0.35};  // label 0 outer, label 1 inner
  const double sigma = with_noise ? 0.08 : 0.0;
  for (int cls = 0; cls < 2; ++cls) {
    for (int i = 0; i < n / 2; ++i) {
      double angle = rng.uniform(0.0, 2.0 * std::numbers::pi);
      double nx = rng.normal(), ny = rng.normal();
      double x = round_to(radii[cls] * std::cos(angle) + sigma * nx, 3);
      double y = round_to(radii[cls] * std::sin(angle) + sigma * ny, 3);
      ds.points.push_back({Input{std::vector<double>{x, y}}, Value{cls}});
    }
  }
  rng.shuffle(ds.points);
  return ds;
}

Dataset load_text_dataset(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in)
    throw Error(ErrorCode::ingestion_error,
                "cannot open dataset file " + path.string());
  Dataset ds;
  ds.task = {TaskFamily::classification_text, 0, 2, "text_classification"};
  ds.generator_id = "text_file:" + path.filename().string();
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto tab = line.find('\t');
    if (tab == std::string::npos || tab == 0)
      throw Error(ErrorCode::ingestion_error,
                  "malformed record at line " + std::to_string(lineno) +
                      ": expected term<TAB>label");
    std::string term = line.substr(0, tab);
    std::string label = line.substr(tab + 1);
    if (label != "0" && label != "1")
      throw Error(ErrorCode::ingestion_error,
                  "malformed label at line " + std::to_string(lineno) +
                      ": expected 0 or 1, got '" + label + "'");
    ds.points.push_back({Input{term}, Value{label == "1" ? 1 : 0}});
  }
  return ds;
}

void export_csv(const Dataset& ds, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out)
    throw Error(ErrorCode::io_error, "cannot write " + path.string());
  switch (ds.task.family) {
    case TaskFamily::regression_1d: out << "x1,y\n"; break;
    case TaskFamily::classification_2d_prob: out << "x1,x2,y1,y2\n"; break;
    case TaskFamily::classification_2d_label: out << "x1,x2,y\n"; break;
    case TaskFamily::classification_text: out << "x1,y\n"; break;
  }
  for (const auto& p : ds.points) {
    if (std::holds_alternative<std::string>(p.input)) {
      out << '"' << std::get<std::string>(p.input) << '"';
    } else {
      const auto& v = std::get<std::vector<double>>(p.input);
      for (size_t i = 0; i < v.size(); ++i)
        out << (i ? "," : "") << fmt_fixed(v[i], ds.task.decimals);
    }
    if (std::holds_alternative<double>(p.target)) {
      out << ',' << fmt_fixed(std::get<double>(p.target), ds.task.decimals);
    } else if (std::holds_alternative<int>(p.target)) {
      out << ',' << std::get<int>(p.target);
    } else {
      for (double t : std::get<std::vector<double>>(p.target))
        out << ',' << fmt_fixed(t, 1);
    }
    out << '\n';
  }
}

}  // namespace vml
