#include "vml/datasets.hpp"

#include <cmath>
#include <fstream>
#include <set>

#include "catch2/catch_amalgamated.hpp"
#include "helpers.hpp"

using namespace vml;

namespace {
double x_of(const DataPoint& p) {
  return std::get<std::vector<double>>(p.input)[0];
}
double y_of(const DataPoint& p) { return std::get<double>(p.target); }
}  // namespace

TEST_CASE("linear generator: noise-free identity and sample mean") {
  auto clean = gen_linear(100, 7, /*with_noise=*/false);
  for (const auto& p : clean.points) {
    double x = x_of(p);
    CHECK(x >= 0.0);
    CHECK(x <= 2.0);
    CHECK_THAT(y_of(p), Catch::Matchers::WithinAbs(3.0 * x + 4.0, 0.005));
  }
  auto big = gen_linear(100000, 11);
  double mean = 0;
  for (const auto& p : big.points) mean += y_of(p);
  mean /= big.points.size();
  CHECK_THAT(mean, Catch::Matchers::WithinAbs(7.0, 0.05));
}

TEST_CASE("polynomial generator: anchor points and sample mean") {
  auto ds = gen_polynomial(100000, 3);
  double mean = 0;
  for (const auto& p : ds.points) {
    CHECK(x_of(p) >= -3.0);
    CHECK(x_of(p) <= 1.0);
    mean += y_of(p);
  }
  mean /= ds.points.size();
  // E[3x^2 + x + 2] for x ~ U(-3,1) is 3*13/3 - 1 + 2 = 14... numerically:
  // E[x^2] = (1^3 - (-3)^3) / (4*3) = 28/12, E[x] = -1.
  double expect = 3.0 * (28.0 / 12.0) + (-1.0) + 2.0;
  CHECK_THAT(mean, Catch::Matchers::WithinAbs(expect, 0.1));

  auto clean = gen_polynomial(50, 3, false);
  for (const auto& p : clean.points)
    CHECK_THAT(y_of(p),
               Catch::Matchers::WithinAbs(
                   3.0 * x_of(p) * x_of(p) + x_of(p) + 2.0, 0.051));
}

TEST_CASE("sinusoid generator stays inside the noise envelope") {
  auto ds = gen_sinusoid(10000, 5);
  for (const auto& p : ds.points) {
    CHECK(y_of(p) >= 0.9);
    CHECK(y_of(p) <= 3.1);
  }
}

TEST_CASE("generators are reproducible and seed-sensitive") {
  auto a = gen_linear(50, 42);
  auto b = gen_linear(50, 42);
  auto c = gen_linear(50, 43);
  for (size_t i = 0; i < a.points.size(); ++i) {
    CHECK(x_of(a.points[i]) == x_of(b.points[i]));
    CHECK(y_of(a.points[i]) == y_of(b.points[i]));
  }
  bool any_diff = false;
  for (size_t i = 0; i < a.points.size(); ++i)
    if (y_of(a.points[i]) != y_of(c.points[i])) any_diff = true;
  CHECK(any_diff);
}

TEST_CASE("rng streams are independent") {
  Rng a(42, 0), b(42, 1), a2(42, 0);
  CHECK(a.next_u64() != b.next_u64());
  Rng a3(42, 0);
  CHECK(Rng(42, 0).uniform() == a3.uniform());
}

TEST_CASE("two blobs: balance, separation, one-hot targets") {
  auto ds = gen_two_blobs(100, 9);
  int near_first = 0;
  int class_one = 0;
  for (const auto& p : ds.points) {
    const auto& in = std::get<std::vector<double>>(p.input);
    const auto& t = std::get<std::vector<double>>(p.target);
    REQUIRE(t.size() == 2);
    CHECK(t[0] + t[1] == 1.0);
    CHECK((t[0] == 1.0 || t[1] == 1.0));
    double d0 = std::hypot(in[0] + 3.0, in[1] - 9.0);
    double d1 = std::hypot(in[0] - 4.5, in[1] - 2.2);
    bool nearer_first = d0 < d1;
    if (nearer_first) ++near_first;
    // nearest-center assignment matches the one-hot label (blobs are far
    // apart relative to their spread)
    CHECK(t[0] == (nearer_first ? 1.0 : 0.0));
    if (t[0] == 1.0) ++class_one;
  }
  CHECK(class_one == 50);
  CHECK(near_first == 50);

  auto tiny = gen_two_blobs(2, 1);
  double sum0 = std::get<std::vector<double>>(tiny.points[0].target)[0] +
                std::get<std::vector<double>>(tiny.points[1].target)[0];
  CHECK(sum0 == 1.0);  // exactly one point per class

  CHECK_THROWS_AS(gen_two_blobs(7, 1), Error);
}

TEST_CASE("two circles: radii, labels, class balance") {
  auto clean = gen_two_circles(100, 4, /*with_noise=*/false);
  int inner = 0;
  for (const auto& p : clean.points) {
    const auto& in = std::get<std::vector<double>>(p.input);
    double r = std::hypot(in[0], in[1]);
    int label = std::get<int>(p.target);
    if (label == 1) {
      ++inner;
      CHECK_THAT(r, Catch::Matchers::WithinAbs(0.35, 0.01));
    } else {
      CHECK_THAT(r, Catch::Matchers::WithinAbs(1.0, 0.01));
    }
  }
  CHECK(inner == 50);

  // the recorded sample points fall in the right class regions
  auto noisy = gen_two_circles(1000, 4);
  int misregion = 0;
  for (const auto& p : noisy.points) {
    const auto& in = std::get<std::vector<double>>(p.input);
    double r = std::hypot(in[0], in[1]);
    bool inner_region = r < 0.675;  // midpoint between the radii
    if (inner_region != (std::get<int>(p.target) == 1)) ++misregion;
  }
  CHECK(misregion == 0);  // 0.08 noise never crosses the 0.325 gap in practice
}

TEST_CASE("text dataset loads and rejects malformed lines") {
  auto ds = load_text_dataset(testhelp::fixtures() / "data" /
                              "gender_terms.tsv");
  REQUIRE(ds.points.size() >= 20);
  bool saw_fatherhood = false, saw_erma = false;
  for (const auto& p : ds.points) {
    const auto& term = std::get<std::string>(p.input);
    if (term == "fatherhood") {
      saw_fatherhood = true;
      CHECK(std::get<int>(p.target) == 0);
    }
    if (term == "Erma") {
      saw_erma = true;
      CHECK(std::get<int>(p.target) == 1);
    }
  }
  CHECK(saw_fatherhood);
  CHECK(saw_erma);

  auto tmp = std::filesystem::temp_directory_path() / "vml_bad.tsv";
  std::ofstream(tmp) << "fine\t0\nErma\n";
  try {
    load_text_dataset(tmp);
    FAIL("expected ingestion_error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::ingestion_error);
    CHECK(std::string(e.what()).find("line 2") != std::string::npos);
  }
  std::ofstream(tmp) << "fine\t2\n";
  CHECK_THROWS_AS(load_text_dataset(tmp), Error);
  std::filesystem::remove(tmp);
}

TEST_CASE("invalid sizes are rejected") {
  CHECK_THROWS_AS(gen_linear(0, 1), Error);
  CHECK_THROWS_AS(gen_two_circles(5, 1), Error);
}

TEST_CASE("CSV export writes one row per point with a family header") {
  auto tmp = std::filesystem::temp_directory_path() / "vml_ds.csv";
  export_csv(gen_linear(5, 1), tmp);
  std::ifstream in(tmp);
  std::string header;
  std::getline(in, header);
  CHECK(header == "x1,y");
  int rows = 0;
  std::string line;
  while (std::getline(in, line))
    if (!line.empty()) ++rows;
  CHECK(rows == 5);
  std::filesystem::remove(tmp);
}
