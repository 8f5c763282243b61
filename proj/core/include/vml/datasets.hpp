#pragma once

#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "vml/domain.hpp"

namespace vml {

// Deterministic, platform-stable random source. mt19937_64 output is fixed
// by the standard; the uniform and normal transforms are hand-rolled so no
// implementation-defined distribution code leaks into the data.
class Rng {
 public:
  // stream lets one seed drive several independent sequences (e.g. the
  // train set and a disjoint test set).
  explicit Rng(std::uint64_t seed, std::uint64_t stream = 0);

  double uniform();                      // [0, 1)
  double uniform(double lo, double hi);  // [lo, hi)
  double normal();                       // standard normal, Box-Muller
  std::uint64_t next_u64();

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (size_t i = v.size(); i > 1; --i)
      std::swap(v[i - 1], v[next_u64() % i]);
  }

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

struct Dataset {
  std::vector<DataPoint> points;
  TaskSpec task;
  std::uint64_t seed = 0;
  std::string generator_id;
};

// y = 3x + 4 + noise, x ~ U(0,2), two decimals.
Dataset gen_linear(int n, std::uint64_t seed, bool with_noise = true);
// y = 3x^2 + x + 2 + noise, x ~ U(-3,1), one decimal.
Dataset gen_polynomial(int n, std::uint64_t seed, bool with_noise = true);
// y = sin(x) + 2 + 0.01*noise, x ~ U(-3,3), one decimal.
Dataset gen_sinusoid(int n, std::uint64_t seed, bool with_noise = true);
// Two isotropic Gaussian blobs, one-hot targets, three decimals. n even.
Dataset gen_two_blobs(int n, std::uint64_t seed);
// Concentric circles (outer r=1.0 label 0, inner r=0.35 label 1) with
// per-coordinate noise, integer labels, three decimals. n even.
Dataset gen_two_circles(int n, std::uint64_t seed, bool with_noise = true);
// One record per line: term<TAB>label, label in {0,1}.
Dataset load_text_dataset(const std::filesystem::path& path);

void export_csv(const Dataset& ds, const std::filesystem::path& path);

}  // namespace vml
