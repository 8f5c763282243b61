#include "vml/parsing.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <sstream>

namespace vml {
namespace {

bool starts_with_ci(std::string_view s, std::string_view prefix) {
  if (s.size() < prefix.size()) return false;
  for (size_t i = 0; i < prefix.size(); ++i)
    if (std::tolower(static_cast<unsigned char>(s[i])) !=
        std::tolower(static_cast<unsigned char>(prefix[i])))
      return false;
  return true;
}

std::string_view ltrim(std::string_view s) {
  size_t i = 0;
  while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
  return s.substr(i);
}

std::string trim(std::string_view s) {
  size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

// Drop lines that are only code-fence markers, then trim.
std::string strip_fences(std::string_view s) {
  std::string out;
  std::istringstream in{std::string(s)};
  std::string line;
  while (std::getline(in, line)) {
    std::string t = trim(line);
    if (t == "```" || t == "'''" || starts_with_ci(t, "```")) continue;
    out += line;
    out += '\n';
  }
  return trim(out);
}

}  // namespace

std::vector<double> parse_number_list(std::string_view text) {
  std::vector<double> out;
  size_t i = 0;
  auto digit = [&](size_t j) {
    return j < text.size() && std::isdigit(static_cast<unsigned char>(text[j]));
  };
  while (i < text.size()) {
    size_t j = i;
    if (text[j] == '+' || text[j] == '-') ++j;
    bool has_int = false;
    while (digit(j)) ++j, has_int = true;
    bool has_frac = false;
    if (j < text.size() && text[j] == '.') {
      size_t k = j + 1;
      while (digit(k)) ++k, has_frac = true;
      if (has_int || has_frac) j = k;  // "1." and ".5" both count
    }
    if (!has_int && !has_frac) {
      ++i;
      continue;
    }
    if (j < text.size() && (text[j] == 'e' || text[j] == 'E')) {
      size_t k = j + 1;
      if (k < text.size() && (text[k] == '+' || text[k] == '-')) ++k;
      size_t d = k;
      while (digit(d)) ++d;
      if (d > k) j = d;
    }
    out.push_back(std::strtod(std::string(text.substr(i, j - i)).c_str(),
                              nullptr));
    i = j;
  }
  return out;
}

Prediction parse_learner_output(const std::string& text,
                                const TaskSpec& task) {
  // Locate the last line starting "Output:" (the word also appears in prose).
  size_t marker = std::string::npos;
  size_t pos = 0;
  while (pos <= text.size()) {
    size_t eol = text.find('\n', pos);
    std::string_view line(text.data() + pos,
                          (eol == std::string::npos ? text.size() : eol) - pos);
    std::string_view body = ltrim(line);
    if (starts_with_ci(body, "output:"))
      marker = (body.data() - text.data()) + 7;  // after "output:"
    if (eol == std::string::npos) break;
    pos = eol + 1;
  }

  Prediction p;
  p.raw_text = text;
  p.parse_ok = false;
  switch (task.family) {
    case TaskFamily::regression_1d:
      p.value = 0.0;
      break;
    case TaskFamily::classification_2d_prob:
      p.value = std::vector<double>(
          std::max(task.label_count, 1),
          1.0 / std::max(task.label_count, 1));
      break;
    default:
      p.value = -1;  // sentinel label, counted wrong by zero-one loss
  }
  if (marker == std::string::npos) return p;
  std::string_view rest(text.data() + marker, text.size() - marker);

  if (task.family == TaskFamily::regression_1d) {
    auto nums = parse_number_list(rest);
    if (nums.empty()) return p;
    p.value = nums[0];
    p.parse_ok = true;
  } else if (task.family == TaskFamily::classification_2d_prob) {
    auto lb = rest.find('[');
    if (lb == std::string_view::npos) return p;
    auto rb = rest.find(']', lb);
    if (rb == std::string_view::npos) return p;
    auto nums = parse_number_list(rest.substr(lb + 1, rb - lb - 1));
    if (static_cast<int>(nums.size()) != task.label_count) return p;
    double sum = 0;
    for (double v : nums) sum += v;
    // the 0.01 tolerance is inclusive; allow for representation error
    if (std::abs(sum - 1.0) > 0.01 + 1e-9 || sum <= 0) return p;
    for (double& v : nums) v /= sum;
    p.value = std::move(nums);
    p.parse_ok = true;
  } else {
    auto nums = parse_number_list(rest);
    if (nums.empty()) return p;
    double v = nums[0];
    if (v != std::floor(v)) return p;
    int label = static_cast<int>(v);
    if (label < 0 || label >= task.label_count) return p;
    p.value = label;
    p.parse_ok = true;
  }
  return p;
}

OptimizerUpdate parse_optimizer_output(const std::string& text,
                                       const TaskSpec&) {
  static const std::string kHeaders[] = {"New Pattern Descriptions:",
                                         "New Model Descriptions:"};
  size_t hpos = std::string::npos, hlen = 0;
  for (const auto& h : kHeaders) {
    size_t p = text.rfind(h);
    if (p != std::string::npos && (hpos == std::string::npos || p > hpos)) {
      hpos = p;
      hlen = h.size();
    }
  }
  if (hpos == std::string::npos)
    throw Error(ErrorCode::optimizer_parse_failure,
                "optimizer response has no new-descriptions header");

  OptimizerUpdate u;
  size_t rpos = text.find("Reasoning:");
  if (rpos != std::string::npos && rpos < hpos)
    u.reasoning = strip_fences(
        std::string_view(text).substr(rpos + 10, hpos - rpos - 10));
  u.new_theta = strip_fences(std::string_view(text).substr(hpos + hlen));
  if (u.new_theta.empty())
    throw Error(ErrorCode::optimizer_parse_failure,
                "optimizer response has an empty descriptions section");
  return u;
}

}  // namespace vml
