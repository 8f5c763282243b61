#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <optional>
#include <regex>
#include <sstream>

#include "vml/backend.hpp"
#include "vml/numfmt.hpp"
#include "vml/parsing.hpp"

namespace vml {
namespace {

std::vector<std::string> split_lines(const std::string& s) {
  std::vector<std::string> lines;
  std::istringstream in(s);
  std::string line;
  while (std::getline(in, line)) lines.push_back(line);
  return lines;
}

bool is_header(const std::string& line, const std::string& prefix) {
  return line.rfind(prefix, 0) == 0;
}

// Text between the header line starting with `prefix` and the next "** "
// header (or end). Throws if the header is missing.
std::string section_after(const std::string& text, const std::string& prefix) {
  auto lines = split_lines(text);
  size_t i = 0;
  while (i < lines.size() && !is_header(lines[i], prefix)) ++i;
  if (i == lines.size())
    throw Error(ErrorCode::oracle_cannot_interpret,
                "oracle: prompt section not found: " + prefix);
  std::string out;
  for (++i; i < lines.size() && lines[i].rfind("** ", 0) != 0; ++i) {
    out += lines[i];
    out += '\n';
  }
  while (!out.empty() && (out.back() == '\n' || out.back() == ' '))
    out.pop_back();
  size_t b = out.find_first_not_of('\n');
  return b == std::string::npos ? std::string() : out.substr(b);
}

// ---- symbolic regression formulas: y = a*x^2 + b*x + c ----

// coeffs[k] multiplies x^k
using Poly = std::array<double, 3>;

bool is_var_token(const std::string& t) { return t == "x" || t == "input"; }

std::optional<Poly> parse_poly_rhs(const std::string& rhs) {
  Poly c{0, 0, 0};
  std::string s;
  for (char ch : rhs) s += static_cast<char>(std::tolower(ch));
  // normalize: drop '*', collapse "**2" to "^2"
  std::string norm;
  for (size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '*' && i + 1 < s.size() && s[i + 1] == '*') {
      norm += '^';
      ++i;
    } else if (s[i] == '*') {
      norm += ' ';
    } else {
      norm += s[i];
    }
  }
  // strip one trailing sentence period
  while (!norm.empty() && std::isspace(static_cast<unsigned char>(norm.back())))
    norm.pop_back();
  if (!norm.empty() && norm.back() == '.') norm.pop_back();

  static const std::regex term_re(
      R"(^\s*([+-]?)\s*(?:(\d+\.?\d*|\.\d+)\s*)?(?:(x|input)\s*(?:\^\s*2)?)?)",
      std::regex::icase);
  // tokenize into signed terms
  size_t pos = 0;
  bool first = true;
  bool any = false;
  while (pos < norm.size()) {
    while (pos < norm.size() &&
           std::isspace(static_cast<unsigned char>(norm[pos])))
      ++pos;
    if (pos >= norm.size()) break;
    double sign = 1.0;
    if (norm[pos] == '+' || norm[pos] == '-') {
      sign = norm[pos] == '-' ? -1.0 : 1.0;
      ++pos;
      while (pos < norm.size() &&
             std::isspace(static_cast<unsigned char>(norm[pos])))
        ++pos;
    } else if (!first) {
      return std::nullopt;  // terms must be joined by + or -
    }
    first = false;
    // coefficient
    size_t start = pos;
    while (pos < norm.size() &&
           (std::isdigit(static_cast<unsigned char>(norm[pos])) ||
            norm[pos] == '.'))
      ++pos;
    bool has_coef = pos > start;
    double coef = has_coef ? std::stod(norm.substr(start, pos - start)) : 1.0;
    while (pos < norm.size() &&
           std::isspace(static_cast<unsigned char>(norm[pos])))
      ++pos;
    // variable
    int power = 0;
    size_t vstart = pos;
    while (pos < norm.size() &&
           std::isalpha(static_cast<unsigned char>(norm[pos])))
      ++pos;
    std::string var = norm.substr(vstart, pos - vstart);
    if (!var.empty()) {
      if (!is_var_token(var)) return std::nullopt;
      power = 1;
      size_t save = pos;
      while (pos < norm.size() &&
             std::isspace(static_cast<unsigned char>(norm[pos])))
        ++pos;
      if (pos < norm.size() && norm[pos] == '^') {
        ++pos;
        while (pos < norm.size() &&
               std::isspace(static_cast<unsigned char>(norm[pos])))
          ++pos;
        if (pos < norm.size() && norm[pos] == '2') {
          power = 2;
          ++pos;
        } else {
          return std::nullopt;
        }
      } else {
        pos = save;
      }
    } else if (!has_coef) {
      return std::nullopt;
    }
    c[power] += sign * coef;
    any = true;
  }
  if (!any) return std::nullopt;
  return c;
}

// Scans a text region for a line of the form "y = ..." / "output = ...".
std::optional<Poly> find_poly(const std::string& region) {
  for (const auto& line : split_lines(region)) {
    auto eq = line.find('=');
    if (eq == std::string::npos) continue;
    std::string lhs = line.substr(0, eq);
    std::string lower;
    for (char ch : lhs) lower += static_cast<char>(std::tolower(ch));
    bool ok_lhs = false;
    static const std::regex lhs_re(R"(^\s*\$?\s*(y|f\(x\)|output)\s*\$?\s*$)",
                                   std::regex::icase);
    ok_lhs = std::regex_match(lhs, lhs_re);
    if (!ok_lhs) continue;
    if (auto p = parse_poly_rhs(line.substr(eq + 1))) return p;
  }
  return std::nullopt;
}

// ---- 2-D label rules ----

struct LabelRule {
  // kind 0: axis threshold (axis 'x'/'y', op, threshold)
  // kind 1: circle (cx, cy, r2)
  int kind = 0;
  char axis = 'x';
  std::string op = ">";
  double a = 0, b = 0, c = 0;
  int then_label = 1, else_label = 0;
};

std::optional<LabelRule> find_label_rule(const std::string& region) {
  static const std::regex axis_re(
      R"(if\s+([xy])\s*(>=|<=|>|<)\s*(-?\d+\.?\d*)\s*,?\s*(?:then)?[^\d]*?(\d)\b[^.]*\.\s*(?:otherwise|else)[^\d]*?(\d))",
      std::regex::icase);
  static const std::regex circle_re(
      R"(\(?\s*x\s*([+-]\s*\d+\.?\d*)?\s*\)?\s*\^\s*2\s*\+\s*\(?\s*y\s*([+-]\s*\d+\.?\d*)?\s*\)?\s*\^\s*2\s*(<=|<)\s*(\d+\.?\d*)[^\d]*?(\d)\b[^.]*[,.]\s*(?:otherwise|else)[^\d]*?(\d))",
      std::regex::icase);
  std::smatch m;
  if (std::regex_search(region, m, circle_re)) {
    LabelRule r;
    r.kind = 1;
    auto center = [](const std::string& s) {
      if (s.empty()) return 0.0;
      std::string t;
      for (char ch : s)
        if (!std::isspace(static_cast<unsigned char>(ch))) t += ch;
      return -std::stod(t);  // (x - c)^2 stores +c as the center
    };
    r.a = center(m[1].str());
    r.b = center(m[2].str());
    r.c = std::stod(m[4].str());
    r.then_label = std::stoi(m[5].str());
    r.else_label = std::stoi(m[6].str());
    return r;
  }
  if (std::regex_search(region, m, axis_re)) {
    LabelRule r;
    r.kind = 0;
    r.axis = static_cast<char>(std::tolower(m[1].str()[0]));
    r.op = m[2].str();
    r.c = std::stod(m[3].str());
    r.then_label = std::stoi(m[4].str());
    r.else_label = std::stoi(m[5].str());
    return r;
  }
  return std::nullopt;
}

int apply_rule(const LabelRule& r, double x, double y) {
  bool cond;
  if (r.kind == 1) {
    double d = (x - r.a) * (x - r.a) + (y - r.b) * (y - r.b);
    cond = r.op == "<" ? d < r.c : d <= r.c;
  } else {
    double v = r.axis == 'x' ? x : y;
    if (r.op == ">") cond = v > r.c;
    else if (r.op == ">=") cond = v >= r.c;
    else if (r.op == "<") cond = v < r.c;
    else cond = v <= r.c;
  }
  return cond ? r.then_label : r.else_label;
}

class OracleLearner : public Backend {
 public:
  explicit OracleLearner(TaskSpec task) : task_(std::move(task)) {}

  std::string chat(const std::vector<ChatMessage>& messages,
                   const SamplingParams&) override {
    validate_chat_messages(messages);
    const std::string& prompt = messages.back().content;
    auto cut = prompt.find("** Input: **");
    if (cut == std::string::npos)
      throw Error(ErrorCode::oracle_cannot_interpret,
                  "oracle learner: no input section in prompt");
    std::string theta_region = prompt.substr(0, cut);
    std::string input = section_after(prompt, "** Input: **");
    auto xs = parse_number_list(input);

    if (task_.family == TaskFamily::regression_1d) {
      auto poly = find_poly(theta_region);
      if (!poly)
        throw Error(ErrorCode::oracle_cannot_interpret,
                    "oracle learner: no symbolic formula in parameter text");
      if (xs.empty())
        throw Error(ErrorCode::oracle_cannot_interpret,
                    "oracle learner: no numeric input");
      double x = xs[0];
      double y = (*poly)[2] * x * x + (*poly)[1] * x + (*poly)[0];
      y = round_to(y, task_.decimals);
      return "Explanations: evaluated the symbolic formula exactly.\n\n"
             "Output: [" +
             np_trim(y, task_.decimals) + "]";
    }
    if (task_.family == TaskFamily::classification_2d_label) {
      auto rule = find_label_rule(theta_region);
      if (!rule)
        throw Error(ErrorCode::oracle_cannot_interpret,
                    "oracle learner: no decision rule in parameter text");
      if (xs.size() < 2)
        throw Error(ErrorCode::oracle_cannot_interpret,
                    "oracle learner: expected a 2-D input");
      int label = apply_rule(*rule, xs[0], xs[1]);
      return "Explanations: applied the decision rule exactly.\n\nOutput: " +
             std::to_string(label);
    }
    throw Error(ErrorCode::oracle_cannot_interpret,
                "oracle learner: unsupported task family");
  }

 private:
  TaskSpec task_;
};

// Solves the 3x3 normal equations for a degree-2 fit; degree-1 uses the
// closed form. Returns coeffs[k] for x^k.
Poly least_squares(const std::vector<double>& xs, const std::vector<double>& ys,
                   int degree) {
  size_t n = xs.size();
  if (degree == 1) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (size_t i = 0; i < n; ++i) {
      sx += xs[i];
      sy += ys[i];
      sxx += xs[i] * xs[i];
      sxy += xs[i] * ys[i];
    }
    double denom = n * sxx - sx * sx;
    if (denom == 0)
      throw Error(ErrorCode::oracle_cannot_interpret,
                  "oracle optimizer: degenerate batch");
    double a = (n * sxy - sx * sy) / denom;
    double b = (sy - a * sx) / n;
    return {b, a, 0};
  }
  // moments for the quadratic fit
  double m[3][4] = {};
  for (size_t i = 0; i < n; ++i) {
    double p[5] = {1, xs[i], xs[i] * xs[i], 0, 0};
    p[3] = p[2] * xs[i];
    p[4] = p[2] * p[2];
    for (int r = 0; r < 3; ++r) {
      for (int col = 0; col < 3; ++col) m[r][col] += p[r + col];
      m[r][3] += p[r] * ys[i];
    }
  }
  // Gaussian elimination with partial pivoting
  for (int col = 0; col < 3; ++col) {
    int piv = col;
    for (int r = col + 1; r < 3; ++r)
      if (std::abs(m[r][col]) > std::abs(m[piv][col])) piv = r;
    std::swap(m[col], m[piv]);
    if (std::abs(m[col][col]) < 1e-12)
      throw Error(ErrorCode::oracle_cannot_interpret,
                  "oracle optimizer: degenerate batch");
    for (int r = 0; r < 3; ++r) {
      if (r == col) continue;
      double f = m[r][col] / m[col][col];
      for (int k = col; k < 4; ++k) m[r][k] -= f * m[col][k];
    }
  }
  return {m[0][3] / m[0][0], m[1][3] / m[1][1], m[2][3] / m[2][2]};
}

class OracleOptimizer : public Backend {
 public:
  explicit OracleOptimizer(TaskSpec task) : task_(std::move(task)) {
    if (task_.family != TaskFamily::regression_1d)
      throw Error(ErrorCode::invalid_argument,
                  "oracle optimizer supports regression tasks only");
  }

  std::string chat(const std::vector<ChatMessage>& messages,
                   const SamplingParams&) override {
    validate_chat_messages(messages);
    const std::string& prompt = messages.back().content;
    auto xs = parse_number_list(section_after(prompt, "** Inputs"));
    auto ys = parse_number_list(section_after(prompt, "** The target"));
    if (xs.empty() || xs.size() != ys.size())
      throw Error(ErrorCode::oracle_cannot_interpret,
                  "oracle optimizer: cannot read the batch from the prompt");
    // Fit degree follows the current parameter form; default is affine.
    int degree = 1;
    std::string theta;
    try {
      theta = section_after(prompt, "** Current");
    } catch (const Error&) {
    }
    auto current = find_poly(theta);
    if (current && (*current)[2] != 0) degree = 2;

    Poly c = least_squares(xs, ys, degree);
    // Average the fresh fit with the current parameters when they are
    // readable: a single batch is a noisy estimate, and pooling batches
    // this way drives the steady-state loss down to the noise floor while
    // leaving noise-free fits untouched (both sides are then identical).
    if (current)
      for (size_t k = 0; k < c.size(); ++k)
        c[k] = 0.5 * (c[k] + (*current)[k]);
    for (double& v : c) v = round_to(v, 2);
    auto join = [](double v) {  // sign-aware " + a" / " - a"
      return (v < 0 ? std::string(" - ") : std::string(" + ")) +
             fmt_fixed(std::abs(v), 2);
    };
    std::string formula;
    if (degree == 2)
      formula = "y = " + fmt_fixed(c[2], 2) + "x^2" + join(c[1]) + "x" +
                join(c[0]);
    else
      formula = "y = " + fmt_fixed(c[1], 2) + "x" + join(c[0]);
    return "Reasoning:\n\nFitted the current batch with a least-squares "
           "model of the same degree as the current descriptions.\n\n"
           "New Pattern Descriptions:\n\n" +
           formula;
  }

 private:
  TaskSpec task_;
};

}  // namespace

std::unique_ptr<Backend> make_oracle_backend(OracleRole role,
                                             const TaskSpec& task) {
  if (role == OracleRole::learner)
    return std::make_unique<OracleLearner>(task);
  return std::make_unique<OracleOptimizer>(task);
}

}  // namespace vml
