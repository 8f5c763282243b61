#include "vml/numfmt.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace vml {
namespace {

struct Parts {
  std::string whole;  // includes sign
  std::string frac;   // digits after '.', may be empty
};

Parts split_parts(const std::string& s) {
  auto dot = s.find('.');
  return {s.substr(0, dot), dot == std::string::npos ? "" : s.substr(dot + 1)};
}

std::string aligned(const Parts& p, size_t whole_w, size_t frac_w) {
  std::string out(whole_w - p.whole.size(), ' ');
  out += p.whole;
  out += '.';
  out += p.frac;
  out.append(frac_w - p.frac.size(), ' ');
  return out;
}

}  // namespace

double round_to(double v, int decimals) {
  double scale = std::pow(10.0, decimals);
  return std::round(v * scale) / scale;
}

std::string fmt_fixed(double v, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", decimals, v);
  return buf;
}

std::string np_trim(double v, int decimals) {
  std::string s = fmt_fixed(v, decimals);
  if (s.find('.') == std::string::npos) return s + '.';
  s.erase(s.find_last_not_of('0') + 1);  // "1.00" -> "1.", "-0.00" -> "-0."
  return s;
}

std::string format_vector(const std::vector<double>& v, int decimals) {
  std::vector<Parts> parts;
  size_t ww = 0, fw = 0;
  for (double x : v) {
    parts.push_back(split_parts(np_trim(x, decimals)));
    ww = std::max(ww, parts.back().whole.size());
    fw = std::max(fw, parts.back().frac.size());
  }
  std::string out = "[";
  for (size_t i = 0; i < parts.size(); ++i) {
    if (i) out += ' ';
    out += aligned(parts[i], ww, fw);
  }
  out += ']';
  return out;
}

std::string format_batch(const std::vector<std::vector<double>>& rows,
                         int decimals) {
  size_t ww = 0, fw = 0;
  std::vector<std::vector<Parts>> parts(rows.size());
  for (size_t r = 0; r < rows.size(); ++r) {
    for (double x : rows[r]) {
      parts[r].push_back(split_parts(np_trim(x, decimals)));
      ww = std::max(ww, parts[r].back().whole.size());
      fw = std::max(fw, parts[r].back().frac.size());
    }
  }
  std::string out = "[";
  for (size_t r = 0; r < rows.size(); ++r) {
    if (r) out += ' ';
    out += '[';
    for (size_t i = 0; i < parts[r].size(); ++i) {
      if (i) out += ' ';
      out += aligned(parts[r][i], ww, fw);
    }
    out += ']';
  }
  out += ']';
  return out;
}

std::string format_label_batch(const std::vector<int>& labels) {
  std::string out = "[";
  for (size_t i = 0; i < labels.size(); ++i) {
    if (i) out += ' ';
    out += '[' + std::to_string(labels[i]) + ']';
  }
  out += ']';
  return out;
}

std::string format_text_list(const std::vector<std::string>& items) {
  std::string out = "[";
  for (size_t i = 0; i < items.size(); ++i) {
    if (i) out += ", ";
    out += '\'' + items[i] + '\'';
  }
  out += ']';
  return out;
}

std::string format_shortest(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  std::string s(buf, res.ptr);
  auto e = s.find('e');
  if (e == std::string::npos) {
    if (s.find('.') == std::string::npos &&
        s.find_first_of("in") == std::string::npos)  // inf/nan
      s += ".0";
    return s;
  }
  // Pad the exponent to at least two digits with an explicit sign, matching
  // the repr convention the run logs are compared against.
  std::string mant = s.substr(0, e);
  std::string exp = s.substr(e + 1);
  char sign = '+';
  if (exp[0] == '+' || exp[0] == '-') {
    sign = exp[0];
    exp.erase(0, 1);
  }
  while (exp.size() < 2) exp.insert(exp.begin(), '0');
  if (mant.find('.') == std::string::npos) mant += ".0";
  return mant + 'e' + sign + exp;
}

}  // namespace vml
