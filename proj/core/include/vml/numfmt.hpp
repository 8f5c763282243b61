#pragma once

#include <string>
#include <vector>

namespace vml {

// Round half away from zero at the given number of decimals.
double round_to(double v, int decimals);

// Fixed-point with exactly `decimals` fraction digits ("%.Nf").
std::string fmt_fixed(double v, int decimals);

// Fixed-point with trailing zeros stripped but the '.' kept: 1.0 -> "1.",
// -0.004 @2 -> "-0.", 1.80 -> "1.8".
std::string np_trim(double v, int decimals);

// "[a b c]" with elements column-aligned: integer parts padded left and
// fraction parts padded right to the widest in the vector.
std::string format_vector(const std::vector<double>& v, int decimals);

// "[[a b] [c d]]" with alignment widths computed over every element of every
// row, so columns line up across the whole batch.
std::string format_batch(const std::vector<std::vector<double>>& rows,
                         int decimals);

// "[[0] [1] [0]]"
std::string format_label_batch(const std::vector<int>& labels);

// "['a', 'b', 'c']"
std::string format_text_list(const std::vector<std::string>& items);

// Shortest decimal string that round-trips, in the style of a scripting-
// language repr: "36.34138", "2.8677400000000004", "-4.9999999446126456e-09",
// "1.0" (a trailing ".0" is kept for integral values).
std::string format_shortest(double v);

}  // namespace vml
