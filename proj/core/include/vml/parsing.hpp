#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "vml/domain.hpp"

namespace vml {

// All decimal literals in order (optional sign, optional fraction, optional
// exponent). Empty result is fine.
std::vector<double> parse_number_list(std::string_view text);

// Finds the LAST line beginning "Output:" (case-insensitive) and parses the
// remainder by task family. Never throws: failures set parse_ok=false with a
// neutral placeholder value (training substitutes the declared fallback).
Prediction parse_learner_output(const std::string& text, const TaskSpec& task);

// Splits an optimizer response into reasoning and the new parameter text
// (after "New Pattern Descriptions:" or "New Model Descriptions:"), stripping
// code fences. Throws optimizer_parse_failure if neither header is present.
OptimizerUpdate parse_optimizer_output(const std::string& text,
                                       const TaskSpec& task);

}  // namespace vml
