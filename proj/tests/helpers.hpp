#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "vml/domain.hpp"

namespace testhelp {

inline std::filesystem::path fixtures() { return VML_FIXTURES_DIR; }

inline nlohmann::json load_json(const std::filesystem::path& p) {
  std::ifstream in(p);
  if (!in) throw std::runtime_error("missing fixture " + p.string());
  return nlohmann::json::parse(in);
}

inline nlohmann::json transcript(const std::string& family) {
  return load_json(fixtures() / "transcripts" / family / "steps.json");
}

// Transcript rows store every input/output/target as a JSON array (or a bare
// string for text tasks); these rebuild the typed domain values.

inline std::vector<vml::Input> inputs_of(const nlohmann::json& step) {
  std::vector<vml::Input> out;
  for (const auto& j : step.at("inputs")) {
    if (j.is_string())
      out.emplace_back(j.get<std::string>());
    else
      out.emplace_back(j.get<std::vector<double>>());
  }
  return out;
}

inline std::vector<vml::Value> values_of(const nlohmann::json& arr,
                                         vml::TaskFamily family) {
  std::vector<vml::Value> out;
  for (const auto& j : arr) {
    auto v = j.get<std::vector<double>>();
    switch (family) {
      case vml::TaskFamily::regression_1d:
        out.emplace_back(v.at(0));
        break;
      case vml::TaskFamily::classification_2d_prob:
        out.emplace_back(v);
        break;
      default:
        out.emplace_back(static_cast<int>(v.at(0)));
    }
  }
  return out;
}

inline std::vector<vml::Prediction> predictions_of(const nlohmann::json& step,
                                                   vml::TaskFamily family) {
  std::vector<vml::Prediction> out;
  for (auto& v : values_of(step.at("model_outputs"), family)) {
    vml::Prediction p;
    p.value = std::move(v);
    p.parse_ok = true;
    out.push_back(std::move(p));
  }
  return out;
}

}  // namespace testhelp
