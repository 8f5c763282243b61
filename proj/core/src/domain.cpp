#include "vml/domain.hpp"

namespace vml {

TaskFamily family_from_string(const std::string& s) {
  if (s == "regression_1d") return TaskFamily::regression_1d;
  if (s == "classification_2d_prob") return TaskFamily::classification_2d_prob;
  if (s == "classification_2d_label")
    return TaskFamily::classification_2d_label;
  if (s == "classification_text") return TaskFamily::classification_text;
  throw Error(ErrorCode::invalid_argument, "unknown task family: " + s);
}

const char* to_string(TaskFamily f) {
  switch (f) {
    case TaskFamily::regression_1d: return "regression_1d";
    case TaskFamily::classification_2d_prob: return "classification_2d_prob";
    case TaskFamily::classification_2d_label: return "classification_2d_label";
    case TaskFamily::classification_text: return "classification_text";
  }
  return "unknown";
}

UpdateStrategy strategy_from_string(const std::string& s) {
  if (s == "replace") return UpdateStrategy::replace;
  if (s == "append") return UpdateStrategy::append;
  if (s == "append_summarized" || s == "append-summarized")
    return UpdateStrategy::append_summarized;
  throw Error(ErrorCode::invalid_argument, "unknown update strategy: " + s);
}

const char* to_string(UpdateStrategy s) {
  switch (s) {
    case UpdateStrategy::replace: return "replace";
    case UpdateStrategy::append: return "append";
    case UpdateStrategy::append_summarized: return "append_summarized";
  }
  return "unknown";
}

}  // namespace vml
