#include "stance/labels.hpp"

#include <stdexcept>
#include <string>

namespace stance {

std::string_view to_string(StanceLabel label) noexcept {
  switch (label) {
    case StanceLabel::favour: return "favour";
    case StanceLabel::against: return "against";
    case StanceLabel::neutral: return "neutral";
    case StanceLabel::unrelated: return "unrelated";
  }
  return "unknown";
}

std::optional<StanceLabel> parse_label(std::string_view s) noexcept {
  for (auto label : kAllLabels) {
    if (to_string(label) == s) return label;
  }
  return std::nullopt;
}

std::size_t class_index(StanceLabel label) {
  if (!is_model_label(label)) {
    throw std::invalid_argument("label 'unrelated' is not a model class");
  }
  return static_cast<std::size_t>(label);
}

StanceLabel label_from_class(std::size_t index) {
  if (index >= kNumClasses) {
    throw std::out_of_range("class index " + std::to_string(index) + " out of range");
  }
  return kModelLabels[index];
}

}  // namespace stance
