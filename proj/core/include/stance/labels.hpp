#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string_view>

namespace stance {

/// Annotation outcome. The model only ever sees the first three values.
enum class StanceLabel { favour = 0, against = 1, neutral = 2, unrelated = 3 };

inline constexpr std::size_t kNumClasses = 3;
inline constexpr std::array<StanceLabel, kNumClasses> kModelLabels{
    StanceLabel::favour, StanceLabel::against, StanceLabel::neutral};
inline constexpr std::array<StanceLabel, 4> kAllLabels{
    StanceLabel::favour, StanceLabel::against, StanceLabel::neutral, StanceLabel::unrelated};

std::string_view to_string(StanceLabel label) noexcept;
std::optional<StanceLabel> parse_label(std::string_view s) noexcept;

constexpr bool is_model_label(StanceLabel label) noexcept {
  return label != StanceLabel::unrelated;
}

/// Class index used by the 3-way classifiers. Throws std::invalid_argument for `unrelated`.
std::size_t class_index(StanceLabel label);
StanceLabel label_from_class(std::size_t index);

}  // namespace stance
