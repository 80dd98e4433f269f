#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <span>

#include "stance/labels.hpp"

namespace stance {

/// 3x3 counts, rows = gold, columns = predicted, in favour/against/neutral order.
struct ConfusionMatrix {
  std::array<std::array<std::uint64_t, kNumClasses>, kNumClasses> counts{};

  std::uint64_t total() const noexcept;
  std::uint64_t trace() const noexcept;
  friend bool operator==(const ConfusionMatrix&, const ConfusionMatrix&) = default;
};

/// Throws std::invalid_argument on length mismatch or an `unrelated` label.
ConfusionMatrix confusion(std::span<const StanceLabel> golds, std::span<const StanceLabel> preds);

/// trace / total. Throws std::invalid_argument on an empty matrix.
double accuracy(const ConfusionMatrix& cm);

struct ClassScores {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

/// Zero-denominator convention: P, R or F1 is 0 when its denominator is 0.
ClassScores class_scores(const ConfusionMatrix& cm, std::size_t cls);

/// Unweighted mean of the three per-class F1 scores.
double macro_f1(const ConfusionMatrix& cm);

/// Line-delimited report: {"metric":"accuracy","value":..},
/// {"metric":"macro_f1","value":..}, then {"confusion_matrix":{labels, rows}}.
void write_metrics_records(std::ostream& out, const ConfusionMatrix& cm);
void write_metrics_plain(std::ostream& out, const ConfusionMatrix& cm);

}  // namespace stance
