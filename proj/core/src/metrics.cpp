#include "stance/metrics.hpp"

#include <iomanip>
#include <ostream>
#include <stdexcept>

#include "json.hpp"

namespace stance {

std::uint64_t ConfusionMatrix::total() const noexcept {
  std::uint64_t n = 0;
  for (const auto& row : counts)
    for (auto v : row) n += v;
  return n;
}

std::uint64_t ConfusionMatrix::trace() const noexcept {
  std::uint64_t n = 0;
  for (std::size_t k = 0; k < kNumClasses; ++k) n += counts[k][k];
  return n;
}

ConfusionMatrix confusion(std::span<const StanceLabel> golds, std::span<const StanceLabel> preds) {
  if (golds.size() != preds.size()) {
    throw std::invalid_argument("confusion: gold and prediction lengths differ");
  }
  ConfusionMatrix cm;
  for (std::size_t i = 0; i < golds.size(); ++i) {
    ++cm.counts[class_index(golds[i])][class_index(preds[i])];
  }
  return cm;
}

double accuracy(const ConfusionMatrix& cm) {
  const auto n = cm.total();
  if (n == 0) throw std::invalid_argument("accuracy: empty confusion matrix");
  return static_cast<double>(cm.trace()) / static_cast<double>(n);
}

ClassScores class_scores(const ConfusionMatrix& cm, std::size_t cls) {
  std::uint64_t tp = cm.counts[cls][cls], predicted = 0, actual = 0;
  for (std::size_t k = 0; k < kNumClasses; ++k) {
    predicted += cm.counts[k][cls];
    actual += cm.counts[cls][k];
  }
  ClassScores s;
  if (predicted) s.precision = static_cast<double>(tp) / static_cast<double>(predicted);
  if (actual) s.recall = static_cast<double>(tp) / static_cast<double>(actual);
  if (s.precision + s.recall > 0) s.f1 = 2 * s.precision * s.recall / (s.precision + s.recall);
  return s;
}

double macro_f1(const ConfusionMatrix& cm) {
  if (cm.total() == 0) throw std::invalid_argument("macro_f1: empty confusion matrix");
  double sum = 0;
  for (std::size_t k = 0; k < kNumClasses; ++k) sum += class_scores(cm, k).f1;
  return sum / static_cast<double>(kNumClasses);
}

void write_metrics_records(std::ostream& out, const ConfusionMatrix& cm) {
  using nlohmann::json;
  out << json{{"metric", "accuracy"}, {"value", accuracy(cm)}}.dump() << '\n';
  out << json{{"metric", "macro_f1"}, {"value", macro_f1(cm)}}.dump() << '\n';
  json labels = json::array();
  for (auto l : kModelLabels) labels.push_back(std::string(to_string(l)));
  json rows = json::array();
  for (const auto& row : cm.counts) rows.push_back(row);
  out << json{{"confusion_matrix", {{"labels", labels}, {"rows", rows}}}}.dump() << '\n';
}

void write_metrics_plain(std::ostream& out, const ConfusionMatrix& cm) {
  auto flags = out.flags();
  out << std::fixed << std::setprecision(4);
  out << "accuracy  " << accuracy(cm) << '\n';
  out << "macro_f1  " << macro_f1(cm) << '\n';
  out << "confusion (rows = gold, cols = predicted)\n";
  out << std::setw(10) << "";
  for (auto l : kModelLabels) out << std::setw(10) << to_string(l);
  out << '\n';
  for (std::size_t r = 0; r < kNumClasses; ++r) {
    out << std::setw(10) << to_string(kModelLabels[r]);
    for (auto v : cm.counts[r]) out << std::setw(10) << v;
    out << '\n';
  }
  out.flags(flags);
}

}  // namespace stance
