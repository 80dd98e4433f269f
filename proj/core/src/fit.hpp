#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "stance/error.hpp"
#include "stance/metrics.hpp"
#include "stance/model.hpp"

namespace stance::detail {

struct FitOptions {
  double lr = 1e-3;
  std::size_t batch_size = 32;
  std::size_t max_epochs = 50;
  std::size_t patience = 5;
  std::uint64_t seed = 1;
  double clip_norm = 5.0;
};

/// Shared optimisation loop. `Model` provides parameters(),
/// accumulate_gradient(sample..., gold, scale) via `step`, and prediction via
/// `predict`; samples carry `gold` and `id`.
template <class Model, class Sample, class Step, class Predict>
TrainingHistory fit(Model& model, const std::vector<Sample>& train_set,
                    const std::vector<Sample>& validation_set, const FitOptions& opt, Step step,
                    Predict predict) {
  if (train_set.empty()) throw std::invalid_argument("training set is empty");
  if (validation_set.empty()) throw std::invalid_argument("validation set is empty");

  auto params = model.parameters();
  auto adam = nn::make_adam(params, {.lr = opt.lr});
  std::mt19937_64 rng(opt.seed);
  std::vector<std::size_t> order(train_set.size());
  std::iota(order.begin(), order.end(), std::size_t{0});

  auto snapshot = [&] {
    std::vector<std::vector<double>> values;
    for (auto* p : params) values.push_back(p->value);
    return values;
  };
  auto best = snapshot();
  double best_accuracy = -1.0;
  std::size_t since_best = 0;

  TrainingHistory history;
  std::vector<StanceLabel> golds, preds;
  for (const auto& s : validation_set) golds.push_back(label_from_class(s.gold));

  for (std::size_t epoch = 1; epoch <= opt.max_epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    double loss_sum = 0.0;
    for (std::size_t start = 0; start < order.size(); start += opt.batch_size) {
      const std::size_t end = std::min(order.size(), start + opt.batch_size);
      const double scale = 1.0 / static_cast<double>(end - start);
      nn::zero_grads(params);
      for (std::size_t k = start; k < end; ++k) {
        const auto& sample = train_set[order[k]];
        const double loss = step(model, sample, scale);
        if (!std::isfinite(loss)) {
          throw NumericError("non-finite loss at epoch " + std::to_string(epoch) + " on example '" +
                             sample.id + "'");
        }
        loss_sum += loss;
      }
      nn::clip_grad_norm(params, opt.clip_norm);
      nn::adam_step(params, adam);
    }

    preds.clear();
    for (const auto& s : validation_set) preds.push_back(predict(model, s).label);
    const auto cm = confusion(golds, preds);
    EpochRecord rec{epoch, loss_sum / static_cast<double>(train_set.size()), accuracy(cm),
                    macro_f1(cm)};
    history.epochs.push_back(rec);

    if (rec.val_accuracy > best_accuracy) {
      best_accuracy = rec.val_accuracy;
      history.best_epoch = epoch;
      best = snapshot();
      since_best = 0;
    } else {
      ++since_best;
    }
    if (since_best >= opt.patience) break;
  }

  for (std::size_t j = 0; j < params.size(); ++j) params[j]->value = best[j];
  return history;
}

}  // namespace stance::detail
