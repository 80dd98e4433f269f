#include <algorithm>
#include <fstream>
#include <map>
#include <stdexcept>

#include "fit.hpp"
#include "json.hpp"
#include "stance/checkpoint.hpp"
#include "stance/error.hpp"
#include "stance/model.hpp"

namespace stance {
namespace {

std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace

std::vector<std::pair<std::string, double>> ngram_counts(std::span<const std::string> tokens,
                                                         std::size_t n_max,
                                                         std::span<const std::string> topic_tokens) {
  if (n_max < 1) throw std::invalid_argument("ngram_counts: n_max must be >= 1");
  std::map<std::string, double> counts;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    std::string gram;
    for (std::size_t n = 1; n <= n_max && i + n <= tokens.size(); ++n) {
      if (n > 1) gram += '_';
      gram += tokens[i + n - 1];
      counts[gram] += 1.0;
    }
  }
  for (const auto& t : topic_tokens) counts["topic=" + t] += 1.0;
  return {counts.begin(), counts.end()};
}

SparseVector featurize_ngrams(std::span<const std::string> tokens, std::size_t n_max,
                              std::span<const std::string> topic_tokens) {
  std::map<std::uint32_t, double> buckets;
  for (const auto& [name, count] : ngram_counts(tokens, n_max, topic_tokens)) {
    buckets[static_cast<std::uint32_t>(fnv1a(name) & (kNgramSpace - 1))] += count;
  }
  return {buckets.begin(), buckets.end()};
}

void BaselineConfig::validate() const {
  if (n_max == 0 || batch_size == 0 || max_epochs == 0) {
    throw std::invalid_argument("baseline n_max, batch size and epochs must be positive");
  }
  if (!(lr > 0) || !(clip_norm > 0)) throw std::invalid_argument("baseline lr and clip_norm must be positive");
  if (patience > max_epochs) throw std::invalid_argument("patience must not exceed max_epochs");
}

BaselineModel::BaselineModel(BaselineConfig config)
    : config_(config),
      W_("baseline.W", {kNumClasses, kNgramSpace}),
      b_("baseline.b", {kNumClasses}) {
  config_.validate();
}

SparseVector BaselineModel::features(std::span<const std::string> topic_tokens,
                                     std::span<const std::string> article_tokens) const {
  if (config_.use_topic_features) return featurize_ngrams(article_tokens, config_.n_max, topic_tokens);
  return featurize_ngrams(article_tokens, config_.n_max);
}

StancePrediction BaselineModel::forward(const SparseVector& x) const {
  std::array<double, kNumClasses> logits{};
  for (std::size_t k = 0; k < kNumClasses; ++k) {
    double z = b_.value[k];
    const double* row = W_.value.data() + k * kNgramSpace;
    for (const auto& [idx, v] : x) z += row[idx] * v;
    logits[k] = z;
  }
  return StancePrediction::from_distribution(nn::softmax(logits));
}

double BaselineModel::accumulate_gradient(const SparseVector& x, std::size_t gold, double scale) {
  auto pred = forward(x);
  const double loss = nn::cross_entropy(pred.distribution, gold);
  auto dlogits = nn::softmax_cross_entropy_grad(pred.distribution, gold);
  for (std::size_t k = 0; k < kNumClasses; ++k) {
    const double g = dlogits[k] * scale;
    b_.grad[k] += g;
    double* row = W_.grad.data() + k * kNgramSpace;
    for (const auto& [idx, v] : x) row[idx] += g * v;
  }
  return loss;
}

StancePrediction BaselineModel::classify(std::span<const std::string> topic_tokens,
                                         std::span<const std::string> article_tokens) const {
  if (topic_tokens.empty()) throw std::invalid_argument("baseline: empty topic");
  if (article_tokens.empty()) throw std::invalid_argument("baseline: empty article");
  return forward(features(topic_tokens, article_tokens));
}

void BaselineModel::save(const std::filesystem::path& path) const {
  nlohmann::json meta;
  meta["kind"] = std::string(kKind);
  meta["config"] = {{"n_max", config_.n_max},
                    {"use_topic_features", config_.use_topic_features},
                    {"lr", config_.lr},
                    {"batch_size", config_.batch_size},
                    {"max_epochs", config_.max_epochs},
                    {"patience", config_.patience},
                    {"seed", config_.seed},
                    {"clip_norm", config_.clip_norm}};
  std::vector<const nn::ParamTensor*> tensors{&W_, &b_};
  write_checkpoint(path, meta.dump(), tensors);
}

BaselineModel BaselineModel::load(const std::filesystem::path& path) {
  auto ck = read_checkpoint(path);
  BaselineConfig cfg;
  try {
    auto meta = nlohmann::json::parse(ck.metadata);
    if (meta.value("kind", "") != kKind) throw DataError("checkpoint is not an ngram-baseline model");
    const auto& c = meta.at("config");
    cfg.n_max = c.at("n_max").get<std::size_t>();
    cfg.use_topic_features = c.at("use_topic_features").get<bool>();
    cfg.lr = c.at("lr").get<double>();
    cfg.batch_size = c.at("batch_size").get<std::size_t>();
    cfg.max_epochs = c.at("max_epochs").get<std::size_t>();
    cfg.patience = c.at("patience").get<std::size_t>();
    cfg.seed = c.at("seed").get<std::uint64_t>();
    cfg.clip_norm = c.at("clip_norm").get<double>();
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("checkpoint metadata: ") + e.what());
  }
  BaselineModel m(cfg);
  for (auto* p : m.parameters()) {
    const auto& src = ck.tensor(p->name);
    if (src.shape != p->shape) throw DataError("checkpoint tensor '" + p->name + "' has wrong shape");
    p->value = src.value;
  }
  return m;
}

namespace {

struct FeaturizedExample {
  SparseVector features;
  std::size_t gold = 0;
  std::string id;
};

std::vector<FeaturizedExample> featurize_all(std::span<const AnnotatedExample> examples,
                                             const BaselineModel& model) {
  std::vector<FeaturizedExample> out;
  for (const auto& ex : model_examples(examples)) {
    out.push_back({model.features(tokenize(ex.topic),
                                  model_input_tokens(ex.context.headline, ex.context.excerpt)),
                   class_index(*ex.label), ex.id});
  }
  return out;
}

}  // namespace

BaselineModel baseline_train(std::span<const AnnotatedExample> train_set,
                             std::span<const AnnotatedExample> validation_set,
                             const BaselineConfig& config, TrainingHistory* history) {
  BaselineModel model(config);
  detail::FitOptions opt{config.lr, config.batch_size, config.max_epochs, config.patience,
                         config.seed, config.clip_norm};
  auto h = detail::fit(
      model, featurize_all(train_set, model), featurize_all(validation_set, model), opt,
      [](BaselineModel& m, const FeaturizedExample& s, double scale) {
        return m.accumulate_gradient(s.features, s.gold, scale);
      },
      [](const BaselineModel& m, const FeaturizedExample& s) { return m.forward(s.features); });
  if (history) *history = std::move(h);
  return model;
}

StancePrediction baseline_predict(const BaselineModel& model, std::string_view topic,
                                  std::string_view headline, std::string_view excerpt) {
  return model.predict(topic, headline, excerpt);
}

}  // namespace stance
