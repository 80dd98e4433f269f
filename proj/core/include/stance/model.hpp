#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "stance/corpus.hpp"
#include "stance/labels.hpp"
#include "stance/nn.hpp"
#include "stance/text.hpp"

namespace stance {

struct StancePrediction {
  std::array<double, kNumClasses> distribution{};  // favour, against, neutral
  StanceLabel label = StanceLabel::neutral;
  double probability = 0.0;

  /// Label is the argmax; ties go to the earlier class.
  static StancePrediction from_distribution(std::span<const double> p);
};

inline constexpr std::size_t kMaxSequenceLength = 128;

/// What a classifier reads for one example: headline tokens followed by
/// excerpt tokens, cut at `max_length`.
Tokens model_input_tokens(std::string_view headline, std::string_view excerpt,
                          std::size_t max_length = kMaxSequenceLength);

/// Common surface of the trained classifiers. Instances are immutable after
/// training, so classify() may be called concurrently.
class StanceClassifier {
 public:
  virtual ~StanceClassifier() = default;

  /// Throws std::invalid_argument if either token list is empty.
  virtual StancePrediction classify(std::span<const std::string> topic_tokens,
                                    std::span<const std::string> article_tokens) const = 0;
  virtual std::string_view kind() const noexcept = 0;
  virtual void save(const std::filesystem::path& path) const = 0;

  StancePrediction predict(std::string_view topic, std::string_view headline,
                           std::string_view excerpt) const;
  StancePrediction predict(const AnnotatedExample& example) const;
};

/// Dispatches on the checkpoint's recorded kind.
std::unique_ptr<StanceClassifier> load_classifier(const std::filesystem::path& path);

struct EpochRecord {
  std::size_t epoch = 0;
  double train_loss = 0.0;
  double val_accuracy = 0.0;
  double val_macro_f1 = 0.0;

  friend bool operator==(const EpochRecord&, const EpochRecord&) = default;
};

struct TrainingHistory {
  std::vector<EpochRecord> epochs;
  std::size_t best_epoch = 0;

  friend bool operator==(const TrainingHistory&, const TrainingHistory&) = default;
};

/// One {epoch, train_loss, val_accuracy, val_macro_f1} object per line.
void write_history(std::ostream& out, const TrainingHistory& history);

/// Retained examples with a 3-class label; `unrelated` and discarded ones are dropped.
std::vector<AnnotatedExample> model_examples(std::span<const AnnotatedExample> examples);

// ---------------------------------------------------------------------------
// Conditional BiLSTM

struct StanceModelConfig {
  std::size_t embedding_dim = 100;
  std::size_t hidden = 64;
  double lr = 1e-3;
  std::size_t batch_size = 32;
  std::size_t max_epochs = 50;
  std::size_t patience = 5;
  std::uint64_t seed = 1;
  std::size_t max_length = kMaxSequenceLength;
  bool freeze_embeddings = false;
  double clip_norm = 5.0;
  double init_range = 0.1;

  /// Throws std::invalid_argument when a field is out of range.
  void validate() const;
};

/// The topic is read by its own BiLSTM; each direction's final (h, c) seeds
/// the same direction of the article BiLSTM. The output layer is softmax
/// over [h_fwd ; h_bwd] of the article encoder.
class StanceModel final : public StanceClassifier {
 public:
  static constexpr std::string_view kKind = "conditional-bilstm";

  /// Seeded initialisation; rows of `pretrained` (which must match the vocab
  /// size and embedding_dim) replace the random embedding rows.
  StanceModel(Vocabulary vocab, StanceModelConfig config,
              const EmbeddingMatrix* pretrained = nullptr);

  const StanceModelConfig& config() const noexcept { return config_; }
  const Vocabulary& vocab() const noexcept { return vocab_; }

  /// Trainable tensors (the embedding is left out when frozen).
  nn::ParamList parameters();
  std::vector<const nn::ParamTensor*> tensors() const;

  StancePrediction forward(std::span<const TokenId> topic, std::span<const TokenId> article) const;
  double loss(std::span<const TokenId> topic, std::span<const TokenId> article,
              std::size_t gold) const;
  /// Forward and backward pass for one example; gradients are scaled by
  /// `scale` and added to ParamTensor::grad. Returns the unscaled loss.
  double accumulate_gradient(std::span<const TokenId> topic, std::span<const TokenId> article,
                             std::size_t gold, double scale = 1.0);

  StancePrediction classify(std::span<const std::string> topic_tokens,
                            std::span<const std::string> article_tokens) const override;
  std::string_view kind() const noexcept override { return kKind; }
  void save(const std::filesystem::path& path) const override;
  void save(std::ostream& out) const;
  static StanceModel load(std::istream& in);
  static StanceModel load(const std::filesystem::path& path);

 private:
  StanceModel() = default;

  Vocabulary vocab_;
  StanceModelConfig config_;
  nn::ParamTensor embedding_;
  nn::LstmParams topic_fwd_, topic_bwd_, article_fwd_, article_bwd_;
  nn::ParamTensor out_W_, out_b_;
};

StancePrediction conditional_forward(std::span<const TokenId> topic_ids,
                                     std::span<const TokenId> article_ids,
                                     const StanceModel& model);

/// Builds the vocabulary from topics, headlines and excerpts of `examples`.
Vocabulary vocabulary_for(std::span<const AnnotatedExample> examples, std::uint64_t min_count = 1);

/// Mini-batch Adam with seeded shuffling, global-norm clipping, and early
/// stopping on validation accuracy. The best-validation parameters are
/// restored on return. `unrelated` examples are filtered out first.
/// Throws std::invalid_argument when train or validation ends up empty and
/// NumericError on a non-finite loss.
TrainingHistory train(StanceModel& model, std::span<const AnnotatedExample> train_set,
                      std::span<const AnnotatedExample> validation_set);
TrainingHistory train(StanceModel& model, const DatasetSplit& split);

struct ModelGradCheckConfig {
  std::size_t embedding_dim = 8;
  std::size_t hidden = 8;
  std::size_t length = 5;
  std::size_t vocab_size = 16;
  std::uint64_t seed = 0;
  double eps = 5e-3;
};

/// Finite-difference check of every parameter of a randomly initialised
/// model on one random example.
nn::GradCheckResult gradient_check_model(const ModelGradCheckConfig& config);

// ---------------------------------------------------------------------------
// Bag-of-n-grams baseline

inline constexpr std::size_t kNgramHashBits = 18;
inline constexpr std::size_t kNgramSpace = std::size_t{1} << kNgramHashBits;

/// Sorted (index, count) pairs.
using SparseVector = std::vector<std::pair<std::uint32_t, double>>;

/// Named n-gram counts: 1..n_max-grams joined by '_', plus `topic=<tok>`
/// markers for each topic token.
std::vector<std::pair<std::string, double>> ngram_counts(std::span<const std::string> tokens,
                                                         std::size_t n_max = 3,
                                                         std::span<const std::string> topic_tokens = {});

/// ngram_counts hashed into 2^18 buckets (FNV-1a).
SparseVector featurize_ngrams(std::span<const std::string> tokens, std::size_t n_max = 3,
                              std::span<const std::string> topic_tokens = {});

struct BaselineConfig {
  std::size_t n_max = 3;
  bool use_topic_features = false;
  double lr = 1e-2;
  std::size_t batch_size = 32;
  std::size_t max_epochs = 50;
  std::size_t patience = 5;
  std::uint64_t seed = 1;
  double clip_norm = 5.0;

  void validate() const;
};

/// Multinomial logistic regression over hashed n-gram counts.
class BaselineModel final : public StanceClassifier {
 public:
  static constexpr std::string_view kKind = "ngram-baseline";

  explicit BaselineModel(BaselineConfig config);

  const BaselineConfig& config() const noexcept { return config_; }
  nn::ParamList parameters() { return {&W_, &b_}; }

  SparseVector features(std::span<const std::string> topic_tokens,
                        std::span<const std::string> article_tokens) const;
  StancePrediction forward(const SparseVector& x) const;
  double accumulate_gradient(const SparseVector& x, std::size_t gold, double scale = 1.0);

  StancePrediction classify(std::span<const std::string> topic_tokens,
                            std::span<const std::string> article_tokens) const override;
  std::string_view kind() const noexcept override { return kKind; }
  void save(const std::filesystem::path& path) const override;
  static BaselineModel load(const std::filesystem::path& path);

 private:
  BaselineConfig config_;
  nn::ParamTensor W_, b_;
};

BaselineModel baseline_train(std::span<const AnnotatedExample> train_set,
                             std::span<const AnnotatedExample> validation_set,
                             const BaselineConfig& config, TrainingHistory* history = nullptr);

StancePrediction baseline_predict(const BaselineModel& model, std::string_view topic,
                                  std::string_view headline, std::string_view excerpt);

}  // namespace stance
