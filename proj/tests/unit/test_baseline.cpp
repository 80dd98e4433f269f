#include <gtest/gtest.h>

#include <filesystem>

#include "stance/corpus.hpp"
#include "stance/metrics.hpp"
#include "stance/model.hpp"

using namespace stance;

namespace {

AnnotatedExample toy(std::string id, std::string text, StanceLabel l) {
  return make_example(std::move(id), "a", "topic", {"", std::move(text), std::nullopt}, {l, l, l});
}

double accuracy_on(const StanceClassifier& m, std::span<const AnnotatedExample> xs) {
  std::vector<StanceLabel> g, p;
  for (const auto& x : model_examples(xs)) {
    g.push_back(*x.label);
    p.push_back(m.predict(x).label);
  }
  return accuracy(confusion(g, p));
}

}  // namespace

TEST(Ngrams, Enumeration) {
  std::vector<std::string> ab{"a", "b"};
  auto c = ngram_counts(ab, 2);
  EXPECT_EQ(c, (std::vector<std::pair<std::string, double>>{{"a", 1}, {"a_b", 1}, {"b", 1}}));
  EXPECT_TRUE(featurize_ngrams(std::vector<std::string>{}).empty());
  EXPECT_THROW(ngram_counts(ab, 0), std::invalid_argument);
}

TEST(Ngrams, RepeatsAndTopicMarkers) {
  std::vector<std::string> t{"x", "x", "x"};
  std::vector<std::string> topic{"gun", "control"};
  auto c = ngram_counts(t, 3, topic);
  EXPECT_EQ(c, (std::vector<std::pair<std::string, double>>{
                   {"topic=control", 1}, {"topic=gun", 1}, {"x", 3}, {"x_x", 2}, {"x_x_x", 1}}));
}

TEST(Ngrams, HashingIsDeterministicAndBounded) {
  auto toks = tokenize("Critics condemned gun control at the hearing, officials said.");
  auto a = featurize_ngrams(toks), b = featurize_ngrams(toks);
  EXPECT_EQ(a, b);
  double total = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_LT(a[i].first, kNgramSpace);
    if (i) {
      EXPECT_LT(a[i - 1].first, a[i].first);
    }
    total += a[i].second;
  }
  EXPECT_EQ(total, 3.0 * toks.size() - 3.0);
}

TEST(Baseline, SeparableToySetIsLearned) {
  std::vector<AnnotatedExample> xs;
  for (int i = 0; i < 30; ++i) {
    xs.push_back(toy("f" + std::to_string(i), "alpha", StanceLabel::favour));
    xs.push_back(toy("a" + std::to_string(i), "beta", StanceLabel::against));
    xs.push_back(toy("n" + std::to_string(i), "gamma", StanceLabel::neutral));
  }
  BaselineConfig cfg;
  cfg.lr = 0.1;
  cfg.max_epochs = 20;
  cfg.patience = 20;
  auto m = baseline_train(xs, xs, cfg);
  EXPECT_EQ(accuracy_on(m, xs), 1.0);
}

TEST(Baseline, DeterministicUnderSeed) {
  SynthConfig sc;
  sc.n_topics = 6;
  auto xs = model_examples(synthesize_corpus(150, 2, sc));
  BaselineConfig cfg;
  cfg.max_epochs = 3;
  cfg.patience = 3;
  TrainingHistory ha, hb;
  auto a = baseline_train(xs, xs, cfg, &ha);
  auto b = baseline_train(xs, xs, cfg, &hb);
  EXPECT_EQ(ha, hb);
  for (const auto& x : xs) ASSERT_EQ(a.predict(x).distribution, b.predict(x).distribution);
}

TEST(Baseline, NoTopicFeaturesCannotSeparateContrastivePairs) {
  std::vector<std::string> topics{"abortion", "brexit", "fracking", "cannabis", "whaling", "zoos"};
  auto train_set = synthesize_contrastive_set(topics, 120, 1);
  auto test_set = synthesize_contrastive_set(topics, 60, 2);
  BaselineConfig cfg;
  cfg.max_epochs = 5;
  cfg.patience = 5;
  auto m = baseline_train(train_set, train_set, cfg);
  EXPECT_LE(accuracy_on(m, test_set), 0.40);
  // Identical text gives identical features, so every pair member gets the same label.
  for (std::size_t i = 0; i < test_set.size(); i += 3) {
    ASSERT_EQ(m.predict(test_set[i]).distribution, m.predict(test_set[i + 1]).distribution);
  }
}

TEST(Baseline, TopicFeaturesChangeFeatures) {
  BaselineConfig cfg;
  cfg.use_topic_features = true;
  BaselineModel m(cfg);
  Tokens text{"a", "b"};
  EXPECT_NE(m.features(Tokens{"x"}, text), m.features(Tokens{"y"}, text));
  BaselineModel plain(BaselineConfig{});
  EXPECT_EQ(plain.features(Tokens{"x"}, text), plain.features(Tokens{"y"}, text));
}

TEST(Baseline, SaveLoadRoundTrip) {
  SynthConfig sc;
  sc.n_topics = 6;
  auto xs = model_examples(synthesize_corpus(100, 3, sc));
  BaselineConfig cfg;
  cfg.max_epochs = 2;
  cfg.patience = 2;
  cfg.use_topic_features = true;
  auto m = baseline_train(xs, xs, cfg);
  auto path = std::filesystem::temp_directory_path() / "stance_baseline_test.ckpt";
  m.save(path);
  auto loaded = load_classifier(path);
  EXPECT_EQ(loaded->kind(), BaselineModel::kKind);
  for (const auto& x : xs) {
    ASSERT_EQ(loaded->predict(x).distribution, baseline_predict(m, x.topic, x.context.headline, x.context.excerpt).distribution);
  }
  std::filesystem::remove(path);
}

TEST(Baseline, ConfigValidation) {
  BaselineConfig cfg;
  cfg.n_max = 0;
  EXPECT_THROW(BaselineModel{cfg}, std::invalid_argument);
  cfg = {};
  cfg.patience = 60;
  EXPECT_THROW(BaselineModel{cfg}, std::invalid_argument);
}
