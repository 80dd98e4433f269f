#include <gtest/gtest.h>

#include <algorithm>
#include <map>
#include <set>
#include <sstream>

#include "stance/corpus.hpp"

using namespace stance;

namespace {

std::string serialize(const std::vector<AnnotatedExample>& xs) {
  std::ostringstream out;
  save_dataset(xs, out);
  return out.str();
}

bool mentions(const std::string& text, const std::string& topic) {
  auto sentences = split_sentences(text);
  return find_mention(sentences, topic).has_value();
}

}  // namespace

TEST(SynthCorpus, SingleExample) {
  auto xs = synthesize_corpus(1, 1);
  ASSERT_EQ(xs.size(), 1u);
  EXPECT_FALSE(xs[0].context.excerpt.empty());
}

TEST(SynthCorpus, ZeroIsRejected) {
  EXPECT_THROW(synthesize_corpus(0, 1), std::invalid_argument);
  SynthConfig bad;
  bad.retention = 1.5;
  EXPECT_THROW(synthesize_corpus(5, 1, bad), std::invalid_argument);
  bad = {};
  bad.n_topics = 3;
  EXPECT_THROW(synthesize_corpus(5, 1, bad), std::invalid_argument);
}

TEST(SynthCorpus, DeterministicGivenSeed) {
  EXPECT_EQ(serialize(synthesize_corpus(300, 9)), serialize(synthesize_corpus(300, 9)));
  EXPECT_NE(serialize(synthesize_corpus(300, 9)), serialize(synthesize_corpus(300, 10)));
}

TEST(SynthCorpus, LabelSharesAndRetentionAtTenThousand) {
  auto xs = synthesize_corpus(10000, 1);
  std::map<StanceLabel, double> count;
  double retained = 0;
  for (const auto& x : xs) {
    if (!x.retained) continue;
    ++retained;
    ++count[*x.label];
  }
  EXPECT_NEAR(retained / xs.size(), 0.705, 0.02);
  EXPECT_NEAR(count[StanceLabel::neutral] / retained, 0.4767, 0.02);
  EXPECT_NEAR(count[StanceLabel::against] / retained, 0.219, 0.02);
  EXPECT_NEAR(count[StanceLabel::favour] / retained, 0.1905, 0.02);
  EXPECT_NEAR(count[StanceLabel::unrelated] / retained, 0.1138, 0.02);
}

TEST(SynthCorpus, RetentionFollowsConfiguredTarget) {
  for (double target : {0.3, 0.705, 0.95}) {
    SynthConfig cfg;
    cfg.retention = target;
    auto xs = synthesize_corpus(20000, 3, cfg);
    double retained = 0;
    for (const auto& x : xs) {
      auto outcome = aggregate_votes(x.votes);
      ASSERT_EQ(outcome.retained, x.retained);
      ASSERT_EQ(outcome.label, x.label);
      retained += outcome.retained;
    }
    EXPECT_NEAR(retained / xs.size(), target, 0.02) << "target " << target;
  }
}

TEST(SynthCorpus, TopicIsMentionedUnlessUnrelated) {
  auto xs = synthesize_corpus(2000, 4);
  for (const auto& x : xs) {
    if (!x.retained) continue;
    const bool mentioned = mentions(x.context.excerpt, x.topic);
    if (*x.label == StanceLabel::unrelated) {
      ASSERT_FALSE(mentioned) << x.id;
    } else {
      ASSERT_TRUE(mentioned) << x.id;
    }
    ASSERT_EQ(split_sentences(x.context.excerpt).size(), 3u) << x.id;
  }
}

TEST(SynthCorpus, ContrastRateControlsTopicDependence) {
  // With contrast on, another entity in the same text carries a different
  // stance; with it off, every clause shares the gold polarity.
  auto polarity_words = [](const std::string& clause) {
    for (const char* w : {"praised", "backed", "welcomed", "endorsed", "defended", "championed"})
      if (clause.find(w) != std::string::npos) return 0;
    for (const char* w : {"condemned", "opposed", "rejected", "attacked", "criticized", "denounced"})
      if (clause.find(w) != std::string::npos) return 1;
    return 2;
  };
  for (double rate : {0.0, 1.0}) {
    SynthConfig cfg;
    cfg.contrast_rate = rate;
    auto xs = synthesize_corpus(600, 6, cfg);
    int mixed = 0, related = 0;
    for (const auto& x : xs) {
      if (!x.label || *x.label == StanceLabel::unrelated) continue;
      ++related;
      std::set<int> kinds;
      for (const auto& s : split_sentences(x.context.excerpt)) kinds.insert(polarity_words(s));
      mixed += kinds.size() > 1;
    }
    ASSERT_GT(related, 0);
    if (rate == 0.0) {
      EXPECT_EQ(mixed, 0);
    } else {
      EXPECT_EQ(mixed, related);
    }
  }
}

TEST(SynthTopics, DeterministicAndDistinct) {
  auto a = synthetic_topics(40, 2);
  EXPECT_EQ(a, synthetic_topics(40, 2));
  EXPECT_EQ(std::set<std::string>(a.begin(), a.end()).size(), 40u);
  auto big = synthetic_topics(500, 2);
  EXPECT_EQ(std::set<std::string>(big.begin(), big.end()).size(), 500u);
}

TEST(ContrastiveSet, SameTextDifferentTopicsDifferentLabels) {
  auto xs = synthesize_contrastive_set(50, 3);
  ASSERT_EQ(xs.size(), 150u);
  for (std::size_t i = 0; i < xs.size(); i += 3) {
    std::set<StanceLabel> labels;
    std::set<std::string> topics;
    for (std::size_t k = 0; k < 3; ++k) {
      const auto& x = xs[i + k];
      ASSERT_TRUE(x.retained);
      ASSERT_EQ(x.context.excerpt, xs[i].context.excerpt);
      ASSERT_TRUE(mentions(x.context.excerpt, x.topic));
      labels.insert(*x.label);
      topics.insert(x.topic);
    }
    ASSERT_EQ(labels.size(), 3u);
    ASSERT_EQ(topics.size(), 3u);
  }
}

TEST(ContrastiveSet, ExplicitEntities) {
  std::vector<std::string> topics{"ireland", "brexit", "gun control", "abortion"};
  auto xs = synthesize_contrastive_set(topics, 10, 1);
  for (const auto& x : xs) {
    ASSERT_NE(std::find(topics.begin(), topics.end(), x.topic), topics.end());
  }
  std::vector<std::string> two{"a", "b"};
  EXPECT_THROW(synthesize_contrastive_set(two, 10, 1), std::invalid_argument);
  EXPECT_THROW(synthesize_contrastive_set(topics, 0, 1), std::invalid_argument);
}
