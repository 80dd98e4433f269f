#include <algorithm>
#include <cctype>
#include <cstdio>
#include <random>
#include <stdexcept>

#include "stance/corpus.hpp"

namespace stance {
namespace {

// No two names share a token, so a topic never matches inside another entity.
constexpr const char* kTopicPool[] = {
    "abortion",        "gun control",      "brexit",          "polygamy",
    "nuclear power",   "death penalty",    "immigration",     "euthanasia",
    "fracking",        "vaccination",      "net neutrality",  "free trade",
    "minimum wage",    "school vouchers",  "mass surveillance", "cannabis",
    "whaling",         "animal testing",   "gene editing",    "rent caps",
    "basic income",    "space tourism",    "coal mining",     "wind farms",
    "border wall",     "carbon tax",       "affirmative action", "zoos",
    "monarchy",        "nationalism",      "globalization",   "tariffs",
    "privatization",   "drone strikes",    "stem cells",      "homeschooling",
    "conscription",    "bullfighting",     "russia",          "arsenal",
    "ireland",         "ted cruz",         "xi jinping",      "fossil fuels",
    "offshore drilling", "electoral college", "daylight saving", "tuition fees",
    "organ donation",  "foie gras",        "sharia law",      "plastic bags",
    "gmo crops",       "lottery",          "casinos",         "circumcision",
    "cloning",         "asylum seekers",   "inheritance duty", "sugar levy",
    "pipelines",       "hunting",          "surrogacy",       "bitcoin",
};

constexpr const char* kSubjects[] = {"officials", "critics",   "campaigners", "analysts",
                                     "voters",    "lawmakers", "residents",   "the minister",
                                     "the editorial", "local groups"};
constexpr const char* kPositive[] = {"praised", "backed", "welcomed", "endorsed", "defended",
                                     "championed"};
constexpr const char* kNegative[] = {"condemned", "opposed",    "rejected",
                                     "attacked",  "criticized", "denounced"};
constexpr const char* kNeutral[] = {"discussed", "mentioned", "reviewed",
                                    "described", "examined",  "noted"};
constexpr const char* kTails[] = {"", "", "this week", "in a statement", "on monday",
                                  "at the hearing"};
constexpr const char* kHeadlines[] = {"Weekly policy roundup", "Debate continues",
                                      "Reactions pour in", "What we learned this week",
                                      "Voices from the hearing", "The view from the capital"};

template <class T, std::size_t N>
const T& pick(const T (&arr)[N], std::mt19937_64& rng) {
  return arr[std::uniform_int_distribution<std::size_t>(0, N - 1)(rng)];
}

std::string clause(const std::string& entity, StanceLabel polarity, std::mt19937_64& rng) {
  std::string s = pick(kSubjects, rng);
  s[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(s[0])));
  s += ' ';
  switch (polarity) {
    case StanceLabel::favour: s += pick(kPositive, rng); break;
    case StanceLabel::against: s += pick(kNegative, rng); break;
    default: s += pick(kNeutral, rng); break;
  }
  s += ' ';
  s += entity;
  std::string tail = pick(kTails, rng);
  if (!tail.empty()) s += ' ' + tail;
  s += '.';
  return s;
}

StanceLabel random_polarity(std::mt19937_64& rng) {
  return kModelLabels[std::uniform_int_distribution<std::size_t>(0, 2)(rng)];
}

StanceLabel other_polarity(StanceLabel p, std::mt19937_64& rng) {
  std::size_t skip = class_index(p);
  std::size_t k = std::uniform_int_distribution<std::size_t>(0, 1)(rng);
  return kModelLabels[k >= skip ? k + 1 : k];
}

/// `count` distinct pool indices, none equal to `exclude`.
std::vector<std::size_t> distinct(std::size_t pool, std::size_t count, std::size_t exclude,
                                  std::mt19937_64& rng) {
  std::vector<std::size_t> out;
  std::uniform_int_distribution<std::size_t> dist(0, pool - 1);
  while (out.size() < count) {
    auto k = dist(rng);
    if (k != exclude && std::find(out.begin(), out.end(), k) == out.end()) out.push_back(k);
  }
  return out;
}

std::string make_id(const char* prefix, std::size_t i) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%s%06zu", prefix, i);
  return buf;
}

std::array<StanceLabel, 3> draw_votes(StanceLabel gold, const SynthConfig& cfg,
                                      std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::array<StanceLabel, 3> votes{gold, gold, gold};
  if (unit(rng) >= cfg.retention) {
    std::vector<StanceLabel> others;
    for (auto l : kAllLabels) {
      if (l != gold) others.push_back(l);
    }
    std::shuffle(others.begin(), others.end(), rng);
    votes = {gold, others[0], others[1]};
  } else if (unit(rng) >= cfg.unanimous_rate) {
    auto k = std::uniform_int_distribution<std::size_t>(0, 2)(rng);
    auto l = kAllLabels[k >= static_cast<std::size_t>(gold) ? k + 1 : k];
    votes = {gold, gold, l};
  }
  std::shuffle(votes.begin(), votes.end(), rng);
  return votes;
}

void check_config(const SynthConfig& cfg) {
  if (cfg.n_topics < 4) throw std::invalid_argument("synthetic corpus needs at least 4 topics");
  double total = 0;
  for (double s : cfg.label_shares) {
    if (!(s >= 0)) throw std::invalid_argument("label shares must be non-negative");
    total += s;
  }
  if (!(total > 0)) throw std::invalid_argument("label shares must not all be zero");
  for (double r : {cfg.retention, cfg.unanimous_rate, cfg.contrast_rate}) {
    if (!(r >= 0 && r <= 1)) throw std::invalid_argument("synthetic rates must lie in [0,1]");
  }
}

}  // namespace

std::vector<std::string> synthetic_topics(std::size_t n_topics, std::uint64_t seed) {
  std::vector<std::string> pool(std::begin(kTopicPool), std::end(kTopicPool));
  std::mt19937_64 rng(seed ^ 0x7f4a7c159e3779b9ULL);
  std::shuffle(pool.begin(), pool.end(), rng);
  for (std::size_t k = pool.size(); k < n_topics; ++k) pool.push_back("entity" + std::to_string(k));
  pool.resize(n_topics);
  return pool;
}

std::vector<AnnotatedExample> synthesize_corpus(std::size_t n, std::uint64_t seed,
                                                const SynthConfig& cfg) {
  if (n == 0) throw std::invalid_argument("synthesize_corpus: n must be >= 1");
  check_config(cfg);
  const auto topics = synthetic_topics(cfg.n_topics, seed);
  std::mt19937_64 rng(seed);
  std::discrete_distribution<std::size_t> label_dist(cfg.label_shares.begin(),
                                                     cfg.label_shares.end());
  std::uniform_int_distribution<std::size_t> topic_dist(0, topics.size() - 1);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  std::vector<AnnotatedExample> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const StanceLabel gold = kAllLabels[label_dist(rng)];
    const std::size_t topic = topic_dist(rng);

    std::array<std::size_t, 3> entity{};
    std::array<StanceLabel, 3> polarity{};
    if (gold == StanceLabel::unrelated) {
      auto d = distinct(topics.size(), 3, topic, rng);
      for (std::size_t k = 0; k < 3; ++k) {
        entity[k] = d[k];
        polarity[k] = random_polarity(rng);
      }
    } else {
      auto d = distinct(topics.size(), 2, topic, rng);
      std::size_t slot = std::uniform_int_distribution<std::size_t>(0, 2)(rng);
      entity[slot] = topic;
      polarity[slot] = gold;
      std::size_t filled = 0;
      const bool contrast = unit(rng) < cfg.contrast_rate;
      for (std::size_t k = 0; k < 3; ++k) {
        if (k == slot) continue;
        entity[k] = d[filled];
        if (contrast) {
          polarity[k] = filled == 0 ? other_polarity(gold, rng) : random_polarity(rng);
        } else {
          polarity[k] = gold;
        }
        ++filled;
      }
    }

    std::string text;
    for (std::size_t k = 0; k < 3; ++k) {
      if (k) text += ' ';
      text += clause(topics[entity[k]], polarity[k], rng);
    }
    AnnotationContext ctx{pick(kHeadlines, rng), std::move(text), std::nullopt};
    auto votes = draw_votes(gold, cfg, rng);
    out.push_back(make_example(make_id("syn-", i), make_id("syn-article-", i), topics[topic],
                               std::move(ctx), votes));
  }
  return out;
}

std::vector<AnnotatedExample> synthesize_contrastive_set(std::span<const std::string> topics,
                                                         std::size_t n_texts,
                                                         std::uint64_t seed) {
  if (n_texts == 0) throw std::invalid_argument("synthesize_contrastive_set: n_texts must be >= 1");
  if (topics.size() < 3) throw std::invalid_argument("contrastive set needs at least 3 topics");
  std::mt19937_64 rng(seed ^ 0x5bd1e995ULL);
  std::vector<AnnotatedExample> out;
  out.reserve(3 * n_texts);
  for (std::size_t i = 0; i < n_texts; ++i) {
    auto first = std::uniform_int_distribution<std::size_t>(0, topics.size() - 1)(rng);
    auto rest = distinct(topics.size(), 2, first, rng);
    std::array<std::size_t, 3> entity{first, rest[0], rest[1]};
    std::array<StanceLabel, 3> polarity = kModelLabels;
    std::shuffle(polarity.begin(), polarity.end(), rng);

    std::string text;
    for (std::size_t k = 0; k < 3; ++k) {
      if (k) text += ' ';
      text += clause(topics[entity[k]], polarity[k], rng);
    }
    std::string headline = pick(kHeadlines, rng);
    for (std::size_t k = 0; k < 3; ++k) {
      AnnotationContext ctx{headline, text, std::nullopt};
      out.push_back(make_example(make_id("pair-", 3 * i + k), make_id("pair-article-", i),
                                 topics[entity[k]], std::move(ctx),
                                 {polarity[k], polarity[k], polarity[k]}));
    }
  }
  return out;
}

std::vector<AnnotatedExample> synthesize_contrastive_set(std::size_t n_texts, std::uint64_t seed,
                                                         const SynthConfig& cfg) {
  check_config(cfg);
  const auto topics = synthetic_topics(cfg.n_topics, seed);
  return synthesize_contrastive_set(topics, n_texts, seed);
}

}  // namespace stance
