#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "stance/date.hpp"
#include "stance/labels.hpp"

namespace stance {

struct Article {
  std::string id;
  std::string headline;
  std::string body;
  std::string outlet;  // hostname
  std::string url;
  Date published_at;

  std::vector<std::string> sentences() const;

  friend bool operator==(const Article&, const Article&) = default;
};

/// Splits after `.`, `!` or `?` (plus any trailing closing quotes/brackets)
/// when followed by whitespace and an uppercase letter, or by end of text.
/// A period ending one of Mr. Mrs. Dr. U.S. e.g. i.e. never splits.
std::vector<std::string> split_sentences(std::string_view text);

/// Text up to the first blank line; without one, the first three sentences.
std::string first_paragraph(std::string_view body);

/// Index of the first sentence containing `topic` as a whole-token sequence
/// (case-insensitive).
std::optional<std::size_t> find_mention(std::span<const std::string> sentences,
                                        std::string_view topic);

struct AnnotationContext {
  std::string headline;
  std::string excerpt;
  /// Inclusive sentence indices into the source article; absent for the
  /// first-paragraph fallback.
  std::optional<std::pair<std::size_t, std::size_t>> sentence_range;

  friend bool operator==(const AnnotationContext&, const AnnotationContext&) = default;
};

/// Excerpt of `window` sentences on each side of the first topic mention, or
/// the first paragraph when the topic is not mentioned.
AnnotationContext extract_context_window(const Article& article, std::string_view topic,
                                         std::size_t window = 2);

struct VoteOutcome {
  bool retained = false;
  std::optional<StanceLabel> label;
};

/// Majority rule over exactly three votes.
VoteOutcome aggregate_votes(std::span<const StanceLabel> votes);

struct AnnotatedExample {
  std::string id;
  std::string article_id;
  std::string topic;
  AnnotationContext context;
  std::array<StanceLabel, 3> votes{};
  std::optional<StanceLabel> label;  // set iff retained
  bool retained = false;

  friend bool operator==(const AnnotatedExample&, const AnnotatedExample&) = default;
};

/// Builds an example and resolves its label from the votes.
AnnotatedExample make_example(std::string id, std::string article_id, std::string topic,
                              AnnotationContext context, std::array<StanceLabel, 3> votes);

struct SplitRatios {
  double train = 0.7;
  double validation = 0.2;
  double test = 0.1;
};

struct DatasetSplit {
  std::vector<AnnotatedExample> train;
  std::vector<AnnotatedExample> validation;
  std::vector<AnnotatedExample> test;
  std::uint64_t seed = 0;
  std::vector<std::string> warnings;
};

/// Partitions topics (never examples of one topic) across train/validation/test.
/// Topics are visited by descending example count, equal counts in seeded
/// random order, and each goes to the part furthest below its target size.
DatasetSplit stratified_entity_split(std::span<const AnnotatedExample> examples,
                                     const SplitRatios& ratios, std::uint64_t seed);

// Dataset files: one JSON object per line with fields
// {id, article_id, topic, headline, excerpt, votes, label, retained}.
void save_dataset(std::span<const AnnotatedExample> examples, std::ostream& out);
void save_dataset(std::span<const AnnotatedExample> examples, const std::filesystem::path& path);

/// `label` and `retained` may both be omitted, in which case they are
/// derived from `votes`; when present they must agree with the votes.
std::vector<AnnotatedExample> load_dataset(std::istream& in);
std::vector<AnnotatedExample> load_dataset(const std::filesystem::path& path);

/// Annotation task records: {id, article_id, topic, headline, excerpt}.
struct ContextRecord {
  std::string id;
  std::string article_id;
  std::string topic;
  AnnotationContext context;
};
void save_contexts(std::span<const ContextRecord> records, std::ostream& out);

/// Article corpus: one JSON object per line with fields
/// {id, headline, body, outlet, url, published_at}. Ids must be unique.
std::vector<Article> load_articles(std::istream& in);
std::vector<Article> load_articles(const std::filesystem::path& path);
void save_articles(std::span<const Article> articles, std::ostream& out);

// ---------------------------------------------------------------------------
// Synthetic corpus

struct SynthConfig {
  std::size_t n_topics = 40;
  /// Retained-label shares in favour, against, neutral, unrelated order.
  std::array<double, 4> label_shares{0.1905, 0.219, 0.4767, 0.1138};
  /// Fraction of vote triples with a 2-of-3 majority or better.
  double retention = 0.705;
  /// Among retained triples, fraction that are unanimous.
  double unanimous_rate = 0.5;
  /// Fraction of examples where some other entity in the same text carries a
  /// different stance, so swapping the topic changes the gold label.
  double contrast_rate = 0.5;
};

/// Topic names used by the generator, drawn deterministically from `seed`.
std::vector<std::string> synthetic_topics(std::size_t n_topics, std::uint64_t seed);

/// Each text is three clauses, each expressing a stance toward a different
/// entity. The gold label is the stance of the clause naming the topic, or
/// `unrelated` when the topic is absent. Votes are drawn so that retained
/// labels keep `label_shares` and the retention rate converges to `retention`.
std::vector<AnnotatedExample> synthesize_corpus(std::size_t n, std::uint64_t seed,
                                                const SynthConfig& config = {});

/// `n_texts` texts whose three clauses carry favour, against and neutral
/// stances toward three distinct entities; each text is emitted three times,
/// once per entity as topic. All examples are retained.
std::vector<AnnotatedExample> synthesize_contrastive_set(std::size_t n_texts, std::uint64_t seed,
                                                         const SynthConfig& config = {});

/// As above over an explicit entity list (at least three names).
std::vector<AnnotatedExample> synthesize_contrastive_set(std::span<const std::string> topics,
                                                         std::size_t n_texts, std::uint64_t seed);

}  // namespace stance
