#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "stance/corpus.hpp"

namespace stance {

inline constexpr std::string_view kRdfType = "http://www.w3.org/1999/02/22-rdf-syntax-ns#type";
inline constexpr std::string_view kDbpediaResource = "http://dbpedia.org/resource/";
inline constexpr std::string_view kDbpediaPlace = "http://dbpedia.org/ontology/Place";
inline constexpr std::string_view kDbpediaPerson = "http://dbpedia.org/ontology/Person";
inline constexpr std::string_view kDbpediaOrganisation = "http://dbpedia.org/ontology/Organisation";

struct Triple {
  std::string subject;
  std::string predicate;
  /// URI without angle brackets, or a literal in its quoted lexical form
  /// including any `@lang` / `^^<type>` suffix.
  std::string object;
  bool object_is_literal = false;

  friend auto operator<=>(const Triple&, const Triple&) = default;
};

/// Set of triples; duplicates collapse.
class TripleStore {
 public:
  bool insert(Triple t);
  std::size_t size() const noexcept { return triples_.size(); }
  const std::set<Triple>& triples() const noexcept { return triples_; }

  /// Distinct (predicate, object) pairs with `subject` as subject.
  std::size_t out_degree(std::string_view subject) const;
  /// Objects of rdf:type triples about `subject`.
  std::set<std::string> types(std::string_view subject) const;

 private:
  std::set<Triple> triples_;
};

/// `<s> <p> <o> .` or `<s> <p> "literal" .` per line; `#` comments and blank
/// lines are skipped. Throws LineError on malformed lines.
TripleStore parse_triples(std::istream& in);
TripleStore load_triples(const std::filesystem::path& path);

/// http(s)://en.wikipedia.org/wiki/<Title> -> http://dbpedia.org/resource/<Title>.
/// The title is copied byte for byte. Throws std::invalid_argument otherwise.
std::string wiki_url_to_dbpedia_uri(std::string_view url);
/// Inverse of the above on the title component.
std::string dbpedia_title(std::string_view uri);
/// Title with underscores as spaces and percent-escapes decoded.
std::string display_name(std::string_view uri);

enum class TopicSource { popular, controversial, political };
std::string_view to_string(TopicSource s) noexcept;

struct TopicCandidate {
  std::string uri;
  std::string display_name;
  std::set<std::string> types;
  std::size_t out_degree = 0;
  TopicSource source = TopicSource::controversial;

  friend bool operator==(const TopicCandidate&, const TopicCandidate&) = default;
};

TopicCandidate make_candidate(std::string uri, TopicSource source);

/// Fills each candidate's type set from the store's rdf:type triples.
void attach_types(const TripleStore& store, std::span<TopicCandidate> candidates);

enum class FilterMode { keep, drop };

/// keep: candidates whose types intersect `types`; drop: the complement.
std::vector<TopicCandidate> filter_by_type(std::span<const TopicCandidate> candidates,
                                           const std::set<std::string>& types, FilterMode mode);

/// Sets out_degree from the store and sorts descending, ties by URI.
std::vector<TopicCandidate> rank_by_outdegree(const TripleStore& store,
                                              std::span<const TopicCandidate> candidates);

std::vector<TopicCandidate> select_top_k(std::span<const TopicCandidate> ranked,
                                         std::size_t k = 300);

/// Concatenates the three lists; a URI seen earlier wins.
std::vector<TopicCandidate> compose_topic_list(std::span<const TopicCandidate> popular,
                                               std::span<const TopicCandidate> controversial,
                                               std::span<const TopicCandidate> political);

/// Number of articles per calendar month that mention each candidate's
/// display name.
std::map<Month, std::map<std::string, std::size_t>> count_mentions_by_month(
    std::span<const Article> articles, std::span<const TopicCandidate> candidates);

/// Union over months of the `per_month` most-mentioned candidates (ties by
/// URI), minus `excluded` URIs, in first-selected order.
std::vector<TopicCandidate> popular_by_month(std::span<const Article> articles,
                                             std::span<const TopicCandidate> candidates,
                                             std::size_t per_month,
                                             const std::set<std::string>& excluded);

/// Topic list file: one {uri, display_name, source, out_degree} object per line.
void save_topic_list(std::span<const TopicCandidate> topics, std::ostream& out);
std::vector<TopicCandidate> load_topic_list(std::istream& in);

}  // namespace stance
