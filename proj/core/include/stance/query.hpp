#pragma once

#include <cstddef>
#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "stance/corpus.hpp"

namespace stance {

/// Boolean news-search expression over terms and quoted phrases.
///
///   expr := conj ("OR" conj)*
///   conj := leaf ("AND" leaf)*
///   leaf := '"' words '"' | term | "(" expr ")"
///
/// Operators are case-sensitive and left-associative; AND binds tighter.
class Query {
 public:
  enum class Kind { term, phrase, all_of, any_of };

  struct Node {
    Kind kind;
    std::vector<std::string> words;  // one word for a term, >= 1 for a phrase
    std::shared_ptr<const Node> left;
    std::shared_ptr<const Node> right;
  };

  static Query term(std::string word);
  static Query phrase(std::vector<std::string> words);
  static Query both(const Query& lhs, const Query& rhs);
  static Query either(const Query& lhs, const Query& rhs);

  const Node& root() const noexcept { return *root_; }

  friend bool operator==(const Query& a, const Query& b);

 private:
  explicit Query(std::shared_ptr<const Node> root) : root_(std::move(root)) {}
  std::shared_ptr<const Node> root_;
};

class QueryParseError : public std::runtime_error {
 public:
  QueryParseError(std::size_t position, const std::string& message)
      : std::runtime_error(message + " at offset " + std::to_string(position)),
        position_(position),
        message_(message) {}

  std::size_t position() const noexcept { return position_; }
  const std::string& message() const noexcept { return message_; }

 private:
  std::size_t position_;
  std::string message_;
};

/// Throws QueryParseError with the byte offset of the problem.
Query parse_query(std::string_view text);

/// Canonical text form; parse_query(to_string(q)) == q.
std::string to_string(const Query& q);

/// Terms and phrases match contiguous token runs (tokenize() rules, so
/// case-insensitive) within the headline or within the body.
bool match(const Query& query, const Article& article);

/// Query that matches articles mentioning `topic` as a phrase.
Query topic_query(std::string_view topic);

}  // namespace stance
