#include "stance/query.hpp"

#include <algorithm>
#include <optional>

#include "stance/text.hpp"

namespace stance {

Query Query::term(std::string word) {
  if (word.empty()) throw std::invalid_argument("query term must not be empty");
  return Query(std::make_shared<const Node>(Node{Kind::term, {std::move(word)}, nullptr, nullptr}));
}

Query Query::phrase(std::vector<std::string> words) {
  if (words.empty()) throw std::invalid_argument("query phrase must not be empty");
  return Query(std::make_shared<const Node>(Node{Kind::phrase, std::move(words), nullptr, nullptr}));
}

Query Query::both(const Query& lhs, const Query& rhs) {
  return Query(std::make_shared<const Node>(Node{Kind::all_of, {}, lhs.root_, rhs.root_}));
}

Query Query::either(const Query& lhs, const Query& rhs) {
  return Query(std::make_shared<const Node>(Node{Kind::any_of, {}, lhs.root_, rhs.root_}));
}

namespace {

bool same(const Query::Node& a, const Query::Node& b) {
  if (a.kind != b.kind || a.words != b.words) return false;
  if (a.kind == Query::Kind::term || a.kind == Query::Kind::phrase) return true;
  return same(*a.left, *b.left) && same(*a.right, *b.right);
}

}  // namespace

bool operator==(const Query& a, const Query& b) { return same(*a.root_, *b.root_); }

namespace {

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r'; }

struct Lexeme {
  enum class Type { word, phrase, and_op, or_op, lparen, rparen, end } type;
  std::size_t pos;
  std::vector<std::string> words;
};

std::vector<Lexeme> lex(std::string_view s) {
  std::vector<Lexeme> out;
  std::size_t i = 0;
  while (true) {
    while (i < s.size() && is_space(s[i])) ++i;
    if (i == s.size()) break;
    const std::size_t start = i;
    const char c = s[i];
    if (c == '(') {
      out.push_back({Lexeme::Type::lparen, start, {}});
      ++i;
    } else if (c == ')') {
      out.push_back({Lexeme::Type::rparen, start, {}});
      ++i;
    } else if (c == '"') {
      auto close = s.find('"', i + 1);
      if (close == std::string_view::npos) throw QueryParseError(start, "unclosed quote");
      std::vector<std::string> words;
      std::size_t j = i + 1;
      while (j < close) {
        while (j < close && is_space(s[j])) ++j;
        std::size_t k = j;
        while (k < close && !is_space(s[k])) ++k;
        if (k > j) words.emplace_back(s.substr(j, k - j));
        j = k;
      }
      if (words.empty()) throw QueryParseError(start, "empty phrase");
      out.push_back({Lexeme::Type::phrase, start, std::move(words)});
      i = close + 1;
    } else {
      while (i < s.size() && !is_space(s[i]) && s[i] != '(' && s[i] != ')' && s[i] != '"') ++i;
      std::string word(s.substr(start, i - start));
      if (word == "AND") {
        out.push_back({Lexeme::Type::and_op, start, {}});
      } else if (word == "OR") {
        out.push_back({Lexeme::Type::or_op, start, {}});
      } else {
        out.push_back({Lexeme::Type::word, start, {std::move(word)}});
      }
    }
  }
  out.push_back({Lexeme::Type::end, s.size(), {}});
  return out;
}

class Parser {
 public:
  explicit Parser(std::vector<Lexeme> lexemes) : lx_(std::move(lexemes)) {}

  Query parse() {
    if (lx_.front().type == Lexeme::Type::end) throw QueryParseError(0, "empty query");
    Query q = expr();
    const auto& next = lx_[pos_];
    if (next.type == Lexeme::Type::rparen) throw QueryParseError(next.pos, "unbalanced ')'");
    if (next.type != Lexeme::Type::end) throw QueryParseError(next.pos, "expected AND or OR");
    return q;
  }

 private:
  Query expr() {
    Query q = conj();
    while (lx_[pos_].type == Lexeme::Type::or_op) {
      ++pos_;
      q = Query::either(q, conj());
    }
    return q;
  }

  Query conj() {
    Query q = leaf();
    while (lx_[pos_].type == Lexeme::Type::and_op) {
      ++pos_;
      q = Query::both(q, leaf());
    }
    return q;
  }

  Query leaf() {
    const auto& t = lx_[pos_];
    switch (t.type) {
      case Lexeme::Type::word:
        ++pos_;
        return Query::term(t.words.front());
      case Lexeme::Type::phrase:
        ++pos_;
        return Query::phrase(t.words);
      case Lexeme::Type::lparen: {
        ++pos_;
        Query q = expr();
        if (lx_[pos_].type != Lexeme::Type::rparen) {
          if (lx_[pos_].type == Lexeme::Type::end) throw QueryParseError(t.pos, "unbalanced '('");
          throw QueryParseError(lx_[pos_].pos, "expected ')'");
        }
        ++pos_;
        return q;
      }
      case Lexeme::Type::and_op:
      case Lexeme::Type::or_op:
        throw QueryParseError(t.pos, pos_ == 0 ? "query starts with an operator"
                                               : "operator where a term was expected");
      case Lexeme::Type::rparen:
        throw QueryParseError(t.pos, pos_ > 0 && lx_[pos_ - 1].type == Lexeme::Type::lparen
                                         ? "empty parentheses"
                                         : "unexpected ')'");
      case Lexeme::Type::end:
        break;
    }
    // Only reachable after an operator or '('.
    std::size_t op = pos_ > 0 ? lx_[pos_ - 1].pos : 0;
    throw QueryParseError(op, "dangling operator");
  }

  std::vector<Lexeme> lx_;
  std::size_t pos_ = 0;
};

int precedence(Query::Kind k) {
  switch (k) {
    case Query::Kind::any_of: return 1;
    case Query::Kind::all_of: return 2;
    default: return 3;
  }
}

void print(const Query::Node& n, std::string& out) {
  switch (n.kind) {
    case Query::Kind::term:
      out += n.words.front();
      return;
    case Query::Kind::phrase:
      out += '"';
      for (std::size_t i = 0; i < n.words.size(); ++i) {
        if (i) out += ' ';
        out += n.words[i];
      }
      out += '"';
      return;
    default:
      break;
  }
  const int p = precedence(n.kind);
  auto side = [&](const Query::Node& child, bool right) {
    const int cp = precedence(child.kind);
    const bool wrap = right ? cp <= p : cp < p;
    if (wrap) out += '(';
    print(child, out);
    if (wrap) out += ')';
  };
  side(*n.left, false);
  out += n.kind == Query::Kind::all_of ? " AND " : " OR ";
  side(*n.right, true);
}

struct ArticleTokens {
  Tokens headline;
  Tokens body;
};

bool contains_run(const Tokens& hay, const Tokens& needle) {
  return !needle.empty() &&
         std::search(hay.begin(), hay.end(), needle.begin(), needle.end()) != hay.end();
}

bool eval(const Query::Node& n, const ArticleTokens& doc) {
  switch (n.kind) {
    case Query::Kind::term:
    case Query::Kind::phrase: {
      Tokens needle;
      for (const auto& w : n.words) {
        auto t = tokenize(w);
        needle.insert(needle.end(), t.begin(), t.end());
      }
      return contains_run(doc.headline, needle) || contains_run(doc.body, needle);
    }
    case Query::Kind::all_of:
      return eval(*n.left, doc) && eval(*n.right, doc);
    case Query::Kind::any_of:
      return eval(*n.left, doc) || eval(*n.right, doc);
  }
  return false;
}

}  // namespace

Query parse_query(std::string_view text) { return Parser(lex(text)).parse(); }

std::string to_string(const Query& q) {
  std::string out;
  print(q.root(), out);
  return out;
}

bool match(const Query& query, const Article& article) {
  ArticleTokens doc{tokenize(article.headline), tokenize(article.body)};
  return eval(query.root(), doc);
}

Query topic_query(std::string_view topic) {
  std::vector<std::string> words;
  std::size_t i = 0;
  while (i < topic.size()) {
    while (i < topic.size() && is_space(topic[i])) ++i;
    std::size_t j = i;
    while (j < topic.size() && !is_space(topic[j])) ++j;
    if (j > i) words.emplace_back(topic.substr(i, j - i));
    i = j;
  }
  return Query::phrase(std::move(words));
}

}  // namespace stance
