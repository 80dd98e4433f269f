#include "stance/topics.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <unordered_set>

#include "json.hpp"
#include "stance/error.hpp"

namespace stance {

bool TripleStore::insert(Triple t) { return triples_.insert(std::move(t)).second; }

std::size_t TripleStore::out_degree(std::string_view subject) const {
  // Triples are ordered by subject first, and (predicate, object, kind) is
  // unique within a subject because the store is a set.
  Triple probe{std::string(subject), {}, {}, false};
  std::size_t n = 0;
  for (auto it = triples_.lower_bound(probe); it != triples_.end() && it->subject == subject; ++it) {
    ++n;
  }
  return n;
}

std::set<std::string> TripleStore::types(std::string_view subject) const {
  std::set<std::string> out;
  Triple probe{std::string(subject), std::string(kRdfType), {}, false};
  for (auto it = triples_.lower_bound(probe);
       it != triples_.end() && it->subject == subject && it->predicate == kRdfType; ++it) {
    if (!it->object_is_literal) out.insert(it->object);
  }
  return out;
}

namespace {

bool is_ws(char c) { return c == ' ' || c == '\t' || c == '\r'; }

bool is_absolute_uri(std::string_view s) {
  auto colon = s.find(':');
  if (colon == std::string_view::npos || colon == 0 || colon + 1 == s.size()) return false;
  if (!std::isalpha(static_cast<unsigned char>(s[0]))) return false;
  for (std::size_t i = 1; i < colon; ++i) {
    char c = s[i];
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '+' && c != '-' && c != '.') return false;
  }
  for (char c : s) {
    if (c == ' ' || c == '<' || c == '>' || c == '"') return false;
  }
  return true;
}

class LineParser {
 public:
  LineParser(std::string_view line, std::size_t line_no) : s_(line), line_(line_no) {}

  Triple parse() {
    Triple t;
    t.subject = uri("subject");
    t.predicate = uri("predicate");
    skip_ws();
    if (peek() == '<') {
      t.object = uri("object");
    } else if (peek() == '"') {
      t.object = literal();
      t.object_is_literal = true;
    } else {
      fail("object must be <uri> or \"literal\"");
    }
    skip_ws();
    if (peek() != '.') fail("missing terminal '.'");
    ++pos_;
    skip_ws();
    if (pos_ < s_.size() && s_[pos_] != '#') fail("unexpected text after '.'");
    return t;
  }

 private:
  char peek() const { return pos_ < s_.size() ? s_[pos_] : '\0'; }
  void skip_ws() {
    while (pos_ < s_.size() && is_ws(s_[pos_])) ++pos_;
  }
  [[noreturn]] void fail(const std::string& msg) const { throw LineError(line_, msg); }

  std::string uri(const char* role) {
    skip_ws();
    if (peek() != '<') fail(std::string(role) + " must be an <uri>");
    auto close = s_.find('>', pos_ + 1);
    if (close == std::string_view::npos) fail(std::string("unterminated ") + role + " uri");
    std::string value(s_.substr(pos_ + 1, close - pos_ - 1));
    if (!is_absolute_uri(value)) fail(std::string(role) + " '" + value + "' is not an absolute uri");
    pos_ = close + 1;
    return value;
  }

  std::string literal() {
    std::size_t start = pos_;
    ++pos_;
    bool closed = false;
    while (pos_ < s_.size()) {
      char c = s_[pos_++];
      if (c == '\\') {
        if (pos_ >= s_.size()) break;
        ++pos_;
      } else if (c == '"') {
        closed = true;
        break;
      }
    }
    if (!closed) fail("unterminated literal");
    if (peek() == '@') {
      ++pos_;
      while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '-')) ++pos_;
    } else if (s_.substr(pos_, 2) == "^^") {
      pos_ += 2;
      uri("datatype");
    }
    return std::string(s_.substr(start, pos_ - start));
  }

  std::string_view s_;
  std::size_t line_;
  std::size_t pos_ = 0;
};

}  // namespace

TripleStore parse_triples(std::istream& in) {
  TripleStore store;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view v = line;
    while (!v.empty() && (is_ws(v.front()) || v.front() == '\n')) v.remove_prefix(1);
    while (!v.empty() && (is_ws(v.back()) || v.back() == '\n')) v.remove_suffix(1);
    if (v.empty() || v.front() == '#') continue;
    store.insert(LineParser(v, line_no).parse());
  }
  return store;
}

TripleStore load_triples(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open triples file " + path.string());
  try {
    return parse_triples(in);
  } catch (const LineError& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

std::string wiki_url_to_dbpedia_uri(std::string_view url) {
  constexpr std::string_view kPrefixes[] = {"http://en.wikipedia.org/wiki/",
                                            "https://en.wikipedia.org/wiki/"};
  for (auto prefix : kPrefixes) {
    if (url.substr(0, prefix.size()) != prefix) continue;
    auto title = url.substr(prefix.size());
    title = title.substr(0, title.find_first_of("?#"));
    if (title.empty()) throw std::invalid_argument("wikipedia url has no title: " + std::string(url));
    return std::string(kDbpediaResource) + std::string(title);
  }
  throw std::invalid_argument("not an en.wikipedia.org /wiki/ url: " + std::string(url));
}

std::string dbpedia_title(std::string_view uri) {
  if (uri.substr(0, kDbpediaResource.size()) != kDbpediaResource) {
    throw std::invalid_argument("not a dbpedia resource uri: " + std::string(uri));
  }
  return std::string(uri.substr(kDbpediaResource.size()));
}

std::string display_name(std::string_view uri) {
  auto slash = uri.find_last_of("/#");
  std::string_view title = slash == std::string_view::npos ? uri : uri.substr(slash + 1);
  if (uri.substr(0, kDbpediaResource.size()) == kDbpediaResource) {
    title = uri.substr(kDbpediaResource.size());
  }
  auto hex = [](char c) -> int {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    return -1;
  };
  std::string out;
  for (std::size_t i = 0; i < title.size(); ++i) {
    char c = title[i];
    if (c == '_') {
      out += ' ';
    } else if (c == '%' && i + 2 < title.size() && hex(title[i + 1]) >= 0 && hex(title[i + 2]) >= 0) {
      out += static_cast<char>(hex(title[i + 1]) * 16 + hex(title[i + 2]));
      i += 2;
    } else {
      out += c;
    }
  }
  return out;
}

std::string_view to_string(TopicSource s) noexcept {
  switch (s) {
    case TopicSource::popular: return "popular";
    case TopicSource::controversial: return "controversial";
    case TopicSource::political: return "political";
  }
  return "unknown";
}

TopicCandidate make_candidate(std::string uri, TopicSource source) {
  TopicCandidate c;
  c.display_name = display_name(uri);
  c.uri = std::move(uri);
  c.source = source;
  return c;
}

void attach_types(const TripleStore& store, std::span<TopicCandidate> candidates) {
  for (auto& c : candidates) c.types = store.types(c.uri);
}

std::vector<TopicCandidate> filter_by_type(std::span<const TopicCandidate> candidates,
                                           const std::set<std::string>& types, FilterMode mode) {
  std::vector<TopicCandidate> out;
  for (const auto& c : candidates) {
    bool hit = std::any_of(c.types.begin(), c.types.end(),
                           [&](const std::string& t) { return types.count(t) != 0; });
    if (hit == (mode == FilterMode::keep)) out.push_back(c);
  }
  return out;
}

std::vector<TopicCandidate> rank_by_outdegree(const TripleStore& store,
                                              std::span<const TopicCandidate> candidates) {
  std::vector<TopicCandidate> out(candidates.begin(), candidates.end());
  for (auto& c : out) c.out_degree = store.out_degree(c.uri);
  std::sort(out.begin(), out.end(), [](const TopicCandidate& a, const TopicCandidate& b) {
    if (a.out_degree != b.out_degree) return a.out_degree > b.out_degree;
    return a.uri < b.uri;
  });
  return out;
}

std::vector<TopicCandidate> select_top_k(std::span<const TopicCandidate> ranked, std::size_t k) {
  if (k == 0) throw std::invalid_argument("select_top_k: k must be positive");
  auto n = std::min(k, ranked.size());
  return {ranked.begin(), ranked.begin() + static_cast<std::ptrdiff_t>(n)};
}

std::vector<TopicCandidate> compose_topic_list(std::span<const TopicCandidate> popular,
                                               std::span<const TopicCandidate> controversial,
                                               std::span<const TopicCandidate> political) {
  std::vector<TopicCandidate> out;
  std::unordered_set<std::string> seen;
  for (auto list : {popular, controversial, political}) {
    for (const auto& c : list) {
      if (seen.insert(c.uri).second) out.push_back(c);
    }
  }
  return out;
}

std::map<Month, std::map<std::string, std::size_t>> count_mentions_by_month(
    std::span<const Article> articles, std::span<const TopicCandidate> candidates) {
  std::map<Month, std::map<std::string, std::size_t>> counts;
  for (const auto& a : articles) {
    auto sentences = a.sentences();
    sentences.push_back(a.headline);
    Month month = a.published_at.year() / a.published_at.month();
    for (const auto& c : candidates) {
      if (find_mention(sentences, c.display_name)) ++counts[month][c.uri];
    }
  }
  return counts;
}

std::vector<TopicCandidate> popular_by_month(std::span<const Article> articles,
                                             std::span<const TopicCandidate> candidates,
                                             std::size_t per_month,
                                             const std::set<std::string>& excluded) {
  std::map<std::string, const TopicCandidate*> by_uri;
  for (const auto& c : candidates) by_uri.emplace(c.uri, &c);
  std::vector<TopicCandidate> out;
  std::unordered_set<std::string> chosen;
  for (const auto& [month, counts] : count_mentions_by_month(articles, candidates)) {
    std::vector<std::pair<std::string, std::size_t>> ranked(counts.begin(), counts.end());
    std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
      if (a.second != b.second) return a.second > b.second;
      return a.first < b.first;
    });
    std::size_t taken = 0;
    for (const auto& [uri, n] : ranked) {
      if (taken == per_month) break;
      if (excluded.count(uri)) continue;
      ++taken;
      if (chosen.insert(uri).second) {
        TopicCandidate c = *by_uri.at(uri);
        c.source = TopicSource::popular;
        out.push_back(std::move(c));
      }
    }
  }
  return out;
}

void save_topic_list(std::span<const TopicCandidate> topics, std::ostream& out) {
  for (const auto& t : topics) {
    nlohmann::json obj;
    obj["uri"] = t.uri;
    obj["display_name"] = t.display_name;
    obj["source"] = std::string(to_string(t.source));
    obj["out_degree"] = t.out_degree;
    out << obj.dump() << '\n';
  }
}

std::vector<TopicCandidate> load_topic_list(std::istream& in) {
  std::vector<TopicCandidate> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      auto obj = nlohmann::json::parse(line);
      TopicCandidate c;
      c.uri = obj.at("uri").get<std::string>();
      c.display_name = obj.at("display_name").get<std::string>();
      auto src = obj.at("source").get<std::string>();
      if (src == "popular") c.source = TopicSource::popular;
      else if (src == "controversial") c.source = TopicSource::controversial;
      else if (src == "political") c.source = TopicSource::political;
      else throw LineError(line_no, "unknown topic source '" + src + "'");
      c.out_degree = obj.at("out_degree").get<std::size_t>();
      out.push_back(std::move(c));
    } catch (const nlohmann::json::exception& e) {
      throw LineError(line_no, e.what());
    }
  }
  return out;
}

}  // namespace stance
