#include "stance/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <numeric>
#include <ostream>
#include <random>
#include <set>
#include <stdexcept>

#include "json.hpp"
#include "stance/error.hpp"
#include "stance/text.hpp"

namespace stance {
namespace {

using nlohmann::json;

bool is_ws(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v'; }
bool is_terminal(char c) { return c == '.' || c == '!' || c == '?'; }
bool is_closer(char c) { return c == '"' || c == '\'' || c == ')' || c == ']'; }
bool is_upper(char c) { return c >= 'A' && c <= 'Z'; }

std::string_view trim(std::string_view s) {
  while (!s.empty() && is_ws(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_ws(s.back())) s.remove_suffix(1);
  return s;
}

bool is_abbreviation(std::string_view text, std::size_t period) {
  static constexpr std::string_view kAbbrev[] = {"mr.", "mrs.", "dr.", "u.s.", "e.g.", "i.e."};
  std::size_t start = period;
  while (start > 0 && !is_ws(text[start - 1]) && text[start - 1] != '(' && text[start - 1] != '"') {
    --start;
  }
  std::string word(text.substr(start, period - start + 1));
  for (auto& c : word) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return std::find(std::begin(kAbbrev), std::end(kAbbrev), word) != std::end(kAbbrev);
}

std::string join(std::span<const std::string> parts, std::string_view sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out += sep;
    out += parts[i];
  }
  return out;
}

}  // namespace

std::vector<std::string> split_sentences(std::string_view text) {
  std::vector<std::string> out;
  std::size_t start = 0;
  const std::size_t n = text.size();
  auto emit = [&](std::size_t end) {
    auto s = trim(text.substr(start, end - start));
    if (!s.empty()) out.emplace_back(s);
  };
  std::size_t i = 0;
  while (i < n) {
    if (!is_terminal(text[i])) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j < n && is_terminal(text[j])) ++j;
    while (j < n && is_closer(text[j])) ++j;
    if (j == n) break;
    if (!is_ws(text[j])) {
      i = j;
      continue;
    }
    std::size_t k = j;
    while (k < n && is_ws(text[k])) ++k;
    bool boundary = k == n || is_upper(text[k]) ||
                    ((text[k] == '"' || text[k] == '\'') && k + 1 < n && is_upper(text[k + 1]));
    // Only a lone period can end an abbreviation.
    if (boundary && j - i == 1 && text[i] == '.' && is_abbreviation(text, i)) boundary = false;
    if (boundary) {
      emit(j);
      start = k;
    }
    i = k;
  }
  emit(n);
  return out;
}

std::string first_paragraph(std::string_view body) {
  std::size_t pos = 0;
  while (true) {
    auto nl = body.find('\n', pos);
    if (nl == std::string_view::npos) break;
    std::size_t k = nl + 1;
    while (k < body.size() && (body[k] == ' ' || body[k] == '\t' || body[k] == '\r')) ++k;
    if (k < body.size() && body[k] == '\n') {
      auto para = trim(body.substr(0, nl));
      if (!para.empty()) return std::string(para);
    }
    pos = nl + 1;
  }
  auto sentences = split_sentences(body);
  if (sentences.size() > 3) sentences.resize(3);
  return join(sentences, " ");
}

std::optional<std::size_t> find_mention(std::span<const std::string> sentences,
                                        std::string_view topic) {
  auto needle = tokenize(topic);
  if (needle.empty()) return std::nullopt;
  for (std::size_t i = 0; i < sentences.size(); ++i) {
    auto hay = tokenize(sentences[i]);
    if (std::search(hay.begin(), hay.end(), needle.begin(), needle.end()) != hay.end()) return i;
  }
  return std::nullopt;
}

std::vector<std::string> Article::sentences() const { return split_sentences(body); }

AnnotationContext extract_context_window(const Article& article, std::string_view topic,
                                         std::size_t window) {
  if (window < 1) throw std::invalid_argument("context window must be >= 1");
  if (trim(article.body).empty() && trim(article.headline).empty()) {
    throw DataError("article '" + article.id + "' has neither headline nor body");
  }
  AnnotationContext ctx;
  ctx.headline = article.headline;
  auto sentences = article.sentences();
  if (auto hit = find_mention(sentences, topic)) {
    std::size_t lo = *hit >= window ? *hit - window : 0;
    std::size_t hi = std::min(sentences.size() - 1, *hit + window);
    ctx.excerpt = join(std::span(sentences).subspan(lo, hi - lo + 1), " ");
    ctx.sentence_range = std::pair{lo, hi};
  } else {
    ctx.excerpt = first_paragraph(article.body);
  }
  if (ctx.excerpt.empty()) ctx.excerpt = std::string(trim(article.headline));
  return ctx;
}

VoteOutcome aggregate_votes(std::span<const StanceLabel> votes) {
  if (votes.size() != 3) {
    throw std::invalid_argument("expected exactly 3 votes, got " + std::to_string(votes.size()));
  }
  std::array<int, 4> counts{};
  for (auto v : votes) ++counts[static_cast<std::size_t>(v)];
  for (auto label : kAllLabels) {
    if (counts[static_cast<std::size_t>(label)] >= 2) return {true, label};
  }
  return {false, std::nullopt};
}

AnnotatedExample make_example(std::string id, std::string article_id, std::string topic,
                              AnnotationContext context, std::array<StanceLabel, 3> votes) {
  AnnotatedExample ex;
  ex.id = std::move(id);
  ex.article_id = std::move(article_id);
  ex.topic = std::move(topic);
  ex.context = std::move(context);
  ex.votes = votes;
  auto outcome = aggregate_votes(votes);
  ex.retained = outcome.retained;
  ex.label = outcome.label;
  return ex;
}

DatasetSplit stratified_entity_split(std::span<const AnnotatedExample> examples,
                                     const SplitRatios& ratios, std::uint64_t seed) {
  if (examples.empty()) throw std::invalid_argument("cannot split an empty dataset");
  const std::array<double, 3> target{ratios.train, ratios.validation, ratios.test};
  for (double r : target) {
    if (!(r >= 0.0)) throw std::invalid_argument("split ratios must be non-negative");
  }
  if (std::abs(target[0] + target[1] + target[2] - 1.0) > 1e-9) {
    throw std::invalid_argument("split ratios must sum to 1");
  }

  std::map<std::string, std::vector<std::size_t>> by_topic;
  for (std::size_t i = 0; i < examples.size(); ++i) {
    if (!examples[i].retained) {
      throw std::invalid_argument("example '" + examples[i].id + "' is not retained");
    }
    by_topic[examples[i].topic].push_back(i);
  }

  DatasetSplit split;
  split.seed = seed;
  std::array<std::vector<std::size_t>, 3> parts;

  if (by_topic.size() < 3) {
    split.warnings.push_back("only " + std::to_string(by_topic.size()) +
                             " distinct topic(s); all examples assigned to train");
    parts[0].resize(examples.size());
    std::iota(parts[0].begin(), parts[0].end(), std::size_t{0});
  } else {
    std::vector<const std::vector<std::size_t>*> groups;
    for (auto& [topic, idx] : by_topic) groups.push_back(&idx);
    std::mt19937_64 rng(seed);
    std::shuffle(groups.begin(), groups.end(), rng);
    std::stable_sort(groups.begin(), groups.end(),
                     [](auto* a, auto* b) { return a->size() > b->size(); });

    const double total = static_cast<double>(examples.size());
    for (auto* group : groups) {
      std::size_t best = 0;
      double best_deficit = -std::numeric_limits<double>::infinity();
      for (std::size_t k = 0; k < 3; ++k) {
        double deficit = target[k] * total - static_cast<double>(parts[k].size());
        if (deficit > best_deficit) {
          best_deficit = deficit;
          best = k;
        }
      }
      parts[best].insert(parts[best].end(), group->begin(), group->end());
    }
  }

  std::array<std::vector<AnnotatedExample>*, 3> outs{&split.train, &split.validation, &split.test};
  for (std::size_t k = 0; k < 3; ++k) {
    std::sort(parts[k].begin(), parts[k].end());
    outs[k]->reserve(parts[k].size());
    for (auto i : parts[k]) outs[k]->push_back(examples[i]);
  }
  return split;
}

// ---------------------------------------------------------------------------
// Serialization

namespace {

const json& require(const json& obj, const char* field, std::size_t line) {
  auto it = obj.find(field);
  if (it == obj.end()) throw LineError(line, std::string("missing field '") + field + "'");
  return *it;
}

std::string require_string(const json& obj, const char* field, std::size_t line) {
  const auto& v = require(obj, field, line);
  if (!v.is_string()) throw LineError(line, std::string("field '") + field + "' must be a string");
  return v.get<std::string>();
}

StanceLabel to_label(const json& v, const char* field, std::size_t line) {
  if (!v.is_string()) throw LineError(line, std::string("field '") + field + "' must hold label strings");
  auto label = parse_label(v.get<std::string>());
  if (!label) {
    throw LineError(line, std::string("field '") + field + "': unknown label '" +
                              v.get<std::string>() + "'");
  }
  return *label;
}

template <class F>
void for_each_record(std::istream& in, F&& f) {
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    json obj;
    try {
      obj = json::parse(line);
    } catch (const json::parse_error& e) {
      throw LineError(line_no, std::string("invalid JSON: ") + e.what());
    }
    if (!obj.is_object()) throw LineError(line_no, "record must be a JSON object");
    f(obj, line_no);
  }
}

}  // namespace

void save_dataset(std::span<const AnnotatedExample> examples, std::ostream& out) {
  for (const auto& ex : examples) {
    json obj;
    obj["id"] = ex.id;
    obj["article_id"] = ex.article_id;
    obj["topic"] = ex.topic;
    obj["headline"] = ex.context.headline;
    obj["excerpt"] = ex.context.excerpt;
    obj["votes"] = json::array();
    for (auto v : ex.votes) obj["votes"].push_back(std::string(to_string(v)));
    obj["label"] = ex.label ? json(std::string(to_string(*ex.label))) : json(nullptr);
    obj["retained"] = ex.retained;
    out << obj.dump() << '\n';
  }
}

void save_dataset(std::span<const AnnotatedExample> examples, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write dataset file " + path.string());
  save_dataset(examples, out);
}

std::vector<AnnotatedExample> load_dataset(std::istream& in) {
  std::vector<AnnotatedExample> out;
  for_each_record(in, [&](const json& obj, std::size_t line) {
    AnnotatedExample ex;
    ex.id = require_string(obj, "id", line);
    ex.article_id = require_string(obj, "article_id", line);
    ex.topic = require_string(obj, "topic", line);
    ex.context.headline = require_string(obj, "headline", line);
    ex.context.excerpt = require_string(obj, "excerpt", line);
    const auto& votes = require(obj, "votes", line);
    if (!votes.is_array() || votes.size() != 3) {
      throw LineError(line, "field 'votes' must be an array of exactly 3 labels");
    }
    for (std::size_t i = 0; i < 3; ++i) ex.votes[i] = to_label(votes[i], "votes", line);
    auto outcome = aggregate_votes(ex.votes);

    bool has_label = obj.contains("label");
    bool has_retained = obj.contains("retained");
    if (has_label != has_retained) {
      throw LineError(line, std::string("missing field '") + (has_label ? "retained" : "label") + "'");
    }
    if (has_retained) {
      const auto& r = obj["retained"];
      if (!r.is_boolean()) throw LineError(line, "field 'retained' must be a boolean");
      if (r.get<bool>() != outcome.retained) {
        throw LineError(line, "field 'retained' disagrees with the votes");
      }
      const auto& l = obj["label"];
      std::optional<StanceLabel> label;
      if (!l.is_null()) label = to_label(l, "label", line);
      if (label != outcome.label) throw LineError(line, "field 'label' disagrees with the votes");
    }
    ex.retained = outcome.retained;
    ex.label = outcome.label;
    out.push_back(std::move(ex));
  });
  return out;
}

std::vector<AnnotatedExample> load_dataset(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open dataset file " + path.string());
  try {
    return load_dataset(in);
  } catch (const LineError& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

void save_contexts(std::span<const ContextRecord> records, std::ostream& out) {
  for (const auto& r : records) {
    json obj;
    obj["id"] = r.id;
    obj["article_id"] = r.article_id;
    obj["topic"] = r.topic;
    obj["headline"] = r.context.headline;
    obj["excerpt"] = r.context.excerpt;
    out << obj.dump() << '\n';
  }
}

std::vector<Article> load_articles(std::istream& in) {
  std::vector<Article> out;
  std::set<std::string> ids;
  for_each_record(in, [&](const json& obj, std::size_t line) {
    Article a;
    a.id = require_string(obj, "id", line);
    a.headline = require_string(obj, "headline", line);
    a.body = require_string(obj, "body", line);
    a.outlet = require_string(obj, "outlet", line);
    a.url = require_string(obj, "url", line);
    auto date = parse_date(require_string(obj, "published_at", line));
    if (!date) throw LineError(line, "field 'published_at' is not a valid ISO-8601 date");
    a.published_at = *date;
    if (!ids.insert(a.id).second) throw LineError(line, "duplicate article id '" + a.id + "'");
    out.push_back(std::move(a));
  });
  return out;
}

std::vector<Article> load_articles(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open corpus file " + path.string());
  try {
    return load_articles(in);
  } catch (const LineError& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

void save_articles(std::span<const Article> articles, std::ostream& out) {
  for (const auto& a : articles) {
    json obj;
    obj["id"] = a.id;
    obj["headline"] = a.headline;
    obj["body"] = a.body;
    obj["outlet"] = a.outlet;
    obj["url"] = a.url;
    obj["published_at"] = format_date(a.published_at);
    out << obj.dump() << '\n';
  }
}

}  // namespace stance
