#include "stance/text.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <unordered_set>

#include "stance/error.hpp"

namespace stance {
namespace {

bool is_space(unsigned char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

bool is_punct(unsigned char c) {
  return c < 0x80 && ((c >= 33 && c <= 47) || (c >= 58 && c <= 64) || (c >= 91 && c <= 96) ||
                      (c >= 123 && c <= 126));
}

}  // namespace

Tokens tokenize(std::string_view text) {
  Tokens out;
  std::string current;
  auto flush = [&] {
    if (!current.empty()) out.push_back(std::move(current));
    current.clear();
  };
  for (char ch : text) {
    auto c = static_cast<unsigned char>(ch);
    if (is_space(c)) {
      flush();
    } else if (is_punct(c)) {
      flush();
      out.emplace_back(1, ch);
    } else if (c >= 'A' && c <= 'Z') {
      current.push_back(static_cast<char>(c - 'A' + 'a'));
    } else {
      current.push_back(ch);
    }
  }
  flush();
  return out;
}

Vocabulary::Vocabulary() {
  tokens_ = {std::string(kPadToken), std::string(kOovToken)};
  counts_ = {0, 0};
  index_.emplace(tokens_[0], kPad);
  index_.emplace(tokens_[1], kOov);
}

TokenId Vocabulary::add(std::string_view token, std::uint64_t count) {
  if (auto it = index_.find(std::string(token)); it != index_.end()) return it->second;
  auto id = static_cast<TokenId>(tokens_.size());
  tokens_.emplace_back(token);
  counts_.push_back(count);
  index_.emplace(tokens_.back(), id);
  return id;
}

TokenId Vocabulary::id(std::string_view token) const {
  auto it = index_.find(std::string(token));
  return it == index_.end() ? kOov : it->second;
}

bool Vocabulary::contains(std::string_view token) const {
  return index_.count(std::string(token)) != 0;
}

const std::string& Vocabulary::token(TokenId id) const { return tokens_.at(id); }

void Vocabulary::dump(std::ostream& out) const {
  for (std::size_t i = 0; i < tokens_.size(); ++i) {
    out << i << '\t' << tokens_[i] << '\t' << counts_[i] << '\n';
  }
}

Vocabulary Vocabulary::load(std::istream& in) {
  Vocabulary vocab;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    auto t1 = line.find('\t');
    auto t2 = t1 == std::string::npos ? t1 : line.find('\t', t1 + 1);
    if (t2 == std::string::npos) throw LineError(line_no, "expected id<TAB>token<TAB>count");
    std::size_t id = 0;
    std::uint64_t count = 0;
    auto r1 = std::from_chars(line.data(), line.data() + t1, id);
    auto r2 = std::from_chars(line.data() + t2 + 1, line.data() + line.size(), count);
    if (r1.ec != std::errc() || r2.ec != std::errc()) throw LineError(line_no, "bad id or count");
    std::string token = line.substr(t1 + 1, t2 - t1 - 1);
    if (id < 2) {
      if (token != vocab.tokens_[id]) throw LineError(line_no, "reserved id mismatch");
      continue;
    }
    if (id != vocab.size()) throw LineError(line_no, "ids must be dense and ascending");
    if (vocab.contains(token)) throw LineError(line_no, "duplicate token '" + token + "'");
    vocab.add(token, count);
  }
  return vocab;
}

Vocabulary build_vocab(std::span<const Tokens> streams, std::uint64_t min_count) {
  if (min_count < 1) min_count = 1;
  std::map<std::string, std::uint64_t, std::less<>> freq;
  for (const auto& stream : streams) {
    for (const auto& tok : stream) {
      if (tok == Vocabulary::kPadToken || tok == Vocabulary::kOovToken) continue;
      ++freq[tok];
    }
  }
  std::vector<std::pair<std::string, std::uint64_t>> kept;
  for (auto& [tok, n] : freq) {
    if (n >= min_count) kept.emplace_back(tok, n);
  }
  // freq is already lexicographic; stable sort keeps that order within a count.
  std::stable_sort(kept.begin(), kept.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });
  Vocabulary vocab;
  for (auto& [tok, n] : kept) vocab.add(tok, n);
  return vocab;
}

std::vector<TokenId> encode(std::span<const std::string> tokens, const Vocabulary& vocab) {
  std::vector<TokenId> ids;
  ids.reserve(tokens.size());
  for (const auto& t : tokens) ids.push_back(vocab.id(t));
  return ids;
}

Tokens decode(std::span<const TokenId> ids, const Vocabulary& vocab) {
  Tokens out;
  out.reserve(ids.size());
  for (auto id : ids) out.push_back(vocab.token(id));
  return out;
}

EmbeddingMatrix load_embeddings(std::istream& in, const Vocabulary& vocab, std::size_t dim) {
  if (dim == 0) throw std::invalid_argument("embedding dimension must be positive");
  EmbeddingMatrix m;
  m.rows = vocab.size();
  m.dim = dim;
  m.values.assign(m.rows * dim, 0.0);

  std::unordered_set<std::string> seen;
  std::string line;
  std::size_t line_no = 0;
  std::vector<double> row;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto sp = line.find(' ');
    if (sp == std::string::npos || sp == 0) {
      throw LineError(line_no, "expected 'token v1 ... v" + std::to_string(dim) + "'");
    }
    std::string token = line.substr(0, sp);
    if (!seen.insert(token).second) throw LineError(line_no, "duplicate token '" + token + "'");

    row.clear();
    const char* p = line.data() + sp;
    const char* end = line.data() + line.size();
    while (p < end) {
      while (p < end && *p == ' ') ++p;
      if (p == end) break;
      const char* q = p;
      while (q < end && *q != ' ') ++q;
      double v = 0;
      auto res = std::from_chars(p, q, v);
      if (res.ec != std::errc() || res.ptr != q || !std::isfinite(v)) {
        throw LineError(line_no, "unparsable float '" + std::string(p, q) + "'");
      }
      row.push_back(v);
      p = q;
    }
    if (row.size() != dim) {
      throw LineError(line_no, "vector has " + std::to_string(row.size()) +
                                   " components, expected " + std::to_string(dim));
    }
    if (!vocab.contains(token)) continue;
    TokenId id = vocab.id(token);
    if (id == Vocabulary::kPad || id == Vocabulary::kOov) continue;
    std::copy(row.begin(), row.end(), m.values.begin() + static_cast<std::ptrdiff_t>(id * dim));
  }
  return m;
}

EmbeddingMatrix load_embeddings(const std::filesystem::path& path, const Vocabulary& vocab,
                                std::size_t dim) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open embeddings file " + path.string());
  return load_embeddings(in, vocab, dim);
}

}  // namespace stance
