#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace stance {

using TokenId = std::uint32_t;
using Tokens = std::vector<std::string>;

/// Lowercases ASCII, splits on whitespace, and emits every ASCII punctuation
/// character as its own token. Non-ASCII bytes are kept inside words.
Tokens tokenize(std::string_view text);

/// Token <-> id mapping with two reserved ids.
class Vocabulary {
 public:
  static constexpr TokenId kPad = 0;
  static constexpr TokenId kOov = 1;
  static constexpr std::string_view kPadToken = "<pad>";
  static constexpr std::string_view kOovToken = "<unk>";

  Vocabulary();

  /// Appends `token` if new; reserved names map to their reserved id.
  TokenId add(std::string_view token, std::uint64_t count = 0);

  TokenId id(std::string_view token) const;  // kOov when absent
  bool contains(std::string_view token) const;
  const std::string& token(TokenId id) const;
  std::uint64_t count(TokenId id) const { return counts_.at(id); }
  std::size_t size() const noexcept { return tokens_.size(); }
  const std::vector<std::string>& tokens() const noexcept { return tokens_; }

  /// `id<TAB>token<TAB>count` per line.
  void dump(std::ostream& out) const;
  static Vocabulary load(std::istream& in);

  friend bool operator==(const Vocabulary& a, const Vocabulary& b) {
    return a.tokens_ == b.tokens_ && a.counts_ == b.counts_;
  }

 private:
  std::vector<std::string> tokens_;
  std::vector<std::uint64_t> counts_;
  std::unordered_map<std::string, TokenId> index_;
};

/// Ids ordered by descending frequency, then lexicographically.
Vocabulary build_vocab(std::span<const Tokens> streams, std::uint64_t min_count = 1);

std::vector<TokenId> encode(std::span<const std::string> tokens, const Vocabulary& vocab);
Tokens decode(std::span<const TokenId> ids, const Vocabulary& vocab);

/// Dense |V| x d matrix, row-major.
struct EmbeddingMatrix {
  std::size_t rows = 0;
  std::size_t dim = 0;
  std::vector<double> values;

  std::span<const double> row(std::size_t r) const { return {values.data() + r * dim, dim}; }
};

/// Reads `token v1 ... vd` lines. Rows of vocab tokens found in the file are
/// copied; everything else (OOV, PAD, missing tokens) stays zero.
EmbeddingMatrix load_embeddings(std::istream& in, const Vocabulary& vocab, std::size_t dim);
EmbeddingMatrix load_embeddings(const std::filesystem::path& path, const Vocabulary& vocab,
                                std::size_t dim);

}  // namespace stance
