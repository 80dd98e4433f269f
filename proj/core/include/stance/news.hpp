#pragma once

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "stance/corpus.hpp"
#include "stance/date.hpp"
#include "stance/query.hpp"

namespace stance {

inline constexpr std::size_t kMaxArticles = 50;

/// Outlet hostname -> popularity rank (lower is more prominent).
class ProminenceIndex {
 public:
  static constexpr std::int64_t kMinRank = 1;
  static constexpr std::int64_t kMaxRank = 1'000'000;
  static constexpr std::int64_t kDefaultRank = kMaxRank;

  /// Clamps `rank` into [kMinRank, kMaxRank].
  void set(std::string_view host, std::int64_t rank);

  /// Case-insensitive; a leading `www.` is ignored. Unknown hosts get
  /// kDefaultRank.
  std::int64_t rank(std::string_view outlet) const;

  std::size_t size() const noexcept { return ranks_.size(); }

  /// `hostname<TAB>rank` per line; blank lines and `#` comments skipped.
  static ProminenceIndex load(std::istream& in);
  static ProminenceIndex load(const std::filesystem::path& path);

 private:
  std::map<std::string, std::int64_t, std::less<>> ranks_;
};

std::int64_t prominence(const ProminenceIndex& index, std::string_view outlet);

struct SearchRequest {
  Query query;
  DateRange range;
  std::size_t limit = kMaxArticles;
  std::optional<std::string> outlet;
};

class ProviderError : public std::runtime_error {
 public:
  enum class Kind { auth, timeout, network, status, schema };

  ProviderError(Kind kind, const std::string& message, int http_status = 0)
      : std::runtime_error(message), kind_(kind), http_status_(http_status) {}

  Kind kind() const noexcept { return kind_; }
  int http_status() const noexcept { return http_status_; }

 private:
  Kind kind_;
  int http_status_;
};

std::string_view to_string(ProviderError::Kind kind);

class NewsProvider {
 public:
  virtual ~NewsProvider() = default;

  /// At most `request.limit` articles. Throws ProviderError on failure and
  /// std::invalid_argument when the limit is outside [1, kMaxArticles].
  virtual std::vector<Article> search(const SearchRequest& request) const = 0;

  /// "fixture" or "http".
  virtual std::string_view mode() const noexcept = 0;

  /// Description of a configuration problem, if any.
  virtual std::optional<std::string> configuration_error() const { return std::nullopt; }
};

/// Matching articles in range, newest first (equal dates by id), truncated.
std::vector<Article> fixture_search(std::span<const Article> corpus, const Query& query,
                                    const DateRange& range, std::size_t limit,
                                    const std::optional<std::string>& outlet = std::nullopt);

class FixtureProvider final : public NewsProvider {
 public:
  explicit FixtureProvider(std::vector<Article> corpus) : corpus_(std::move(corpus)) {}

  std::vector<Article> search(const SearchRequest& request) const override;
  std::string_view mode() const noexcept override { return "fixture"; }

  const std::vector<Article>& corpus() const noexcept { return corpus_; }

 private:
  std::vector<Article> corpus_;
};

/// Request and response mapping for a JSON news-search endpoint. Field paths
/// are dot-separated keys into each result item.
struct HttpProviderConfig {
  std::string endpoint;
  std::string credential_env = "NEWS_API_KEY";
  std::string credential_header = "X-AYLIEN-NewsAPI-Application-Key";
  std::map<std::string, std::string> headers;

  std::string query_param = "text";
  std::string from_param = "published_at.start";
  std::string to_param = "published_at.end";
  std::string limit_param = "per_page";
  std::string outlet_param = "source.domain[]";

  std::string items_path = "stories";
  std::string id_field = "id";
  std::string headline_field = "title";
  std::string body_field = "body";
  std::string outlet_field = "source.domain";
  std::string url_field = "links.permalink";
  std::string published_field = "published_at";

  std::chrono::milliseconds timeout{10'000};

  /// Keys mirror the member names; `timeout_ms` sets the timeout. Unknown
  /// keys are a DataError.
  static HttpProviderConfig from_json(std::string_view text);
  static HttpProviderConfig load(const std::filesystem::path& path);
};

class HttpProvider final : public NewsProvider {
 public:
  explicit HttpProvider(HttpProviderConfig config) : config_(std::move(config)) {}

  std::vector<Article> search(const SearchRequest& request) const override;
  std::string_view mode() const noexcept override { return "http"; }
  std::optional<std::string> configuration_error() const override;

  const HttpProviderConfig& config() const noexcept { return config_; }

 private:
  HttpProviderConfig config_;
};

/// Maps a decoded response body onto articles. Throws ProviderError(schema).
std::vector<Article> map_http_response(std::string_view body, const HttpProviderConfig& config,
                                       std::size_t limit);

}  // namespace stance
