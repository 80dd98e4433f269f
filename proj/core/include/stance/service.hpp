#pragma once

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "stance/date.hpp"
#include "stance/labels.hpp"
#include "stance/model.hpp"
#include "stance/news.hpp"

namespace httplib {
class Server;
}

namespace stance {

/// p(favour) - p(against). Throws std::invalid_argument unless `p` is a
/// 3-class distribution.
double stance_x(std::span<const double> p);

struct PlottedArticle {
  std::string outlet;
  std::string url;
  std::string headline;
  std::string excerpt;
  StanceLabel label = StanceLabel::neutral;
  double probability = 0.0;
  double x = 0.0;
  std::int64_t y = ProminenceIndex::kDefaultRank;
  Date published_at;
};

struct AnalysisResult {
  std::string query;
  std::string topic;
  std::vector<PlottedArticle> articles;

  std::size_t count() const noexcept { return articles.size(); }
};

struct TimelineBucket {
  Month month;
  std::size_t favour = 0;
  std::size_t against = 0;
  std::size_t neutral = 0;

  std::size_t total() const noexcept { return favour + against + neutral; }
};

struct HealthStatus {
  bool ok = false;
  std::optional<std::string> model;  // checkpoint SHA-256
  std::string provider;              // mode, or "error"
  std::optional<std::string> provider_error;
  double uptime_seconds = 0.0;
};

/// Request failure with its HTTP status and a stable error code.
class ServiceError : public std::runtime_error {
 public:
  ServiceError(int status, std::string code, const std::string& message,
               std::optional<std::size_t> position = std::nullopt)
      : std::runtime_error(message), status_(status), code_(std::move(code)), position_(position) {}

  int status() const noexcept { return status_; }
  const std::string& code() const noexcept { return code_; }
  std::optional<std::size_t> position() const noexcept { return position_; }

 private:
  int status_;
  std::string code_;
  std::optional<std::size_t> position_;
};

class StanceService {
 public:
  struct ModelSnapshot {
    std::shared_ptr<const StanceClassifier> classifier;
    std::string checkpoint_hash;
  };

  StanceService(std::shared_ptr<const NewsProvider> provider, ProminenceIndex prominence);

  /// Atomically replaces the model used by subsequent requests.
  void set_model(std::shared_ptr<const StanceClassifier> classifier, std::string checkpoint_hash);
  void load_model(const std::filesystem::path& checkpoint);
  std::shared_ptr<const ModelSnapshot> model() const;

  /// Articles sorted by |x| descending, then newest first, then by url.
  AnalysisResult analyze(std::string_view query, std::string_view topic,
                         std::size_t limit = kMaxArticles) const;

  /// One bucket per month in [from, to], including empty months.
  std::vector<TimelineBucket> timeline(std::string_view outlet, std::string_view topic,
                                       Month from, Month to) const;

  HealthStatus health() const;

 private:
  std::shared_ptr<const ModelSnapshot> require_model() const;

  std::shared_ptr<const NewsProvider> provider_;
  ProminenceIndex prominence_;
  mutable std::mutex model_mutex_;
  std::shared_ptr<const ModelSnapshot> model_;
  std::chrono::steady_clock::time_point started_;
};

std::string to_json(const AnalysisResult& result);
std::string to_json(std::span<const TimelineBucket> buckets);
std::string to_json(const HealthStatus& health);
std::string to_json(const ServiceError& error);

/// Installs GET /api/health, /api/analyze and /api/timeline. The service
/// must outlive the server.
void register_routes(httplib::Server& server, const StanceService& service);

/// Owns an HTTP server exposing a StanceService.
class ApiServer {
 public:
  explicit ApiServer(const StanceService& service);
  ~ApiServer();
  ApiServer(const ApiServer&) = delete;
  ApiServer& operator=(const ApiServer&) = delete;

  /// Serves files under `dir` at `/`.
  bool mount_static(const std::filesystem::path& dir);

  /// Port 0 picks a free port. Returns the bound port; throws on failure.
  int bind(const std::string& host, int port);

  /// Blocks until stop().
  void serve();
  void stop();
  void wait_until_ready() const;

 private:
  std::unique_ptr<httplib::Server> server_;
};

}  // namespace stance
