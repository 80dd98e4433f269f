#include "stance/service.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>

#include "httplib.h"
#include "json.hpp"

#include "stance/checkpoint.hpp"
#include "stance/error.hpp"
#include "stance/query.hpp"

namespace stance {

using nlohmann::json;

double stance_x(std::span<const double> p) {
  if (p.size() != kNumClasses)
    throw std::invalid_argument("expected a 3-class distribution, got " +
                                std::to_string(p.size()) + " values");
  double sum = 0.0;
  for (double v : p) {
    if (!std::isfinite(v) || v < 0.0 || v > 1.0)
      throw std::invalid_argument("distribution entries must lie in [0, 1]");
    sum += v;
  }
  if (std::abs(sum - 1.0) > 1e-6) throw std::invalid_argument("distribution must sum to 1");
  return std::clamp(p[0] - p[1], -1.0, 1.0);
}

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

ServiceError provider_failure(const ProviderError& e) {
  return ServiceError(502, std::string(to_string(e.kind())), e.what());
}

constexpr int kMaxTimelineMonths = 240;

}  // namespace

StanceService::StanceService(std::shared_ptr<const NewsProvider> provider,
                             ProminenceIndex prominence)
    : provider_(std::move(provider)),
      prominence_(std::move(prominence)),
      started_(std::chrono::steady_clock::now()) {
  if (!provider_) throw std::invalid_argument("news provider must not be null");
}

void StanceService::set_model(std::shared_ptr<const StanceClassifier> classifier,
                              std::string checkpoint_hash) {
  auto snapshot = std::make_shared<const ModelSnapshot>(
      ModelSnapshot{std::move(classifier), std::move(checkpoint_hash)});
  std::lock_guard lock(model_mutex_);
  model_ = std::move(snapshot);
}

void StanceService::load_model(const std::filesystem::path& checkpoint) {
  std::shared_ptr<const StanceClassifier> classifier = load_classifier(checkpoint);
  set_model(std::move(classifier), file_sha256(checkpoint));
}

std::shared_ptr<const StanceService::ModelSnapshot> StanceService::model() const {
  std::lock_guard lock(model_mutex_);
  return model_;
}

std::shared_ptr<const StanceService::ModelSnapshot> StanceService::require_model() const {
  auto snapshot = model();
  if (!snapshot || !snapshot->classifier)
    throw ServiceError(503, "model_unavailable", "no model checkpoint is loaded");
  return snapshot;
}

AnalysisResult StanceService::analyze(std::string_view query, std::string_view topic,
                                      std::size_t limit) const {
  const auto q_text = trim(query);
  const auto t_text = trim(topic);
  if (q_text.empty()) throw ServiceError(400, "bad_request", "query must not be empty");
  if (t_text.empty()) throw ServiceError(400, "bad_request", "topic must not be empty");
  if (limit < 1 || limit > kMaxArticles)
    throw ServiceError(400, "bad_request",
                       "limit must be in [1, " + std::to_string(kMaxArticles) + "]");

  std::optional<Query> parsed;
  try {
    parsed = parse_query(q_text);
  } catch (const QueryParseError& e) {
    throw ServiceError(422, "query_parse_error", e.message(), e.position());
  }

  const auto snapshot = require_model();

  std::vector<Article> articles;
  try {
    articles = provider_->search(SearchRequest{*parsed, {}, limit, std::nullopt});
  } catch (const ProviderError& e) {
    throw provider_failure(e);
  }

  AnalysisResult result{std::string(query), std::string(topic), {}};
  for (const auto& a : articles) {
    AnnotationContext ctx;
    try {
      ctx = extract_context_window(a, t_text);
    } catch (const DataError&) {
      continue;
    }
    const auto pred = snapshot->classifier->predict(t_text, ctx.headline, ctx.excerpt);
    PlottedArticle p;
    p.outlet = a.outlet;
    p.url = a.url;
    p.headline = a.headline;
    p.excerpt = ctx.excerpt;
    p.label = pred.label;
    p.probability = pred.probability;
    p.x = stance_x(pred.distribution);
    p.y = prominence_.rank(a.outlet);
    p.published_at = a.published_at;
    result.articles.push_back(std::move(p));
  }
  std::stable_sort(result.articles.begin(), result.articles.end(),
                   [](const PlottedArticle& a, const PlottedArticle& b) {
                     const double ax = std::abs(a.x), bx = std::abs(b.x);
                     if (ax != bx) return ax > bx;
                     if (a.published_at != b.published_at) return a.published_at > b.published_at;
                     return a.url < b.url;
                   });
  return result;
}

std::vector<TimelineBucket> StanceService::timeline(std::string_view outlet,
                                                    std::string_view topic, Month from,
                                                    Month to) const {
  const auto o_text = trim(outlet);
  const auto t_text = trim(topic);
  if (o_text.empty()) throw ServiceError(400, "bad_request", "outlet must not be empty");
  if (t_text.empty()) throw ServiceError(400, "bad_request", "topic must not be empty");
  if (!from.ok() || !to.ok()) throw ServiceError(400, "bad_request", "invalid month");
  if (from > to) throw ServiceError(400, "bad_request", "'from' is after 'to'");
  const int span = static_cast<int>((to - from).count()) + 1;
  if (span > kMaxTimelineMonths)
    throw ServiceError(400, "bad_request",
                       "range exceeds " + std::to_string(kMaxTimelineMonths) + " months");

  const auto snapshot = require_model();
  const Query q = topic_query(t_text);

  std::vector<TimelineBucket> buckets;
  buckets.reserve(static_cast<std::size_t>(span));
  for (Month m = from; m <= to; m += std::chrono::months{1}) {
    TimelineBucket bucket{m};
    std::vector<Article> articles;
    try {
      articles = provider_->search(
          SearchRequest{q, DateRange{first_day(m), last_day(m)}, kMaxArticles, std::string(o_text)});
    } catch (const ProviderError& e) {
      throw provider_failure(e);
    }
    for (const auto& a : articles) {
      AnnotationContext ctx;
      try {
        ctx = extract_context_window(a, t_text);
      } catch (const DataError&) {
        continue;
      }
      switch (snapshot->classifier->predict(t_text, ctx.headline, ctx.excerpt).label) {
        case StanceLabel::favour: ++bucket.favour; break;
        case StanceLabel::against: ++bucket.against; break;
        default: ++bucket.neutral; break;
      }
    }
    buckets.push_back(bucket);
  }
  return buckets;
}

HealthStatus StanceService::health() const {
  HealthStatus h;
  auto snapshot = model();
  if (snapshot && snapshot->classifier) h.model = snapshot->checkpoint_hash;
  h.provider_error = provider_->configuration_error();
  h.provider = h.provider_error ? "error" : std::string(provider_->mode());
  h.ok = h.model.has_value() && !h.provider_error;
  h.uptime_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started_).count();
  return h;
}

std::string to_json(const AnalysisResult& result) {
  json articles = json::array();
  for (const auto& a : result.articles) {
    articles.push_back({{"outlet", a.outlet},
                        {"url", a.url},
                        {"headline", a.headline},
                        {"excerpt", a.excerpt},
                        {"label", to_string(a.label)},
                        {"probability", a.probability},
                        {"x", a.x},
                        {"y", a.y},
                        {"published_at", format_date(a.published_at)}});
  }
  json j{{"query", result.query},
         {"topic", result.topic},
         {"count", result.count()},
         {"articles", std::move(articles)}};
  return j.dump(-1, ' ', false, json::error_handler_t::replace);
}

std::string to_json(std::span<const TimelineBucket> buckets) {
  json arr = json::array();
  for (const auto& b : buckets) {
    arr.push_back({{"month", format_month(b.month)},
                   {"favour", b.favour},
                   {"against", b.against},
                   {"neutral", b.neutral},
                   {"total", b.total()}});
  }
  return json{{"buckets", std::move(arr)}}.dump();
}

std::string to_json(const HealthStatus& health) {
  json j{{"status", health.ok ? "ok" : "degraded"},
         {"model", health.model ? json(*health.model) : json(nullptr)},
         {"provider", health.provider},
         {"uptime_s", health.uptime_seconds}};
  if (health.provider_error) j["provider_error"] = *health.provider_error;
  return j.dump(-1, ' ', false, json::error_handler_t::replace);
}

std::string to_json(const ServiceError& error) {
  json e{{"code", error.code()}, {"message", error.what()}};
  if (error.position()) e["position"] = *error.position();
  return json{{"error", std::move(e)}}.dump(-1, ' ', false, json::error_handler_t::replace);
}

namespace {

constexpr const char* kJsonType = "application/json; charset=utf-8";

std::string required_param(const httplib::Request& req, const std::string& name) {
  if (!req.has_param(name))
    throw ServiceError(400, "bad_request", "missing parameter '" + name + "'");
  return req.get_param_value(name);
}

std::size_t parse_limit(const httplib::Request& req) {
  if (!req.has_param("limit")) return kMaxArticles;
  const auto s = req.get_param_value("limit");
  long long v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size() || v < 1 ||
      v > static_cast<long long>(kMaxArticles))
    throw ServiceError(400, "bad_request",
                       "limit must be an integer in [1, " + std::to_string(kMaxArticles) + "]");
  return static_cast<std::size_t>(v);
}

Month parse_month_param(const httplib::Request& req, const std::string& name) {
  auto m = parse_month(required_param(req, name));
  if (!m) throw ServiceError(400, "bad_request", "'" + name + "' must be YYYY-MM");
  return *m;
}

template <class Fn>
void respond(httplib::Response& res, Fn&& fn) {
  try {
    res.set_content(fn(), kJsonType);
    res.status = 200;
  } catch (const ServiceError& e) {
    res.status = e.status();
    res.set_content(to_json(e), kJsonType);
  } catch (const std::exception& e) {
    res.status = 500;
    res.set_content(to_json(ServiceError(500, "internal_error", e.what())), kJsonType);
  }
}

}  // namespace

void register_routes(httplib::Server& server, const StanceService& service) {
  server.Get("/api/health", [&service](const httplib::Request&, httplib::Response& res) {
    respond(res, [&] { return to_json(service.health()); });
  });
  server.Get("/api/analyze", [&service](const httplib::Request& req, httplib::Response& res) {
    respond(res, [&] {
      auto q = required_param(req, "q");
      auto topic = required_param(req, "topic");
      return to_json(service.analyze(q, topic, parse_limit(req)));
    });
  });
  server.Get("/api/timeline", [&service](const httplib::Request& req, httplib::Response& res) {
    respond(res, [&] {
      auto outlet = required_param(req, "outlet");
      auto topic = required_param(req, "topic");
      auto buckets = service.timeline(outlet, topic, parse_month_param(req, "from"),
                                      parse_month_param(req, "to"));
      return to_json(buckets);
    });
  });
}

ApiServer::ApiServer(const StanceService& service) : server_(std::make_unique<httplib::Server>()) {
  register_routes(*server_, service);
}

ApiServer::~ApiServer() {
  if (server_->is_running()) server_->stop();
}

bool ApiServer::mount_static(const std::filesystem::path& dir) {
  return server_->set_mount_point("/", dir.string());
}

int ApiServer::bind(const std::string& host, int port) {
  if (port == 0) {
    int bound = server_->bind_to_any_port(host);
    if (bound < 0) throw std::runtime_error("cannot bind " + host);
    return bound;
  }
  if (!server_->bind_to_port(host, port))
    throw std::runtime_error("cannot bind " + host + ":" + std::to_string(port));
  return port;
}

void ApiServer::serve() { server_->listen_after_bind(); }

void ApiServer::stop() { server_->stop(); }

void ApiServer::wait_until_ready() const { server_->wait_until_ready(); }

}  // namespace stance
