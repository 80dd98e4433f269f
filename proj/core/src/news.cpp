#include "stance/news.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "httplib.h"
#include "json.hpp"

#include "stance/error.hpp"

namespace stance {

namespace {

std::string normalize_host(std::string_view host) {
  std::string h;
  h.reserve(host.size());
  for (char c : host) h += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  while (!h.empty() && (h.back() == '.' || h.back() == ' ')) h.pop_back();
  if (h.rfind("www.", 0) == 0) h.erase(0, 4);
  return h;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

void check_limit(std::size_t limit) {
  if (limit < 1 || limit > kMaxArticles)
    throw std::invalid_argument("limit must be in [1, " + std::to_string(kMaxArticles) +
                                "], got " + std::to_string(limit));
}

}  // namespace

void ProminenceIndex::set(std::string_view host, std::int64_t rank) {
  ranks_[normalize_host(host)] = std::clamp(rank, kMinRank, kMaxRank);
}

std::int64_t ProminenceIndex::rank(std::string_view outlet) const {
  auto it = ranks_.find(normalize_host(outlet));
  return it == ranks_.end() ? kDefaultRank : it->second;
}

ProminenceIndex ProminenceIndex::load(std::istream& in) {
  ProminenceIndex index;
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    auto s = trim(line);
    if (s.empty() || s.front() == '#') continue;
    auto tab = s.find('\t');
    if (tab == std::string_view::npos) throw LineError(n, "expected hostname<TAB>rank");
    auto host = trim(s.substr(0, tab));
    auto num = trim(s.substr(tab + 1));
    if (host.empty()) throw LineError(n, "empty hostname");
    std::int64_t rank = 0;
    auto [p, ec] = std::from_chars(num.data(), num.data() + num.size(), rank);
    if (ec == std::errc::result_out_of_range) {
      rank = num.front() == '-' ? kMinRank : kMaxRank;
    } else if (ec != std::errc() || p != num.data() + num.size()) {
      throw LineError(n, "invalid rank '" + std::string(num) + "'");
    }
    index.set(host, rank);
  }
  return index;
}

ProminenceIndex ProminenceIndex::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  try {
    return load(in);
  } catch (const LineError& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

std::int64_t prominence(const ProminenceIndex& index, std::string_view outlet) {
  return index.rank(outlet);
}

std::string_view to_string(ProviderError::Kind kind) {
  switch (kind) {
    case ProviderError::Kind::auth: return "provider_auth";
    case ProviderError::Kind::timeout: return "provider_timeout";
    case ProviderError::Kind::network: return "provider_network";
    case ProviderError::Kind::status: return "provider_status";
    case ProviderError::Kind::schema: return "provider_schema";
  }
  return "provider_error";
}

std::vector<Article> fixture_search(std::span<const Article> corpus, const Query& query,
                                    const DateRange& range, std::size_t limit,
                                    const std::optional<std::string>& outlet) {
  check_limit(limit);
  const std::optional<std::string> host =
      outlet ? std::optional<std::string>(normalize_host(*outlet)) : std::nullopt;
  std::vector<const Article*> hits;
  for (const auto& a : corpus) {
    if (!range.contains(a.published_at)) continue;
    if (host && normalize_host(a.outlet) != *host) continue;
    if (match(query, a)) hits.push_back(&a);
  }
  std::sort(hits.begin(), hits.end(), [](const Article* a, const Article* b) {
    if (a->published_at != b->published_at) return a->published_at > b->published_at;
    return a->id < b->id;
  });
  if (hits.size() > limit) hits.resize(limit);
  std::vector<Article> out;
  out.reserve(hits.size());
  for (const auto* a : hits) out.push_back(*a);
  return out;
}

std::vector<Article> FixtureProvider::search(const SearchRequest& request) const {
  return fixture_search(corpus_, request.query, request.range, request.limit, request.outlet);
}

HttpProviderConfig HttpProviderConfig::from_json(std::string_view text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw DataError(std::string("provider config: ") + e.what());
  }
  if (!j.is_object()) throw DataError("provider config: expected a JSON object");
  HttpProviderConfig c;
  const std::map<std::string, std::string*, std::less<>> strings{
      {"endpoint", &c.endpoint},
      {"credential_env", &c.credential_env},
      {"credential_header", &c.credential_header},
      {"query_param", &c.query_param},
      {"from_param", &c.from_param},
      {"to_param", &c.to_param},
      {"limit_param", &c.limit_param},
      {"outlet_param", &c.outlet_param},
      {"items_path", &c.items_path},
      {"id_field", &c.id_field},
      {"headline_field", &c.headline_field},
      {"body_field", &c.body_field},
      {"outlet_field", &c.outlet_field},
      {"url_field", &c.url_field},
      {"published_field", &c.published_field},
  };
  for (const auto& [key, value] : j.items()) {
    if (auto it = strings.find(key); it != strings.end()) {
      if (!value.is_string()) throw DataError("provider config: '" + key + "' must be a string");
      *it->second = value.get<std::string>();
    } else if (key == "timeout_ms") {
      if (!value.is_number_integer() || value.get<std::int64_t>() <= 0)
        throw DataError("provider config: 'timeout_ms' must be a positive integer");
      c.timeout = std::chrono::milliseconds(value.get<std::int64_t>());
    } else if (key == "headers") {
      if (!value.is_object()) throw DataError("provider config: 'headers' must be an object");
      for (const auto& [name, v] : value.items()) {
        if (!v.is_string()) throw DataError("provider config: header values must be strings");
        c.headers[name] = v.get<std::string>();
      }
    } else {
      throw DataError("provider config: unknown key '" + key + "'");
    }
  }
  return c;
}

HttpProviderConfig HttpProviderConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return from_json(ss.str());
  } catch (const DataError& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

namespace {

struct Endpoint {
  std::string origin;  // scheme://host[:port]
  std::string path;
};

std::optional<Endpoint> split_endpoint(const std::string& url) {
  auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) return std::nullopt;
  auto scheme = url.substr(0, scheme_end);
  if (scheme != "http" && scheme != "https") return std::nullopt;
  auto path_start = url.find('/', scheme_end + 3);
  Endpoint e;
  e.origin = url.substr(0, path_start);
  e.path = path_start == std::string::npos ? "/" : url.substr(path_start);
  if (e.origin.size() <= scheme_end + 3) return std::nullopt;
  return e;
}

const nlohmann::json* at_path(const nlohmann::json& root, std::string_view path) {
  const nlohmann::json* node = &root;
  while (!path.empty()) {
    auto dot = path.find('.');
    auto key = path.substr(0, dot);
    if (!node->is_object()) return nullptr;
    auto it = node->find(key);
    if (it == node->end()) return nullptr;
    node = &*it;
    path = dot == std::string_view::npos ? std::string_view{} : path.substr(dot + 1);
  }
  return node;
}

std::string string_field(const nlohmann::json& item, const std::string& path, std::size_t index,
                         bool required) {
  const auto* v = at_path(item, path);
  if (!v || v->is_null()) {
    if (!required) return {};
    throw ProviderError(ProviderError::Kind::schema,
                        "item " + std::to_string(index) + ": missing field '" + path + "'");
  }
  if (v->is_string()) return v->get<std::string>();
  if (v->is_number_integer()) return std::to_string(v->get<std::int64_t>());
  throw ProviderError(ProviderError::Kind::schema,
                      "item " + std::to_string(index) + ": field '" + path + "' is not a string");
}

std::string host_of(std::string s) {
  auto scheme = s.find("://");
  if (scheme != std::string::npos) s.erase(0, scheme + 3);
  auto slash = s.find('/');
  if (slash != std::string::npos) s.resize(slash);
  return normalize_host(s);
}

}  // namespace

std::vector<Article> map_http_response(std::string_view body, const HttpProviderConfig& config,
                                       std::size_t limit) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(body);
  } catch (const nlohmann::json::parse_error& e) {
    throw ProviderError(ProviderError::Kind::schema, std::string("invalid JSON: ") + e.what());
  }
  const auto* items = at_path(j, config.items_path);
  if (!items || !items->is_array())
    throw ProviderError(ProviderError::Kind::schema,
                        "response has no array at '" + config.items_path + "'");
  std::vector<Article> out;
  for (std::size_t i = 0; i < items->size() && out.size() < limit; ++i) {
    const auto& item = (*items)[i];
    Article a;
    a.id = string_field(item, config.id_field, i, true);
    a.headline = string_field(item, config.headline_field, i, true);
    a.body = string_field(item, config.body_field, i, false);
    a.outlet = host_of(string_field(item, config.outlet_field, i, true));
    a.url = string_field(item, config.url_field, i, true);
    auto published = string_field(item, config.published_field, i, true);
    auto date = parse_date(published);
    if (!date)
      throw ProviderError(ProviderError::Kind::schema,
                          "item " + std::to_string(i) + ": invalid date '" + published + "'");
    a.published_at = *date;
    if (a.outlet.empty() || a.url.empty())
      throw ProviderError(ProviderError::Kind::schema,
                          "item " + std::to_string(i) + ": empty outlet or url");
    out.push_back(std::move(a));
  }
  return out;
}

std::optional<std::string> HttpProvider::configuration_error() const {
  if (!split_endpoint(config_.endpoint)) return "invalid endpoint '" + config_.endpoint + "'";
  if (!config_.credential_env.empty() && !std::getenv(config_.credential_env.c_str()))
    return "credential variable " + config_.credential_env + " is not set";
  return std::nullopt;
}

std::vector<Article> HttpProvider::search(const SearchRequest& request) const {
  check_limit(request.limit);
  auto endpoint = split_endpoint(config_.endpoint);
  if (!endpoint)
    throw ProviderError(ProviderError::Kind::network, "invalid endpoint '" + config_.endpoint + "'");

  httplib::Headers headers;
  for (const auto& [k, v] : config_.headers) headers.emplace(k, v);
  if (!config_.credential_env.empty()) {
    const char* key = std::getenv(config_.credential_env.c_str());
    if (!key)
      throw ProviderError(ProviderError::Kind::auth,
                          "credential variable " + config_.credential_env + " is not set");
    headers.emplace(config_.credential_header, key);
  }

  httplib::Params params;
  params.emplace(config_.query_param, to_string(request.query));
  if (request.range.from) params.emplace(config_.from_param, format_date(*request.range.from) + "T00:00:00Z");
  if (request.range.to) params.emplace(config_.to_param, format_date(*request.range.to) + "T23:59:59Z");
  params.emplace(config_.limit_param, std::to_string(request.limit));
  if (request.outlet) params.emplace(config_.outlet_param, *request.outlet);

  httplib::Client client(endpoint->origin);
  const auto secs = std::chrono::duration_cast<std::chrono::seconds>(config_.timeout);
  const auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(config_.timeout - secs);
  client.set_connection_timeout(secs.count(), usecs.count());
  client.set_read_timeout(secs.count(), usecs.count());
  client.set_write_timeout(secs.count(), usecs.count());

  const auto started = std::chrono::steady_clock::now();
  auto res = client.Get(endpoint->path, params, headers);
  if (!res) {
    const auto err = res.error();
    const auto elapsed = std::chrono::steady_clock::now() - started;
    const bool timed_out = err == httplib::Error::ConnectionTimeout ||
                           (err == httplib::Error::Read && elapsed >= config_.timeout * 9 / 10);
    throw ProviderError(timed_out ? ProviderError::Kind::timeout : ProviderError::Kind::network,
                        "request to " + endpoint->origin + " failed: " + httplib::to_string(err));
  }
  if (res->status == 401 || res->status == 403)
    throw ProviderError(ProviderError::Kind::auth,
                        "provider rejected credentials (HTTP " + std::to_string(res->status) + ")",
                        res->status);
  if (res->status < 200 || res->status >= 300)
    throw ProviderError(ProviderError::Kind::status,
                        "provider returned HTTP " + std::to_string(res->status), res->status);
  return map_http_response(res->body, config_, request.limit);
}

}  // namespace stance
