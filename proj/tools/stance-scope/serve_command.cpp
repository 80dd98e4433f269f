#include <csignal>
#include <iostream>
#include <thread>

#include "common.hpp"
#include "stance/error.hpp"
#include "stance/service.hpp"

namespace cli {
namespace {

struct ServeOptions {
  std::filesystem::path model, corpus, ranks, provider_config, static_dir;
  std::string provider = "fixture";
  std::string host = "127.0.0.1";
  int port = 8360;
  std::uint64_t seed = 1;
};

stance::ApiServer* g_server = nullptr;

extern "C" void on_signal(int) {
  if (g_server) g_server->stop();
}

void run_serve(const ServeOptions& o) {
  if (!o.model.empty()) require_file(o.model, "checkpoint");
  if (!o.ranks.empty()) require_file(o.ranks, "prominence table");
  if (!o.static_dir.empty() && !std::filesystem::is_directory(o.static_dir))
    throw stance::DataError("static directory not found: " + o.static_dir.string());

  std::shared_ptr<const stance::NewsProvider> provider;
  if (o.provider == "fixture") {
    if (o.corpus.empty()) throw UsageError("--provider fixture needs --corpus");
    require_file(o.corpus, "article corpus");
    provider = std::make_shared<stance::FixtureProvider>(stance::load_articles(o.corpus));
  } else {
    if (o.provider_config.empty()) throw UsageError("--provider http needs --provider-config");
    require_file(o.provider_config, "provider config");
    provider = std::make_shared<stance::HttpProvider>(stance::HttpProviderConfig::load(o.provider_config));
  }
  auto ranks = o.ranks.empty() ? stance::ProminenceIndex{} : stance::ProminenceIndex::load(o.ranks);

  stance::StanceService service(provider, std::move(ranks));
  if (!o.model.empty()) service.load_model(o.model);

  stance::ApiServer server(service);
  if (!o.static_dir.empty() && !server.mount_static(o.static_dir))
    throw stance::DataError("cannot serve " + o.static_dir.string());
  const int port = server.bind(o.host, o.port);

  const auto health = service.health();
  std::cout << "listening on http://" << o.host << ':' << port << '\n'
            << "provider " << health.provider << '\n'
            << "model " << health.model.value_or("none") << '\n'
            << std::flush;
  if (health.provider_error) std::cerr << "warning: " << *health.provider_error << '\n';

  g_server = &server;
  std::signal(SIGINT, on_signal);
  std::signal(SIGTERM, on_signal);
  server.serve();
  g_server = nullptr;
}

}  // namespace

void register_serve_command(CLI::App& app) {
  auto o = std::make_shared<ServeOptions>();
  auto* cmd = app.add_subcommand("serve", "Serve /api/health, /api/analyze and /api/timeline");
  cmd->add_option("--model", o->model, "Trained checkpoint")->envname("STANCE_MODEL");
  cmd->add_option("--provider", o->provider, "fixture or http")
      ->check(CLI::IsMember({"fixture", "http"}))
      ->envname("STANCE_PROVIDER")
      ->capture_default_str();
  cmd->add_option("--corpus", o->corpus, "Article corpus for the fixture provider")
      ->envname("STANCE_CORPUS");
  cmd->add_option("--provider-config", o->provider_config, "JSON config for the http provider")
      ->envname("STANCE_PROVIDER_CONFIG");
  cmd->add_option("--ranks", o->ranks, "Outlet prominence table, hostname<TAB>rank")
      ->envname("STANCE_RANKS");
  cmd->add_option("--host", o->host, "Bind address")->envname("STANCE_HOST")->capture_default_str();
  cmd->add_option("--port", o->port, "Port (0 picks a free one)")
      ->envname("STANCE_PORT")
      ->check(CLI::Range(0, 65535))
      ->capture_default_str();
  cmd->add_option("--static", o->static_dir, "Directory served at /")->envname("STANCE_STATIC");
  add_seed(*cmd, o->seed);
  cmd->callback([o] { run_serve(*o); });
}

}  // namespace cli
