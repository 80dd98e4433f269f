#include <exception>
#include <iostream>

#include "common.hpp"
#include "stance/error.hpp"
#include "stance/news.hpp"

int main(int argc, char** argv) {
  CLI::App app{"stance-scope: topic curation, stance dataset, model training and news API"};
  app.require_subcommand(1, 1);
  app.set_version_flag("--version", "0.1.0");
  cli::register_data_commands(app);
  cli::register_model_commands(app);
  cli::register_serve_command(app);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    if (e.get_exit_code() != 0 && app.get_subcommands().empty()) std::cerr << app.help();
    return cli::kUsage;
  } catch (const cli::UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return cli::kUsage;
  } catch (const stance::DataError& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return cli::kData;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid argument: " << e.what() << '\n';
    return cli::kUsage;
  } catch (const stance::NumericError& e) {
    std::cerr << "numeric failure: " << e.what() << '\n';
    return cli::kRuntime;
  } catch (const stance::ProviderError& e) {
    std::cerr << "provider error: " << e.what() << '\n';
    return cli::kRuntime;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return cli::kRuntime;
  }
  return cli::exit_status();
}
