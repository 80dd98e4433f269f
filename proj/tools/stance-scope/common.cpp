#include "common.hpp"

#include "stance/error.hpp"

namespace cli {

void require_file(const std::filesystem::path& path, const std::string& what) {
  std::error_code ec;
  if (!std::filesystem::is_regular_file(path, ec))
    throw stance::DataError(what + " not found: " + path.string());
  std::ifstream probe(path);
  if (!probe) throw stance::DataError(what + " is not readable: " + path.string());
}

std::ofstream open_output(const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw stance::DataError("cannot write " + path.string());
  return out;
}

void add_seed(CLI::App& cmd, std::uint64_t& seed) {
  cmd.add_option("--seed", seed, "Seed for every random choice made by the command")
      ->capture_default_str();
}

int& exit_status() {
  static int status = kOk;
  return status;
}

}  // namespace cli
