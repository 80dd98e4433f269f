#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>

#include "CLI11.hpp"

namespace cli {

enum ExitCode : int { kOk = 0, kUsage = 1, kData = 2, kRuntime = 3 };

/// Invalid flag combination or value detected after parsing.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Throws stance::DataError naming `what` and the path when it is not a
/// readable regular file.
void require_file(const std::filesystem::path& path, const std::string& what);

/// Opens for writing, creating parent directories.
std::ofstream open_output(const std::filesystem::path& path);

void add_seed(CLI::App& cmd, std::uint64_t& seed);

/// Exit status reported by the command that ran; defaults to kOk.
int& exit_status();

void register_data_commands(CLI::App& app);
void register_model_commands(CLI::App& app);
void register_serve_command(CLI::App& app);

}  // namespace cli
