#pragma once

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "stance/nn.hpp"

namespace stance {

/// Binary container of named tensors plus a JSON metadata blob.
///
/// Layout (little-endian):
///   "STNCKPT\0"  u32 version  u64 meta_len  meta bytes
///   u32 n_tensors, then per tensor:
///     u32 name_len  name  u32 rank  u64 dims[rank]  f64 values[prod(dims)]
///
/// Values are stored as raw IEEE-754 doubles, so a round trip is bit-exact.
struct Checkpoint {
  static constexpr std::uint32_t kVersion = 1;

  std::string metadata;
  std::vector<nn::ParamTensor> tensors;  // grad left empty

  const nn::ParamTensor& tensor(std::string_view name) const;
};

void write_checkpoint(std::ostream& out, std::string_view metadata,
                      std::span<const nn::ParamTensor* const> tensors);
void write_checkpoint(const std::filesystem::path& path, std::string_view metadata,
                      std::span<const nn::ParamTensor* const> tensors);
Checkpoint read_checkpoint(std::istream& in);
Checkpoint read_checkpoint(const std::filesystem::path& path);

/// Lowercase hex SHA-256 of a file's bytes.
std::string file_sha256(const std::filesystem::path& path);

}  // namespace stance
