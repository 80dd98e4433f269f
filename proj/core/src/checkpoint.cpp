#include "stance/checkpoint.hpp"

#include <openssl/evp.h>

#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <istream>
#include <memory>
#include <ostream>

#include "stance/error.hpp"

namespace stance {
namespace {

static_assert(std::endian::native == std::endian::little,
              "checkpoint I/O assumes a little-endian host");

constexpr char kMagic[8] = {'S', 'T', 'N', 'C', 'K', 'P', 'T', '\0'};
constexpr std::uint64_t kMaxElements = std::uint64_t{1} << 34;

template <class T>
void put(std::ostream& out, T v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof v);
}

template <class T>
T get(std::istream& in) {
  T v{};
  if (!in.read(reinterpret_cast<char*>(&v), sizeof v)) throw DataError("checkpoint truncated");
  return v;
}

std::string get_bytes(std::istream& in, std::uint64_t n) {
  if (n > (std::uint64_t{1} << 32)) throw DataError("checkpoint field too large");
  std::string s(n, '\0');
  if (n && !in.read(s.data(), static_cast<std::streamsize>(n))) throw DataError("checkpoint truncated");
  return s;
}

}  // namespace

const nn::ParamTensor& Checkpoint::tensor(std::string_view name) const {
  for (const auto& t : tensors) {
    if (t.name == name) return t;
  }
  throw DataError("checkpoint has no tensor '" + std::string(name) + "'");
}

void write_checkpoint(std::ostream& out, std::string_view metadata,
                      std::span<const nn::ParamTensor* const> tensors) {
  out.write(kMagic, sizeof kMagic);
  put<std::uint32_t>(out, Checkpoint::kVersion);
  put<std::uint64_t>(out, metadata.size());
  out.write(metadata.data(), static_cast<std::streamsize>(metadata.size()));
  put<std::uint32_t>(out, static_cast<std::uint32_t>(tensors.size()));
  for (const auto* t : tensors) {
    put<std::uint32_t>(out, static_cast<std::uint32_t>(t->name.size()));
    out.write(t->name.data(), static_cast<std::streamsize>(t->name.size()));
    put<std::uint32_t>(out, static_cast<std::uint32_t>(t->shape.size()));
    for (auto d : t->shape) put<std::uint64_t>(out, d);
    out.write(reinterpret_cast<const char*>(t->value.data()),
              static_cast<std::streamsize>(t->value.size() * sizeof(double)));
  }
  if (!out) throw DataError("failed writing checkpoint");
}

void write_checkpoint(const std::filesystem::path& path, std::string_view metadata,
                      std::span<const nn::ParamTensor* const> tensors) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write checkpoint " + path.string());
  write_checkpoint(out, metadata, tensors);
}

Checkpoint read_checkpoint(std::istream& in) {
  char magic[8];
  if (!in.read(magic, sizeof magic) || std::memcmp(magic, kMagic, sizeof magic) != 0) {
    throw DataError("not a stance checkpoint (bad magic)");
  }
  auto version = get<std::uint32_t>(in);
  if (version != Checkpoint::kVersion) {
    throw DataError("unsupported checkpoint version " + std::to_string(version));
  }
  Checkpoint ck;
  ck.metadata = get_bytes(in, get<std::uint64_t>(in));
  auto count = get<std::uint32_t>(in);
  for (std::uint32_t i = 0; i < count; ++i) {
    std::string name = get_bytes(in, get<std::uint32_t>(in));
    auto rank = get<std::uint32_t>(in);
    if (rank > 8) throw DataError("checkpoint tensor '" + name + "' has implausible rank");
    std::vector<std::size_t> shape;
    std::uint64_t elements = 1;
    for (std::uint32_t r = 0; r < rank; ++r) {
      auto d = get<std::uint64_t>(in);
      elements *= d;
      if (elements > kMaxElements) throw DataError("checkpoint tensor '" + name + "' too large");
      shape.push_back(static_cast<std::size_t>(d));
    }
    nn::ParamTensor t;
    t.name = std::move(name);
    t.shape = std::move(shape);
    t.value.resize(static_cast<std::size_t>(elements));
    if (elements &&
        !in.read(reinterpret_cast<char*>(t.value.data()),
                 static_cast<std::streamsize>(elements * sizeof(double)))) {
      throw DataError("checkpoint truncated in tensor '" + t.name + "'");
    }
    ck.tensors.push_back(std::move(t));
  }
  return ck;
}

Checkpoint read_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open checkpoint " + path.string());
  return read_checkpoint(in);
}

std::string file_sha256(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
  EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr);
  std::array<char, 1 << 16> buf;
  while (in) {
    in.read(buf.data(), buf.size());
    if (in.gcount() > 0) EVP_DigestUpdate(ctx.get(), buf.data(), static_cast<std::size_t>(in.gcount()));
  }
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx.get(), digest, &len);
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += kHex[digest[i] >> 4];
    out += kHex[digest[i] & 0xF];
  }
  return out;
}

}  // namespace stance
