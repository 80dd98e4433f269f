#include <gtest/gtest.h>

#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include "stance/checkpoint.hpp"
#include "stance/error.hpp"

using namespace stance;

namespace {

nn::ParamTensor tensor(std::string name, std::vector<std::size_t> shape, std::vector<double> v) {
  nn::ParamTensor t(std::move(name), std::move(shape));
  t.value = std::move(v);
  return t;
}

std::string write(std::string_view meta, const std::vector<const nn::ParamTensor*>& ts) {
  std::ostringstream out(std::ios::binary);
  write_checkpoint(out, meta, ts);
  return out.str();
}

}  // namespace

TEST(Checkpoint, RoundTripIsBitExact) {
  auto a = tensor("a", {2, 3},
                  {0.1, -1e-300, std::numeric_limits<double>::denorm_min(), 1.0 / 3.0, -0.0, 1e308});
  auto b = tensor("b.bias", {1}, {std::nextafter(1.0, 2.0)});
  auto bytes = write(R"({"kind":"x"})", {&a, &b});
  std::istringstream in(bytes, std::ios::binary);
  auto ck = read_checkpoint(in);
  EXPECT_EQ(ck.metadata, R"({"kind":"x"})");
  ASSERT_EQ(ck.tensors.size(), 2u);
  EXPECT_EQ(ck.tensor("a").shape, a.shape);
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(std::memcmp(&ck.tensor("a").value[i], &a.value[i], sizeof(double)), 0) << i;
  }
  EXPECT_EQ(ck.tensor("b.bias").value, b.value);
  EXPECT_THROW(ck.tensor("missing"), DataError);
}

TEST(Checkpoint, HeaderLayout) {
  auto a = tensor("w", {1}, {2.0});
  auto bytes = write("{}", {&a});
  ASSERT_GE(bytes.size(), 12u);
  EXPECT_EQ(bytes.substr(0, 8), std::string("STNCKPT\0", 8));
  EXPECT_EQ(static_cast<unsigned char>(bytes[8]), Checkpoint::kVersion);
}

TEST(Checkpoint, CorruptInputsAreDataErrors) {
  auto a = tensor("w", {4}, {1, 2, 3, 4});
  auto bytes = write("{}", {&a});
  auto fails = [](std::string s) {
    std::istringstream in(s, std::ios::binary);
    EXPECT_THROW(read_checkpoint(in), DataError);
  };
  fails("");
  fails("NOTACKPT" + bytes.substr(8));
  auto bad_version = bytes;
  bad_version[8] = 9;
  fails(bad_version);
  for (std::size_t cut : {10ul, 20ul, bytes.size() - 1}) fails(bytes.substr(0, cut));
}

TEST(Checkpoint, FileSha256) {
  auto dir = std::filesystem::temp_directory_path() / "stance_ckpt_test";
  std::filesystem::create_directories(dir);
  {
    std::ofstream out(dir / "abc.txt", std::ios::binary);
    out << "abc";
  }
  EXPECT_EQ(file_sha256(dir / "abc.txt"),
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  {
    std::ofstream out(dir / "empty.txt", std::ios::binary);
  }
  EXPECT_EQ(file_sha256(dir / "empty.txt"),
            "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  EXPECT_THROW(file_sha256(dir / "nope"), DataError);
  std::filesystem::remove_all(dir);
}
