#include <gtest/gtest.h>

#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "httplib.h"
#include "json.hpp"

namespace fs = std::filesystem;

namespace {

struct Run {
  int status = -1;
  std::string output;
};

/// Runs the CLI through the shell with stderr merged into stdout.
Run cli(const std::string& args) {
  const std::string cmd = std::string(STANCE_CLI) + " " + args + " 2>&1";
  Run r;
  FILE* pipe = ::popen(cmd.c_str(), "r");
  if (!pipe) return r;
  char buf[4096];
  while (std::size_t n = std::fread(buf, 1, sizeof buf, pipe)) r.output.append(buf, n);
  const int raw = ::pclose(pipe);
  r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  return r;
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

const std::string kData = STANCE_TEST_DATA;

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("stance_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }
  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  /// Synthetic dataset split into train/validation/test under `split`.
  void make_split(std::size_t n = 300) {
    auto r = cli("synth-corpus --n " + std::to_string(n) + " --topics 6 --seed 3 --out " + path("syn.jsonl"));
    ASSERT_EQ(r.status, 0) << r.output;
    r = cli("split --dataset " + path("syn.jsonl") + " --out-dir " + path("split") + " --seed 1");
    ASSERT_EQ(r.status, 0) << r.output;
  }

  fs::path dir_;
};

}  // namespace

TEST_F(CliTest, HelpAndUsage) {
  auto r = cli("--help");
  EXPECT_EQ(r.status, 0);
  for (const char* sub : {"curate-topics", "build-dataset", "aggregate", "split", "synth-corpus", "train",
                          "evaluate", "predict", "gradcheck", "serve"})
    EXPECT_NE(r.output.find(sub), std::string::npos) << sub;
  EXPECT_EQ(cli("train --help").status, 0);
  EXPECT_EQ(cli("").status, 1);
  EXPECT_EQ(cli("no-such-command").status, 1);
  EXPECT_EQ(cli("train --model weird --out " + path("x.ckpt")).status, 1);
  EXPECT_EQ(cli("synth-corpus --n 0 --out " + path("x.jsonl")).status, 1);
}

TEST_F(CliTest, MissingInputsAreDataErrors) {
  make_split();
  auto r = cli("train --split-dir " + path("split") + " --embeddings /nonexistent/emb.txt --out " +
               path("m.ckpt"));
  EXPECT_EQ(r.status, 2);
  EXPECT_NE(r.output.find("/nonexistent/emb.txt"), std::string::npos) << r.output;
  r = cli("evaluate --checkpoint " + path("none.ckpt") + " --split " + path("split/test.jsonl"));
  EXPECT_EQ(r.status, 2);
  EXPECT_NE(r.output.find("none.ckpt"), std::string::npos);
  r = cli("curate-topics --triples /nonexistent.nt --controversial " + kData + "/controversial.txt --out " +
          path("t.jsonl"));
  EXPECT_EQ(r.status, 2);
  EXPECT_FALSE(fs::exists(path("m.ckpt")));
}

TEST_F(CliTest, InvalidTrainingConfigIsUsageError) {
  make_split();
  auto r = cli("train --split-dir " + path("split") + " --epochs 2 --patience 5 --out " + path("m.ckpt"));
  EXPECT_EQ(r.status, 1) << r.output;
  EXPECT_NE(r.output.find("patience"), std::string::npos);
}

TEST_F(CliTest, CurateTopicsFixture) {
  auto r = cli("curate-topics --triples " + kData + "/curation.nt --controversial " + kData +
               "/controversial.txt --political " + kData + "/political.txt --popular " + kData +
               "/popular.txt --out " + path("topics.jsonl"));
  ASSERT_EQ(r.status, 0) << r.output;
  EXPECT_NE(r.output.find("total 366"), std::string::npos) << r.output;
  std::ifstream in(path("topics.jsonl"));
  std::size_t lines = 0;
  for (std::string line; std::getline(in, line);) ++lines;
  EXPECT_EQ(lines, 366u);
}

TEST_F(CliTest, TrainIsDeterministicAndEvaluates) {
  make_split();
  const std::string base = "train --split-dir " + path("split") +
                           " --dim 8 --hidden 8 --epochs 2 --patience 2 --seed 1 --out ";
  ASSERT_EQ(cli(base + path("a.ckpt")).status, 0);
  ASSERT_EQ(cli(base + path("b.ckpt") + " --history " + path("h.jsonl")).status, 0);
  EXPECT_EQ(read_file(path("a.ckpt")), read_file(path("b.ckpt")));
  EXPECT_FALSE(read_file(path("h.jsonl")).empty());

  auto e1 = cli("evaluate --checkpoint " + path("a.ckpt") + " --split " + path("split/test.jsonl") +
                " --format records");
  auto e2 = cli("evaluate --checkpoint " + path("b.ckpt") + " --split " + path("split/test.jsonl") +
                " --format records");
  ASSERT_EQ(e1.status, 0) << e1.output;
  EXPECT_EQ(e1.output, e2.output);
  std::istringstream lines(e1.output);
  std::string line;
  std::getline(lines, line);
  EXPECT_EQ(nlohmann::json::parse(line)["metric"], "accuracy");
  std::getline(lines, line);
  EXPECT_EQ(nlohmann::json::parse(line)["metric"], "macro_f1");
  std::getline(lines, line);
  EXPECT_EQ(nlohmann::json::parse(line)["confusion_matrix"]["rows"].size(), 3u);

  auto p = cli("predict --checkpoint " + path("a.ckpt") + " --topic brexit --text \"Critics praised it.\"");
  ASSERT_EQ(p.status, 0) << p.output;
  auto j = nlohmann::json::parse(p.output);
  EXPECT_TRUE(j.contains("label") && j.contains("distribution") && j.contains("x"));

  ASSERT_EQ(cli("train --split-dir " + path("split") + " --model baseline --epochs 2 --patience 2 --out " +
                path("base.ckpt")).status,
            0);
  EXPECT_EQ(cli("evaluate --checkpoint " + path("base.ckpt") + " --split " + path("split/test.jsonl")).status,
            0);
}

TEST_F(CliTest, DatasetPipeline) {
  auto r = cli("curate-topics --triples " + kData + "/curation.nt --controversial " + kData +
               "/controversial.txt --political " + kData + "/political.txt --out " + path("topics.jsonl"));
  ASSERT_EQ(r.status, 0) << r.output;
  r = cli("build-dataset --corpus " + kData + "/news_corpus.jsonl --topics " + path("topics.jsonl") +
          " --out " + path("ctx.jsonl"));
  ASSERT_EQ(r.status, 0) << r.output;
  std::ifstream in(path("ctx.jsonl"));
  std::ofstream votes(path("votes.jsonl"));
  std::size_t n = 0;
  for (std::string line; std::getline(in, line); ++n) {
    auto j = nlohmann::json::parse(line);
    j["votes"] = n % 2 ? nlohmann::json{"favour", "favour", "against"}
                       : nlohmann::json{"favour", "against", "neutral"};
    votes << j.dump() << '\n';
  }
  votes.close();
  ASSERT_GT(n, 0u);
  r = cli("aggregate --votes " + path("votes.jsonl") + " --out " + path("dataset.jsonl"));
  ASSERT_EQ(r.status, 0) << r.output;
  EXPECT_NE(r.output.find("retained " + std::to_string(n / 2)), std::string::npos) << r.output;
}

TEST_F(CliTest, GradcheckPasses) {
  auto r = cli("gradcheck --seed 4");
  EXPECT_EQ(r.status, 0) << r.output;
  EXPECT_NE(r.output.find("max_relative_error"), std::string::npos);
}

TEST_F(CliTest, ServeAnswersHealth) {
  int out[2];
  ASSERT_EQ(::pipe(out), 0);
  const pid_t pid = ::fork();
  ASSERT_GE(pid, 0);
  if (pid == 0) {
    ::dup2(out[1], STDOUT_FILENO);
    ::close(out[0]);
    ::close(out[1]);
    const std::string corpus = kData + "/news_corpus.jsonl";
    const std::string ranks = kData + "/ranks.tsv";
    ::execl(STANCE_CLI, STANCE_CLI, "serve", "--port", "0", "--corpus", corpus.c_str(), "--ranks",
            ranks.c_str(), static_cast<char*>(nullptr));
    ::_exit(127);
  }
  ::close(out[1]);
  FILE* child_out = ::fdopen(out[0], "r");
  char line[256] = {};
  ASSERT_NE(std::fgets(line, sizeof line, child_out), nullptr);
  const std::string first(line);
  const auto colon = first.rfind(':');
  ASSERT_NE(colon, std::string::npos) << first;
  const int port = std::stoi(first.substr(colon + 1));

  httplib::Client client("127.0.0.1", port);
  auto res = client.Get("/api/health");
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 200);
  auto h = nlohmann::json::parse(res->body);
  EXPECT_EQ(h["status"], "degraded");
  EXPECT_EQ(h["provider"], "fixture");
  res = client.Get("/api/analyze?q=Ireland&topic=Ireland");
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 503);

  ::kill(pid, SIGTERM);
  int status = 0;
  ::waitpid(pid, &status, 0);
  std::fclose(child_out);
  EXPECT_TRUE(WIFEXITED(status));
  EXPECT_EQ(WEXITSTATUS(status), 0);
}
