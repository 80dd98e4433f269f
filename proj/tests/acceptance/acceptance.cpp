// Acceptance suite: one PASS/FAIL line per criterion; exit status 1 if any fail.

#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "httplib.h"
#include "json.hpp"

#include "generators.hpp"
#include "oracles.hpp"
#include "stance/checkpoint.hpp"
#include "stance/corpus.hpp"
#include "stance/metrics.hpp"
#include "stance/model.hpp"
#include "stance/nn.hpp"
#include "stance/service.hpp"
#include "stance/topics.hpp"

using namespace stance;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

// Tolerances and thresholds.
constexpr double kGradTolerance = 1e-4;
constexpr double kGradSeconds = 60.0;
constexpr std::size_t kGradSeeds = 10;
constexpr double kLstmOracleTolerance = 1e-10;
constexpr double kMacroF1OracleTolerance = 1e-9;
constexpr std::size_t kOracleInstances = 100;
constexpr double kSplitTolerance = 0.05;
constexpr double kShareTolerance = 0.02;
constexpr double kLearnAccuracy = 0.95;
constexpr std::size_t kLearnEpochs = 50;
constexpr double kLearnSeconds = 300.0;
constexpr double kModelBaselineGap = 0.15;
constexpr std::size_t kCuratedTotal = 366;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(double v, int precision = 4) {
  std::ostringstream os;
  os.precision(precision);
  os << v;
  return os.str();
}

double seconds_since(Clock::time_point t) {
  return std::chrono::duration<double>(Clock::now() - t).count();
}

fs::path scratch_dir(const std::string& name) {
  auto dir = fs::temp_directory_path() / ("stance_acceptance_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

double accuracy_on(const StanceClassifier& m, std::span<const AnnotatedExample> xs,
                   std::vector<StanceLabel>* predictions = nullptr) {
  std::vector<StanceLabel> gold, pred;
  for (const auto& x : xs) {
    gold.push_back(*x.label);
    pred.push_back(m.predict(x).label);
  }
  if (predictions) *predictions = pred;
  return accuracy(confusion(gold, pred));
}

// ---------------------------------------------------------------------------

Outcome gradient_integrity() {
  const auto start = Clock::now();
  double worst = 0.0;
  std::string worst_param;
  std::size_t checked = 0;
  for (std::uint64_t seed = 0; seed < kGradSeeds; ++seed) {
    ModelGradCheckConfig cfg;
    cfg.embedding_dim = 8;
    cfg.hidden = 8;
    cfg.length = 5;
    cfg.seed = seed;
    auto r = gradient_check_model(cfg);
    checked += r.checked;
    if (r.max_relative_error >= worst) {
      worst = r.max_relative_error;
      worst_param = r.worst_param;
    }
  }
  const double elapsed = seconds_since(start);
  return {worst < kGradTolerance && elapsed < kGradSeconds,
          std::to_string(kGradSeeds) + " seeds, " + std::to_string(checked) +
              " coordinates, max rel err " + fmt(worst) + " (" + worst_param + "), " +
              fmt(elapsed, 3) + " s"};
}

oracle::ScalarLstm to_oracle(const nn::LstmParams& p) {
  return {p.input_dim(), p.hidden(), p.W.value, p.U.value, p.b.value};
}

nn::LstmParams random_lstm(std::size_t d, std::size_t h, std::mt19937_64& rng) {
  nn::LstmParams p("lstm", d, h);
  nn::init_uniform(p.W, 0.5, rng);
  nn::init_uniform(p.U, 0.5, rng);
  nn::init_uniform(p.b, 0.5, rng);
  return p;
}

Outcome oracle_equivalence() {
  std::mt19937_64 engine(2024);
  gen::Rng rng(2024);
  double lstm_err = 0.0, bilstm_err = 0.0, f1_err = 0.0;
  for (std::size_t i = 0; i < kOracleInstances; ++i) {
    const std::size_t d = 1 + rng.index(8), h = 1 + rng.index(8);
    auto p = random_lstm(d, h, engine);
    auto x = gen::uniform_vector(rng, d, 2.0);
    nn::LstmState prev{gen::uniform_vector(rng, h, 1.0), gen::uniform_vector(rng, h, 1.0)};
    auto got = nn::lstm_step(x, prev, p);
    auto oh = prev.h, oc = prev.c;
    oracle::lstm_step(to_oracle(p), x, oh, oc);
    for (std::size_t j = 0; j < h; ++j)
      lstm_err = std::max({lstm_err, std::abs(got.h[j] - oh[j]), std::abs(got.c[j] - oc[j])});
  }
  for (std::size_t i = 0; i < kOracleInstances; ++i) {
    const std::size_t d = 1 + rng.index(6), h = 1 + rng.index(6), v = 12;
    auto fwd = random_lstm(d, h, engine), bwd = random_lstm(d, h, engine);
    nn::ParamTensor emb("emb", {v, d});
    nn::init_uniform(emb, 1.0, engine);
    std::vector<TokenId> ids(1 + rng.index(10));
    for (auto& id : ids) id = static_cast<TokenId>(rng.index(v));
    auto got = nn::bilstm_encode(ids, emb, fwd, bwd);
    auto want = oracle::bilstm(ids, emb.value, to_oracle(fwd), to_oracle(bwd));
    for (std::size_t t = 0; t < ids.size(); ++t)
      for (std::size_t j = 0; j < h; ++j)
        bilstm_err = std::max({bilstm_err, std::abs(got.forward_h[t][j] - want.forward_h[t][j]),
                               std::abs(got.backward_h[t][j] - want.backward_h[t][j])});
    for (std::size_t j = 0; j < h; ++j)
      bilstm_err = std::max({bilstm_err, std::abs(got.final_forward.c[j] - want.fwd_c[j]),
                             std::abs(got.final_backward.c[j] - want.bwd_c[j])});
  }
  for (std::size_t i = 0; i < kOracleInstances; ++i) {
    auto cm = gen::confusion_matrix(rng);
    if (cm.total() == 0) cm.counts[0][0] = 1;
    f1_err = std::max(f1_err, std::abs(macro_f1(cm) - oracle::macro_f1(cm)));
  }
  return {lstm_err <= kLstmOracleTolerance && bilstm_err <= kLstmOracleTolerance &&
              f1_err <= kMacroF1OracleTolerance,
          "lstm_step max diff " + fmt(lstm_err) + ", bilstm_encode max diff " + fmt(bilstm_err) +
              ", macro_f1 max diff " + fmt(f1_err) + " over " + std::to_string(kOracleInstances) +
              " instances each"};
}

Outcome vote_aggregation() {
  std::size_t agree = 0, retained = 0;
  for (auto a : kAllLabels)
    for (auto b : kAllLabels)
      for (auto c : kAllLabels) {
        const std::array<StanceLabel, 3> votes{a, b, c};
        const auto got = aggregate_votes(votes);
        const auto want = oracle::aggregate(votes);
        const bool same = got.retained == want.retained && (!want.retained || got.label == want.label);
        agree += same;
        retained += want.retained;
      }
  return {agree == 64, std::to_string(agree) + "/64 triples agree, " + std::to_string(retained) +
                           " retained"};
}

Outcome split_invariants() {
  SynthConfig cfg;
  cfg.n_topics = 40;
  std::vector<AnnotatedExample> xs;
  for (auto& x : synthesize_corpus(2000, 31, cfg)) {
    if (x.retained && xs.size() < 1000) xs.push_back(std::move(x));
  }
  std::set<std::string> all_topics;
  for (const auto& x : xs) all_topics.insert(x.topic);
  auto s = stratified_entity_split(xs, {}, 5);
  auto again = stratified_entity_split(xs, {}, 5);
  auto topics_of = [](const std::vector<AnnotatedExample>& part) {
    std::set<std::string> t;
    for (const auto& x : part) t.insert(x.topic);
    return t;
  };
  const auto tr = topics_of(s.train), va = topics_of(s.validation), te = topics_of(s.test);
  bool disjoint = true;
  for (const auto& t : tr) disjoint = disjoint && !va.count(t) && !te.count(t);
  for (const auto& t : va) disjoint = disjoint && !te.count(t);
  const double n = static_cast<double>(xs.size());
  const double ftr = s.train.size() / n, fva = s.validation.size() / n, fte = s.test.size() / n;
  const bool sizes = std::abs(ftr - 0.7) <= kSplitTolerance && std::abs(fva - 0.2) <= kSplitTolerance &&
                     std::abs(fte - 0.1) <= kSplitTolerance;
  const bool complete = s.train.size() + s.validation.size() + s.test.size() == xs.size();
  const bool deterministic =
      again.train == s.train && again.validation == s.validation && again.test == s.test;
  return {xs.size() == 1000 && all_topics.size() == 40 && disjoint && sizes && complete && deterministic,
          std::to_string(xs.size()) + " examples, " + std::to_string(all_topics.size()) +
              " topics; shares " + fmt(ftr, 3) + "/" + fmt(fva, 3) + "/" + fmt(fte, 3) +
              (disjoint ? ", disjoint" : ", OVERLAP") + (deterministic ? ", deterministic" : ", NONDETERMINISTIC")};
}

Outcome synthetic_label_mix() {
  auto xs = synthesize_corpus(10000, 1);
  std::map<StanceLabel, double> count;
  double retained = 0;
  for (const auto& x : xs) {
    if (!x.retained) continue;
    ++retained;
    ++count[*x.label];
  }
  const double rate = retained / xs.size();
  const std::map<StanceLabel, double> target{{StanceLabel::neutral, 0.4767},
                                             {StanceLabel::against, 0.219},
                                             {StanceLabel::favour, 0.1905},
                                             {StanceLabel::unrelated, 0.1138}};
  bool ok = std::abs(rate - 0.705) <= kShareTolerance;
  std::string detail = "retention " + fmt(rate, 4) + "; shares";
  for (auto [label, want] : target) {
    const double got = count[label] / retained;
    ok = ok && std::abs(got - want) <= kShareTolerance;
    detail += " " + std::string(to_string(label)) + " " + fmt(got, 4);
  }
  return {ok, detail};
}

Outcome learning_capability() {
  SynthConfig sc;
  sc.n_topics = 6;
  sc.contrast_rate = 0.0;
  auto pool = model_examples(synthesize_corpus(600, 21, sc));
  std::vector<AnnotatedExample> xs(pool.begin(), pool.begin() + std::min<std::size_t>(200, pool.size()));
  StanceModelConfig cfg;
  cfg.embedding_dim = 16;
  cfg.hidden = 16;
  cfg.lr = 1e-2;
  cfg.batch_size = 16;
  cfg.max_epochs = kLearnEpochs;
  cfg.patience = kLearnEpochs;
  cfg.seed = 3;
  const auto start = Clock::now();
  StanceModel model(vocabulary_for(xs), cfg);
  auto history = train(model, xs, xs);
  const double elapsed = seconds_since(start);
  const double acc = accuracy_on(model, xs);
  return {xs.size() == 200 && acc >= kLearnAccuracy && history.epochs.size() <= kLearnEpochs &&
              elapsed < kLearnSeconds,
          "train accuracy " + fmt(acc, 4) + " on " + std::to_string(xs.size()) + " examples, best epoch " +
              std::to_string(history.best_epoch) + "/" + std::to_string(history.epochs.size()) + ", " +
              fmt(elapsed, 3) + " s"};
}

Outcome model_beats_baseline() {
  SynthConfig sc;
  sc.n_topics = 6;
  sc.contrast_rate = 1.0;
  const auto topics = synthetic_topics(sc.n_topics, 7);
  auto train_set = model_examples(synthesize_corpus(2500, 7, sc));
  for (auto& x : synthesize_contrastive_set(topics, 300, 5)) train_set.push_back(std::move(x));
  const auto val_set = synthesize_contrastive_set(topics, 60, 8);
  const auto test_set = synthesize_contrastive_set(topics, 100, 99);

  StanceModelConfig mc;
  mc.embedding_dim = 16;
  mc.hidden = 32;
  mc.lr = 1e-2;
  mc.batch_size = 16;
  mc.max_epochs = 40;
  mc.patience = 10;
  mc.seed = 1;
  StanceModel model(vocabulary_for(train_set), mc);
  train(model, train_set, val_set);

  BaselineConfig bc;
  bc.use_topic_features = false;
  auto baseline = baseline_train(train_set, val_set, bc);

  std::vector<StanceLabel> pred;
  const double model_acc = accuracy_on(model, test_set, &pred);
  const double base_acc = accuracy_on(baseline, test_set);
  // Each text appears three times with three different gold labels.
  std::size_t pairs = 0, disagree = 0;
  for (std::size_t i = 0; i + 2 < test_set.size(); i += 3)
    for (std::size_t a = i; a < i + 3; ++a)
      for (std::size_t b = a + 1; b < i + 3; ++b) {
        ++pairs;
        disagree += pred[a] != pred[b];
      }
  return {model_acc - base_acc >= kModelBaselineGap,
          "model " + fmt(model_acc, 4) + " vs baseline " + fmt(base_acc, 4) + " (gap " +
              fmt(100 * (model_acc - base_acc), 3) + " points) on " + std::to_string(test_set.size()) +
              " contrastive examples; pair disagreement " + fmt(double(disagree) / pairs, 4)};
}

std::map<std::string, std::size_t> brute_force_out_degrees(const fs::path& nt) {
  std::ifstream in(nt);
  std::map<std::string, std::set<std::string>> edges;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    const auto s_end = line.find('>');
    const std::string subject = line.substr(1, s_end - 1);
    std::string rest = line.substr(s_end + 1);
    while (!rest.empty() && (rest.back() == ' ' || rest.back() == '.' || rest.back() == '\r')) rest.pop_back();
    while (!rest.empty() && rest.front() == ' ') rest.erase(0, 1);
    edges[subject].insert(rest);
  }
  std::map<std::string, std::size_t> out;
  for (const auto& [s, e] : edges) out[s] = e.size();
  return out;
}

std::vector<TopicCandidate> read_list(const std::string& file, TopicSource source) {
  std::ifstream in(std::string(STANCE_TEST_DATA "/") + file);
  std::vector<TopicCandidate> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    auto uri = line.rfind("http://dbpedia.org/", 0) == 0 ? line : wiki_url_to_dbpedia_uri(line);
    out.push_back(make_candidate(uri, source));
  }
  return out;
}

Outcome topic_curation() {
  const fs::path nt = STANCE_TEST_DATA "/curation.nt";
  const auto store = load_triples(nt);
  const auto degrees = brute_force_out_degrees(nt);
  std::vector<TopicCandidate> everyone;
  for (const auto& [s, d] : degrees) everyone.push_back(make_candidate(s, TopicSource::controversial));
  everyone.push_back(make_candidate("http://dbpedia.org/resource/Not_in_store", TopicSource::controversial));
  const auto ranked = rank_by_outdegree(store, everyone);
  bool rank_ok = ranked.size() == everyone.size();
  for (std::size_t i = 0; rank_ok && i < ranked.size(); ++i) {
    const auto it = degrees.find(ranked[i].uri);
    rank_ok = ranked[i].out_degree == (it == degrees.end() ? 0 : it->second);
    if (i) {
      const auto& p = ranked[i - 1];
      rank_ok = rank_ok && (p.out_degree > ranked[i].out_degree ||
                            (p.out_degree == ranked[i].out_degree && p.uri < ranked[i].uri));
    }
  }

  const bool abortion = wiki_url_to_dbpedia_uri("http://en.wikipedia.org/wiki/Abortion") ==
                        "http://dbpedia.org/resource/Abortion";

  const std::set<std::string> entity_types{std::string(kDbpediaPlace), std::string(kDbpediaPerson),
                                           std::string(kDbpediaOrganisation)};
  auto popular = read_list("popular.txt", TopicSource::popular);
  attach_types(store, popular);
  popular = filter_by_type(popular, entity_types, FilterMode::keep);
  auto controversial = read_list("controversial.txt", TopicSource::controversial);
  attach_types(store, controversial);
  controversial = filter_by_type(controversial, entity_types, FilterMode::drop);
  controversial = select_top_k(rank_by_outdegree(store, controversial), 300);
  auto political = read_list("political.txt", TopicSource::political);
  const auto topics = compose_topic_list(popular, controversial, political);

  return {store.size() <= 10000 && rank_ok && abortion && popular.size() == 44 &&
              controversial.size() == 300 && political.size() == 22 && topics.size() == kCuratedTotal,
          std::to_string(store.size()) + " triples; out-degree ranking " +
              (rank_ok ? "matches" : "DIFFERS FROM") + " brute force over " +
              std::to_string(everyone.size()) + " subjects; Abortion " + (abortion ? "ok" : "WRONG") +
              "; " + std::to_string(popular.size()) + "+" + std::to_string(controversial.size()) + "+" +
              std::to_string(political.size()) + " = " + std::to_string(topics.size())};
}

class RunningApi {
 public:
  explicit RunningApi(const StanceService& service) : api_(service) {
    port_ = api_.bind("127.0.0.1", 0);
    thread_ = std::thread([this] { api_.serve(); });
    api_.wait_until_ready();
  }
  ~RunningApi() {
    api_.stop();
    thread_.join();
  }
  httplib::Result get(const std::string& path) {
    httplib::Client c("127.0.0.1", port_);
    c.set_read_timeout(30, 0);
    return c.Get(path);
  }

 private:
  ApiServer api_;
  int port_ = 0;
  std::thread thread_;
};

std::set<std::string> keys_of(const nlohmann::json& j) {
  std::set<std::string> k;
  for (const auto& [key, v] : j.items()) k.insert(key);
  return k;
}

Outcome service_e2e() {
  const auto dir = scratch_dir("service");
  SynthConfig sc;
  sc.n_topics = 6;
  auto xs = model_examples(synthesize_corpus(400, 12, sc));
  StanceModelConfig mc;
  mc.embedding_dim = 8;
  mc.hidden = 8;
  mc.lr = 1e-2;
  mc.batch_size = 16;
  mc.max_epochs = 3;
  mc.patience = 3;
  StanceModel model(vocabulary_for(xs), mc);
  train(model, xs, xs);
  const auto ckpt = dir / "model.ckpt";
  model.save(ckpt);

  const auto ranks = ProminenceIndex::load(fs::path(STANCE_TEST_DATA "/ranks.tsv"));
  StanceService service(
      std::make_shared<FixtureProvider>(load_articles(fs::path(STANCE_TEST_DATA "/news_corpus.jsonl"))),
      ranks);
  service.load_model(ckpt);

  HttpProviderConfig broken_cfg;
  broken_cfg.credential_env.clear();
  broken_cfg.timeout = std::chrono::milliseconds(2000);
  {
    // A freshly closed port: connections are refused.
    httplib::Server probe;
    const int port = probe.bind_to_any_port("127.0.0.1");
    broken_cfg.endpoint = "http://127.0.0.1:" + std::to_string(port) + "/stories";
  }
  StanceService broken(std::make_shared<HttpProvider>(broken_cfg), ranks);
  broken.load_model(ckpt);

  std::vector<std::string> problems;
  int status_ok = 0, status_limit = 0, status_broken = 0;
  std::size_t count = 0;
  {
    RunningApi api(service);
    auto res = api.get("/api/analyze?q=Ireland%20AND%20brexit&topic=ireland");
    if (!res) {
      problems.push_back("no response");
    } else {
      status_ok = res->status;
      const auto j = nlohmann::json::parse(res->body);
      if (keys_of(j) != std::set<std::string>{"query", "topic", "count", "articles"})
        problems.push_back("top-level keys");
      const std::set<std::string> article_keys{"outlet", "url", "headline", "excerpt", "label",
                                               "probability", "x", "y", "published_at"};
      count = j["articles"].size();
      if (j["count"] != count || count == 0 || count > 50) problems.push_back("count");
      for (const auto& a : j["articles"]) {
        if (keys_of(a) != article_keys) problems.push_back("article keys");
        const double x = a["x"].get<double>();
        const auto y = a["y"].get<std::int64_t>();
        if (!(x >= -1.0 && x <= 1.0)) problems.push_back("x out of range");
        if (y < 1 || y > 1'000'000) problems.push_back("y out of range");
        if (!a["y"].is_number_integer() || !a["probability"].is_number()) problems.push_back("types");
        if (!parse_label(a["label"].get<std::string>())) problems.push_back("label");
        if (!parse_date(a["published_at"].get<std::string>())) problems.push_back("date");
      }
    }
    res = api.get("/api/analyze?q=Ireland%20AND%20brexit&topic=ireland&limit=51");
    status_limit = res ? res->status : -1;
  }
  {
    RunningApi api(broken);
    auto res = api.get("/api/analyze?q=Ireland%20AND%20brexit&topic=ireland");
    status_broken = res ? res->status : -1;
  }
  fs::remove_all(dir);
  return {problems.empty() && status_ok == 200 && status_limit == 400 && status_broken == 502,
          "analyze " + std::to_string(status_ok) + " with " + std::to_string(count) +
              " articles, limit 51 -> " + std::to_string(status_limit) + ", broken provider -> " +
              std::to_string(status_broken) +
              (problems.empty() ? "" : ", problems: " + problems.front())};
}

#ifdef STANCE_CLI
int run_cli(const std::string& args) {
  const std::string cmd = std::string(STANCE_CLI) + " " + args + " >/dev/null 2>&1";
  const int raw = std::system(cmd.c_str());
  return WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
}

std::string bytes_of(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}
#endif

Outcome determinism() {
#ifndef STANCE_CLI
  return {false, "stance-scope CLI was not built"};
#else
  const auto dir = scratch_dir("determinism");
  auto p = [&](const std::string& name) { return (dir / name).string(); };
  std::vector<std::string> compared, differing;
  int failures = 0;
  for (const char* run : {"1", "2"}) {
    const std::string r = run;
    failures += run_cli("synth-corpus --n 600 --topics 8 --seed 4 --out " + p("synth" + r + ".jsonl")) != 0;
    failures += run_cli("split --dataset " + p("synth1.jsonl") + " --seed 9 --out-dir " + p("split" + r)) != 0;
    failures += run_cli("train --split-dir " + p("split1") +
                        " --dim 8 --hidden 8 --lr 0.01 --epochs 3 --patience 3 --seed 2 --out " +
                        p("model" + r + ".ckpt") + " --history " + p("history" + r + ".jsonl")) != 0;
    failures += run_cli("train --split-dir " + p("split1") +
                        " --model baseline --epochs 3 --patience 3 --seed 2 --out " + p("base" + r + ".ckpt")) != 0;
  }
  const std::vector<std::pair<std::string, std::string>> pairs{
      {"synth1.jsonl", "synth2.jsonl"},
      {"split1/train.jsonl", "split2/train.jsonl"},
      {"split1/validation.jsonl", "split2/validation.jsonl"},
      {"split1/test.jsonl", "split2/test.jsonl"},
      {"model1.ckpt", "model2.ckpt"},
      {"history1.jsonl", "history2.jsonl"},
      {"base1.ckpt", "base2.ckpt"}};
  for (const auto& [a, b] : pairs) {
    const auto x = bytes_of(p(a)), y = bytes_of(p(b));
    compared.push_back(a);
    if (x.empty() || x != y) differing.push_back(a);
  }
  fs::remove_all(dir);
  return {failures == 0 && differing.empty(),
          std::to_string(compared.size() - differing.size()) + "/" + std::to_string(compared.size()) +
              " outputs byte-identical across two runs" +
              (failures ? ", " + std::to_string(failures) + " commands failed" : "") +
              (differing.empty() ? "" : ", first difference " + differing.front())};
#endif
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"gradient-integrity", gradient_integrity},
      {"oracle-equivalence", oracle_equivalence},
      {"vote-aggregation", vote_aggregation},
      {"split-invariants", split_invariants},
      {"synthetic-label-mix", synthetic_label_mix},
      {"learning-capability", learning_capability},
      {"model-beats-baseline", model_beats_baseline},
      {"topic-curation", topic_curation},
      {"service-e2e", service_e2e},
      {"determinism", determinism},
  };
  int failed = 0;
  for (const auto& [name, check] : criteria) {
    const auto start = Clock::now();
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failed += !o.pass;
    std::cout << (o.pass ? "PASS " : "FAIL ") << name << ": " << o.detail << " [" << fmt(seconds_since(start), 3)
              << " s]" << std::endl;
  }
  std::cout << (criteria.size() - failed) << "/" << criteria.size() << " criteria passed" << std::endl;
  return failed ? 1 : 0;
}
