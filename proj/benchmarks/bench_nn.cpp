#include <benchmark/benchmark.h>

#include <random>

#include "stance/corpus.hpp"
#include "stance/model.hpp"
#include "stance/nn.hpp"

using namespace stance;

namespace {

nn::LstmParams lstm(std::size_t d, std::size_t h, std::mt19937_64& rng) {
  nn::LstmParams p("lstm", d, h);
  p.initialize(rng, 0.1, 1.0);
  return p;
}

std::vector<TokenId> ids(std::size_t n, std::size_t vocab, std::mt19937_64& rng) {
  std::vector<TokenId> out(n);
  for (auto& id : out) id = static_cast<TokenId>(rng() % vocab);
  return out;
}

}  // namespace

static void BM_LstmStep(benchmark::State& state) {
  const auto h = static_cast<std::size_t>(state.range(0));
  std::mt19937_64 rng(1);
  auto p = lstm(100, h, rng);
  std::vector<double> x(100, 0.1);
  auto s = nn::LstmState::zeros(h);
  for (auto _ : state) {
    s = nn::lstm_step(x, s, p);
    benchmark::DoNotOptimize(s.h.data());
  }
}
BENCHMARK(BM_LstmStep)->Arg(32)->Arg(64)->Arg(128);

static void BM_BiLstmForward(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  std::mt19937_64 rng(2);
  auto fwd = lstm(100, 64, rng), bwd = lstm(100, 64, rng);
  nn::ParamTensor emb("emb", {500, 100});
  nn::init_uniform(emb, 0.1, rng);
  const auto seq = ids(n, 500, rng);
  for (auto _ : state) {
    auto out = nn::bilstm_encode(seq, emb, fwd, bwd);
    benchmark::DoNotOptimize(out.final_forward.h.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n));
}
BENCHMARK(BM_BiLstmForward)->Arg(16)->Arg(64)->Arg(128);

static void BM_BiLstmForwardBackward(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  std::mt19937_64 rng(3);
  auto fwd = lstm(100, 64, rng), bwd = lstm(100, 64, rng);
  nn::ParamTensor emb("emb", {500, 100});
  nn::init_uniform(emb, 0.1, rng);
  const auto seq = ids(n, 500, rng);
  const nn::LstmState dh{std::vector<double>(64, 0.01), std::vector<double>(64, 0.0)};
  for (auto _ : state) {
    nn::BiLstmTrace trace;
    auto out = nn::bilstm_encode(seq, emb, fwd, bwd, nullptr, &trace);
    auto grads = nn::bilstm_backward(trace, &emb, fwd, bwd, dh, dh);
    benchmark::DoNotOptimize(grads.forward.h.data());
    benchmark::DoNotOptimize(out.final_backward.h.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n));
}
BENCHMARK(BM_BiLstmForwardBackward)->Arg(16)->Arg(64)->Arg(128);

static void BM_ModelTrainStep(benchmark::State& state) {
  SynthConfig sc;
  sc.n_topics = 6;
  auto xs = model_examples(synthesize_corpus(200, 1, sc));
  StanceModelConfig cfg;
  cfg.embedding_dim = 100;
  cfg.hidden = 64;
  StanceModel model(vocabulary_for(xs), cfg);
  const auto& v = model.vocab();
  std::vector<std::pair<std::vector<TokenId>, std::vector<TokenId>>> encoded;
  for (const auto& x : xs)
    encoded.emplace_back(encode(tokenize(x.topic), v),
                         encode(model_input_tokens(x.context.headline, x.context.excerpt), v));
  std::size_t i = 0;
  for (auto _ : state) {
    const auto& [topic, article] = encoded[i % encoded.size()];
    benchmark::DoNotOptimize(model.accumulate_gradient(topic, article, class_index(*xs[i % xs.size()].label)));
    ++i;
  }
}
BENCHMARK(BM_ModelTrainStep);
