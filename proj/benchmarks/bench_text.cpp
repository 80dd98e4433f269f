#include <benchmark/benchmark.h>

#include "stance/corpus.hpp"
#include "stance/model.hpp"
#include "stance/query.hpp"
#include "stance/text.hpp"

using namespace stance;

namespace {

const char* kQuery = R"((Trump OR Clinton) AND "gun control" AND NOT_AN_OPERATOR OR (Ireland AND brexit))";

std::vector<Article> articles(std::size_t n) {
  SynthConfig sc;
  sc.n_topics = 12;
  std::vector<Article> out;
  std::size_t i = 0;
  for (const auto& x : synthesize_corpus(n, 5, sc)) {
    Article a;
    a.id = "a" + std::to_string(i++);
    a.headline = x.context.headline;
    a.body = x.context.excerpt + " Lawmakers discussed gun control and brexit in Ireland.";
    out.push_back(std::move(a));
  }
  return out;
}

}  // namespace

static void BM_ParseQuery(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(parse_query(kQuery));
}
BENCHMARK(BM_ParseQuery);

static void BM_MatchQuery(benchmark::State& state) {
  const auto q = parse_query(kQuery);
  const auto corpus = articles(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    std::size_t hits = 0;
    for (const auto& a : corpus) hits += match(q, a);
    benchmark::DoNotOptimize(hits);
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_MatchQuery)->Arg(100)->Arg(1000);

static void BM_Tokenize(benchmark::State& state) {
  const auto corpus = articles(50);
  for (auto _ : state)
    for (const auto& a : corpus) benchmark::DoNotOptimize(tokenize(a.body));
  state.SetItemsProcessed(state.iterations() * 50);
}
BENCHMARK(BM_Tokenize);

static void BM_FeaturizeNgrams(benchmark::State& state) {
  const auto toks = tokenize(articles(1).front().body);
  const auto n_max = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(featurize_ngrams(toks, n_max));
}
BENCHMARK(BM_FeaturizeNgrams)->Arg(1)->Arg(3);
