#include <iostream>
#include <set>
#include <string>
#include <vector>

#include "common.hpp"
#include "stance/corpus.hpp"
#include "stance/error.hpp"
#include "stance/query.hpp"
#include "stance/topics.hpp"

namespace cli {
namespace {

const std::set<std::string> kEntityTypes{
    "http://dbpedia.org/ontology/Place",
    "http://dbpedia.org/ontology/Person",
    "http://dbpedia.org/ontology/Organisation",
};

/// One Wikipedia URL or DBpedia resource URI per line.
std::vector<std::string> read_uri_list(const std::filesystem::path& path) {
  std::ifstream in(path);
  std::vector<std::string> out;
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    auto start = line.find_first_not_of(" \t\r");
    if (start == std::string::npos || line[start] == '#') continue;
    auto end = line.find_last_not_of(" \t\r");
    std::string item = line.substr(start, end - start + 1);
    if (item.rfind("http://dbpedia.org/resource/", 0) == 0) {
      out.push_back(std::move(item));
      continue;
    }
    try {
      out.push_back(stance::wiki_url_to_dbpedia_uri(item));
    } catch (const std::invalid_argument& e) {
      throw stance::DataError(path.string() + ": " + stance::LineError(n, e.what()).what());
    }
  }
  return out;
}

std::vector<stance::TopicCandidate> candidates(const std::vector<std::string>& uris,
                                               stance::TopicSource source) {
  std::vector<stance::TopicCandidate> out;
  out.reserve(uris.size());
  for (const auto& u : uris) out.push_back(stance::make_candidate(u, source));
  return out;
}

struct CurateOptions {
  std::filesystem::path triples, controversial, political, popular, corpus, neutral, out;
  std::size_t top_k = 300;
  std::size_t per_month = 10;
  std::uint64_t seed = 1;
};

void run_curate(const CurateOptions& o) {
  require_file(o.triples, "triples file");
  require_file(o.controversial, "controversial list");
  for (const auto* p : {&o.political, &o.popular, &o.corpus, &o.neutral}) {
    if (!p->empty()) require_file(*p, "input file");
  }
  if (!o.corpus.empty() && o.popular.empty())
    throw UsageError("--corpus needs --popular candidates to count");

  const auto store = stance::load_triples(o.triples);

  std::vector<stance::TopicCandidate> popular;
  if (!o.popular.empty()) {
    popular = candidates(read_uri_list(o.popular), stance::TopicSource::popular);
    std::set<std::string> neutral;
    if (!o.neutral.empty()) {
      for (auto& u : read_uri_list(o.neutral)) neutral.insert(std::move(u));
    }
    if (!o.corpus.empty()) {
      const auto articles = stance::load_articles(o.corpus);
      popular = stance::popular_by_month(articles, popular, o.per_month, neutral);
    } else {
      std::erase_if(popular, [&](const auto& c) { return neutral.count(c.uri) != 0; });
    }
    stance::attach_types(store, popular);
    popular = stance::filter_by_type(popular, kEntityTypes, stance::FilterMode::keep);
  }

  auto controversial =
      candidates(read_uri_list(o.controversial), stance::TopicSource::controversial);
  stance::attach_types(store, controversial);
  controversial = stance::filter_by_type(controversial, kEntityTypes, stance::FilterMode::drop);
  controversial = stance::select_top_k(stance::rank_by_outdegree(store, controversial), o.top_k);

  std::vector<stance::TopicCandidate> political;
  if (!o.political.empty())
    political = candidates(read_uri_list(o.political), stance::TopicSource::political);

  const auto topics = stance::compose_topic_list(popular, controversial, political);
  auto out = open_output(o.out);
  stance::save_topic_list(topics, out);
  std::size_t counts[3] = {0, 0, 0};
  for (const auto& t : topics) ++counts[static_cast<int>(t.source)];
  std::cout << "popular " << counts[0] << "\ncontroversial " << counts[1] << "\npolitical "
            << counts[2] << "\ntotal " << topics.size() << '\n';
}

struct BuildOptions {
  std::filesystem::path corpus, topics, out;
  std::size_t window = 2;
  std::uint64_t seed = 1;
};

void run_build(const BuildOptions& o) {
  require_file(o.corpus, "article corpus");
  require_file(o.topics, "topic list");
  const auto articles = stance::load_articles(o.corpus);
  std::ifstream tin(o.topics);
  const auto topics = stance::load_topic_list(tin);

  std::vector<stance::ContextRecord> records;
  std::size_t skipped = 0;
  for (const auto& topic : topics) {
    const auto query = stance::topic_query(topic.display_name);
    for (const auto& a : articles) {
      if (!stance::match(query, a)) continue;
      try {
        char id[32];
        std::snprintf(id, sizeof id, "ctx-%06zu", records.size());
        records.push_back({id, a.id, topic.display_name,
                           stance::extract_context_window(a, topic.display_name, o.window)});
      } catch (const stance::DataError&) {
        ++skipped;
      }
    }
  }
  auto out = open_output(o.out);
  stance::save_contexts(records, out);
  std::cout << "contexts " << records.size() << '\n';
  if (skipped) std::cerr << "skipped " << skipped << " empty articles\n";
}

struct AggregateOptions {
  std::filesystem::path votes, out;
  bool keep_discarded = false;
  std::uint64_t seed = 1;
};

void run_aggregate(const AggregateOptions& o) {
  require_file(o.votes, "vote file");
  const auto examples = stance::load_dataset(o.votes);
  std::vector<stance::AnnotatedExample> kept;
  for (const auto& e : examples) {
    if (e.retained || o.keep_discarded) kept.push_back(e);
  }
  std::size_t retained = 0;
  for (const auto& e : examples) retained += e.retained ? 1 : 0;
  auto out = open_output(o.out);
  stance::save_dataset(kept, out);
  std::cout << "examples " << examples.size() << "\nretained " << retained << '\n';
  if (!examples.empty()) {
    std::cout << "retention " << static_cast<double>(retained) / static_cast<double>(examples.size())
              << '\n';
  }
}

struct SplitOptions {
  std::filesystem::path dataset, out_dir;
  double train = 0.7, validation = 0.2, test = 0.1;
  std::uint64_t seed = 1;
};

void run_split(const SplitOptions& o) {
  require_file(o.dataset, "dataset");
  auto examples = stance::load_dataset(o.dataset);
  const auto before = examples.size();
  std::erase_if(examples, [](const auto& e) { return !e.retained; });
  if (examples.size() != before)
    std::cerr << "dropped " << before - examples.size() << " discarded examples\n";
  if (examples.empty()) throw stance::DataError("no retained examples in " + o.dataset.string());

  const auto split = stance::stratified_entity_split(examples, {o.train, o.validation, o.test}, o.seed);
  for (const auto& w : split.warnings) std::cerr << "warning: " << w << '\n';
  const std::pair<const char*, const std::vector<stance::AnnotatedExample>*> parts[] = {
      {"train", &split.train}, {"validation", &split.validation}, {"test", &split.test}};
  for (const auto& [name, part] : parts) {
    auto out = open_output(o.out_dir / (std::string(name) + ".jsonl"));
    stance::save_dataset(*part, out);
    std::cout << name << ' ' << part->size() << '\n';
  }
}

struct SynthOptions {
  std::size_t n = 1000;
  std::size_t topics = 40;
  double contrast_rate = 0.5;
  std::size_t contrastive_texts = 0;
  std::filesystem::path out;
  std::uint64_t seed = 1;
};

void run_synth(const SynthOptions& o) {
  stance::SynthConfig cfg;
  cfg.n_topics = o.topics;
  cfg.contrast_rate = o.contrast_rate;
  const auto examples = o.contrastive_texts
                            ? stance::synthesize_contrastive_set(o.contrastive_texts, o.seed, cfg)
                            : stance::synthesize_corpus(o.n, o.seed, cfg);
  auto out = open_output(o.out);
  stance::save_dataset(examples, out);
  std::cout << "examples " << examples.size() << '\n';
}

}  // namespace

void register_data_commands(CLI::App& app) {
  {
    auto o = std::make_shared<CurateOptions>();
    auto* cmd = app.add_subcommand("curate-topics", "Build the topic list from DBpedia triples and source lists");
    cmd->add_option("--triples", o->triples, "DBpedia N-Triples file")->required();
    cmd->add_option("--controversial", o->controversial, "Wikipedia URLs of controversial issues")->required();
    cmd->add_option("--political", o->political, "Curated political figures (URLs or URIs)");
    cmd->add_option("--popular", o->popular, "Popular entity candidates (URLs or URIs)");
    cmd->add_option("--corpus", o->corpus, "Articles used to rank --popular by monthly mentions");
    cmd->add_option("--per-month", o->per_month, "Popular entities kept per month")->capture_default_str();
    cmd->add_option("--neutral", o->neutral, "Entities excluded from the popular list");
    cmd->add_option("--top-k", o->top_k, "Controversial topics kept after ranking")->capture_default_str();
    cmd->add_option("--out", o->out, "Output topic list (JSONL)")->required();
    add_seed(*cmd, o->seed);
    cmd->callback([o] { run_curate(*o); });
  }
  {
    auto o = std::make_shared<BuildOptions>();
    auto* cmd = app.add_subcommand("build-dataset", "Extract annotation contexts for every topic mention");
    cmd->add_option("--corpus", o->corpus, "Article corpus (JSONL)")->required();
    cmd->add_option("--topics", o->topics, "Topic list from curate-topics")->required();
    cmd->add_option("--window", o->window, "Sentences kept on each side of the mention")->capture_default_str();
    cmd->add_option("--out", o->out, "Output context records (JSONL)")->required();
    add_seed(*cmd, o->seed);
    cmd->callback([o] { run_build(*o); });
  }
  {
    auto o = std::make_shared<AggregateOptions>();
    auto* cmd = app.add_subcommand("aggregate", "Resolve three votes per example by majority");
    cmd->add_option("--votes", o->votes, "Context records with a `votes` array (JSONL)")->required();
    cmd->add_option("--out", o->out, "Output dataset (JSONL)")->required();
    cmd->add_flag("--keep-discarded", o->keep_discarded, "Also write examples without a majority");
    add_seed(*cmd, o->seed);
    cmd->callback([o] { run_aggregate(*o); });
  }
  {
    auto o = std::make_shared<SplitOptions>();
    auto* cmd = app.add_subcommand("split", "Split a dataset with disjoint topics per part");
    cmd->add_option("--dataset", o->dataset, "Dataset (JSONL)")->required();
    cmd->add_option("--out-dir", o->out_dir, "Directory for train/validation/test.jsonl")->required();
    cmd->add_option("--train", o->train, "Train share")->capture_default_str();
    cmd->add_option("--validation", o->validation, "Validation share")->capture_default_str();
    cmd->add_option("--test", o->test, "Test share")->capture_default_str();
    add_seed(*cmd, o->seed);
    cmd->callback([o] { run_split(*o); });
  }
  {
    auto o = std::make_shared<SynthOptions>();
    auto* cmd = app.add_subcommand("synth-corpus", "Generate a synthetic annotated dataset");
    cmd->add_option("--n", o->n, "Number of examples")->capture_default_str()->check(CLI::PositiveNumber);
    cmd->add_option("--topics", o->topics, "Number of synthetic topics")->capture_default_str();
    cmd->add_option("--contrast-rate", o->contrast_rate,
                    "Share of texts where another entity has a different stance")
        ->capture_default_str();
    cmd->add_option("--contrastive", o->contrastive_texts,
                    "Emit a contrastive set of this many texts (3 examples each) instead");
    cmd->add_option("--out", o->out, "Output dataset (JSONL)")->required();
    add_seed(*cmd, o->seed);
    cmd->callback([o] { run_synth(*o); });
  }
}

}  // namespace cli
