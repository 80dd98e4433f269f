#include "stance/model.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "fit.hpp"
#include "json.hpp"
#include "stance/checkpoint.hpp"
#include "stance/error.hpp"

namespace stance {

using nlohmann::json;

StancePrediction StancePrediction::from_distribution(std::span<const double> p) {
  if (p.size() != kNumClasses) throw std::invalid_argument("prediction needs 3 probabilities");
  StancePrediction out;
  std::size_t best = 0;
  for (std::size_t k = 0; k < kNumClasses; ++k) {
    out.distribution[k] = p[k];
    if (p[k] > p[best]) best = k;
  }
  out.label = label_from_class(best);
  out.probability = p[best];
  return out;
}

Tokens model_input_tokens(std::string_view headline, std::string_view excerpt,
                          std::size_t max_length) {
  Tokens out = tokenize(headline);
  auto body = tokenize(excerpt);
  out.insert(out.end(), std::make_move_iterator(body.begin()), std::make_move_iterator(body.end()));
  if (out.size() > max_length) out.resize(max_length);
  return out;
}

StancePrediction StanceClassifier::predict(std::string_view topic, std::string_view headline,
                                           std::string_view excerpt) const {
  auto topic_tokens = tokenize(topic);
  auto article_tokens = model_input_tokens(headline, excerpt);
  return classify(topic_tokens, article_tokens);
}

StancePrediction StanceClassifier::predict(const AnnotatedExample& example) const {
  return predict(example.topic, example.context.headline, example.context.excerpt);
}

void write_history(std::ostream& out, const TrainingHistory& history) {
  for (const auto& e : history.epochs) {
    json rec;
    rec["epoch"] = e.epoch;
    rec["train_loss"] = e.train_loss;
    rec["val_accuracy"] = e.val_accuracy;
    rec["val_macro_f1"] = e.val_macro_f1;
    out << rec.dump() << '\n';
  }
}

std::vector<AnnotatedExample> model_examples(std::span<const AnnotatedExample> examples) {
  std::vector<AnnotatedExample> out;
  for (const auto& ex : examples) {
    if (ex.retained && ex.label && is_model_label(*ex.label)) out.push_back(ex);
  }
  return out;
}

// ---------------------------------------------------------------------------

void StanceModelConfig::validate() const {
  if (embedding_dim == 0 || hidden == 0 || batch_size == 0 || max_epochs == 0 || max_length == 0) {
    throw std::invalid_argument("model sizes, batch size and epochs must be positive");
  }
  if (!(lr > 0) || !(clip_norm > 0) || !(init_range > 0)) {
    throw std::invalid_argument("lr, clip_norm and init_range must be positive");
  }
  if (patience > max_epochs) throw std::invalid_argument("patience must not exceed max_epochs");
}

StanceModel::StanceModel(Vocabulary vocab, StanceModelConfig config,
                         const EmbeddingMatrix* pretrained)
    : vocab_(std::move(vocab)), config_(config) {
  config_.validate();
  const std::size_t d = config_.embedding_dim, h = config_.hidden;
  embedding_ = nn::ParamTensor("embedding", {vocab_.size(), d});
  topic_fwd_ = nn::LstmParams("topic.fwd", d, h);
  topic_bwd_ = nn::LstmParams("topic.bwd", d, h);
  article_fwd_ = nn::LstmParams("article.fwd", d, h);
  article_bwd_ = nn::LstmParams("article.bwd", d, h);
  out_W_ = nn::ParamTensor("output.W", {kNumClasses, 2 * h});
  out_b_ = nn::ParamTensor("output.b", {kNumClasses});

  std::mt19937_64 rng(config_.seed);
  nn::init_uniform(embedding_, config_.init_range, rng);
  for (auto* lstm : {&topic_fwd_, &topic_bwd_, &article_fwd_, &article_bwd_}) {
    lstm->initialize(rng, config_.init_range, 1.0);
  }
  nn::init_uniform(out_W_, config_.init_range, rng);

  if (pretrained) {
    if (pretrained->rows != vocab_.size() || pretrained->dim != d) {
      throw std::invalid_argument("pretrained embedding shape does not match vocab x embedding_dim");
    }
    // Vocabulary tokens absent from the pretrained file are zero rows there
    // and start from zero here too.
    embedding_.value = pretrained->values;
  }
  std::fill(embedding_.value.begin(), embedding_.value.begin() + static_cast<std::ptrdiff_t>(d), 0.0);
}

nn::ParamList StanceModel::parameters() {
  nn::ParamList out;
  if (!config_.freeze_embeddings) out.push_back(&embedding_);
  for (auto* lstm : {&topic_fwd_, &topic_bwd_, &article_fwd_, &article_bwd_}) {
    for (auto* p : lstm->parameters()) out.push_back(p);
  }
  out.push_back(&out_W_);
  out.push_back(&out_b_);
  return out;
}

std::vector<const nn::ParamTensor*> StanceModel::tensors() const {
  std::vector<const nn::ParamTensor*> out{&embedding_};
  for (const auto* lstm : {&topic_fwd_, &topic_bwd_, &article_fwd_, &article_bwd_}) {
    out.push_back(&lstm->W);
    out.push_back(&lstm->U);
    out.push_back(&lstm->b);
  }
  out.push_back(&out_W_);
  out.push_back(&out_b_);
  return out;
}

namespace {

std::span<const TokenId> clip(std::span<const TokenId> ids, std::size_t max_length) {
  return ids.size() > max_length ? ids.first(max_length) : ids;
}

std::vector<double> concat(const std::vector<double>& a, const std::vector<double>& b) {
  std::vector<double> out(a);
  out.insert(out.end(), b.begin(), b.end());
  return out;
}

}  // namespace

StancePrediction StanceModel::forward(std::span<const TokenId> topic,
                                      std::span<const TokenId> article) const {
  if (topic.empty()) throw std::invalid_argument("conditional_forward: empty topic");
  if (article.empty()) throw std::invalid_argument("conditional_forward: empty article");
  topic = clip(topic, config_.max_length);
  article = clip(article, config_.max_length);
  auto t = nn::bilstm_encode(topic, embedding_, topic_fwd_, topic_bwd_);
  nn::BiLstmInit init{std::move(t.final_forward), std::move(t.final_backward)};
  auto a = nn::bilstm_encode(article, embedding_, article_fwd_, article_bwd_, &init);
  auto probs = nn::affine_softmax(concat(a.final_forward.h, a.final_backward.h), out_W_, out_b_);
  return StancePrediction::from_distribution(probs);
}

double StanceModel::loss(std::span<const TokenId> topic, std::span<const TokenId> article,
                         std::size_t gold) const {
  auto pred = forward(topic, article);
  return nn::cross_entropy(pred.distribution, gold);
}

double StanceModel::accumulate_gradient(std::span<const TokenId> topic,
                                        std::span<const TokenId> article, std::size_t gold,
                                        double scale) {
  if (topic.empty()) throw std::invalid_argument("conditional_forward: empty topic");
  if (article.empty()) throw std::invalid_argument("conditional_forward: empty article");
  topic = clip(topic, config_.max_length);
  article = clip(article, config_.max_length);

  nn::BiLstmTrace topic_trace, article_trace;
  auto t = nn::bilstm_encode(topic, embedding_, topic_fwd_, topic_bwd_, nullptr, &topic_trace);
  nn::BiLstmInit init{std::move(t.final_forward), std::move(t.final_backward)};
  auto a = nn::bilstm_encode(article, embedding_, article_fwd_, article_bwd_, &init, &article_trace);
  const auto features = concat(a.final_forward.h, a.final_backward.h);
  const auto probs = nn::affine_softmax(features, out_W_, out_b_);
  const double loss = nn::cross_entropy(probs, gold);

  auto dlogits = nn::softmax_cross_entropy_grad(probs, gold);
  for (auto& g : dlogits) g *= scale;
  auto dfeat = nn::affine_backward(features, out_W_, out_b_, dlogits);

  const std::size_t h = config_.hidden;
  nn::LstmState d_fwd{{dfeat.begin(), dfeat.begin() + static_cast<std::ptrdiff_t>(h)},
                      std::vector<double>(h)};
  nn::LstmState d_bwd{{dfeat.begin() + static_cast<std::ptrdiff_t>(h), dfeat.end()},
                      std::vector<double>(h)};
  nn::ParamTensor* emb = config_.freeze_embeddings ? nullptr : &embedding_;
  auto d_init = nn::bilstm_backward(article_trace, emb, article_fwd_, article_bwd_, d_fwd, d_bwd);
  nn::bilstm_backward(topic_trace, emb, topic_fwd_, topic_bwd_, d_init.forward, d_init.backward);
  return loss;
}

StancePrediction StanceModel::classify(std::span<const std::string> topic_tokens,
                                       std::span<const std::string> article_tokens) const {
  auto topic = encode(topic_tokens, vocab_);
  auto article = encode(article_tokens, vocab_);
  return forward(topic, article);
}

StancePrediction conditional_forward(std::span<const TokenId> topic_ids,
                                     std::span<const TokenId> article_ids,
                                     const StanceModel& model) {
  return model.forward(topic_ids, article_ids);
}

// ---------------------------------------------------------------------------
// Persistence

void StanceModel::save(std::ostream& out) const {
  json meta;
  meta["kind"] = std::string(kKind);
  meta["config"] = {{"embedding_dim", config_.embedding_dim},
                    {"hidden", config_.hidden},
                    {"lr", config_.lr},
                    {"batch_size", config_.batch_size},
                    {"max_epochs", config_.max_epochs},
                    {"patience", config_.patience},
                    {"seed", config_.seed},
                    {"max_length", config_.max_length},
                    {"freeze_embeddings", config_.freeze_embeddings},
                    {"clip_norm", config_.clip_norm},
                    {"init_range", config_.init_range}};
  std::vector<std::uint64_t> counts;
  for (std::size_t i = 0; i < vocab_.size(); ++i) counts.push_back(vocab_.count(static_cast<TokenId>(i)));
  meta["vocab"] = vocab_.tokens();
  meta["vocab_counts"] = counts;
  auto tensors = this->tensors();
  write_checkpoint(out, meta.dump(), tensors);
}

void StanceModel::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write checkpoint " + path.string());
  save(out);
}

namespace {

void restore(nn::ParamTensor& dst, const Checkpoint& ck) {
  const auto& src = ck.tensor(dst.name);
  if (src.shape != dst.shape) throw DataError("checkpoint tensor '" + dst.name + "' has wrong shape");
  dst.value = src.value;
}

}  // namespace

StanceModel StanceModel::load(std::istream& in) {
  auto ck = read_checkpoint(in);
  json meta;
  try {
    meta = json::parse(ck.metadata);
  } catch (const json::exception& e) {
    throw DataError(std::string("checkpoint metadata is not JSON: ") + e.what());
  }
  if (meta.value("kind", "") != kKind) throw DataError("checkpoint is not a conditional-bilstm model");

  StanceModel m;
  try {
    const auto& c = meta.at("config");
    m.config_.embedding_dim = c.at("embedding_dim").get<std::size_t>();
    m.config_.hidden = c.at("hidden").get<std::size_t>();
    m.config_.lr = c.at("lr").get<double>();
    m.config_.batch_size = c.at("batch_size").get<std::size_t>();
    m.config_.max_epochs = c.at("max_epochs").get<std::size_t>();
    m.config_.patience = c.at("patience").get<std::size_t>();
    m.config_.seed = c.at("seed").get<std::uint64_t>();
    m.config_.max_length = c.at("max_length").get<std::size_t>();
    m.config_.freeze_embeddings = c.at("freeze_embeddings").get<bool>();
    m.config_.clip_norm = c.at("clip_norm").get<double>();
    m.config_.init_range = c.at("init_range").get<double>();
    const auto& tokens = meta.at("vocab");
    const auto& counts = meta.at("vocab_counts");
    if (tokens.size() != counts.size() || tokens.size() < 2) throw DataError("checkpoint vocab is malformed");
    for (std::size_t i = 2; i < tokens.size(); ++i) {
      m.vocab_.add(tokens[i].get<std::string>(), counts[i].get<std::uint64_t>());
    }
  } catch (const json::exception& e) {
    throw DataError(std::string("checkpoint metadata: ") + e.what());
  }
  m.config_.validate();

  const std::size_t d = m.config_.embedding_dim, h = m.config_.hidden;
  m.embedding_ = nn::ParamTensor("embedding", {m.vocab_.size(), d});
  m.topic_fwd_ = nn::LstmParams("topic.fwd", d, h);
  m.topic_bwd_ = nn::LstmParams("topic.bwd", d, h);
  m.article_fwd_ = nn::LstmParams("article.fwd", d, h);
  m.article_bwd_ = nn::LstmParams("article.bwd", d, h);
  m.out_W_ = nn::ParamTensor("output.W", {kNumClasses, 2 * h});
  m.out_b_ = nn::ParamTensor("output.b", {kNumClasses});
  for (auto* p : m.parameters()) restore(*p, ck);
  if (m.config_.freeze_embeddings) restore(m.embedding_, ck);
  return m;
}

StanceModel StanceModel::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open checkpoint " + path.string());
  return load(in);
}

std::unique_ptr<StanceClassifier> load_classifier(const std::filesystem::path& path) {
  auto ck = read_checkpoint(path);
  std::string kind;
  try {
    kind = json::parse(ck.metadata).value("kind", "");
  } catch (const json::exception&) {
    throw DataError("checkpoint metadata is not JSON: " + path.string());
  }
  if (kind == StanceModel::kKind) return std::make_unique<StanceModel>(StanceModel::load(path));
  if (kind == BaselineModel::kKind) return std::make_unique<BaselineModel>(BaselineModel::load(path));
  throw DataError("unknown checkpoint kind '" + kind + "' in " + path.string());
}

// ---------------------------------------------------------------------------
// Training

Vocabulary vocabulary_for(std::span<const AnnotatedExample> examples, std::uint64_t min_count) {
  std::vector<Tokens> streams;
  streams.reserve(2 * examples.size());
  for (const auto& ex : examples) {
    streams.push_back(tokenize(ex.topic));
    streams.push_back(model_input_tokens(ex.context.headline, ex.context.excerpt));
  }
  return build_vocab(streams, min_count);
}

namespace {

struct EncodedExample {
  std::vector<TokenId> topic;
  std::vector<TokenId> article;
  std::size_t gold = 0;
  std::string id;
};

std::vector<EncodedExample> encode_all(std::span<const AnnotatedExample> examples,
                                       const StanceModel& model) {
  std::vector<EncodedExample> out;
  for (const auto& ex : model_examples(examples)) {
    EncodedExample e;
    e.topic = encode(tokenize(ex.topic), model.vocab());
    e.article = encode(model_input_tokens(ex.context.headline, ex.context.excerpt,
                                          model.config().max_length),
                       model.vocab());
    if (e.topic.empty() || e.article.empty()) {
      throw DataError("example '" + ex.id + "' has an empty topic or text");
    }
    e.gold = class_index(*ex.label);
    e.id = ex.id;
    out.push_back(std::move(e));
  }
  return out;
}

}  // namespace

TrainingHistory train(StanceModel& model, std::span<const AnnotatedExample> train_set,
                      std::span<const AnnotatedExample> validation_set) {
  const auto& c = model.config();
  detail::FitOptions opt{c.lr, c.batch_size, c.max_epochs, c.patience, c.seed, c.clip_norm};
  return detail::fit(
      model, encode_all(train_set, model), encode_all(validation_set, model), opt,
      [](StanceModel& m, const EncodedExample& s, double scale) {
        return m.accumulate_gradient(s.topic, s.article, s.gold, scale);
      },
      [](const StanceModel& m, const EncodedExample& s) { return m.forward(s.topic, s.article); });
}

TrainingHistory train(StanceModel& model, const DatasetSplit& split) {
  return train(model, split.train, split.validation);
}

nn::GradCheckResult gradient_check_model(const ModelGradCheckConfig& cfg) {
  std::mt19937_64 rng(cfg.seed);
  Vocabulary vocab;
  for (std::size_t i = 0; i + 2 < cfg.vocab_size; ++i) vocab.add("w" + std::to_string(i), 1);

  StanceModelConfig mc;
  mc.embedding_dim = cfg.embedding_dim;
  mc.hidden = cfg.hidden;
  mc.seed = cfg.seed;
  mc.init_range = 0.5;
  StanceModel model(std::move(vocab), mc);

  std::uniform_int_distribution<TokenId> tok(0, static_cast<TokenId>(model.vocab().size() - 1));
  std::vector<TokenId> topic(cfg.length), article(cfg.length);
  for (auto& t : topic) t = tok(rng);
  for (auto& t : article) t = tok(rng);
  const std::size_t gold = std::uniform_int_distribution<std::size_t>(0, kNumClasses - 1)(rng);

  auto params = model.parameters();
  nn::zero_grads(params);
  model.accumulate_gradient(topic, article, gold, 1.0);
  return nn::gradient_check([&] { return model.loss(topic, article, gold); }, params, cfg.eps);
}

}  // namespace stance
