#include <cstdio>
#include <iostream>
#include <map>

#include "json.hpp"

#include "common.hpp"
#include "stance/corpus.hpp"
#include "stance/error.hpp"
#include "stance/metrics.hpp"
#include "stance/model.hpp"
#include "stance/service.hpp"

namespace cli {
namespace {

struct TrainOptions {
  std::filesystem::path train, validation, split_dir, embeddings, out, history;
  std::string model = "conditional";
  std::size_t dim = 100, hidden = 64, batch = 32, epochs = 50, patience = 5;
  std::size_t max_length = stance::kMaxSequenceLength, ngram = 3;
  double lr = -1.0;
  bool freeze = false, topic_features = false;
  std::uint64_t seed = 1;
};

void run_train(const TrainOptions& o) {
  auto train_path = o.train, val_path = o.validation;
  if (!o.split_dir.empty()) {
    if (!train_path.empty() || !val_path.empty())
      throw UsageError("--split-dir excludes --train/--validation");
    train_path = o.split_dir / "train.jsonl";
    val_path = o.split_dir / "validation.jsonl";
  }
  if (train_path.empty() || val_path.empty())
    throw UsageError("need --split-dir or both --train and --validation");
  require_file(train_path, "training set");
  require_file(val_path, "validation set");
  if (!o.embeddings.empty()) require_file(o.embeddings, "embeddings file");
  if (o.model == "baseline" && !o.embeddings.empty())
    throw UsageError("--embeddings applies to the conditional model only");

  const auto train_set = stance::load_dataset(train_path);
  const auto val_set = stance::load_dataset(val_path);

  if (o.out.has_parent_path()) std::filesystem::create_directories(o.out.parent_path());
  stance::TrainingHistory history;
  if (o.model == "baseline") {
    stance::BaselineConfig cfg;
    cfg.n_max = o.ngram;
    cfg.use_topic_features = o.topic_features;
    if (o.lr > 0) cfg.lr = o.lr;
    cfg.batch_size = o.batch;
    cfg.max_epochs = o.epochs;
    cfg.patience = o.patience;
    cfg.seed = o.seed;
    auto model = stance::baseline_train(train_set, val_set, cfg, &history);
    model.save(o.out);
  } else {
    stance::StanceModelConfig cfg;
    cfg.embedding_dim = o.dim;
    cfg.hidden = o.hidden;
    if (o.lr > 0) cfg.lr = o.lr;
    cfg.batch_size = o.batch;
    cfg.max_epochs = o.epochs;
    cfg.patience = o.patience;
    cfg.seed = o.seed;
    cfg.max_length = o.max_length;
    cfg.freeze_embeddings = o.freeze;
    cfg.validate();

    std::vector<stance::AnnotatedExample> both(train_set);
    both.insert(both.end(), val_set.begin(), val_set.end());
    auto vocab = stance::vocabulary_for(both);
    std::optional<stance::EmbeddingMatrix> pretrained;
    if (!o.embeddings.empty()) pretrained = stance::load_embeddings(o.embeddings, vocab, o.dim);
    stance::StanceModel model(std::move(vocab), cfg, pretrained ? &*pretrained : nullptr);
    history = stance::train(model, train_set, val_set);
    model.save(o.out);
  }

  if (!o.history.empty()) {
    auto out = open_output(o.history);
    stance::write_history(out, history);
  }
  const auto& best = history.epochs.at(history.best_epoch - 1);
  std::cout << "epochs " << history.epochs.size() << "\nbest_epoch " << history.best_epoch
            << "\nval_accuracy " << best.val_accuracy << "\nval_macro_f1 " << best.val_macro_f1
            << '\n';
}

struct EvaluateOptions {
  std::filesystem::path checkpoint, split;
  std::string format = "plain";
  std::uint64_t seed = 1;
};

void run_evaluate(const EvaluateOptions& o) {
  require_file(o.checkpoint, "checkpoint");
  require_file(o.split, "evaluation set");
  const auto model = stance::load_classifier(o.checkpoint);
  const auto examples = stance::model_examples(stance::load_dataset(o.split));
  if (examples.empty()) throw stance::DataError("no 3-class examples in " + o.split.string());
  std::vector<stance::StanceLabel> gold, pred;
  for (const auto& e : examples) {
    gold.push_back(*e.label);
    pred.push_back(model->predict(e).label);
  }
  const auto cm = stance::confusion(gold, pred);
  if (o.format == "records") {
    stance::write_metrics_records(std::cout, cm);
  } else {
    stance::write_metrics_plain(std::cout, cm);
  }
}

struct PredictOptions {
  std::filesystem::path checkpoint;
  std::string topic, text, headline;
  std::uint64_t seed = 1;
};

void run_predict(const PredictOptions& o) {
  require_file(o.checkpoint, "checkpoint");
  const auto model = stance::load_classifier(o.checkpoint);
  const auto p = model->predict(o.topic, o.headline, o.text);
  nlohmann::ordered_json j;
  j["label"] = std::string(stance::to_string(p.label));
  j["probability"] = p.probability;
  j["distribution"] = {{"favour", p.distribution[0]},
                       {"against", p.distribution[1]},
                       {"neutral", p.distribution[2]}};
  j["x"] = stance::stance_x(p.distribution);
  std::cout << j.dump() << '\n';
}

struct GradcheckOptions {
  stance::ModelGradCheckConfig cfg;
  double tolerance = 1e-4;
};

void run_gradcheck(const GradcheckOptions& o) {
  const auto r = stance::gradient_check_model(o.cfg);
  std::printf("max_relative_error %.6e\nworst %s[%zu]\nchecked %zu\n", r.max_relative_error,
              r.worst_param.c_str(), r.worst_index, r.checked);
  if (!(r.max_relative_error < o.tolerance)) {
    std::fprintf(stderr, "gradient check failed: %.6e >= %.1e\n", r.max_relative_error, o.tolerance);
    exit_status() = kRuntime;
  }
}

}  // namespace

void register_model_commands(CLI::App& app) {
  {
    auto o = std::make_shared<TrainOptions>();
    auto* cmd = app.add_subcommand("train", "Train the conditional BiLSTM or the n-gram baseline");
    cmd->add_option("--split-dir", o->split_dir, "Directory with train.jsonl and validation.jsonl");
    cmd->add_option("--train", o->train, "Training set (JSONL)");
    cmd->add_option("--validation", o->validation, "Validation set (JSONL)");
    cmd->add_option("--model", o->model, "conditional or baseline")
        ->check(CLI::IsMember({"conditional", "baseline"}))
        ->capture_default_str();
    cmd->add_option("--embeddings", o->embeddings, "Pretrained vectors, `token v1 ... vd` per line");
    cmd->add_option("--dim", o->dim, "Embedding size")->capture_default_str();
    cmd->add_option("--hidden", o->hidden, "LSTM hidden size per direction")->capture_default_str();
    cmd->add_option("--lr", o->lr, "Adam learning rate (default 1e-3, baseline 1e-2)");
    cmd->add_option("--batch", o->batch, "Mini-batch size")->capture_default_str();
    cmd->add_option("--epochs", o->epochs, "Maximum epochs")->capture_default_str();
    cmd->add_option("--patience", o->patience, "Epochs without validation gain before stopping")
        ->capture_default_str();
    cmd->add_option("--max-length", o->max_length, "Article token cap")->capture_default_str();
    cmd->add_flag("--freeze-embeddings", o->freeze, "Keep embedding rows fixed");
    cmd->add_option("--ngram", o->ngram, "Baseline: longest n-gram")->capture_default_str();
    cmd->add_flag("--topic-features", o->topic_features, "Baseline: add topic token features");
    cmd->add_option("--out", o->out, "Output checkpoint")->required();
    cmd->add_option("--history", o->history, "Per-epoch history (JSONL)");
    add_seed(*cmd, o->seed);
    cmd->callback([o] { run_train(*o); });
  }
  {
    auto o = std::make_shared<EvaluateOptions>();
    auto* cmd = app.add_subcommand("evaluate", "Report accuracy, macro-F1 and the confusion matrix");
    cmd->add_option("--checkpoint", o->checkpoint, "Trained checkpoint")->required();
    cmd->add_option("--split", o->split, "Evaluation set (JSONL)")->required();
    cmd->add_option("--format", o->format, "plain or records")
        ->check(CLI::IsMember({"plain", "records"}))
        ->capture_default_str();
    add_seed(*cmd, o->seed);
    cmd->callback([o] { run_evaluate(*o); });
  }
  {
    auto o = std::make_shared<PredictOptions>();
    auto* cmd = app.add_subcommand("predict", "Classify one text toward a topic");
    cmd->add_option("--checkpoint", o->checkpoint, "Trained checkpoint")->required();
    cmd->add_option("--topic", o->topic, "Stance target")->required();
    cmd->add_option("--text", o->text, "Article text or excerpt")->required();
    cmd->add_option("--headline", o->headline, "Headline read before the text");
    add_seed(*cmd, o->seed);
    cmd->callback([o] { run_predict(*o); });
  }
  {
    auto o = std::make_shared<GradcheckOptions>();
    auto* cmd = app.add_subcommand("gradcheck", "Finite-difference check of the model gradients");
    cmd->add_option("--dim", o->cfg.embedding_dim, "Embedding size")->capture_default_str();
    cmd->add_option("--hidden", o->cfg.hidden, "Hidden size")->capture_default_str();
    cmd->add_option("--length", o->cfg.length, "Topic and article length")->capture_default_str();
    cmd->add_option("--vocab", o->cfg.vocab_size, "Vocabulary size")->capture_default_str();
    cmd->add_option("--eps", o->cfg.eps, "Central-difference step")->capture_default_str();
    cmd->add_option("--tolerance", o->tolerance, "Pass threshold")->capture_default_str();
    add_seed(*cmd, o->cfg.seed);
    cmd->callback([o] { run_gradcheck(*o); });
  }
}

}  // namespace cli
