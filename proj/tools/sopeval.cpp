// sopeval: command-line entry points for feature extraction, training,
// cross-validation, the ablation grid, prediction and the HTTP service.
//
// Every flag can also come from an environment variable (shown in --help);
// an explicit flag wins over the environment.

#include <atomic>
#include <csignal>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "httplib.h"
#include "sopeval/classifiers/model.hpp"
#include "sopeval/error.hpp"
#include "sopeval/evaluation.hpp"
#include "sopeval/features.hpp"
#include "sopeval/pipeline.hpp"
#include "sopeval/resources.hpp"
#include "sopeval/service.hpp"
#include "sopeval/synthetic.hpp"

namespace fs = std::filesystem;
using namespace sopeval;
using nlohmann::json;

namespace {

struct UsageError : Error {
  explicit UsageError(const std::string& message) : Error("usage", message) {}
};

struct FeatureFlags {
  std::string resources = SOPEVAL_RESOURCE_DIR;
  std::string embeddings;
  std::string glove;
  std::string sets = "SE+WE";
  bool ne_count = false;
  bool adjacent_similarity = false;
  bool normalize_counts = false;
  std::string term_weighting = "tfidf";
  std::string reference_mode = "fold_train";
  unsigned threads = 0;
};

struct ClassifierFlags {
  std::string kind = "svm";
  double c = 1.0;
  std::string kernel = "rbf";
  double gamma = 0.0;
  double tol = 1e-3;
  int max_passes = 1000;
  double l2 = 1e-4;
  int max_iters = 5000;
  int trees = 100;
  int max_depth = 0;
  int features_per_split = 0;
  bool no_bootstrap = false;
  std::string hidden = "32";
  std::string activation = "tanh";
  double learning_rate = 0.01;
  int epochs = 500;
  int patience = 25;
  std::string optimizer = "adam";
  double tune_fraction = 0.2;
};

std::string env_name(const std::string& flag) {
  std::string out = "SOPEVAL_";
  for (char c : flag) out += c == '-' ? '_' : static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return out;
}

template <typename T>
CLI::Option* flag(CLI::App* app, const std::string& name, T& target, const std::string& help,
                  std::string env = {}) {
  auto* opt = app->add_option("--" + name, target, help)->capture_default_str();
  opt->envname(env.empty() ? env_name(name) : env);
  return opt;
}

CLI::Option* boolean(CLI::App* app, const std::string& name, bool& target, const std::string& help) {
  return app->add_flag("--" + name, target, help)->envname(env_name(name));
}

void add_feature_flags(CLI::App* app, FeatureFlags& f, bool with_sets) {
  flag(app, "resources", f.resources, "Directory with the lexical resources", "RESOURCE_DIR");
  flag(app, "embeddings", f.embeddings, "Word embedding file (word2vec text format)");
  flag(app, "glove", f.glove, "GloVe file for adjacent-sentence similarity");
  if (!with_sets) return;
  flag(app, "features", f.sets, "Feature sets, e.g. SE+WE or T+WE+SE");
  boolean(app, "ne-count", f.ne_count, "Add the named-entity count to T");
  boolean(app, "adjacent-similarity", f.adjacent_similarity, "Add adjacent-sentence similarity to SE");
  boolean(app, "normalize-counts", f.normalize_counts, "Report counts per 1000 words");
  flag(app, "term-weighting", f.term_weighting, "Reference cosine weighting: tfidf or tf")
      ->check(CLI::IsMember({"tfidf", "tf"}));
  flag(app, "reference-mode", f.reference_mode, "fold_train or paper_compat")
      ->check(CLI::IsMember({"fold_train", "paper_compat"}));
  flag(app, "threads", f.threads, "Worker threads (0 = all cores)");
}

void add_classifier_flags(CLI::App* app, ClassifierFlags& c) {
  flag(app, "model", c.kind, "Classifier: svm, lr, rfdt, mlp, ffnn")
      ->check(CLI::IsMember({"svm", "lr", "rfdt", "mlp", "ffnn"}));
  flag(app, "c", c.c, "SVM box constraint");
  flag(app, "kernel", c.kernel, "SVM kernel: rbf or linear")->check(CLI::IsMember({"rbf", "linear"}));
  flag(app, "gamma", c.gamma, "RBF gamma (0 = 1/d)");
  flag(app, "tol", c.tol, "SVM KKT tolerance");
  flag(app, "max-passes", c.max_passes, "SVM iteration budget in passes over the rows");
  flag(app, "l2", c.l2, "LR L2 strength");
  flag(app, "max-iters", c.max_iters, "LR iteration cap");
  flag(app, "trees", c.trees, "Forest size");
  flag(app, "max-depth", c.max_depth, "Tree depth limit (0 = unlimited)");
  flag(app, "features-per-split", c.features_per_split, "Features tried per split (0 = sqrt(d))");
  boolean(app, "no-bootstrap", c.no_bootstrap, "Fit every tree on all rows");
  flag(app, "hidden", c.hidden, "Hidden layer sizes, comma separated (empty for none)");
  flag(app, "activation", c.activation, "Hidden activation: tanh or sigmoid")
      ->check(CLI::IsMember({"tanh", "sigmoid"}));
  flag(app, "learning-rate", c.learning_rate, "Network learning rate");
  flag(app, "epochs", c.epochs, "Network epochs");
  flag(app, "patience", c.patience, "FFNN early-stopping patience");
  flag(app, "optimizer", c.optimizer, "Network optimizer: adam or gd")->check(CLI::IsMember({"adam", "gd"}));
  flag(app, "tune-fraction", c.tune_fraction, "Share of training rows held out to tune the FFNN");
}

features::FeatureConfig feature_config(const FeatureFlags& f) {
  features::FeatureConfig c;
  try {
    c.sets = features::FeatureConfig::parse_sets(f.sets);
  } catch (const Error& e) {
    throw UsageError(e.what());
  }
  c.ne_count = f.ne_count;
  c.adjacent_similarity = f.adjacent_similarity;
  c.normalize_counts = f.normalize_counts;
  c.term_weighting = *parse_term_weighting(f.term_weighting);
  c.reference_mode = *features::parse_reference_mode(f.reference_mode);
  c.resource_dir = f.resources;
  c.embeddings_path = f.embeddings;
  c.glove_path = f.glove;
  return c;
}

classifiers::ClassifierSpec classifier_spec(const ClassifierFlags& f, std::uint64_t seed) {
  classifiers::ClassifierSpec s;
  s.kind = *classifiers::parse_model_kind(f.kind);
  s.svm.c = f.c;
  s.svm.kernel.kind = *classifiers::parse_kernel_kind(f.kernel);
  s.svm.kernel.gamma = f.gamma;
  s.svm.tol = f.tol;
  s.svm.max_passes = f.max_passes;
  s.lr.l2 = f.l2;
  s.lr.max_iters = f.max_iters;
  s.forest.n_trees = f.trees;
  s.forest.max_depth = f.max_depth;
  s.forest.features_per_split = f.features_per_split;
  s.forest.bootstrap = !f.no_bootstrap;
  s.net.hidden_sizes.clear();
  std::stringstream hidden(f.hidden);
  for (std::string part; std::getline(hidden, part, ',');) {
    if (part.empty()) continue;
    try {
      s.net.hidden_sizes.push_back(std::stoi(part));
    } catch (const std::exception&) {
      throw UsageError("--hidden expects comma-separated integers, got '" + f.hidden + "'");
    }
  }
  s.net.activation = *classifiers::parse_activation(f.activation);
  s.net.learning_rate = f.learning_rate;
  s.net.epochs = f.epochs;
  s.net.patience = f.patience;
  s.net.optimizer = *classifiers::parse_optimizer(f.optimizer);
  s.tune_fraction = f.tune_fraction;
  s.set_seed(seed);
  return s;
}

// Loads whatever the enabled sets need; a missing file is a usage error.
features::Resources load_resources(const features::FeatureConfig& config, std::optional<std::size_t> dim = {}) {
  using features::FeatureSet;
  features::Resources r;
  const bool t = config.uses(FeatureSet::T);
  const bool we = config.uses(FeatureSet::WE);
  const bool se = config.uses(FeatureSet::SE);
  if (t || se || config.adjacent_similarity) r.lexical = LexicalResources::load(config.resource_dir);
  if (we || se) {
    if (config.embeddings_path.empty()) throw ResourceError("features", "--embeddings is required for the WE and SE sets");
    r.embeddings = embedding::load_embeddings(config.embeddings_path, dim);
  }
  if (se && config.adjacent_similarity) {
    if (config.glove_path.empty()) throw ResourceError("features", "--glove is required for --adjacent-similarity");
    r.glove = embedding::load_embeddings(config.glove_path);
  }
  return r;
}

void write_file(const fs::path& path, const std::string& content) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ResourceError("cli", "cannot write " + path.string());
  out << content;
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ResourceError("cli", "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

json run_record(const features::FeatureConfig& config, const classifiers::ClassifierSpec& spec,
                std::uint64_t seed, const std::string& corpus) {
  return {{"corpus", corpus},
          {"seed", seed},
          {"feature_config", config.to_json()},
          {"feature_config_hash", config.hash()},
          {"classifier", spec.to_json()}};
}

std::string render_evaluation(const Evaluation& e) {
  std::ostringstream out;
  char buf[64];
  out << "label: " << to_string(e.label) << '\n';
  std::snprintf(buf, sizeof buf, "%.6f", e.decision_value);
  out << "decision value: " << buf << " (margin, not a probability)\n";
  out << "model: " << e.model_id << "\n\n";
  std::size_t w = 7;
  for (const auto& b : e.breakdown) w = std::max(w, b.name.size());
  out << std::left << std::setw(static_cast<int>(w) + 2) << "feature" << std::setw(5) << "set" << std::right
      << std::setw(14) << "raw" << std::setw(14) << "standardized" << '\n';
  for (const auto& b : e.breakdown) {
    out << std::left << std::setw(static_cast<int>(w) + 2) << b.name << std::setw(5) << features::to_string(b.set)
        << std::right;
    std::snprintf(buf, sizeof buf, "%14.6g", b.raw);
    out << buf;
    std::snprintf(buf, sizeof buf, "%14.6g", b.standardized);
    out << buf << '\n';
  }
  for (const auto& warning : e.warnings) out << "warning: " << warning << '\n';
  return out.str();
}

std::atomic<httplib::Server*> g_server{nullptr};

void handle_signal(int) {
  if (auto* s = g_server.load()) s->stop();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Statement-of-purpose essay evaluation: features, classifiers, cross-validation, service"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "sopeval 1.0.0");

  FeatureFlags ff;
  ClassifierFlags cf;
  std::string corpus_path, out_path, model_path, essay_path, host = "0.0.0.0";
  std::uint64_t seed = 7;
  int k = 10, repeats = 1, port = 8080;
  bool per_fold_average = false, no_audit = false, as_json = false;
  synthetic::Options synth;

  auto* extract = app.add_subcommand("extract", "Write the feature matrix of a corpus as CSV");
  add_feature_flags(extract, ff, true);
  flag(extract, "corpus", corpus_path, "Corpus (JSON lines)")->required();
  flag(extract, "out", out_path, "Output CSV (stdout when omitted)");

  auto* train = app.add_subcommand("train", "Train a model on a labeled corpus");
  add_feature_flags(train, ff, true);
  add_classifier_flags(train, cf);
  flag(train, "corpus", corpus_path, "Labeled corpus (JSON lines)")->required();
  flag(train, "out", out_path, "Model file to write")->required();
  flag(train, "seed", seed, "Seed");

  auto* cv = app.add_subcommand("cv", "Stratified k-fold cross-validation");
  add_feature_flags(cv, ff, true);
  add_classifier_flags(cv, cf);
  flag(cv, "corpus", corpus_path, "Labeled corpus (JSON lines)")->required();
  flag(cv, "k", k, "Number of folds");
  flag(cv, "seed", seed, "Seed");
  flag(cv, "out", out_path, "Directory for report.txt, report.csv and run.json");
  boolean(cv, "per-fold-average", per_fold_average, "Average fold metrics instead of pooling counts");
  boolean(cv, "no-audit", no_audit, "Skip the per-fold leakage audit");

  auto* ablate = app.add_subcommand("ablate", "Seven feature-set combinations x {2,5,10}-fold and a 50% split");
  add_feature_flags(ablate, ff, false);
  boolean(ablate, "ne-count", ff.ne_count, "Add the named-entity count to T");
  flag(ablate, "threads", ff.threads, "Worker threads (0 = all cores)");
  add_classifier_flags(ablate, cf);
  flag(ablate, "corpus", corpus_path, "Labeled corpus (JSON lines)")->required();
  flag(ablate, "seed", seed, "Seed");
  flag(ablate, "repeats", repeats, "Seeds per cell; more than one reports the spread");
  flag(ablate, "out", out_path, "Directory for grid.txt, grid.csv and run.json");
  boolean(ablate, "no-audit", no_audit, "Skip the per-fold leakage audit");

  auto* predict = app.add_subcommand("predict", "Score one essay with a trained model");
  add_feature_flags(predict, ff, false);
  flag(predict, "model", model_path, "Model file", "MODEL_PATH")->required();
  flag(predict, "essay", essay_path, "Essay text file ('-' for stdin)")->required();
  boolean(predict, "json", as_json, "Print the response as JSON");

  auto* serve = app.add_subcommand("serve", "HTTP service: POST /v1/evaluate, GET /v1/health");
  add_feature_flags(serve, ff, false);
  flag(serve, "model", model_path, "Model file", "MODEL_PATH")->required();
  flag(serve, "port", port, "Port", "PORT");
  flag(serve, "host", host, "Bind address");

  auto* synth_cmd = app.add_subcommand("synth", "Generate the synthetic corpus and its embeddings");
  flag(synth_cmd, "resources", ff.resources, "Directory with the lexical resources", "RESOURCE_DIR");
  flag(synth_cmd, "out", out_path, "Output directory")->required();
  flag(synth_cmd, "seed", synth.seed, "Seed");
  flag(synth_cmd, "dim", synth.embedding_dimension, "Embedding dimension");
  flag(synth_cmd, "accepted", synth.accepted, "Accepted essays");
  flag(synth_cmd, "rejected", synth.rejected, "Rejected essays");
  flag(synth_cmd, "misspelling-rate", synth.misspelling_rate, "Misspelled share of rejected tokens");
  flag(synth_cmd, "oov-rate", synth.oov_rate, "Out-of-vocabulary share of rejected tokens");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (extract->parsed()) {
      const auto config = feature_config(ff);
      auto corpus = load_corpus(corpus_path, config.uses(features::FeatureSet::SE) ? LabelRequirement::required
                                                                                  : LabelRequirement::optional);
      const CorpusFeatures corpus_features(std::move(corpus), config, load_resources(config), ff.threads);
      std::vector<std::size_t> all(corpus_features.size());
      for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
      std::optional<ReferenceSet> refs;
      if (config.uses(features::FeatureSet::SE)) {
        refs = build_references(corpus_features, config.reference_mode, config.term_weighting, all);
      }
      std::vector<std::vector<std::string>> warnings;
      const auto rows = feature_rows(corpus_features, config, all, refs ? &*refs : nullptr, &warnings);
      std::vector<std::string> ids;
      for (const auto& d : corpus_features.corpus().documents()) ids.push_back(d.id);
      const auto dim = corpus_features.resources().embeddings ? corpus_features.resources().embeddings->dimension() : 0;
      const auto names = features::feature_names(config, dim);
      const auto csv = features::render_feature_matrix(ids, names, rows);
      if (out_path.empty()) {
        std::cout << csv;
      } else {
        write_file(out_path, csv);
      }
      for (std::size_t i = 0; i < warnings.size(); ++i) {
        for (const auto& w : warnings[i]) std::cerr << "warning: " << ids[i] << ": " << w << '\n';
      }
    } else if (train->parsed()) {
      const auto config = feature_config(ff);
      const auto spec = classifier_spec(cf, seed);
      auto corpus = load_corpus(corpus_path);
      const CorpusFeatures corpus_features(std::move(corpus), config, load_resources(config), ff.threads);
      const auto model = train_model(corpus_features, config, spec, seed);
      save_model(model, out_path);
      std::cout << "model " << model.model_id << " (" << classifiers::to_string(spec.kind) << ", "
                << config.sets_label() << ", " << model.feature_names.size() << " features) written to " << out_path
                << "\nfeature config " << model.config_hash() << '\n';
    } else if (cv->parsed()) {
      const auto config = feature_config(ff);
      const auto spec = classifier_spec(cf, seed);
      auto corpus = load_corpus(corpus_path);
      const CorpusFeatures corpus_features(std::move(corpus), config, load_resources(config), ff.threads);
      evaluation::CvOptions options;
      options.per_fold_average = per_fold_average;
      options.audit = !no_audit;
      options.threads = ff.threads;
      const auto report = evaluation::cross_validate(corpus_features, config, spec, k, seed, options);
      const auto text = evaluation::render_report(report, evaluation::Format::text);
      std::cout << text;
      if (!out_path.empty()) {
        write_file(fs::path(out_path) / "report.txt", text);
        write_file(fs::path(out_path) / "report.csv", evaluation::render_report(report, evaluation::Format::delimited));
        auto record = run_record(config, spec, seed, corpus_path);
        record["k"] = k;
        record["per_fold_average"] = per_fold_average;
        record["audit"] = !no_audit;
        write_file(fs::path(out_path) / "run.json", record.dump(2) + "\n");
      }
    } else if (ablate->parsed()) {
      auto config = feature_config(ff);
      config.sets = {features::FeatureSet::T, features::FeatureSet::WE, features::FeatureSet::SE};
      const auto spec = classifier_spec(cf, seed);
      auto corpus = load_corpus(corpus_path);
      const CorpusFeatures corpus_features(std::move(corpus), config, load_resources(config), ff.threads);
      evaluation::AblationOptions options;
      options.repeats = repeats;
      options.threads = ff.threads;
      options.cv.audit = !no_audit;
      const auto grid = evaluation::ablate(corpus_features, config, spec, seed, options);
      const auto text = evaluation::render_grid(grid, evaluation::Format::text);
      std::cout << text;
      if (!out_path.empty()) {
        write_file(fs::path(out_path) / "grid.txt", text);
        write_file(fs::path(out_path) / "grid.csv", evaluation::render_grid(grid, evaluation::Format::delimited));
        auto record = run_record(config, spec, seed, corpus_path);
        record["repeats"] = repeats;
        record["audit"] = !no_audit;
        write_file(fs::path(out_path) / "run.json", record.dump(2) + "\n");
      }
    } else if (predict->parsed()) {
      const auto model = load_model(model_path);
      auto config = model.config;
      config.resource_dir = ff.resources;
      if (!ff.embeddings.empty()) config.embeddings_path = ff.embeddings;
      if (!ff.glove.empty()) config.glove_path = ff.glove;
      const auto resources = load_resources(config, model.embedding_dimension ? std::optional(model.embedding_dimension)
                                                                                : std::nullopt);
      std::string essay;
      if (essay_path == "-") {
        std::ostringstream ss;
        ss << std::cin.rdbuf();
        essay = ss.str();
      } else {
        essay = read_file(essay_path);
      }
      const auto result = evaluate_text(model, resources, essay);
      if (as_json) {
        auto body = to_json(result);
        body["feature_config_hash"] = model.config_hash();
        std::cout << body.dump(2) << '\n';
      } else {
        std::cout << render_evaluation(result);
      }
    } else if (serve->parsed()) {
      service::EvaluationService svc;
      httplib::Server server;
      server.set_payload_max_length(8 * 1024 * 1024);
      service::register_routes(server, svc);
      // The model loads in the background; /v1/health reports "loading" meanwhile.
      std::jthread loader([&] {
        try {
          auto model = std::make_shared<const TrainedModel>(load_model(model_path));
          auto config = model->config;
          config.resource_dir = ff.resources;
          if (!ff.embeddings.empty()) config.embeddings_path = ff.embeddings;
          if (!ff.glove.empty()) config.glove_path = ff.glove;
          auto resources = load_resources(config, model->embedding_dimension ? std::optional(model->embedding_dimension)
                                                                              : std::nullopt);
          svc.install(model, std::move(resources));
          std::cerr << "model " << model->model_id << " loaded\n";
        } catch (const std::exception& e) {
          svc.fail(e.what());
          std::cerr << "error: " << e.what() << '\n';
        }
      });
      g_server = &server;
      std::signal(SIGINT, handle_signal);
      std::signal(SIGTERM, handle_signal);
      std::cerr << "listening on " << host << ':' << port << '\n';
      if (!server.listen(host, port)) throw Error("service", "cannot listen on " + host + ":" + std::to_string(port));
    } else if (synth_cmd->parsed()) {
      const auto lexicon = LexicalResources::load(ff.resources);
      const auto data = synthetic::generate(*lexicon, synth);
      fs::create_directories(out_path);
      save_corpus(data.corpus, fs::path(out_path) / "corpus.jsonl");
      embedding::save_embeddings(*data.embeddings, data.vocabulary, fs::path(out_path) / "embeddings.txt");
      std::cout << "wrote " << data.corpus.size() << " essays and " << data.vocabulary.size() << " vectors to "
                << out_path << '\n';
    }
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const ResourceError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
