#include "sopeval/evaluation.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <map>
#include <numeric>
#include <sstream>

#include "sopeval/error.hpp"
#include "sopeval/parallel.hpp"
#include "sopeval/rng.hpp"

namespace sopeval::evaluation {
namespace {

using features::FeatureSet;

double ratio(std::size_t num, std::size_t den) {
  return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

double harmonic(double p, double r) { return p + r == 0.0 ? 0.0 : 2.0 * p * r / (p + r); }

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string fmt_fixed(double v, int decimals) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, round_half_up(v, decimals));
  return buf;
}

std::string pad(std::string s, std::size_t width, bool left = false) {
  if (s.size() >= width) return s;
  const std::string fill(width - s.size(), ' ');
  return left ? s + fill : fill + s;
}

std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    const auto end = s.find(sep, start);
    out.emplace_back(s.substr(start, end == std::string_view::npos ? std::string_view::npos : end - start));
    if (end == std::string_view::npos) break;
    start = end + 1;
  }
  return out;
}

double parse_double(const std::string& s) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) throw Error("evaluation", "bad number '" + s + "'");
  return v;
}

std::size_t parse_count(const std::string& s) {
  std::size_t v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) throw Error("evaluation", "bad count '" + s + "'");
  return v;
}

// Lines of a delimited rendering: "# key=value" metadata and data rows.
struct Delimited {
  std::map<std::string, std::string> meta;
  std::vector<std::vector<std::string>> rows;  // header first
};

Delimited read_delimited(std::string_view text) {
  Delimited d;
  for (const auto& line : split(text, '\n')) {
    if (line.empty()) continue;
    if (line.rfind("# ", 0) == 0) {
      const auto eq = line.find('=');
      if (eq != std::string::npos) d.meta[line.substr(2, eq - 2)] = line.substr(eq + 1);
      continue;
    }
    d.rows.push_back(split(line, ','));
  }
  if (d.rows.empty()) throw Error("evaluation", "delimited report has no header");
  return d;
}

const char* kReportColumns[] = {"scope", "tp_acc", "fn_acc", "fp_acc", "tn_acc", "p_acc", "r_acc", "f_acc",
                                "p_rej", "r_rej",  "f_rej",  "p_avg",  "r_avg",  "f_avg", "accuracy"};

void report_row(std::ostringstream& out, const std::string& scope, const MetricsReport& r) {
  const auto& c = r.confusion;
  out << scope << ',' << c.tp_acc << ',' << c.fn_acc << ',' << c.fp_acc << ',' << c.tn_acc;
  for (double v : {r.accepted.precision, r.accepted.recall, r.accepted.f1, r.rejected.precision, r.rejected.recall,
                   r.rejected.f1, r.macro_precision, r.macro_recall, r.macro_f1, r.accuracy}) {
    out << ',' << fmt17(v);
  }
  out << '\n';
}

MetricsReport report_from_row(const std::vector<std::string>& f) {
  if (f.size() != std::size(kReportColumns)) throw Error("evaluation", "report row has wrong field count");
  MetricsReport r;
  r.confusion = {parse_count(f[1]), parse_count(f[2]), parse_count(f[3]), parse_count(f[4])};
  r.accepted = {parse_double(f[5]), parse_double(f[6]), parse_double(f[7])};
  r.rejected = {parse_double(f[8]), parse_double(f[9]), parse_double(f[10])};
  r.macro_precision = parse_double(f[11]);
  r.macro_recall = parse_double(f[12]);
  r.macro_f1 = parse_double(f[13]);
  r.accuracy = parse_double(f[14]);
  return r;
}

std::vector<std::size_t> merged(std::span<const std::size_t> a, std::span<const std::size_t> b) {
  std::vector<std::size_t> out(a.begin(), a.end());
  out.insert(out.end(), b.begin(), b.end());
  return out;
}

void stamp(MetricsReport& r, const features::FeatureConfig& config, const classifiers::ClassifierSpec& spec,
           std::uint64_t seed, std::string protocol) {
  r.protocol = std::move(protocol);
  r.classifier = std::string(classifiers::to_string(spec.kind));
  r.feature_sets = config.sets_label();
  r.config_hash = config.hash();
  r.seed = seed;
}

}  // namespace

void ConfusionMatrix::add(Label gold, Label predicted) {
  if (gold == Label::accepted) {
    ++(predicted == Label::accepted ? tp_acc : fn_acc);
  } else {
    ++(predicted == Label::accepted ? fp_acc : tn_acc);
  }
}

ConfusionMatrix& ConfusionMatrix::operator+=(const ConfusionMatrix& o) {
  tp_acc += o.tp_acc;
  fn_acc += o.fn_acc;
  fp_acc += o.fp_acc;
  tn_acc += o.tn_acc;
  return *this;
}

MetricsReport metrics(const ConfusionMatrix& cm) {
  if (cm.total() == 0) throw Error("evaluation", "confusion matrix is empty");
  MetricsReport r;
  r.confusion = cm;
  const auto pred_acc = cm.tp_acc + cm.fp_acc;
  const auto pred_rej = cm.tn_acc + cm.fn_acc;
  const auto gold_acc = cm.tp_acc + cm.fn_acc;
  const auto gold_rej = cm.tn_acc + cm.fp_acc;
  if (pred_acc == 0) r.warnings.emplace_back("no document predicted accepted; P_acc set to 0");
  if (pred_rej == 0) r.warnings.emplace_back("no document predicted rejected; P_rej set to 0");
  if (gold_acc == 0) r.warnings.emplace_back("no accepted document evaluated; R_acc set to 0");
  if (gold_rej == 0) r.warnings.emplace_back("no rejected document evaluated; R_rej set to 0");
  r.accepted.precision = ratio(cm.tp_acc, pred_acc);
  r.accepted.recall = ratio(cm.tp_acc, gold_acc);
  r.accepted.f1 = harmonic(r.accepted.precision, r.accepted.recall);
  r.rejected.precision = ratio(cm.tn_acc, pred_rej);
  r.rejected.recall = ratio(cm.tn_acc, gold_rej);
  r.rejected.f1 = harmonic(r.rejected.precision, r.rejected.recall);
  r.macro_precision = (r.accepted.precision + r.rejected.precision) / 2.0;
  r.macro_recall = (r.accepted.recall + r.rejected.recall) / 2.0;
  r.macro_f1 = (r.accepted.f1 + r.rejected.f1) / 2.0;
  r.accuracy = ratio(cm.tp_acc + cm.tn_acc, cm.total());
  return r;
}

MetricsReport evaluate_folds(const Corpus& corpus, const FoldAssignment& folds, const FoldPredictor& predict,
                             bool per_fold_average, unsigned threads) {
  if (folds.fold_of.size() != corpus.size()) throw Error("evaluation", "fold assignment does not match the corpus");
  std::vector<std::vector<Prediction>> fold_predictions(static_cast<std::size_t>(folds.k));
  parallel_for(fold_predictions.size(), threads, [&](std::size_t f) {
    const int fold = static_cast<int>(f);
    const auto train = folds.train_indices(fold);
    const auto test = folds.test_indices(fold);
    std::vector<double> values;
    try {
      values = predict(fold, train, test);
    } catch (const std::exception& e) {
      throw Error("evaluation", "fold " + std::to_string(fold) + ": " + e.what());
    }
    if (values.size() != test.size()) {
      throw Error("evaluation", "fold " + std::to_string(fold) + ": predictor returned the wrong number of values");
    }
    for (std::size_t i = 0; i < test.size(); ++i) {
      const auto& d = corpus[test[i]];
      fold_predictions[f].push_back({d.id, fold, *d.label, classifiers::label_for(values[i]), values[i]});
    }
  });

  ConfusionMatrix pooled;
  std::vector<MetricsReport> fold_reports;
  std::vector<Prediction> all;
  for (auto& preds : fold_predictions) {
    ConfusionMatrix cm;
    for (const auto& p : preds) cm.add(p.gold, p.predicted);
    pooled += cm;
    fold_reports.push_back(metrics(cm));
    all.insert(all.end(), preds.begin(), preds.end());
  }
  auto report = metrics(pooled);
  if (per_fold_average) {
    const auto n = static_cast<double>(fold_reports.size());
    auto mean = [&](auto field) {
      double s = 0.0;
      for (const auto& r : fold_reports) s += field(r);
      return s / n;
    };
    report.accepted = {mean([](const auto& r) { return r.accepted.precision; }),
                       mean([](const auto& r) { return r.accepted.recall; }),
                       mean([](const auto& r) { return r.accepted.f1; })};
    report.rejected = {mean([](const auto& r) { return r.rejected.precision; }),
                       mean([](const auto& r) { return r.rejected.recall; }),
                       mean([](const auto& r) { return r.rejected.f1; })};
    report.macro_precision = (report.accepted.precision + report.rejected.precision) / 2.0;
    report.macro_recall = (report.accepted.recall + report.rejected.recall) / 2.0;
    report.macro_f1 = (report.accepted.f1 + report.rejected.f1) / 2.0;
    report.accuracy = mean([](const auto& r) { return r.accuracy; });
    report.per_fold_average = true;
  }
  // Documents in corpus order, so reports do not depend on fold scheduling.
  std::sort(all.begin(), all.end(), [&](const Prediction& a, const Prediction& b) {
    return *corpus.index_of(a.id) < *corpus.index_of(b.id);
  });
  report.folds = std::move(fold_reports);
  report.predictions = std::move(all);
  return report;
}

AuditRecord audit_fold(const CorpusFeatures& cf, const FittedPipeline& fitted, int fold,
                       std::span<const std::size_t> training) {
  AuditRecord record;
  record.fold = fold;
  auto fail = [&](const std::string& what) {
    throw Error("evaluation", "leakage audit failed on fold " + std::to_string(fold) + ": " + what);
  };
  const auto& config = fitted.config;
  std::optional<ReferenceSet> recomputed;
  if (config.uses(FeatureSet::SE)) {
    if (!fitted.references) fail("pipeline has no reference corpus");
    if (config.reference_mode == features::ReferenceMode::fold_train) {
      // Re-tokenize the training documents from their text alone.
      const auto sub = cf.corpus().subset(training);
      std::vector<text::TermBag> bags;
      for (const auto& d : sub.documents()) bags.push_back(text::term_bag(text::tokenize(d.text)));
      std::vector<BagEntry> entries;
      for (std::size_t i = 0; i < sub.size(); ++i) entries.push_back({sub[i].id, *sub[i].label, &bags[i]});
      ReferenceSet refs{build_reference(entries, {}, config.term_weighting), {}};
      if (!(refs.shared == fitted.references->shared)) fail("reference corpus differs from the training recomputation");
      if (fitted.references->leave_one_out.size() != training.size()) fail("unexpected leave-one-out references");
      for (std::size_t i = 0; i < training.size(); ++i) {
        auto loo = build_reference(entries, {sub[i].id}, config.term_weighting);
        const auto it = fitted.references->leave_one_out.find(training[i]);
        if (it == fitted.references->leave_one_out.end() || !(it->second == loo)) {
          fail("leave-one-out reference for '" + sub[i].id + "' differs");
        }
        refs.leave_one_out.emplace(training[i], std::move(loo));
      }
      record.reference_checked = true;
      record.references_compared = training.size() + 1;
      recomputed = std::move(refs);
    } else {
      recomputed = *fitted.references;  // paper_compat pools the whole corpus by design
    }
  }
  const auto raw = feature_rows(cf, config, fitted.fit_rows, recomputed ? &*recomputed : nullptr);
  if (!(raw == fitted.fit_raw)) fail("training feature matrix differs from the recomputation");
  if (fitted.spec.standardizes()) {
    if (!fitted.standardizer || !(features::Standardizer::fit(raw) == *fitted.standardizer)) {
      fail("standardizer differs from one fitted on the training rows");
    }
    record.standardizer_checked = true;
  }
  return record;
}

MetricsReport cross_validate(const CorpusFeatures& cf, const features::FeatureConfig& config,
                             const classifiers::ClassifierSpec& spec, int k, std::uint64_t seed,
                             const CvOptions& options, std::vector<AuditRecord>* audit_log) {
  const auto folds = stratified_kfold(cf.corpus(), k, seed);
  std::vector<AuditRecord> audits(static_cast<std::size_t>(k));
  auto report = evaluate_folds(
      cf.corpus(), folds,
      [&](int fold, std::span<const std::size_t> train, std::span<const std::size_t> test) {
        const auto fitted = fit_pipeline(cf, config, spec, train, derive_seed(seed, static_cast<std::uint64_t>(fold)));
        if (options.audit) audits[static_cast<std::size_t>(fold)] = audit_fold(cf, fitted, fold, train);
        return fitted.decision_values(cf, test);
      },
      options.per_fold_average, options.threads);
  stamp(report, config, spec, seed, std::to_string(k) + "-fold");
  if (config.uses(FeatureSet::SE) && config.reference_mode == features::ReferenceMode::paper_compat) {
    report.warnings.emplace_back("paper_compat reference mode: test essays contribute to the reference corpus");
  }
  if (audit_log && options.audit) audit_log->insert(audit_log->end(), audits.begin(), audits.end());
  return report;
}

MetricsReport holdout_evaluate(const CorpusFeatures& cf, const features::FeatureConfig& config,
                               const classifiers::ClassifierSpec& spec, double train_fraction, std::uint64_t seed,
                               const CvOptions& options, std::vector<AuditRecord>* audit_log) {
  const auto part = holdout_split(cf.corpus(), train_fraction, seed,
                                  spec.needs_tune_set() ? std::optional<double>(0.5) : std::nullopt);
  FoldAssignment folds;
  folds.k = 1;
  folds.fold_of.assign(cf.size(), -1);
  for (auto i : part.test) folds.fold_of[i] = 0;
  for (const auto& d : cf.corpus().documents()) folds.ids.push_back(d.id);

  std::optional<AuditRecord> audit;
  auto report = evaluate_folds(
      cf.corpus(), folds,
      [&](int, std::span<const std::size_t>, std::span<const std::size_t> test) {
        const auto fitted = fit_pipeline(cf, config, spec, part.train, derive_seed(seed, 0), part.tune);
        if (options.audit) audit = audit_fold(cf, fitted, 0, merged(part.train, part.tune));
        return fitted.decision_values(cf, test);
      },
      false, 1);
  char label[32];
  std::snprintf(label, sizeof label, "%g%% split", train_fraction * 100.0);
  stamp(report, config, spec, seed, label);
  if (audit_log && audit) audit_log->push_back(*audit);
  return report;
}

std::vector<std::set<FeatureSet>> ablation_rows() {
  using enum FeatureSet;
  return {{T}, {WE}, {SE}, {T, WE}, {T, SE}, {SE, WE}, {T, WE, SE}};
}

std::vector<std::string> ablation_columns() { return {"2-F", "5-F", "10-F", "50% Split"}; }

namespace {

// Row labels follow the conventional reading order ("SE + WE", "T + WE + SE").
std::string row_name(const std::set<FeatureSet>& sets) {
  using enum FeatureSet;
  if (sets == std::set<FeatureSet>{SE, WE}) return "SE + WE";
  std::string out;
  for (auto s : {T, WE, SE}) {
    if (!sets.contains(s)) continue;
    if (!out.empty()) out += " + ";
    out += features::to_string(s);
  }
  return out;
}

}  // namespace

AblationGrid ablate(const CorpusFeatures& cf, const features::FeatureConfig& base,
                    const classifiers::ClassifierSpec& spec, std::uint64_t seed, const AblationOptions& options) {
  if (options.repeats < 1) throw Error("evaluation", "repeats must be at least 1");
  AblationGrid grid;
  grid.rows = ablation_rows();
  grid.columns = ablation_columns();
  grid.seed = seed;
  grid.classifier = std::string(classifiers::to_string(spec.kind));
  grid.base_config_hash = base.hash();
  const std::size_t dim = cf.resources().embeddings ? cf.resources().embeddings->dimension() : 0;
  for (const auto& sets : grid.rows) {
    auto config = base;
    config.sets = sets;
    grid.row_labels.push_back(row_name(sets) + " [" + std::to_string(features::feature_names(config, dim).size()) +
                              "]");
  }

  const std::size_t n_rows = grid.rows.size();
  const std::size_t n_cols = grid.columns.size();
  const auto repeats = static_cast<std::size_t>(options.repeats);
  std::vector<MetricsReport> results(n_rows * n_cols * repeats);
  auto cv = options.cv;
  cv.threads = 1;
  parallel_for(results.size(), options.threads, [&](std::size_t job) {
    const auto rep = job % repeats;
    const auto col = (job / repeats) % n_cols;
    const auto row = job / (repeats * n_cols);
    auto config = base;
    config.sets = grid.rows[row];
    const auto run_seed = rep == 0 ? seed : derive_seed(seed, 1000 + rep);
    static constexpr int kFolds[] = {2, 5, 10};
    results[job] = col < 3 ? cross_validate(cf, config, spec, kFolds[col], run_seed, cv)
                           : holdout_evaluate(cf, config, spec, 0.5, run_seed, cv);
  });

  grid.cells.assign(n_rows, std::vector<AblationCell>(n_cols));
  double best = -1.0;
  for (std::size_t r = 0; r < n_rows; ++r) {
    double row_sum = 0.0;
    for (std::size_t c = 0; c < n_cols; ++c) {
      auto& cell = grid.cells[r][c];
      for (std::size_t rep = 0; rep < repeats; ++rep) {
        cell.runs.push_back(results[(r * n_cols + c) * repeats + rep].accuracy);
      }
      cell.accuracy = std::accumulate(cell.runs.begin(), cell.runs.end(), 0.0) / static_cast<double>(repeats);
      double var = 0.0;
      for (double a : cell.runs) var += (a - cell.accuracy) * (a - cell.accuracy);
      cell.accuracy_stddev = std::sqrt(var / static_cast<double>(repeats));
      cell.report = std::move(results[(r * n_cols + c) * repeats]);
      row_sum += cell.accuracy;
    }
    if (row_sum > best) {
      best = row_sum;
      grid.winner = r;
    }
  }
  return grid;
}

double round_half_up(double v, int decimals) {
  const double scale = std::pow(10.0, decimals);
  // The tiny bias keeps values like 0.885 (stored as 0.88499999...) rounding up.
  return std::floor(v * scale + 0.5 + 1e-9) / scale;
}

std::string render_report(const MetricsReport& r, Format format) {
  std::ostringstream out;
  if (format == Format::delimited) {
    out << "# protocol=" << r.protocol << '\n'
        << "# classifier=" << r.classifier << '\n'
        << "# feature_sets=" << r.feature_sets << '\n'
        << "# config_hash=" << r.config_hash << '\n'
        << "# seed=" << r.seed << '\n'
        << "# per_fold_average=" << (r.per_fold_average ? 1 : 0) << '\n';
    for (std::size_t i = 0; i < std::size(kReportColumns); ++i) out << (i ? "," : "") << kReportColumns[i];
    out << '\n';
    report_row(out, "all", r);
    for (std::size_t f = 0; f < r.folds.size(); ++f) report_row(out, "fold" + std::to_string(f), r.folds[f]);
    return out.str();
  }
  const std::string name = r.classifier.empty() ? "model" : r.classifier;
  const std::size_t w = std::max<std::size_t>(10, name.size() + 2);
  out << pad("Classifier", w, true);
  for (const char* h : {"P_acc", "R_acc", "F_acc", "P_rej", "R_rej", "F_rej", "P_avg", "R_avg", "F_avg"}) {
    out << pad(h, 7);
  }
  out << '\n' << pad(name, w, true);
  for (double v : {r.accepted.precision, r.accepted.recall, r.accepted.f1, r.rejected.precision, r.rejected.recall,
                   r.rejected.f1, r.macro_precision, r.macro_recall, r.macro_f1}) {
    out << pad(fmt_fixed(v, 2), 7);
  }
  out << "\n\n";
  const auto& c = r.confusion;
  out << "accuracy " << fmt_fixed(r.accuracy, 2) << " over " << c.total() << " documents";
  if (!r.protocol.empty()) out << " (" << r.protocol << (r.per_fold_average ? ", fold-averaged" : ", pooled") << ")";
  out << '\n';
  out << "confusion tp_acc=" << c.tp_acc << " fn_acc=" << c.fn_acc << " fp_acc=" << c.fp_acc
      << " tn_acc=" << c.tn_acc << '\n';
  for (const auto& warning : r.warnings) out << "warning: " << warning << '\n';
  if (!r.feature_sets.empty()) out << "features " << r.feature_sets << '\n';
  out << "config " << (r.config_hash.empty() ? "-" : r.config_hash) << "  seed " << r.seed << '\n';
  return out.str();
}

std::string render_grid(const AblationGrid& g, Format format) {
  std::ostringstream out;
  if (format == Format::delimited) {
    out << "# classifier=" << g.classifier << '\n'
        << "# seed=" << g.seed << '\n'
        << "# config_hash=" << g.base_config_hash << '\n'
        << "# winner=" << g.winner << '\n'
        << "feature_set";
    for (const auto& c : g.columns) out << ',' << c;
    for (const auto& c : g.columns) out << ',' << c << " sd";
    out << '\n';
    for (std::size_t r = 0; r < g.cells.size(); ++r) {
      out << g.row_labels[r];
      for (const auto& cell : g.cells[r]) out << ',' << fmt17(cell.accuracy);
      for (const auto& cell : g.cells[r]) out << ',' << fmt17(cell.accuracy_stddev);
      out << '\n';
    }
    return out.str();
  }
  std::size_t w = std::string_view("Feature Set").size();
  for (const auto& l : g.row_labels) w = std::max(w, l.size());
  w += 2;
  auto header = [&] {
    out << pad("Feature Set", w, true);
    for (const auto& c : g.columns) out << pad(c, std::max<std::size_t>(6, c.size() + 2));
    out << '\n';
  };
  header();
  for (std::size_t r = 0; r < g.cells.size(); ++r) {
    out << pad(g.row_labels[r], w, true);
    for (std::size_t c = 0; c < g.columns.size(); ++c) {
      const auto pct = static_cast<long>(round_half_up(g.cells[r][c].accuracy * 100.0, 0));
      out << pad(std::to_string(pct), std::max<std::size_t>(6, g.columns[c].size() + 2));
    }
    out << '\n';
  }
  const bool repeated = !g.cells.empty() && g.cells[0][0].runs.size() > 1;
  if (repeated) {
    out << "\nstandard deviation over " << g.cells[0][0].runs.size() << " seeds (percentage points)\n";
    header();
    for (std::size_t r = 0; r < g.cells.size(); ++r) {
      out << pad(g.row_labels[r], w, true);
      for (std::size_t c = 0; c < g.columns.size(); ++c) {
        out << pad(fmt_fixed(g.cells[r][c].accuracy_stddev * 100.0, 1),
                   std::max<std::size_t>(6, g.columns[c].size() + 2));
      }
      out << '\n';
    }
  }
  out << "\nbest " << (g.row_labels.empty() ? "-" : g.row_labels[g.winner]) << '\n';
  out << "classifier " << g.classifier << "  config " << g.base_config_hash << "  seed " << g.seed << '\n';
  return out.str();
}

MetricsReport parse_report(std::string_view delimited) {
  const auto d = read_delimited(delimited);
  const auto& header = d.rows.front();
  if (header.size() != std::size(kReportColumns) || header[0] != "scope") {
    throw Error("evaluation", "unexpected report header");
  }
  MetricsReport report;
  bool have_all = false;
  for (std::size_t i = 1; i < d.rows.size(); ++i) {
    auto r = report_from_row(d.rows[i]);
    if (d.rows[i][0] == "all") {
      auto folds = std::move(report.folds);
      report = std::move(r);
      report.folds = std::move(folds);
      have_all = true;
    } else {
      report.folds.push_back(std::move(r));
    }
  }
  if (!have_all) throw Error("evaluation", "report lacks the pooled row");
  auto meta = [&](const char* key) {
    const auto it = d.meta.find(key);
    return it == d.meta.end() ? std::string() : it->second;
  };
  report.protocol = meta("protocol");
  report.classifier = meta("classifier");
  report.feature_sets = meta("feature_sets");
  report.config_hash = meta("config_hash");
  if (const auto s = meta("seed"); !s.empty()) report.seed = std::stoull(s);
  report.per_fold_average = meta("per_fold_average") == "1";
  return report;
}

AblationGrid parse_grid(std::string_view delimited) {
  const auto d = read_delimited(delimited);
  const auto& header = d.rows.front();
  if (header.empty() || header[0] != "feature_set" || header.size() % 2 != 1) {
    throw Error("evaluation", "unexpected grid header");
  }
  const std::size_t n_cols = (header.size() - 1) / 2;
  AblationGrid g;
  g.columns.assign(header.begin() + 1, header.begin() + 1 + static_cast<std::ptrdiff_t>(n_cols));
  for (std::size_t i = 1; i < d.rows.size(); ++i) {
    const auto& f = d.rows[i];
    if (f.size() != header.size()) throw Error("evaluation", "grid row has wrong field count");
    g.row_labels.push_back(f[0]);
    std::vector<AblationCell> cells(n_cols);
    for (std::size_t c = 0; c < n_cols; ++c) {
      cells[c].accuracy = parse_double(f[1 + c]);
      cells[c].accuracy_stddev = parse_double(f[1 + n_cols + c]);
    }
    g.cells.push_back(std::move(cells));
  }
  if (const auto it = d.meta.find("classifier"); it != d.meta.end()) g.classifier = it->second;
  if (const auto it = d.meta.find("seed"); it != d.meta.end()) g.seed = std::stoull(it->second);
  if (const auto it = d.meta.find("config_hash"); it != d.meta.end()) g.base_config_hash = it->second;
  if (const auto it = d.meta.find("winner"); it != d.meta.end()) g.winner = parse_count(it->second);
  return g;
}

}  // namespace sopeval::evaluation
