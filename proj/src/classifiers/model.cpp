#include "sopeval/classifiers/model.hpp"

#include <cmath>

#include "sopeval/error.hpp"

namespace sopeval::classifiers {
namespace {

using nlohmann::json;

json matrix_json(const Matrix& m) {
  return {{"rows", m.rows()}, {"cols", m.cols()}, {"data", m.data()}};
}

Matrix matrix_from(const json& j) {
  const auto rows = j.at("rows").get<std::size_t>();
  const auto cols = j.at("cols").get<std::size_t>();
  const auto data = j.at("data").get<std::vector<double>>();
  if (data.size() != rows * cols) throw Error("classifiers", "matrix payload has wrong length");
  Matrix m(rows, cols);
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) m(r, c) = data[r * cols + c];
  }
  return m;
}

template <typename Enum, typename Parse>
Enum parse_or_throw(const json& j, Parse parse, const char* what) {
  const auto s = j.get<std::string>();
  const auto v = parse(s);
  if (!v) throw Error("classifiers", std::string("unknown ") + what + " '" + s + "'");
  return *v;
}

json net_params_json(const NetParams& p) {
  return {{"hidden_sizes", p.hidden_sizes},
          {"activation", to_string(p.activation)},
          {"learning_rate", p.learning_rate},
          {"epochs", p.epochs},
          {"patience", p.patience},
          {"l2", p.l2},
          {"optimizer", to_string(p.optimizer)},
          {"seed", p.seed},
          {"variant", to_string(p.variant)}};
}

NetParams net_params_from(const json& j) {
  NetParams p;
  p.hidden_sizes = j.at("hidden_sizes").get<std::vector<int>>();
  p.activation = parse_or_throw<Activation>(j.at("activation"), parse_activation, "activation");
  p.learning_rate = j.at("learning_rate").get<double>();
  p.epochs = j.at("epochs").get<int>();
  p.patience = j.at("patience").get<int>();
  p.l2 = j.at("l2").get<double>();
  p.optimizer = parse_or_throw<Optimizer>(j.at("optimizer"), parse_optimizer, "optimizer");
  p.seed = j.at("seed").get<std::uint64_t>();
  p.variant = parse_or_throw<NetVariant>(j.at("variant"), parse_net_variant, "net variant");
  return p;
}

}  // namespace

std::string_view to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::svm: return "svm";
    case ModelKind::lr: return "lr";
    case ModelKind::rfdt: return "rfdt";
    case ModelKind::mlp: return "mlp";
    case ModelKind::ffnn: return "ffnn";
  }
  return "svm";
}

std::optional<ModelKind> parse_model_kind(std::string_view s) {
  for (auto k : {ModelKind::svm, ModelKind::lr, ModelKind::rfdt, ModelKind::mlp, ModelKind::ffnn}) {
    if (to_string(k) == s) return k;
  }
  return std::nullopt;
}

void ClassifierSpec::set_seed(std::uint64_t seed) {
  svm.seed = seed;
  forest.seed = seed;
  net.seed = seed;
}

json ClassifierSpec::to_json() const {
  auto net_json = net_params_json(net);
  return {{"kind", to_string(kind)},
          {"svm",
           {{"c", svm.c},
            {"kernel", to_string(svm.kernel.kind)},
            {"gamma", svm.kernel.gamma},
            {"tol", svm.tol},
            {"max_passes", svm.max_passes},
            {"seed", svm.seed}}},
          {"lr",
           {{"l2", lr.l2},
            {"learning_rate", lr.learning_rate},
            {"max_iters", lr.max_iters},
            {"tol", lr.tol},
            {"line_search", lr.line_search}}},
          {"rfdt",
           {{"n_trees", forest.n_trees},
            {"max_depth", forest.max_depth},
            {"features_per_split", forest.features_per_split},
            {"bootstrap", forest.bootstrap},
            {"seed", forest.seed}}},
          {"net", net_json},
          {"tune_fraction", tune_fraction}};
}

ClassifierSpec ClassifierSpec::from_json(const json& j) {
  ClassifierSpec s;
  try {
    s.kind = parse_or_throw<ModelKind>(j.at("kind"), parse_model_kind, "model kind");
    const auto& sv = j.at("svm");
    s.svm.c = sv.at("c").get<double>();
    s.svm.kernel.kind = parse_or_throw<KernelKind>(sv.at("kernel"), parse_kernel_kind, "kernel");
    s.svm.kernel.gamma = sv.at("gamma").get<double>();
    s.svm.tol = sv.at("tol").get<double>();
    s.svm.max_passes = sv.at("max_passes").get<int>();
    s.svm.seed = sv.at("seed").get<std::uint64_t>();
    const auto& lr = j.at("lr");
    s.lr.l2 = lr.at("l2").get<double>();
    s.lr.learning_rate = lr.at("learning_rate").get<double>();
    s.lr.max_iters = lr.at("max_iters").get<int>();
    s.lr.tol = lr.at("tol").get<double>();
    s.lr.line_search = lr.at("line_search").get<bool>();
    const auto& rf = j.at("rfdt");
    s.forest.n_trees = rf.at("n_trees").get<int>();
    s.forest.max_depth = rf.at("max_depth").get<int>();
    s.forest.features_per_split = rf.at("features_per_split").get<int>();
    s.forest.bootstrap = rf.at("bootstrap").get<bool>();
    s.forest.seed = rf.at("seed").get<std::uint64_t>();
    s.net = net_params_from(j.at("net"));
    s.tune_fraction = j.at("tune_fraction").get<double>();
  } catch (const json::exception& e) {
    throw Error("classifiers", std::string("malformed classifier spec: ") + e.what());
  }
  return s;
}

Classifier fit_classifier(const ClassifierSpec& spec, const LabeledMatrix& train, const LabeledMatrix* tune) {
  switch (spec.kind) {
    case ModelKind::svm: return train_svm(train, spec.svm);
    case ModelKind::lr: return train_lr(train, spec.lr);
    case ModelKind::rfdt: return train_rfdt(train, spec.forest);
    case ModelKind::mlp: {
      auto p = spec.net;
      p.variant = NetVariant::mlp_split;
      return train_net(train, nullptr, p);
    }
    case ModelKind::ffnn: {
      auto p = spec.net;
      p.variant = NetVariant::ffnn_tuned;
      return train_net(train, tune, p);
    }
  }
  throw Error("classifiers", "unknown model kind");
}

std::size_t input_dimension(const Classifier& model) {
  return std::visit([](const auto& m) { return m.input_dimension(); }, model);
}

double decision_value(const Classifier& model, std::span<const double> x) {
  return std::visit([&](const auto& m) { return m.decision_value(x); }, model);
}

Label label_for(double decision_value) { return decision_value > 0.0 ? Label::accepted : Label::rejected; }

Label predict(const Classifier& model, std::span<const double> x) { return label_for(decision_value(model, x)); }

json to_json(const Classifier& model) {
  return std::visit(
      [](const auto& m) -> json {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, SvmModel>) {
          return {{"type", "svm"},
                  {"kernel", to_string(m.kernel.kind)},
                  {"gamma", m.kernel.gamma},
                  {"c", m.c},
                  {"bias", m.bias},
                  {"support_vectors", matrix_json(m.support_vectors)},
                  {"coefficients", m.coefficients},
                  {"support_indices", m.support_indices},
                  {"alphas", m.alphas},
                  {"converged", m.converged},
                  {"iterations", m.iterations}};
        } else if constexpr (std::is_same_v<T, LrModel>) {
          return {{"type", "lr"},
                  {"weights", m.weights},
                  {"bias", m.bias},
                  {"l2", m.l2},
                  {"converged", m.converged},
                  {"iterations", m.iterations}};
        } else if constexpr (std::is_same_v<T, ForestModel>) {
          json trees = json::array();
          for (const auto& t : m.trees) {
            json nodes = json::array();
            for (const auto& n : t.nodes) {
              nodes.push_back({n.feature, n.threshold, n.left, n.right, n.label, n.n_accepted, n.n_rejected});
            }
            trees.push_back({{"seed", t.seed}, {"nodes", std::move(nodes)}});
          }
          return {{"type", "rfdt"},
                  {"features_per_split", m.features_per_split},
                  {"max_depth", m.max_depth},
                  {"bootstrap", m.bootstrap},
                  {"dimension", m.dimension},
                  {"trees", std::move(trees)}};
        } else {
          json layers = json::array();
          for (const auto& l : m.layers) layers.push_back({{"weights", matrix_json(l.weights)}, {"bias", l.bias}});
          return {{"type", "net"},
                  {"activation", to_string(m.activation)},
                  {"variant", to_string(m.variant)},
                  {"params", net_params_json(m.params)},
                  {"best_epoch", m.best_epoch},
                  {"epochs_run", m.train_loss.size()},
                  {"layers", std::move(layers)}};
        }
      },
      model);
}

Classifier classifier_from_json(const json& j) {
  try {
    const auto type = j.at("type").get<std::string>();
    if (type == "svm") {
      SvmModel m;
      m.kernel.kind = parse_or_throw<KernelKind>(j.at("kernel"), parse_kernel_kind, "kernel");
      m.kernel.gamma = j.at("gamma").get<double>();
      m.c = j.at("c").get<double>();
      m.bias = j.at("bias").get<double>();
      m.support_vectors = matrix_from(j.at("support_vectors"));
      m.coefficients = j.at("coefficients").get<std::vector<double>>();
      m.support_indices = j.at("support_indices").get<std::vector<std::size_t>>();
      m.alphas = j.at("alphas").get<std::vector<double>>();
      m.converged = j.at("converged").get<bool>();
      m.iterations = j.at("iterations").get<std::size_t>();
      if (m.coefficients.size() != m.support_vectors.rows() || m.alphas.size() != m.coefficients.size()) {
        throw Error("classifiers", "svm payload: support vector count mismatch");
      }
      return m;
    }
    if (type == "lr") {
      LrModel m;
      m.weights = j.at("weights").get<std::vector<double>>();
      m.bias = j.at("bias").get<double>();
      m.l2 = j.at("l2").get<double>();
      m.converged = j.at("converged").get<bool>();
      m.iterations = j.at("iterations").get<int>();
      return m;
    }
    if (type == "rfdt") {
      ForestModel m;
      m.features_per_split = j.at("features_per_split").get<int>();
      m.max_depth = j.at("max_depth").get<int>();
      m.bootstrap = j.at("bootstrap").get<bool>();
      m.dimension = j.at("dimension").get<std::size_t>();
      for (const auto& tj : j.at("trees")) {
        DecisionTree t;
        t.seed = tj.at("seed").get<std::uint64_t>();
        for (const auto& nj : tj.at("nodes")) {
          TreeNode n;
          n.feature = nj.at(0).get<int>();
          n.threshold = nj.at(1).get<double>();
          n.left = nj.at(2).get<int>();
          n.right = nj.at(3).get<int>();
          n.label = nj.at(4).get<int>();
          n.n_accepted = nj.at(5).get<int>();
          n.n_rejected = nj.at(6).get<int>();
          t.nodes.push_back(n);
        }
        const auto count = static_cast<int>(t.nodes.size());
        for (const auto& n : t.nodes) {
          if (!n.is_leaf() && (n.left <= 0 || n.left >= count || n.right <= 0 || n.right >= count ||
                               static_cast<std::size_t>(n.feature) >= m.dimension)) {
            throw Error("classifiers", "rfdt payload: bad node reference");
          }
        }
        if (t.nodes.empty()) throw Error("classifiers", "rfdt payload: empty tree");
        m.trees.push_back(std::move(t));
      }
      if (m.trees.empty()) throw Error("classifiers", "rfdt payload: no trees");
      return m;
    }
    if (type == "net") {
      NetModel m;
      m.activation = parse_or_throw<Activation>(j.at("activation"), parse_activation, "activation");
      m.variant = parse_or_throw<NetVariant>(j.at("variant"), parse_net_variant, "net variant");
      m.params = net_params_from(j.at("params"));
      m.best_epoch = j.at("best_epoch").get<int>();
      for (const auto& lj : j.at("layers")) {
        Layer l{matrix_from(lj.at("weights")), lj.at("bias").get<std::vector<double>>()};
        if (l.bias.size() != l.weights.rows()) throw Error("classifiers", "net payload: bias length mismatch");
        if (!m.layers.empty() && m.layers.back().weights.rows() != l.weights.cols()) {
          throw Error("classifiers", "net payload: incompatible layer dimensions");
        }
        m.layers.push_back(std::move(l));
      }
      if (m.layers.empty() || m.layers.back().weights.rows() != 1) {
        throw Error("classifiers", "net payload: output layer must have one unit");
      }
      return m;
    }
    throw Error("classifiers", "unknown model type '" + type + "'");
  } catch (const json::exception& e) {
    throw Error("classifiers", std::string("malformed model payload: ") + e.what());
  }
}

}  // namespace sopeval::classifiers
