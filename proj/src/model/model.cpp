#include <algorithm>
#include <cmath>
#include <json.hpp>
#include <numeric>

#include "internal.hpp"

namespace covidprep::model {

ScalerParams standardize_fit(const Matrix& X) {
  if (X.rows() == 0) throw Error(ErrorCode::EmptyMatrix, "cannot fit a scaler on zero rows");
  ScalerParams p;
  p.mean.resize(X.cols());
  p.std.resize(X.cols());
  const double n = static_cast<double>(X.rows());
  for (std::size_t j = 0; j < X.cols(); ++j) {
    double s = 0.0;
    for (std::size_t i = 0; i < X.rows(); ++i) s += X(i, j);
    const double mean = s / n;
    double ss = 0.0;
    for (std::size_t i = 0; i < X.rows(); ++i) ss += (X(i, j) - mean) * (X(i, j) - mean);
    const double sd = std::sqrt(ss / n);
    p.mean[j] = mean;
    p.std[j] = sd < kMinScale ? 1.0 : sd;
  }
  return p;
}

Matrix standardize_apply(const Matrix& X, const ScalerParams& params) {
  if (X.cols() != params.mean.size()) throw Error(ErrorCode::LengthMismatch, "scaler width differs from X");
  Matrix out = X;
  for (std::size_t i = 0; i < X.rows(); ++i)
    for (std::size_t j = 0; j < X.cols(); ++j) out(i, j) = (X(i, j) - params.mean[j]) / params.std[j];
  return out;
}

TrainedModel fit(const ModelSpec& raw_spec, const Matrix& X, std::span<const double> y,
                 std::vector<std::string> feature_names) {
  const ModelSpec spec = normalized(raw_spec);
  if (X.rows() != y.size()) throw Error(ErrorCode::LengthMismatch, "X and y row counts differ");
  if (X.rows() == 0) throw Error(ErrorCode::EmptyMatrix, "no training rows");
  if (!feature_names.empty() && feature_names.size() != X.cols()) {
    throw Error(ErrorCode::LengthMismatch, "feature name count differs from X width");
  }
  if (spec.kind == ModelKind::OLS && X.rows() <= X.cols()) {
    throw Error(ErrorCode::TooFewRows, "OLS needs more rows than columns");
  }

  TrainedModel m;
  m.spec = spec;
  m.n_rows = X.rows();
  m.n_features = X.cols();
  m.feature_names = std::move(feature_names);
  const auto& hp = spec.params;
  switch (spec.kind) {
    case ModelKind::OLS:
      m.params = fit_ols(X, y);
      break;
    case ModelKind::Ridge:
      m.params = fit_ridge(X, y, hp.at("lambda"));
      break;
    case ModelKind::Lasso:
    case ModelKind::ElasticNet: {
      const double mix = spec.kind == ModelKind::Lasso ? 1.0 : hp.at("mix");
      LinearParams p = fit_elastic_net(X, y, hp.at("lambda"), mix);
      m.converged = p.converged;
      m.params = std::move(p);
      break;
    }
    case ModelKind::KNN:
      m.params = KnnParams{detail::param_size(spec, "k"), X, std::vector<double>(y.begin(), y.end())};
      break;
    case ModelKind::DecisionTree: {
      TreeOptions options;
      options.max_depth = detail::param_size(spec, "max_depth");
      options.min_samples_leaf = detail::param_size(spec, "min_samples_leaf");
      std::vector<std::size_t> rows(X.rows());
      std::iota(rows.begin(), rows.end(), std::size_t{0});
      m.params = build_tree(X, y, rows, options);
      break;
    }
    case ModelKind::RandomForest:
      m.params = detail::train_forest(spec, X, y);
      break;
    case ModelKind::GradientBoosting:
      m.params = detail::train_boosting(spec, X, y);
      break;
    case ModelKind::MLP:
      m.params = detail::train_mlp(spec, X, y);
      break;
  }
  return m;
}

namespace {

struct RowPredictor {
  std::span<const double> x;

  double operator()(const LinearParams& p) const {
    double v = p.intercept;
    for (std::size_t j = 0; j < p.coef.size(); ++j) v += p.coef[j] * x[j];
    return v;
  }
  double operator()(const KnnParams& p) const { return detail::knn_predict_one(p, x); }
  double operator()(const Tree& t) const { return t.predict(x); }
  double operator()(const ForestParams& p) const {
    double s = 0.0;
    for (const auto& t : p.trees) s += t.predict(x);
    return s / static_cast<double>(p.trees.size());
  }
  double operator()(const BoostParams& p) const {
    double v = p.init;
    for (const auto& t : p.trees) v += p.learning_rate * t.predict(x);
    return v;
  }
  double operator()(const MlpParams& p) const { return p.y_mean + p.y_scale * mlp_forward(p.net, x); }
};

}  // namespace

std::vector<double> predict(const TrainedModel& model, const Matrix& X) {
  if (X.cols() != model.n_features) {
    throw Error(ErrorCode::LengthMismatch, "model expects " + std::to_string(model.n_features) + " features, got " +
                                               std::to_string(X.cols()));
  }
  std::vector<double> out(X.rows());
  for (std::size_t i = 0; i < X.rows(); ++i) out[i] = std::visit(RowPredictor{X.row(i)}, model.params);
  return out;
}

std::vector<double> predict(const TrainedModel& model, const Matrix& X, const std::vector<std::string>& feature_names) {
  if (feature_names != model.feature_names) {
    throw Error(ErrorCode::LengthMismatch, "feature names differ from the training features");
  }
  return predict(model, X);
}

// ---------------------------------------------------------------------------
// JSON

namespace {

using json = nlohmann::ordered_json;
constexpr int kFormatVersion = 1;

json tree_json(const Tree& t) {
  json nodes = json::array();
  for (const auto& n : t.nodes) nodes.push_back(json::array({n.feature, n.threshold, n.left, n.right, n.value}));
  return nodes;
}

Tree tree_from(const json& j) {
  Tree t;
  for (const auto& n : j)
    t.nodes.push_back(TreeNode{n.at(0).get<int>(), n.at(1).get<double>(), n.at(2).get<int>(), n.at(3).get<int>(),
                               n.at(4).get<double>()});
  if (t.nodes.empty()) throw Error(ErrorCode::InvalidConfig, "empty tree in model document");
  const int size = static_cast<int>(t.nodes.size());
  // Children always follow their parent, which also rules out cycles.
  for (int i = 0; i < size; ++i) {
    const TreeNode& n = t.nodes[static_cast<std::size_t>(i)];
    if (n.feature >= 0 && (n.left <= i || n.left >= size || n.right <= i || n.right >= size)) {
      throw Error(ErrorCode::InvalidConfig, "tree child index out of range");
    }
  }
  return t;
}

struct ParamsToJson {
  json operator()(const LinearParams& p) const {
    return json{{"coef", p.coef}, {"intercept", p.intercept}, {"converged", p.converged}, {"sweeps", p.sweeps}};
  }
  json operator()(const KnnParams& p) const {
    json rows = json::array();
    for (std::size_t i = 0; i < p.X.rows(); ++i) {
      auto r = p.X.row(i);
      rows.push_back(std::vector<double>(r.begin(), r.end()));
    }
    return json{{"k", p.k}, {"X", rows}, {"y", p.y}};
  }
  json operator()(const Tree& t) const { return json{{"nodes", tree_json(t)}}; }
  json operator()(const ForestParams& p) const {
    json trees = json::array();
    for (const auto& t : p.trees) trees.push_back(tree_json(t));
    return json{{"trees", trees}};
  }
  json operator()(const BoostParams& p) const {
    json trees = json::array();
    for (const auto& t : p.trees) trees.push_back(tree_json(t));
    return json{{"init", p.init}, {"learning_rate", p.learning_rate}, {"trees", trees}};
  }
  json operator()(const MlpParams& p) const {
    json layers = json::array();
    for (const auto& l : p.net.layers)
      layers.push_back(json{{"in", l.in}, {"out", l.out}, {"weights", l.weights}, {"bias", l.bias}});
    return json{{"y_mean", p.y_mean}, {"y_scale", p.y_scale}, {"epochs", p.epochs}, {"layers", layers}};
  }
};

LearnedParams params_from(ModelKind kind, const json& j, std::size_t n_features) {
  switch (kind) {
    case ModelKind::OLS:
    case ModelKind::Ridge:
    case ModelKind::Lasso:
    case ModelKind::ElasticNet: {
      LinearParams p;
      p.coef = j.at("coef").get<std::vector<double>>();
      p.intercept = j.at("intercept").get<double>();
      p.converged = j.at("converged").get<bool>();
      p.sweeps = j.at("sweeps").get<std::size_t>();
      if (p.coef.size() != n_features) throw Error(ErrorCode::InvalidConfig, "coefficient count mismatch");
      return p;
    }
    case ModelKind::KNN: {
      KnnParams p;
      p.k = j.at("k").get<std::size_t>();
      p.y = j.at("y").get<std::vector<double>>();
      const auto& rows = j.at("X");
      p.X = Matrix(rows.size(), n_features);
      for (std::size_t i = 0; i < rows.size(); ++i) {
        auto r = rows[i].get<std::vector<double>>();
        if (r.size() != n_features) throw Error(ErrorCode::InvalidConfig, "KNN row width mismatch");
        std::copy(r.begin(), r.end(), p.X.row(i).begin());
      }
      if (p.y.size() != p.X.rows() || p.k == 0) throw Error(ErrorCode::InvalidConfig, "bad KNN parameters");
      return p;
    }
    case ModelKind::DecisionTree:
      return tree_from(j.at("nodes"));
    case ModelKind::RandomForest: {
      ForestParams p;
      for (const auto& t : j.at("trees")) p.trees.push_back(tree_from(t));
      return p;
    }
    case ModelKind::GradientBoosting: {
      BoostParams p;
      p.init = j.at("init").get<double>();
      p.learning_rate = j.at("learning_rate").get<double>();
      for (const auto& t : j.at("trees")) p.trees.push_back(tree_from(t));
      return p;
    }
    case ModelKind::MLP: {
      MlpParams p;
      p.y_mean = j.at("y_mean").get<double>();
      p.y_scale = j.at("y_scale").get<double>();
      p.epochs = j.at("epochs").get<std::size_t>();
      std::size_t in = n_features;
      for (const auto& l : j.at("layers")) {
        DenseLayer layer{l.at("in").get<std::size_t>(), l.at("out").get<std::size_t>(),
                         l.at("weights").get<std::vector<double>>(), l.at("bias").get<std::vector<double>>()};
        if (layer.in != in || layer.weights.size() != layer.in * layer.out || layer.bias.size() != layer.out) {
          throw Error(ErrorCode::InvalidConfig, "MLP layer shape mismatch");
        }
        in = layer.out;
        p.net.layers.push_back(std::move(layer));
      }
      if (p.net.layers.empty() || in != 1) throw Error(ErrorCode::InvalidConfig, "MLP must end in one output");
      return p;
    }
  }
  throw Error(ErrorCode::InvalidConfig, "unknown model kind");
}

}  // namespace

std::string to_json(const TrainedModel& model) {
  json j;
  j["format"] = "covidprep-model";
  j["version"] = kFormatVersion;
  j["kind"] = to_string(model.spec.kind);
  j["hyperparameters"] = model.spec.params;
  if (!model.spec.hidden.empty()) j["hidden"] = model.spec.hidden;
  j["seed"] = model.spec.seed;
  j["n_rows"] = model.n_rows;
  j["n_features"] = model.n_features;
  j["feature_names"] = model.feature_names;
  j["converged"] = model.converged;
  j["learned"] = std::visit(ParamsToJson{}, model.params);
  return j.dump() + "\n";
}

TrainedModel model_from_json(std::string_view text) {
  try {
    const json j = json::parse(text);
    if (j.at("format").get<std::string>() != "covidprep-model") {
      throw Error(ErrorCode::InvalidConfig, "not a model document");
    }
    if (j.at("version").get<int>() != kFormatVersion) {
      throw Error(ErrorCode::InvalidConfig, "unsupported model format version");
    }
    TrainedModel m;
    m.spec.kind = model_kind_from_string(j.at("kind").get<std::string>());
    m.spec.params = j.at("hyperparameters").get<std::map<std::string, double>>();
    if (j.contains("hidden")) m.spec.hidden = j.at("hidden").get<std::vector<int>>();
    m.spec.seed = j.at("seed").get<std::uint64_t>();
    m.spec = normalized(m.spec);
    m.n_rows = j.at("n_rows").get<std::size_t>();
    m.n_features = j.at("n_features").get<std::size_t>();
    m.feature_names = j.at("feature_names").get<std::vector<std::string>>();
    m.converged = j.at("converged").get<bool>();
    m.params = params_from(m.spec.kind, j.at("learned"), m.n_features);
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::InvalidConfig, std::string("malformed model document: ") + e.what());
  }
}

}  // namespace covidprep::model
