#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "covidprep/model.hpp"

namespace covidprep::model {

std::string_view to_string(ModelKind k) noexcept {
  switch (k) {
    case ModelKind::OLS: return "OLS";
    case ModelKind::Ridge: return "Ridge";
    case ModelKind::Lasso: return "Lasso";
    case ModelKind::ElasticNet: return "ElasticNet";
    case ModelKind::KNN: return "KNN";
    case ModelKind::DecisionTree: return "DecisionTree";
    case ModelKind::RandomForest: return "RandomForest";
    case ModelKind::GradientBoosting: return "GradientBoosting";
    case ModelKind::MLP: return "MLP";
  }
  return "";
}

ModelKind model_kind_from_string(std::string_view s) {
  for (ModelKind k : kAllKinds)
    if (to_string(k) == s || display_name(k) == s) return k;
  throw Error(ErrorCode::InvalidConfig, "unknown model kind '" + std::string(s) + "'");
}

std::string_view display_name(ModelKind k) noexcept {
  switch (k) {
    case ModelKind::OLS: return "LinearRegression";
    case ModelKind::Ridge: return "Ridge";
    case ModelKind::Lasso: return "Lasso";
    case ModelKind::ElasticNet: return "ElasticNet";
    case ModelKind::KNN: return "KNeighborsRegressor";
    case ModelKind::DecisionTree: return "DecisionTreeRegressor";
    case ModelKind::RandomForest: return "RandomForestRegressor";
    case ModelKind::GradientBoosting: return "GradientBoostingRegressor";
    case ModelKind::MLP: return "MLPRegressor";
  }
  return "";
}

bool is_nonlinear(ModelKind k) noexcept {
  switch (k) {
    case ModelKind::KNN:
    case ModelKind::DecisionTree:
    case ModelKind::RandomForest:
    case ModelKind::GradientBoosting:
    case ModelKind::MLP:
      return true;
    default:
      return false;
  }
}

namespace {

struct Range {
  double lo;
  double hi;
  bool integer;
  bool lo_open = false;
};

struct ParamDef {
  const char* name;
  double fallback;
  Range range;
};

constexpr double kBig = 1e300;

std::vector<ParamDef> definitions(ModelKind k) {
  switch (k) {
    case ModelKind::OLS: return {};
    case ModelKind::Ridge:
    case ModelKind::Lasso: return {{"lambda", 1.0, {0.0, kBig, false}}};
    case ModelKind::ElasticNet: return {{"lambda", 1.0, {0.0, kBig, false}}, {"mix", 0.5, {0.0, 1.0, false}}};
    case ModelKind::KNN: return {{"k", 5.0, {1.0, kBig, true}}};
    case ModelKind::DecisionTree:
      return {{"max_depth", 0.0, {0.0, kBig, true}}, {"min_samples_leaf", 1.0, {1.0, kBig, true}}};
    case ModelKind::RandomForest:
      return {{"n_trees", 100.0, {1.0, kBig, true}},
              {"max_depth", 0.0, {0.0, kBig, true}},
              {"min_samples_leaf", 1.0, {1.0, kBig, true}}};
    case ModelKind::GradientBoosting:
      return {{"n_stages", 100.0, {1.0, kBig, true}},
              {"learning_rate", 0.1, {0.0, 1.0, false, true}},
              {"max_depth", 3.0, {1.0, kBig, true}},
              {"subsample", 1.0, {0.0, 1.0, false, true}}};
    case ModelKind::MLP:
      return {{"learning_rate", 1e-3, {0.0, kBig, false, true}}, {"batch_size", 32.0, {1.0, kBig, true}},
              {"max_epochs", 500.0, {1.0, kBig, true}},          {"momentum", 0.9, {0.0, 1.0, false}},
              {"patience", 20.0, {1.0, kBig, true}},              {"tol", 1e-4, {0.0, kBig, false}},
              {"validation_fraction", 0.1, {0.0, 0.5, false}}};
  }
  return {};
}

}  // namespace

ModelSpec normalized(ModelSpec spec) {
  const auto defs = definitions(spec.kind);
  for (const auto& [name, value] : spec.params) {
    auto it = std::find_if(defs.begin(), defs.end(), [&](const ParamDef& d) { return name == d.name; });
    if (it == defs.end()) {
      throw Error(ErrorCode::InvalidConfig,
                  "hyperparameter '" + name + "' is not valid for " + std::string(to_string(spec.kind)));
    }
    const Range& r = it->range;
    const bool below = r.lo_open ? !(value > r.lo) : !(value >= r.lo);
    if (below || !(value <= r.hi) || (r.integer && std::floor(value) != value)) {
      throw Error(ErrorCode::InvalidConfig, "hyperparameter '" + name + "' out of range");
    }
  }
  for (const auto& d : defs) spec.params.try_emplace(d.name, d.fallback);
  if (spec.kind == ModelKind::MLP) {
    if (spec.hidden.empty()) spec.hidden = {64};
    for (int w : spec.hidden)
      if (w < 1) throw Error(ErrorCode::InvalidConfig, "hidden layer widths must be positive");
  } else if (!spec.hidden.empty()) {
    throw Error(ErrorCode::InvalidConfig, "'hidden' is only valid for MLP");
  }
  return spec;
}

std::string describe(const ModelSpec& spec) {
  std::ostringstream os;
  os << to_string(spec.kind) << '(';
  bool first = true;
  for (const auto& [k, v] : spec.params) {
    os << (first ? "" : ", ") << k << '=' << format_double(v);
    first = false;
  }
  if (!spec.hidden.empty()) {
    os << (first ? "" : ", ") << "hidden=[";
    for (std::size_t i = 0; i < spec.hidden.size(); ++i) os << (i ? "," : "") << spec.hidden[i];
    os << ']';
  }
  os << ')';
  return os.str();
}

std::vector<ModelSpec> default_grid(ModelKind kind) {
  std::vector<ModelSpec> grid;
  auto push = [&](std::map<std::string, double> params, std::vector<int> hidden = {}) {
    grid.push_back(normalized(ModelSpec{kind, std::move(params), std::move(hidden), 0}));
  };
  const double lambdas[] = {1e-3, 1e-2, 1e-1, 1.0, 10.0};
  switch (kind) {
    case ModelKind::OLS:
      push({});
      break;
    case ModelKind::Ridge:
    case ModelKind::Lasso:
      for (double l : lambdas) push({{"lambda", l}});
      break;
    case ModelKind::ElasticNet:
      for (double l : lambdas)
        for (double m : {0.2, 0.5, 0.8}) push({{"lambda", l}, {"mix", m}});
      break;
    case ModelKind::KNN:
      for (double k : {3.0, 5.0, 9.0, 15.0}) push({{"k", k}});
      break;
    case ModelKind::DecisionTree:
      for (double d : {4.0, 8.0, 16.0, 0.0})
        for (double leaf : {1.0, 5.0}) push({{"max_depth", d}, {"min_samples_leaf", leaf}});
      break;
    case ModelKind::RandomForest:
      for (double b : {100.0, 300.0}) push({{"n_trees", b}});
      break;
    case ModelKind::GradientBoosting:
      for (double m : {200.0, 500.0})
        for (double nu : {0.05, 0.1})
          for (double d : {2.0, 3.0}) push({{"n_stages", m}, {"learning_rate", nu}, {"max_depth", d}});
      break;
    case ModelKind::MLP:
      for (const auto& h : {std::vector<int>{64}, std::vector<int>{64, 32}})
        for (double lr : {1e-3, 1e-2}) push({{"learning_rate", lr}, {"batch_size", 32.0}, {"max_epochs", 500.0}}, h);
      break;
  }
  return grid;
}

}  // namespace covidprep::model
