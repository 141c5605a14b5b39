#include "covidprep/eval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <json.hpp>
#include <sstream>

namespace covidprep::eval {

double rmse(std::span<const double> y, std::span<const double> y_hat) {
  if (y.size() != y_hat.size()) throw Error(ErrorCode::LengthMismatch, "rmse inputs differ in length");
  if (y.empty()) throw Error(ErrorCode::Empty, "rmse of an empty vector");
  double sse = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) sse += (y[i] - y_hat[i]) * (y[i] - y_hat[i]);
  return std::sqrt(sse / static_cast<double>(y.size()));
}

double r2(std::span<const double> y, std::span<const double> y_hat) {
  if (y.size() != y_hat.size()) throw Error(ErrorCode::LengthMismatch, "r2 inputs differ in length");
  if (y.size() < 2) throw Error(ErrorCode::ZeroVariance, "r2 needs at least two values");
  double mean = 0.0;
  for (double v : y) mean += v;
  mean /= static_cast<double>(y.size());
  double sse = 0.0;
  double sst = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    sse += (y[i] - y_hat[i]) * (y[i] - y_hat[i]);
    sst += (y[i] - mean) * (y[i] - mean);
  }
  if (!(sst > 0.0)) throw Error(ErrorCode::ZeroVariance, "target has zero variance");
  return 1.0 - sse / sst;
}

double rmse_variance(double a, double b, double c) {
  // Same value as the mean-deviation form, but exactly 0 for equal inputs.
  return ((a - b) * (a - b) + (b - c) * (b - c) + (a - c) * (a - c)) / 9.0;
}

void SplitSpec::validate() const {
  if (!(train > 0.0) || !(validation > 0.0) || !(test > 0.0)) {
    throw Error(ErrorCode::InvalidConfig, "split fractions must be positive");
  }
  if (std::fabs(train + validation + test - 1.0) > 1e-12) {
    throw Error(ErrorCode::InvalidConfig, "split fractions must sum to 1");
  }
}

SplitRanges split_chronological(std::size_t n, const SplitSpec& spec) {
  spec.validate();
  const double dn = static_cast<double>(n);
  const auto a = static_cast<std::size_t>(std::floor(dn * spec.train));
  const auto b = static_cast<std::size_t>(std::floor(dn * (spec.train + spec.validation)));
  SplitRanges r{{0, a}, {a, b}, {b, n}};
  if (r.train.size() == 0 || r.validation.size() == 0 || r.test.size() == 0) {
    throw Error(ErrorCode::TooFewRows, std::to_string(n) + " rows cannot fill three non-empty splits");
  }
  return r;
}

namespace {

SplitScores score(const model::TrainedModel& m, const Matrix& X, std::span<const double> y) {
  const auto pred = model::predict(m, X);
  SplitScores s;
  s.rmse = rmse(y, pred);
  try {
    s.r2 = r2(y, pred);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::ZeroVariance) throw;
  }
  return s;
}

}  // namespace

EvalReport evaluate_splits(const select::FeatureMatrix& train, const select::FeatureMatrix& validation,
                           const select::FeatureMatrix& test, const EvalConfig& config) {
  train.validate();
  validation.validate();
  test.validate();
  EvalReport report;
  report.features = train.names;
  report.scaler = model::standardize_fit(train.X);
  const Matrix Xtr = model::standardize_apply(train.X, report.scaler);
  const Matrix Xva = model::standardize_apply(validation.X, report.scaler);
  const Matrix Xte = model::standardize_apply(test.X, report.scaler);

  for (model::ModelKind kind : config.kinds) {
    auto override_it = config.grids.find(kind);
    const auto grid = override_it != config.grids.end() ? override_it->second : model::default_grid(kind);
    model::GridResult tuned = model::kfold_grid_search(grid, Xtr, train.y, config.cv_folds, config.seed);
    auto fitted = std::make_shared<model::TrainedModel>(model::fit(tuned.best, Xtr, train.y, train.names));

    ModelResult r;
    r.kind = kind;
    r.best = tuned.best;
    r.cv = std::move(tuned.table);
    r.train = score(*fitted, Xtr, train.y);
    r.validation = score(*fitted, Xva, validation.y);
    r.test = score(*fitted, Xte, test.y);
    r.rmse_variance = rmse_variance(r.train.rmse, r.validation.rmse, r.test.rmse);
    r.converged = fitted->converged;
    r.model = std::move(fitted);
    report.results.push_back(std::move(r));
  }
  std::stable_sort(report.results.begin(), report.results.end(),
                   [](const ModelResult& a, const ModelResult& b) { return a.test.rmse < b.test.rmse; });
  return report;
}

EvalReport evaluate_pipeline(const SeriesFrame& frame, const std::vector<std::string>& features,
                             const std::string& target, const EvalConfig& config, const std::string& pipeline) {
  const SplitRanges split = split_chronological(frame.rows(), config.split);
  auto part = [&](const Range& r) { return select::make_feature_matrix(frame, features, target, r.begin, r.end); };
  EvalReport report = evaluate_splits(part(split.train), part(split.validation), part(split.test), config);
  report.pipeline = pipeline;
  report.target = target;
  report.split = split;
  report.input_digest = frame.meta().source_digest;
  return report;
}

namespace {

std::string fixed3(double v) {
  if (!std::isfinite(v)) return std::isnan(v) ? "nan" : (v > 0 ? "inf" : "-inf");
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  // Avoid a "-0.000" cell for tiny negative values.
  if (std::string_view(buf) == "-0.000") return "0.000";
  return buf;
}

}  // namespace

std::string report_csv(const EvalReport& report, bool header) {
  std::ostringstream os;
  if (header) os << "Pipeline,Model,Test RMSE,Test R²,RMSE Variance\n";
  for (const auto& r : report.results) {
    os << report.pipeline << ',' << model::display_name(r.kind) << ',' << fixed3(r.test.rmse) << ','
       << (r.test.r2 ? fixed3(*r.test.r2) : std::string("ZeroVariance")) << ',' << fixed3(r.rmse_variance) << '\n';
  }
  os << report.pipeline << ",SVR,not implemented,not implemented,not implemented\n";
  return os.str();
}

namespace {

using json = nlohmann::ordered_json;

json finite_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json scores_json(const SplitScores& s) {
  json j{{"rmse", s.rmse}};
  if (s.r2) j["r2"] = *s.r2;
  else {
    j["r2"] = nullptr;
    j["r2_flag"] = "ZeroVariance";
  }
  return j;
}

}  // namespace

std::string report_json(const EvalReport& report) {
  json j;
  j["pipeline"] = report.pipeline;
  j["target"] = report.target;
  j["input_digest"] = report.input_digest;
  j["features"] = report.features;
  j["split"] = json{{"train", {report.split.train.begin, report.split.train.end}},
                    {"validation", {report.split.validation.begin, report.split.validation.end}},
                    {"test", {report.split.test.begin, report.split.test.end}}};
  j["scaler"] = json{{"mean", report.scaler.mean}, {"std", report.scaler.std}};
  json models = json::array();
  for (const auto& r : report.results) {
    json m;
    m["model"] = model::display_name(r.kind);
    m["kind"] = model::to_string(r.kind);
    m["best_hyperparameters"] = r.best.params;
    if (!r.best.hidden.empty()) m["hidden"] = r.best.hidden;
    m["seed"] = r.best.seed;
    m["train"] = scores_json(r.train);
    m["validation"] = scores_json(r.validation);
    m["test"] = scores_json(r.test);
    m["rmse_variance"] = r.rmse_variance;
    m["converged"] = r.converged;
    json cv = json::array();
    for (const auto& row : r.cv) {
      json folds = json::array();
      for (double f : row.fold_rmse) folds.push_back(finite_or_null(f));
      json entry{{"hyperparameters", row.spec.params}};
      if (!row.spec.hidden.empty()) entry["hidden"] = row.spec.hidden;
      entry["fold_rmse"] = folds;
      entry["mean_rmse"] = finite_or_null(row.mean_rmse);
      cv.push_back(std::move(entry));
    }
    m["cv"] = cv;
    models.push_back(std::move(m));
  }
  models.push_back(json{{"model", "SVR"}, {"status", "not implemented"}});
  j["models"] = models;
  return j.dump(2) + "\n";
}

std::string series_csv(const std::vector<Date>& dates, const Series& original, const Series& processed) {
  if (dates.size() != original.size() || dates.size() != processed.size()) {
    throw Error(ErrorCode::LengthMismatch, "series export inputs differ in length");
  }
  std::string out = "date,original,processed\n";
  for (std::size_t i = 0; i < dates.size(); ++i) {
    out += format_date(dates[i]);
    out += ',';
    if (!is_missing(original[i])) out += format_double(original[i]);
    out += ',';
    if (!is_missing(processed[i])) out += format_double(processed[i]);
    out += '\n';
  }
  return out;
}

}  // namespace covidprep::eval
