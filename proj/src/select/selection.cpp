#include <algorithm>
#include <cmath>
#include <json.hpp>
#include <map>
#include <numeric>
#include <tuple>

#include "covidprep/select.hpp"

namespace covidprep::select {

std::string_view to_string(RemovalReason r) noexcept {
  switch (r) {
    case RemovalReason::ConstantOrEmpty: return "ConstantOrEmpty";
    case RemovalReason::Correlated: return "Correlated";
    case RemovalReason::HighVIF: return "HighVIF";
    case RemovalReason::ZeroCoefficient: return "ZeroCoefficient";
  }
  return "";
}

void FeatureMatrix::validate() const {
  if (names.size() != X.cols()) throw Error(ErrorCode::LengthMismatch, "feature names do not match X columns");
  if (y.size() != X.rows()) throw Error(ErrorCode::LengthMismatch, "target length does not match X rows");
}

FeatureMatrix FeatureMatrix::subset(std::span<const std::size_t> cols) const {
  FeatureMatrix out;
  for (std::size_t c : cols) out.names.push_back(names[c]);
  out.X = X.select_cols(cols);
  out.y = y;
  return out;
}

std::size_t FeatureMatrix::index_of(std::string_view name) const {
  auto it = std::find(names.begin(), names.end(), name);
  if (it == names.end()) throw Error(ErrorCode::MissingInput, "no feature named " + std::string(name));
  return static_cast<std::size_t>(it - names.begin());
}

FeatureMatrix FeatureMatrix::subset(const std::vector<std::string>& keep) const {
  std::vector<std::size_t> cols;
  for (const auto& name : keep) cols.push_back(index_of(name));
  return subset(cols);
}

FeatureMatrix make_feature_matrix(const SeriesFrame& frame, const std::vector<std::string>& features,
                                  const std::string& target, std::size_t begin, std::size_t end) {
  if (begin > end || end > frame.rows()) throw Error(ErrorCode::LengthMismatch, "row range outside the frame");
  FeatureMatrix fm;
  fm.names = features;
  fm.X = Matrix(end - begin, features.size());
  auto check = [&](const std::string& name, const Series& s) {
    for (std::size_t i = begin; i < end; ++i)
      if (is_missing(s[i])) throw Error(ErrorCode::MissingInput, name + " has a missing value");
  };
  for (std::size_t j = 0; j < features.size(); ++j) {
    const Series& s = frame.at(features[j]);
    check(features[j], s);
    for (std::size_t i = begin; i < end; ++i) fm.X(i - begin, j) = s[i];
  }
  const Series& t = frame.at(target);
  check(target, t);
  fm.y.assign(t.begin() + static_cast<std::ptrdiff_t>(begin), t.begin() + static_cast<std::ptrdiff_t>(end));
  return fm;
}

FilterResult correlation_filter_detailed(const FeatureMatrix& fm, double corr_th) {
  fm.validate();
  const std::size_t p = fm.names.size();
  std::vector<std::vector<double>> cols(p);
  std::vector<char> dropped(p, 0);
  FilterResult result;
  for (std::size_t j = 0; j < p; ++j) {
    cols[j] = fm.X.column(j);
    const auto [lo, hi] = std::minmax_element(cols[j].begin(), cols[j].end());
    if (cols[j].empty() || *lo == *hi) {
      dropped[j] = 1;
      result.removed.push_back({fm.names[j], RemovalReason::ConstantOrEmpty});
    }
  }

  std::vector<double> target_corr(p, 0.0);
  for (std::size_t j = 0; j < p; ++j) {
    if (dropped[j]) continue;
    const double r = pearson(cols[j], fm.y);
    target_corr[j] = std::isnan(r) ? 0.0 : std::fabs(r);
  }

  std::vector<std::tuple<double, std::size_t, std::size_t>> pairs;
  for (std::size_t i = 0; i < p; ++i) {
    if (dropped[i]) continue;
    for (std::size_t j = i + 1; j < p; ++j) {
      if (dropped[j]) continue;
      const double r = std::fabs(pearson(cols[i], cols[j]));
      if (r > corr_th) pairs.emplace_back(r, i, j);
    }
  }
  std::sort(pairs.begin(), pairs.end(), [](const auto& a, const auto& b) {
    if (std::get<0>(a) != std::get<0>(b)) return std::get<0>(a) > std::get<0>(b);
    return std::tie(std::get<1>(a), std::get<2>(a)) < std::tie(std::get<1>(b), std::get<2>(b));
  });
  for (const auto& [r, i, j] : pairs) {
    if (dropped[i] || dropped[j]) continue;
    const std::size_t loser = target_corr[i] >= target_corr[j] ? j : i;
    dropped[loser] = 1;
    result.removed.push_back({fm.names[loser], RemovalReason::Correlated});
  }

  std::vector<std::size_t> keep;
  for (std::size_t j = 0; j < p; ++j)
    if (!dropped[j]) keep.push_back(j);
  result.kept = fm.subset(keep);
  return result;
}

FeatureMatrix correlation_filter(const FeatureMatrix& fm, double corr_th) {
  return correlation_filter_detailed(fm, corr_th).kept;
}

LassoRefinement lasso_refine(const FeatureMatrix& fm) {
  fm.validate();
  const std::size_t n = fm.X.rows();
  const std::size_t p = fm.names.size();
  LassoRefinement out;
  if (p == 0) {
    out.kept = fm;
    return out;
  }
  const Matrix Xs = model::standardize_apply(fm.X, model::standardize_fit(fm.X));
  const double lambda_max = model::lasso_lambda_max(Xs, fm.y);

  constexpr std::size_t kPath = 20;
  std::vector<double> lambdas(kPath);
  for (std::size_t i = 0; i < kPath; ++i)
    lambdas[i] = lambda_max * std::pow(10.0, 1.0 - 5.0 * static_cast<double>(i) / static_cast<double>(kPath - 1));

  std::size_t best = 0;
  if (lambda_max > 0.0) {
    const auto folds = model::chronological_folds(n, 5);
    std::vector<double> cv(kPath, 0.0);
    for (const auto& [lo, hi] : folds) {
      std::vector<std::size_t> train;
      for (std::size_t i = 0; i < n; ++i)
        if (i < lo || i >= hi) train.push_back(i);
      std::vector<double> y_train(train.size());
      for (std::size_t i = 0; i < train.size(); ++i) y_train[i] = fm.y[train[i]];
      const auto path = model::elastic_net_path(Xs.select_rows(train), y_train, lambdas, 1.0);
      for (std::size_t l = 0; l < kPath; ++l) {
        double sse = 0.0;
        for (std::size_t i = lo; i < hi; ++i) {
          double pred = path[l].intercept;
          for (std::size_t j = 0; j < p; ++j) pred += path[l].coef[j] * Xs(i, j);
          sse += (fm.y[i] - pred) * (fm.y[i] - pred);
        }
        cv[l] += std::sqrt(sse / static_cast<double>(hi - lo)) / static_cast<double>(folds.size());
      }
    }
    for (std::size_t l = 1; l < kPath; ++l)
      if (cv[l] < cv[best]) best = l;
    const auto full = model::elastic_net_path(Xs, fm.y, std::span<const double>(lambdas).first(best + 1), 1.0);
    out.coef = full.back().coef;
  } else {
    out.coef.assign(p, 0.0);
  }
  out.lambda = lambdas[best];

  std::vector<std::size_t> keep;
  for (std::size_t j = 0; j < p; ++j) {
    if (std::fabs(out.coef[j]) >= 1e-10) keep.push_back(j);
    else out.dropped.push_back(fm.names[j]);
  }
  out.kept = fm.subset(keep);
  return out;
}

std::size_t SelectionTrace::removal_count() const {
  std::size_t count = filter_removals.size();
  for (const auto& it : iterations) count += it.removals.size();
  return count;
}

SelectionResult iterative_feature_selection(const FeatureMatrix& fm, const std::string& target,
                                            const SelectionOptions& options) {
  fm.validate();
  SelectionTrace trace;
  trace.target = target;
  trace.scope = options.scope;
  trace.rows = fm.X.rows();
  trace.vif_th = options.vif_th;
  trace.corr_th = options.corr_th;
  trace.seed = options.seed;
  trace.initial_features = fm.names;

  FilterResult filtered = correlation_filter_detailed(fm, options.corr_th);
  trace.filter_removals = filtered.removed;
  FeatureMatrix current = std::move(filtered.kept);
  if (current.names.empty()) throw Error(ErrorCode::Degenerate, "no feature survived the correlation filter");

  // MI and SFI depend only on (feature, target), so they are computed once.
  const Rng root(options.seed);
  std::map<std::string, std::pair<double, double>> univariate;
  for (std::size_t j = 0; j < current.names.size(); ++j) {
    const auto col = current.X.column(j);
    const double mi = mutual_information(col, current.y, options.mi_k, root.fork("mi:" + current.names[j]).seed());
    univariate[current.names[j]] = {mi, single_feature_impact(col, current.y)};
  }

  while (true) {
    const std::size_t p = current.names.size();
    TraceIteration it;
    const auto ols = model::fit(model::ModelSpec{model::ModelKind::OLS, {}, {}, options.seed}, current.X, current.y);
    const auto pfi = permutation_importance(ols, current, options.pfi_repeats, options.seed);
    std::vector<double> mi(p);
    std::vector<double> sfi(p);
    for (std::size_t j = 0; j < p; ++j) std::tie(mi[j], sfi[j]) = univariate.at(current.names[j]);
    const auto v = vif(current.X);
    const auto combined = combined_importance(pfi, mi, sfi);
    for (std::size_t j = 0; j < p; ++j) it.records.push_back({current.names[j], pfi[j], mi[j], sfi[j], v[j], combined[j]});
    it.max_vif = *std::max_element(v.begin(), v.end());

    if (it.max_vif <= options.vif_th) {
      trace.iterations.push_back(std::move(it));
      break;
    }

    std::size_t victim = p;
    for (std::size_t j = 0; j < p; ++j) {
      if (!(v[j] > options.vif_th)) continue;
      if (victim == p || combined[j] < combined[victim]) victim = j;
    }
    it.removals.push_back({current.names[victim], RemovalReason::HighVIF});
    std::vector<std::size_t> keep;
    for (std::size_t j = 0; j < p; ++j)
      if (j != victim) keep.push_back(j);
    current = current.subset(keep);

    if (!current.names.empty()) {
      LassoRefinement refined = lasso_refine(current);
      it.lasso_lambda = refined.lambda;
      for (const auto& name : refined.dropped) it.removals.push_back({name, RemovalReason::ZeroCoefficient});
      current = std::move(refined.kept);
    }
    trace.iterations.push_back(std::move(it));
    if (current.names.empty()) throw Error(ErrorCode::Degenerate, "feature selection removed every feature");
  }

  trace.final_features = current.names;
  return SelectionResult{current.names, std::move(trace)};
}

namespace {

using json = nlohmann::ordered_json;

json number_or_inf(double v) { return std::isinf(v) ? json("inf") : json(v); }

json removals_json(const std::vector<Removal>& removals) {
  json arr = json::array();
  for (const auto& r : removals) arr.push_back(json{{"feature", r.feature}, {"reason", to_string(r.reason)}});
  return arr;
}

}  // namespace

std::string to_json(const SelectionTrace& trace) {
  json j;
  j["target"] = trace.target;
  j["scope"] = trace.scope;
  j["rows"] = trace.rows;
  j["vif_th"] = trace.vif_th;
  j["corr_th"] = trace.corr_th;
  j["seed"] = trace.seed;
  j["initial_features"] = trace.initial_features;
  j["filter_removals"] = removals_json(trace.filter_removals);
  json iterations = json::array();
  for (std::size_t i = 0; i < trace.iterations.size(); ++i) {
    const auto& it = trace.iterations[i];
    json records = json::array();
    for (const auto& r : it.records) {
      records.push_back(json{{"feature", r.feature},
                             {"pfi", r.pfi},
                             {"mi", r.mi},
                             {"sfi", r.sfi},
                             {"vif", number_or_inf(r.vif)},
                             {"combined", r.combined}});
    }
    json entry{{"iteration", i + 1}, {"records", records}, {"max_vif", number_or_inf(it.max_vif)}};
    entry["removals"] = removals_json(it.removals);
    if (it.lasso_lambda) entry["lasso_lambda"] = *it.lasso_lambda;
    iterations.push_back(std::move(entry));
  }
  j["iterations"] = iterations;
  j["final_features"] = trace.final_features;
  return j.dump(2) + "\n";
}

}  // namespace covidprep::select
