#pragma once

#include "covidprep/model.hpp"

namespace covidprep::model::detail {

double knn_predict_one(const KnnParams& p, std::span<const double> x);
MlpParams train_mlp(const ModelSpec& spec, const Matrix& X, std::span<const double> y);
ForestParams train_forest(const ModelSpec& spec, const Matrix& X, std::span<const double> y);
BoostParams train_boosting(const ModelSpec& spec, const Matrix& X, std::span<const double> y);

inline std::size_t param_size(const ModelSpec& spec, const char* name) {
  return static_cast<std::size_t>(spec.params.at(name));
}

}  // namespace covidprep::model::detail
