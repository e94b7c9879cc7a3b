#include "wfp/classify.hpp"

#include <cmath>

#include "wfp/error.hpp"

namespace wfp {

const char* to_string(Algorithm a) {
  switch (a) {
    case Algorithm::RF: return "rf";
    case Algorithm::ET: return "et";
    case Algorithm::KNN: return "knn";
    case Algorithm::NB: return "nb";
  }
  return "rf";
}

std::optional<Algorithm> algorithm_from_string(std::string_view s) {
  if (s == "rf" || s == "RF") return Algorithm::RF;
  if (s == "et" || s == "ET") return Algorithm::ET;
  if (s == "knn" || s == "KNN") return Algorithm::KNN;
  if (s == "nb" || s == "NB") return Algorithm::NB;
  return std::nullopt;
}

namespace {

void check_trainable(const Dataset& train) {
  if (train.classes.size() < 2) {
    throw FitError("fit: needs at least 2 classes, got " + std::to_string(train.classes.size()));
  }
  std::vector<uint64_t> per_class(train.classes.size(), 0);
  for (int32_t l : train.labels) ++per_class[static_cast<std::size_t>(l)];
  for (std::size_t c = 0; c < per_class.size(); ++c) {
    if (per_class[c] == 0) {
      throw FitError("fit: class \"" + train.classes[c] + "\" has no samples");
    }
  }
  std::size_t dim = train.dimension();
  for (std::size_t r = 0; r < train.n_rows(); ++r) {
    auto row = train.row(r);
    for (std::size_t f = 0; f < dim; ++f) {
      if (!std::isfinite(row[f])) {
        throw FitError("fit: non-finite value at row " + std::to_string(r) + ", dim " +
                       std::to_string(f));
      }
    }
  }
}

}  // namespace

Model fit(Algorithm algorithm, const Dataset& train, const Hyperparams& hp, uint64_t seed) {
  check_trainable(train);

  Model model;
  model.algorithm_ = algorithm;
  model.classes_ = train.classes;
  model.dim_ = train.dimension();
  model.schema_hash_ = train.schema.hash();
  model.seed_ = seed;

  switch (algorithm) {
    case Algorithm::RF:
    case Algorithm::ET:
      model.state_ = fit_forest(algorithm, train, hp, seed);
      break;
    case Algorithm::KNN:
      model.state_ = fit_knn(train, hp);
      break;
    case Algorithm::NB:
      model.state_ = fit_naive_bayes(train, hp);
      break;
  }
  return model;
}

Prediction Model::predict_proba(std::span<const double> x) const {
  if (x.size() != dim_) {
    throw InvalidParam("predict: expected dimension " + std::to_string(dim_) + ", got " +
                       std::to_string(x.size()));
  }
  if (const auto* forest = std::get_if<ForestState>(&state_)) {
    return forest_predict_proba(*forest, classes_.size(), x);
  }
  if (const auto* knn = std::get_if<KnnState>(&state_)) {
    return knn_predict_proba(*knn, classes_.size(), x);
  }
  return nb_predict_proba(std::get<NaiveBayesState>(state_), classes_.size(), x);
}

std::size_t Model::predict_index(std::span<const double> x) const {
  return predict_proba(x).top;
}

const std::string& Model::predict(std::span<const double> x) const {
  return classes_[predict_index(x)];
}

std::vector<double> Model::feature_importance() const {
  const auto* forest = std::get_if<ForestState>(&state_);
  if (!forest) {
    throw EvalError(std::string("feature_importance: unsupported for ") + to_string(algorithm_));
  }
  return forest->importance;
}

const std::vector<Tree>& Model::trees() const {
  const auto* forest = std::get_if<ForestState>(&state_);
  if (!forest) {
    throw EvalError(std::string("trees: not a tree ensemble: ") + to_string(algorithm_));
  }
  return forest->trees;
}

void Model::check_schema(const FeatureSchema& schema) const {
  if (schema.hash() != schema_hash_) {
    throw InvalidParam("model schema mismatch: expected dimension " + std::to_string(dim_) +
                       ", got schema of dimension " + std::to_string(schema.dimension()));
  }
}

}  // namespace wfp
