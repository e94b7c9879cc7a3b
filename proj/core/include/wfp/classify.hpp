#pragma once
// Attack models: Random Forest and Extra Trees (Gini CART ensembles),
// k-nearest neighbors, and Gaussian naive Bayes, all with class
// probability output. Every random draw derives from the fit seed, and
// ensemble bagging is keyed to row content so training-row order never
// changes a model.

#include <cstdint>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "wfp/dataset.hpp"

namespace wfp {

enum class Algorithm : uint8_t { RF, ET, KNN, NB };

const char* to_string(Algorithm a);
std::optional<Algorithm> algorithm_from_string(std::string_view s);

struct Hyperparams {
  uint32_t n_trees = 100;          // RF/ET ensemble size
  uint32_t max_depth = 0;          // 0 = unlimited
  uint32_t min_samples_split = 2;  // minimum weighted samples to split
  uint32_t knn_k = 5;              // neighbors (Euclidean metric)
  double nb_var_smoothing = 1e-9;  // variance floor ratio vs max feature variance
  unsigned threads = 1;            // fit-time workers; 0 = hardware concurrency
};

struct Prediction {
  std::vector<double> distribution;  // per-class probability, sums to 1
  std::size_t top = 0;               // argmax, ties to the lowest class index
};

struct TreeNode {
  int32_t feature = -1;  // -1 marks a leaf
  double threshold = 0.0;
  uint32_t left = 0;
  uint32_t right = 0;
  int32_t leaf_class = -1;
};

/// One fitted decision tree; nodes[0] is the root, x <= threshold goes left.
struct Tree {
  std::vector<TreeNode> nodes;

  int32_t predict_class(std::span<const double> x) const;
};

struct ForestState {
  std::vector<Tree> trees;
  std::vector<double> importance;  // mean Gini decrease per dim, sums to 1
};

struct KnnState {
  uint32_t k = 5;
  std::size_t n_rows = 0;
  std::vector<double> matrix;  // row-major copies of the training rows
  std::vector<int32_t> labels;
};

struct NaiveBayesState {
  std::vector<double> log_prior;  // per class
  std::vector<double> mean;       // class-major, n_classes x dim
  std::vector<double> var;        // smoothed variances, same layout
};

class Model {
 public:
  Algorithm algorithm() const { return algorithm_; }
  const std::vector<std::string>& classes() const { return classes_; }
  std::size_t dimension() const { return dim_; }
  uint64_t schema_hash() const { return schema_hash_; }
  uint64_t seed() const { return seed_; }

  Prediction predict_proba(std::span<const double> x) const;
  std::size_t predict_index(std::span<const double> x) const;
  const std::string& predict(std::span<const double> x) const;

  /// Mean decrease in Gini impurity, normalized to sum to 1.
  /// Only tree ensembles support this.
  std::vector<double> feature_importance() const;

  /// Read-only tree access (RF/ET) for vote audits.
  const std::vector<Tree>& trees() const;

  void check_schema(const FeatureSchema& schema) const;

  void save(const std::string& path) const;
  static Model load(const std::string& path);
  static Model load(const std::string& path, const FeatureSchema& expect);

 private:
  friend Model fit(Algorithm, const Dataset&, const Hyperparams&, uint64_t);
  friend struct ModelCodec;

  Algorithm algorithm_ = Algorithm::RF;
  std::vector<std::string> classes_;
  std::size_t dim_ = 0;
  uint64_t schema_hash_ = 0;
  uint64_t seed_ = 0;
  std::variant<ForestState, KnnState, NaiveBayesState> state_;
};

/// Trains a model. Requires at least two classes, every class present,
/// and finite feature values; violations raise FitError.
Model fit(Algorithm algorithm, const Dataset& train, const Hyperparams& hp, uint64_t seed);

// Internal fit entry points, shared with the fit dispatcher.
ForestState fit_forest(Algorithm kind, const Dataset& train, const Hyperparams& hp, uint64_t seed);
KnnState fit_knn(const Dataset& train, const Hyperparams& hp);
NaiveBayesState fit_naive_bayes(const Dataset& train, const Hyperparams& hp);

Prediction forest_predict_proba(const ForestState&, std::size_t n_classes, std::span<const double> x);
Prediction knn_predict_proba(const KnnState&, std::size_t n_classes, std::span<const double> x);
Prediction nb_predict_proba(const NaiveBayesState&, std::size_t n_classes, std::span<const double> x);

}  // namespace wfp
