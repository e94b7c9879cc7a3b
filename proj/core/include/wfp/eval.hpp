#pragma once
// Experiment harness: stratified 10-fold cross-validation, truncation
// sweeps over the k grid, multi-guess (top-a) accuracy, and
// feature-importance stability across k.

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "wfp/classify.hpp"
#include "wfp/dataset.hpp"

namespace wfp {

/// k values above this are the normal-traffic scenario; at or below it,
/// the attack runs on early traffic.
inline constexpr std::size_t kEarlyTrafficMaxK = 40;

/// Stratified fold assignment: per-class counts differ by at most one
/// across folds. Throws EvalError (naming the class) when a class has
/// fewer samples than folds.
std::vector<uint32_t> kfold_split(const Dataset& dataset, unsigned folds, uint64_t seed);

struct CvResult {
  std::vector<double> fold_accuracy;
  double mean_accuracy = 0.0;
};

CvResult cross_validate(const Dataset& dataset, Algorithm algorithm, const Hyperparams& hp,
                        uint64_t seed, unsigned folds = 10);

/// Fraction of test rows whose true class is among the a most probable
/// classes; rank ties resolve toward the lowest class index.
double top_a_accuracy(const Model& model, const Dataset& test, unsigned a);

/// One cross-validation pass that scores every a in 1..a_max with the
/// same per-fold models (a=1 is plain accuracy).
struct TopACvResult {
  std::vector<std::vector<double>> fold_accuracy;  // [a-1][fold]
  std::vector<double> mean_accuracy;               // [a-1]
};

TopACvResult cross_validate_top_a(const Dataset& dataset, Algorithm algorithm,
                                  const Hyperparams& hp, uint64_t seed, unsigned folds,
                                  unsigned a_max);

struct SweepRow {
  std::size_t k = 0;
  Algorithm algorithm = Algorithm::RF;
  FeatureSet feature_set = FeatureSet::Simple;
  bool early = false;  // k <= kEarlyTrafficMaxK
  double mean_accuracy = 0.0;
  std::vector<double> fold_accuracy;
};

struct SweepResult {
  std::vector<SweepRow> rows;  // (k, algorithm) order
  uint64_t seed = 0;
  unsigned folds = 10;
  std::size_t n_classes = 0;
};

/// The paper-style grid: 5, 10, ..., 200.
std::vector<std::size_t> default_k_grid();

SweepResult k_sweep(std::span<const Trace> traces, FeatureSet feature_set,
                    std::span<const Algorithm> algorithms, std::span<const std::size_t> ks,
                    uint64_t seed, const Hyperparams& hp = {}, unsigned folds = 10);

struct TopATable {
  std::vector<std::size_t> ks;
  unsigned a_max = 5;
  Algorithm algorithm = Algorithm::RF;
  FeatureSet feature_set = FeatureSet::Simple;
  std::vector<std::vector<double>> accuracy;  // [k index][a-1]
  uint64_t seed = 0;
  unsigned folds = 10;
  std::size_t n_classes = 0;

  double improve(std::size_t k_index) const {  // accuracy(a_max) - accuracy(1)
    return accuracy[k_index][a_max - 1] - accuracy[k_index][0];
  }
};

TopATable top_a_sweep(std::span<const Trace> traces, FeatureSet feature_set, Algorithm algorithm,
                      std::span<const std::size_t> ks, unsigned a_max, uint64_t seed,
                      const Hyperparams& hp = {}, unsigned folds = 10);

/// Sums per-dimension importances over each schema segment.
std::map<std::string, double> aggregate_importance(const FeatureSchema& schema,
                                                   std::span<const double> per_dim);

/// Population variance of each named feature's importance across the
/// sweep. Input maps must share an identical key set.
std::map<std::string, double> importance_stability(
    const std::vector<std::map<std::string, double>>& importance_by_k);

/// Fits one tree-ensemble model per k on the full dataset and reports
/// the segment-aggregated importances; feeds importance_stability.
std::vector<std::map<std::string, double>> importance_sweep(std::span<const Trace> traces,
                                                            FeatureSet feature_set,
                                                            Algorithm algorithm,
                                                            std::span<const std::size_t> ks,
                                                            uint64_t seed,
                                                            const Hyperparams& hp = {});

}  // namespace wfp
