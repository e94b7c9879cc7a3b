#include "wfp/eval.hpp"

#include <algorithm>
#include <numeric>

#include "wfp/error.hpp"
#include "wfp/rng.hpp"

namespace wfp {

namespace {

Dataset subset(const Dataset& dataset, const std::vector<uint32_t>& fold_of, uint32_t fold,
               bool take_fold) {
  Dataset out;
  out.classes = dataset.classes;
  out.schema = dataset.schema;
  out.feature_set = dataset.feature_set;
  out.early_k = dataset.early_k;
  for (std::size_t r = 0; r < dataset.n_rows(); ++r) {
    if ((fold_of[r] == fold) != take_fold) continue;
    auto row = dataset.row(r);
    out.values.insert(out.values.end(), row.begin(), row.end());
    out.labels.push_back(dataset.labels[r]);
  }
  return out;
}

/// True class ranks within the top a when fewer than a classes beat it;
/// ties against it resolve by class index.
bool in_top_a(const Prediction& pred, std::size_t truth, unsigned a) {
  std::size_t better = 0;
  double p_true = pred.distribution[truth];
  for (std::size_t c = 0; c < pred.distribution.size(); ++c) {
    if (c == truth) continue;
    if (pred.distribution[c] > p_true || (pred.distribution[c] == p_true && c < truth)) {
      ++better;
    }
  }
  return better < a;
}

double mean_of(const std::vector<double>& v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

}  // namespace

std::vector<uint32_t> kfold_split(const Dataset& dataset, unsigned folds, uint64_t seed) {
  if (folds < 2) throw EvalError("kfold_split: needs at least 2 folds");

  std::vector<std::vector<uint32_t>> per_class(dataset.classes.size());
  for (std::size_t r = 0; r < dataset.n_rows(); ++r) {
    per_class[static_cast<std::size_t>(dataset.labels[r])].push_back(static_cast<uint32_t>(r));
  }
  for (std::size_t c = 0; c < per_class.size(); ++c) {
    if (per_class[c].size() < folds) {
      throw EvalError("kfold_split: class \"" + dataset.classes[c] + "\" has " +
                      std::to_string(per_class[c].size()) + " samples, needs >= " +
                      std::to_string(folds));
    }
  }

  std::vector<uint32_t> fold_of(dataset.n_rows(), 0);
  for (std::size_t c = 0; c < per_class.size(); ++c) {
    Rng rng(mix_seed(seed, c));
    rng.shuffle(std::span<uint32_t>(per_class[c]));
    // Staggered deal so remainders spread over different folds per class.
    uint32_t offset = static_cast<uint32_t>(c % folds);
    for (std::size_t i = 0; i < per_class[c].size(); ++i) {
      fold_of[per_class[c][i]] = static_cast<uint32_t>((i + offset) % folds);
    }
  }
  return fold_of;
}

double top_a_accuracy(const Model& model, const Dataset& test, unsigned a) {
  if (a < 1 || a > model.classes().size()) {
    throw InvalidParam("top_a_accuracy: a must be in [1, " +
                       std::to_string(model.classes().size()) + "]");
  }
  if (test.classes != model.classes()) {
    throw EvalError("top_a_accuracy: test set classes differ from model classes");
  }
  if (test.n_rows() == 0) throw EvalError("top_a_accuracy: empty test set");

  std::size_t hits = 0;
  for (std::size_t r = 0; r < test.n_rows(); ++r) {
    Prediction pred = model.predict_proba(test.row(r));
    if (in_top_a(pred, static_cast<std::size_t>(test.labels[r]), a)) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(test.n_rows());
}

TopACvResult cross_validate_top_a(const Dataset& dataset, Algorithm algorithm,
                                  const Hyperparams& hp, uint64_t seed, unsigned folds,
                                  unsigned a_max) {
  if (a_max < 1 || a_max > dataset.classes.size()) {
    throw InvalidParam("cross_validate_top_a: a_max must be in [1, " +
                       std::to_string(dataset.classes.size()) + "]");
  }
  std::vector<uint32_t> fold_of = kfold_split(dataset, folds, seed);

  TopACvResult result;
  result.fold_accuracy.assign(a_max, std::vector<double>(folds, 0.0));
  for (uint32_t fold = 0; fold < folds; ++fold) {
    Dataset train = subset(dataset, fold_of, fold, false);
    Dataset test = subset(dataset, fold_of, fold, true);
    Model model;
    try {
      model = fit(algorithm, train, hp, mix_seed(seed, 1000 + fold));
    } catch (const FitError& e) {
      throw EvalError("cross-validation fold " + std::to_string(fold) + ": " + e.what());
    }
    std::vector<uint64_t> hits(a_max, 0);
    for (std::size_t r = 0; r < test.n_rows(); ++r) {
      Prediction pred = model.predict_proba(test.row(r));
      auto truth = static_cast<std::size_t>(test.labels[r]);
      for (unsigned a = 1; a <= a_max; ++a) {
        if (in_top_a(pred, truth, a)) ++hits[a - 1];
      }
    }
    for (unsigned a = 1; a <= a_max; ++a) {
      result.fold_accuracy[a - 1][fold] =
          static_cast<double>(hits[a - 1]) / static_cast<double>(test.n_rows());
    }
  }
  result.mean_accuracy.resize(a_max);
  for (unsigned a = 0; a < a_max; ++a) result.mean_accuracy[a] = mean_of(result.fold_accuracy[a]);
  return result;
}

CvResult cross_validate(const Dataset& dataset, Algorithm algorithm, const Hyperparams& hp,
                        uint64_t seed, unsigned folds) {
  TopACvResult top = cross_validate_top_a(dataset, algorithm, hp, seed, folds, 1);
  return {top.fold_accuracy[0], top.mean_accuracy[0]};
}

std::vector<std::size_t> default_k_grid() {
  std::vector<std::size_t> ks;
  for (std::size_t k = 5; k <= 200; k += 5) ks.push_back(k);
  return ks;
}

SweepResult k_sweep(std::span<const Trace> traces, FeatureSet feature_set,
                    std::span<const Algorithm> algorithms, std::span<const std::size_t> ks,
                    uint64_t seed, const Hyperparams& hp, unsigned folds) {
  SweepResult result;
  result.seed = seed;
  result.folds = folds;
  for (std::size_t k : ks) {
    Dataset dataset = featurize_dataset(traces, feature_set, k, hp.threads).dataset;
    result.n_classes = dataset.classes.size();
    for (Algorithm algorithm : algorithms) {
      CvResult cv = cross_validate(dataset, algorithm, hp, seed, folds);
      SweepRow row;
      row.k = k;
      row.algorithm = algorithm;
      row.feature_set = feature_set;
      row.early = k <= kEarlyTrafficMaxK;
      row.mean_accuracy = cv.mean_accuracy;
      row.fold_accuracy = std::move(cv.fold_accuracy);
      result.rows.push_back(std::move(row));
    }
  }
  return result;
}

TopATable top_a_sweep(std::span<const Trace> traces, FeatureSet feature_set, Algorithm algorithm,
                      std::span<const std::size_t> ks, unsigned a_max, uint64_t seed,
                      const Hyperparams& hp, unsigned folds) {
  TopATable table;
  table.ks.assign(ks.begin(), ks.end());
  table.a_max = a_max;
  table.algorithm = algorithm;
  table.feature_set = feature_set;
  table.seed = seed;
  table.folds = folds;
  for (std::size_t k : ks) {
    Dataset dataset = featurize_dataset(traces, feature_set, k, hp.threads).dataset;
    table.n_classes = dataset.classes.size();
    TopACvResult cv = cross_validate_top_a(dataset, algorithm, hp, seed, folds, a_max);
    table.accuracy.push_back(cv.mean_accuracy);
  }
  return table;
}

std::map<std::string, double> aggregate_importance(const FeatureSchema& schema,
                                                   std::span<const double> per_dim) {
  if (per_dim.size() != schema.dimension()) {
    throw EvalError("aggregate_importance: vector does not match schema dimension");
  }
  std::map<std::string, double> out;
  for (const SchemaSegment& seg : schema.segments) {
    double total = 0.0;
    for (std::size_t i = 0; i < seg.length; ++i) total += per_dim[seg.offset + i];
    out[seg.name] = total;
  }
  return out;
}

std::map<std::string, double> importance_stability(
    const std::vector<std::map<std::string, double>>& importance_by_k) {
  if (importance_by_k.empty()) throw EvalError("importance_stability: empty input");

  std::map<std::string, double> variance;
  for (const auto& [name, first_value] : importance_by_k.front()) {
    (void)first_value;
    double mean = 0.0;
    for (const auto& point : importance_by_k) {
      auto it = point.find(name);
      if (it == point.end()) {
        throw EvalError("importance_stability: feature \"" + name + "\" missing at some k");
      }
      mean += it->second;
    }
    mean /= static_cast<double>(importance_by_k.size());
    double var = 0.0;
    for (const auto& point : importance_by_k) {
      double d = point.at(name) - mean;
      var += d * d;
    }
    variance[name] = var / static_cast<double>(importance_by_k.size());
  }
  return variance;
}

std::vector<std::map<std::string, double>> importance_sweep(std::span<const Trace> traces,
                                                            FeatureSet feature_set,
                                                            Algorithm algorithm,
                                                            std::span<const std::size_t> ks,
                                                            uint64_t seed,
                                                            const Hyperparams& hp) {
  if (algorithm != Algorithm::RF && algorithm != Algorithm::ET) {
    throw EvalError("importance_sweep: tree-based model required");
  }
  std::vector<std::map<std::string, double>> out;
  for (std::size_t k : ks) {
    Dataset dataset = featurize_dataset(traces, feature_set, k, hp.threads).dataset;
    Model model = fit(algorithm, dataset, hp, mix_seed(seed, k));
    out.push_back(aggregate_importance(dataset.schema, model.feature_importance()));
  }
  return out;
}

}  // namespace wfp
