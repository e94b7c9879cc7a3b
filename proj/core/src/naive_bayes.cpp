#include <algorithm>
#include <cmath>
#include <numeric>

#include "wfp/classify.hpp"
#include "wfp/rng.hpp"

namespace wfp {

NaiveBayesState fit_naive_bayes(const Dataset& train, const Hyperparams& hp) {
  std::size_t n = train.n_rows();
  std::size_t m = train.dimension();
  std::size_t n_classes = train.classes.size();

  // Accumulate in content-hash order so summation rounding cannot depend
  // on training-row order.
  std::vector<uint32_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::vector<uint64_t> hashes(n);
  for (std::size_t r = 0; r < n; ++r) hashes[r] = hash_row(train.row(r), train.labels[r]);
  std::sort(order.begin(), order.end(), [&](uint32_t a, uint32_t b) {
    if (hashes[a] != hashes[b]) return hashes[a] < hashes[b];
    return train.labels[a] < train.labels[b];
  });

  NaiveBayesState state;
  state.log_prior.assign(n_classes, 0.0);
  state.mean.assign(n_classes * m, 0.0);
  state.var.assign(n_classes * m, 0.0);

  std::vector<uint64_t> class_n(n_classes, 0);
  for (uint32_t r : order) {
    auto c = static_cast<std::size_t>(train.labels[r]);
    ++class_n[c];
    auto row = train.row(r);
    for (std::size_t f = 0; f < m; ++f) state.mean[c * m + f] += row[f];
  }
  for (std::size_t c = 0; c < n_classes; ++c) {
    for (std::size_t f = 0; f < m; ++f) state.mean[c * m + f] /= static_cast<double>(class_n[c]);
    state.log_prior[c] = std::log(static_cast<double>(class_n[c]) / static_cast<double>(n));
  }
  for (uint32_t r : order) {
    auto c = static_cast<std::size_t>(train.labels[r]);
    auto row = train.row(r);
    for (std::size_t f = 0; f < m; ++f) {
      double d = row[f] - state.mean[c * m + f];
      state.var[c * m + f] += d * d;
    }
  }
  for (std::size_t c = 0; c < n_classes; ++c) {
    for (std::size_t f = 0; f < m; ++f) state.var[c * m + f] /= static_cast<double>(class_n[c]);
  }

  // Variance floor: a fixed ratio of the largest overall feature variance.
  std::vector<double> overall_mean(m, 0.0);
  for (uint32_t r : order) {
    auto row = train.row(r);
    for (std::size_t f = 0; f < m; ++f) overall_mean[f] += row[f];
  }
  for (double& v : overall_mean) v /= static_cast<double>(n);
  std::vector<double> overall_var(m, 0.0);
  for (uint32_t r : order) {
    auto row = train.row(r);
    for (std::size_t f = 0; f < m; ++f) {
      double d = row[f] - overall_mean[f];
      overall_var[f] += d * d;
    }
  }
  double max_var = 0.0;
  for (double v : overall_var) max_var = std::max(max_var, v / static_cast<double>(n));

  double epsilon = hp.nb_var_smoothing * max_var;
  if (epsilon <= 0.0) epsilon = 1e-12;  // fully constant data
  for (double& v : state.var) v += epsilon;
  return state;
}

Prediction nb_predict_proba(const NaiveBayesState& state, std::size_t n_classes,
                            std::span<const double> x) {
  std::size_t m = x.size();
  std::vector<double> joint(n_classes);
  for (std::size_t c = 0; c < n_classes; ++c) {
    double ll = state.log_prior[c];
    const double* mean = state.mean.data() + c * m;
    const double* var = state.var.data() + c * m;
    for (std::size_t f = 0; f < m; ++f) {
      double d = x[f] - mean[f];
      ll += -0.5 * std::log(2.0 * M_PI * var[f]) - d * d / (2.0 * var[f]);
    }
    joint[c] = ll;
  }
  double max_ll = *std::max_element(joint.begin(), joint.end());
  double total = 0.0;
  for (double v : joint) total += std::exp(v - max_ll);

  Prediction pred;
  pred.distribution.resize(n_classes);
  for (std::size_t c = 0; c < n_classes; ++c) {
    pred.distribution[c] = std::exp(joint[c] - max_ll) / total;
  }
  for (std::size_t c = 1; c < n_classes; ++c) {
    if (pred.distribution[c] > pred.distribution[pred.top]) pred.top = c;
  }
  return pred;
}

}  // namespace wfp
