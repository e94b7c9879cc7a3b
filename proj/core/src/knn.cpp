#include <algorithm>
#include <cmath>

#include "wfp/classify.hpp"

namespace wfp {

KnnState fit_knn(const Dataset& train, const Hyperparams& hp) {
  KnnState state;
  state.k = hp.knn_k;
  state.n_rows = train.n_rows();
  state.matrix = train.values;
  state.labels = train.labels;
  return state;
}

Prediction knn_predict_proba(const KnnState& state, std::size_t n_classes,
                             std::span<const double> x) {
  std::size_t dim = x.size();
  // Neighbor order: squared distance, then class index, so equal-distance
  // ties resolve the same way regardless of training-row order.
  std::vector<std::pair<double, int32_t>> near;
  near.reserve(state.n_rows);
  for (std::size_t r = 0; r < state.n_rows; ++r) {
    const double* row = state.matrix.data() + r * dim;
    double d2 = 0.0;
    for (std::size_t f = 0; f < dim; ++f) {
      double d = row[f] - x[f];
      d2 += d * d;
    }
    near.emplace_back(d2, state.labels[r]);
  }
  std::size_t k = std::min<std::size_t>(state.k, near.size());
  std::partial_sort(near.begin(), near.begin() + static_cast<std::ptrdiff_t>(k), near.end());

  Prediction pred;
  pred.distribution.assign(n_classes, 0.0);
  for (std::size_t i = 0; i < k; ++i) {
    pred.distribution[static_cast<std::size_t>(near[i].second)] += 1.0;
  }
  for (double& v : pred.distribution) v /= static_cast<double>(k);
  for (std::size_t c = 1; c < n_classes; ++c) {
    if (pred.distribution[c] > pred.distribution[pred.top]) pred.top = c;
  }
  return pred;
}

}  // namespace wfp
