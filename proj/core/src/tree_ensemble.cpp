#include <algorithm>
#include <cmath>

#include "wfp/classify.hpp"
#include "wfp/error.hpp"
#include "wfp/parallel.hpp"
#include "wfp/rng.hpp"

namespace wfp {

namespace {

// Splits with a Gini decrease below this are treated as no improvement;
// true decreases on integer-weighted counts are orders of magnitude larger.
constexpr double kMinDecrease = 1e-12;

uint32_t poisson1_from_uniform(double u) {
  double p = std::exp(-1.0);
  double cdf = p;
  uint32_t n = 0;
  while (u >= cdf && n < 64) {
    ++n;
    p /= static_cast<double>(n);
    cdf += p;
  }
  return n;
}

double gini_sum_sq(const std::vector<uint64_t>& counts) {
  double s = 0.0;
  for (uint64_t c : counts) s += static_cast<double>(c) * static_cast<double>(c);
  return s;
}

struct TreeBuilder {
  const Dataset& ds;
  const Hyperparams& hp;
  bool randomized_thresholds;  // Extra Trees draw thresholds, RF searches them
  std::span<const uint32_t> weight;
  Rng rng;

  std::vector<uint32_t> idx;          // active rows, partitioned in place
  std::vector<uint32_t> feature_perm; // partial Fisher-Yates buffer
  std::vector<std::pair<double, uint32_t>> scratch;  // (value, row) sort buffer

  Tree tree;
  std::vector<double> importance;
  double n_root = 0.0;
  std::size_t n_classes = 0;
  std::size_t max_features = 0;

  TreeBuilder(const Dataset& dataset, const Hyperparams& params, bool randomized,
              std::span<const uint32_t> w, uint64_t seed)
      : ds(dataset), hp(params), randomized_thresholds(randomized), weight(w), rng(seed) {
    n_classes = ds.classes.size();
    std::size_t m = ds.dimension();
    max_features = std::max<std::size_t>(1, static_cast<std::size_t>(std::sqrt(static_cast<double>(m))));
    feature_perm.resize(m);
    for (std::size_t f = 0; f < m; ++f) feature_perm[f] = static_cast<uint32_t>(f);
    importance.assign(m, 0.0);
    for (uint32_t r = 0; r < ds.n_rows(); ++r) {
      if (weight[r] > 0) idx.push_back(r);
      n_root += weight[r];
    }
  }

  double value(uint32_t row, uint32_t f) const { return ds.values[row * ds.dimension() + f]; }

  void node_counts(std::size_t lo, std::size_t hi, std::vector<uint64_t>& counts) const {
    counts.assign(n_classes, 0);
    for (std::size_t i = lo; i < hi; ++i) {
      counts[static_cast<std::size_t>(ds.labels[idx[i]])] += weight[idx[i]];
    }
  }

  uint32_t make_leaf(const std::vector<uint64_t>& counts) {
    int32_t best = 0;
    for (std::size_t c = 1; c < counts.size(); ++c) {
      if (counts[c] > counts[static_cast<std::size_t>(best)]) best = static_cast<int32_t>(c);
    }
    TreeNode node;
    node.leaf_class = best;
    tree.nodes.push_back(node);
    return static_cast<uint32_t>(tree.nodes.size() - 1);
  }

  struct Split {
    double decrease = 0.0;
    uint32_t feature = 0;
    double threshold = 0.0;
    bool valid = false;
  };

  /// Exhaustive threshold search over midpoints of consecutive distinct
  /// values (CART). Ties keep the lowest threshold.
  Split search_thresholds(uint32_t f, std::size_t lo, std::size_t hi, double n_total,
                          double parent_ssq, const std::vector<uint64_t>& total) {
    scratch.clear();
    for (std::size_t i = lo; i < hi; ++i) {
      scratch.emplace_back(value(idx[i], f), idx[i]);
    }
    std::sort(scratch.begin(), scratch.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });

    Split best;
    std::vector<uint64_t> left(n_classes, 0);
    double parent_gini = 1.0 - parent_ssq / (n_total * n_total);
    double nl = 0.0;
    for (std::size_t i = 0; i + 1 < scratch.size(); ++i) {
      uint32_t r = scratch[i].second;
      left[static_cast<std::size_t>(ds.labels[r])] += weight[r];
      nl += static_cast<double>(weight[r]);
      if (scratch[i].first == scratch[i + 1].first) continue;

      double nr = n_total - nl;
      double gl = 1.0 - gini_sum_sq(left) / (nl * nl);
      double ssq_right = 0.0;
      for (std::size_t c = 0; c < n_classes; ++c) {
        double d = static_cast<double>(total[c] - left[c]);
        ssq_right += d * d;
      }
      double gr = 1.0 - ssq_right / (nr * nr);
      double decrease = parent_gini - (nl / n_total) * gl - (nr / n_total) * gr;
      if (!best.valid || decrease > best.decrease) {
        double lo_v = scratch[i].first;
        double hi_v = scratch[i + 1].first;
        best = {decrease, f, lo_v + (hi_v - lo_v) / 2.0, true};
      }
    }
    best.valid = best.valid && best.decrease > kMinDecrease;
    return best;
  }

  /// Extra-Trees style: one uniformly drawn threshold in [min, max).
  Split random_threshold(uint32_t f, std::size_t lo, std::size_t hi, double n_total,
                         double parent_ssq) {
    double vmin = value(idx[lo], f);
    double vmax = vmin;
    for (std::size_t i = lo + 1; i < hi; ++i) {
      double v = value(idx[i], f);
      vmin = std::min(vmin, v);
      vmax = std::max(vmax, v);
    }
    Split split;
    if (vmin == vmax) return split;  // constant; caller skips

    double th = rng.uniform(vmin, vmax);
    std::vector<uint64_t> left(n_classes, 0), right(n_classes, 0);
    double nl = 0.0;
    for (std::size_t i = lo; i < hi; ++i) {
      uint32_t r = idx[i];
      if (value(r, f) <= th) {
        left[static_cast<std::size_t>(ds.labels[r])] += weight[r];
        nl += static_cast<double>(weight[r]);
      } else {
        right[static_cast<std::size_t>(ds.labels[r])] += weight[r];
      }
    }
    double nr = n_total - nl;
    if (nl == 0.0 || nr == 0.0) return split;
    double parent_gini = 1.0 - parent_ssq / (n_total * n_total);
    double gl = 1.0 - gini_sum_sq(left) / (nl * nl);
    double gr = 1.0 - gini_sum_sq(right) / (nr * nr);
    split.decrease = parent_gini - (nl / n_total) * gl - (nr / n_total) * gr;
    split.feature = f;
    split.threshold = th;
    split.valid = split.decrease > kMinDecrease;
    return split;
  }

  bool feature_constant(uint32_t f, std::size_t lo, std::size_t hi) const {
    double first = value(idx[lo], f);
    for (std::size_t i = lo + 1; i < hi; ++i) {
      if (value(idx[i], f) != first) return false;
    }
    return true;
  }

  uint32_t build(std::size_t lo, std::size_t hi, uint32_t depth) {
    std::vector<uint64_t> counts;
    node_counts(lo, hi, counts);
    uint64_t n_node = 0;
    std::size_t classes_present = 0;
    for (uint64_t c : counts) {
      n_node += c;
      if (c > 0) ++classes_present;
    }

    bool stop = classes_present <= 1 || n_node < hp.min_samples_split ||
                (hp.max_depth > 0 && depth >= hp.max_depth);
    if (stop) return make_leaf(counts);

    double n_total = static_cast<double>(n_node);
    double parent_ssq = gini_sum_sq(counts);

    // Draw features one at a time (partial Fisher-Yates); constants do not
    // count toward the feature budget, so a split is found whenever any
    // feature still varies in this node.
    Split best;
    std::size_t informative_seen = 0;
    std::size_t m = feature_perm.size();
    for (std::size_t i = 0; i < m && informative_seen < max_features; ++i) {
      std::size_t j = static_cast<std::size_t>(rng.uniform_int(i, m - 1));
      std::swap(feature_perm[i], feature_perm[j]);
      uint32_t f = feature_perm[i];
      if (feature_constant(f, lo, hi)) continue;
      ++informative_seen;

      Split s = randomized_thresholds ? random_threshold(f, lo, hi, n_total, parent_ssq)
                                      : search_thresholds(f, lo, hi, n_total, parent_ssq, counts);
      if (!s.valid) continue;
      if (!best.valid || s.decrease > best.decrease ||
          (s.decrease == best.decrease &&
           (s.feature < best.feature ||
            (s.feature == best.feature && s.threshold < best.threshold)))) {
        best = s;
      }
    }

    if (!best.valid) return make_leaf(counts);

    auto mid_it = std::stable_partition(
        idx.begin() + static_cast<std::ptrdiff_t>(lo), idx.begin() + static_cast<std::ptrdiff_t>(hi),
        [&](uint32_t r) { return value(r, best.feature) <= best.threshold; });
    std::size_t mid = static_cast<std::size_t>(mid_it - idx.begin());
    if (mid == lo || mid == hi) return make_leaf(counts);  // degenerate threshold

    importance[best.feature] += (n_total / n_root) * best.decrease;

    TreeNode node;
    node.feature = static_cast<int32_t>(best.feature);
    node.threshold = best.threshold;
    tree.nodes.push_back(node);
    uint32_t self = static_cast<uint32_t>(tree.nodes.size() - 1);

    uint32_t left = build(lo, mid, depth + 1);
    uint32_t right = build(mid, hi, depth + 1);
    tree.nodes[self].left = left;
    tree.nodes[self].right = right;
    return self;
  }
};

}  // namespace

int32_t Tree::predict_class(std::span<const double> x) const {
  uint32_t at = 0;
  while (nodes[at].feature >= 0) {
    const TreeNode& n = nodes[at];
    at = (x[static_cast<std::size_t>(n.feature)] <= n.threshold) ? n.left : n.right;
  }
  return nodes[at].leaf_class;
}

ForestState fit_forest(Algorithm kind, const Dataset& train, const Hyperparams& hp,
                       uint64_t seed) {
  bool bootstrap = kind == Algorithm::RF;
  bool randomized = kind == Algorithm::ET;
  std::size_t n = train.n_rows();
  std::size_t m = train.dimension();

  // Content hashes key the bagging draws, making them row-order invariant.
  std::vector<uint64_t> row_hash(n);
  for (std::size_t r = 0; r < n; ++r) row_hash[r] = hash_row(train.row(r), train.labels[r]);

  ForestState forest;
  forest.trees.resize(hp.n_trees);
  std::vector<std::vector<double>> tree_importance(hp.n_trees);

  parallel_for(hp.n_trees, hp.threads, [&](std::size_t t) {
    uint64_t tree_seed = mix_seed(seed, t);
    std::vector<uint32_t> weight(n, 1);
    if (bootstrap) {
      for (std::size_t r = 0; r < n; ++r) {
        uint64_t s = mix_seed(tree_seed, row_hash[r]);
        double u = static_cast<double>(splitmix64(s) >> 11) * 0x1.0p-53;
        weight[r] = poisson1_from_uniform(u);
      }
    }
    TreeBuilder builder(train, hp, randomized, weight, tree_seed);
    if (builder.idx.empty()) {
      // All rows drew weight zero (tiny datasets); fall back to uniform.
      std::fill(weight.begin(), weight.end(), 1);
      TreeBuilder retry(train, hp, randomized, weight, tree_seed);
      retry.build(0, retry.idx.size(), 0);
      forest.trees[t] = std::move(retry.tree);
      tree_importance[t] = std::move(retry.importance);
      return;
    }
    builder.build(0, builder.idx.size(), 0);
    forest.trees[t] = std::move(builder.tree);
    tree_importance[t] = std::move(builder.importance);
  });

  // Normalize per tree, then average; deterministic accumulation order.
  forest.importance.assign(m, 0.0);
  for (std::size_t t = 0; t < hp.n_trees; ++t) {
    double total = 0.0;
    for (double v : tree_importance[t]) total += v;
    if (total <= 0.0) continue;
    for (std::size_t f = 0; f < m; ++f) forest.importance[f] += tree_importance[t][f] / total;
  }
  double sum = 0.0;
  for (double v : forest.importance) sum += v;
  if (sum > 0.0) {
    for (double& v : forest.importance) v /= sum;
  }
  return forest;
}

Prediction forest_predict_proba(const ForestState& forest, std::size_t n_classes,
                                std::span<const double> x) {
  Prediction pred;
  pred.distribution.assign(n_classes, 0.0);
  for (const Tree& tree : forest.trees) {
    pred.distribution[static_cast<std::size_t>(tree.predict_class(x))] += 1.0;
  }
  double total = static_cast<double>(forest.trees.size());
  for (double& v : pred.distribution) v /= total;
  for (std::size_t c = 1; c < n_classes; ++c) {
    if (pred.distribution[c] > pred.distribution[pred.top]) pred.top = c;
  }
  return pred;
}

}  // namespace wfp
