#pragma once
// Labeled feature matrix over N website classes, plus the featurization
// fan-out that builds one from traces.

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "wfp/features.hpp"
#include "wfp/trace.hpp"

namespace wfp {

struct Dataset {
  std::vector<double> values;  // row-major, n_rows() x schema.dimension()
  std::vector<int32_t> labels; // indices into classes
  std::vector<std::string> classes;  // sorted website identifiers
  FeatureSchema schema;
  FeatureSet feature_set = FeatureSet::Simple;
  std::size_t early_k = 0;  // truncation parameter used at featurization

  std::size_t n_rows() const { return labels.size(); }
  std::size_t dimension() const { return schema.dimension(); }

  std::span<const double> row(std::size_t i) const {
    return {values.data() + i * dimension(), dimension()};
  }
  const std::string& label_of(std::size_t i) const {
    return classes[static_cast<std::size_t>(labels[i])];
  }
};

struct FeaturizeResult {
  Dataset dataset;
  uint64_t skipped_empty = 0;   // empty traces dropped with a warning
  uint64_t clamped_sizes = 0;   // out-of-axis packet sizes clamped
};

/// Truncates every trace with early(., k), applies the feature set, and
/// assembles the labeled matrix. Classes are the sorted distinct labels.
/// Throws FeaturizeError for an unlabeled trace (with its index) or when
/// fewer than two classes remain.
FeaturizeResult featurize_dataset(std::span<const Trace> traces, FeatureSet set, std::size_t k,
                                  unsigned threads = 1);

/// Self-describing columnar text export: a header row of
/// name:offset:length segment descriptors plus a final "label" column,
/// then one comma-separated row of values per trace, label last.
void write_feature_csv(const Dataset& dataset, const std::string& path);

Dataset read_feature_csv(const std::string& path);

/// Shortest round-trip decimal formatting used by every report writer.
std::string format_double(double v);

}  // namespace wfp
