#include "wfp/dataset.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "wfp/error.hpp"
#include "wfp/parallel.hpp"

namespace wfp {

std::string format_double(double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

FeaturizeResult featurize_dataset(std::span<const Trace> traces, FeatureSet set, std::size_t k,
                                  unsigned threads) {
  if (k < 1) throw InvalidParam("featurize_dataset: k must be >= 1");

  FeaturizeResult result;
  std::set<std::string> class_set;
  std::vector<std::size_t> kept;  // indices of non-empty traces
  for (std::size_t i = 0; i < traces.size(); ++i) {
    if (traces[i].label.empty()) {
      throw FeaturizeError("featurize_dataset: unlabeled trace at index " + std::to_string(i));
    }
    if (traces[i].empty()) {
      ++result.skipped_empty;
      continue;
    }
    kept.push_back(i);
    class_set.insert(traces[i].label);
  }
  if (class_set.size() < 2) {
    throw FeaturizeError("featurize_dataset: needs at least 2 classes, got " +
                         std::to_string(class_set.size()));
  }

  Dataset& ds = result.dataset;
  ds.classes.assign(class_set.begin(), class_set.end());
  ds.schema = schema_for(set, k);
  ds.feature_set = set;
  ds.early_k = k;

  std::map<std::string, int32_t> class_index;
  for (std::size_t c = 0; c < ds.classes.size(); ++c) {
    class_index[ds.classes[c]] = static_cast<int32_t>(c);
  }

  std::size_t dim = ds.schema.dimension();
  ds.values.assign(kept.size() * dim, 0.0);
  ds.labels.resize(kept.size());

  std::atomic<uint64_t> clamped{0};
  parallel_for(kept.size(), threads, [&](std::size_t row) {
    const Trace& t = traces[kept[row]];
    double* out = ds.values.data() + row * dim;
    if (set == FeatureSet::Simple) {
      auto counts = simple_features_early(t, k);
      std::copy(counts.begin(), counts.end(), out);
    } else {
      FeatureCounters counters;
      auto v = transfer_features(t, k, &counters);
      std::copy(v.begin(), v.end(), out);
      clamped += counters.clamped_sizes;
    }
    ds.labels[row] = class_index.at(t.label);
  });
  result.clamped_sizes = clamped.load();
  return result;
}

void write_feature_csv(const Dataset& dataset, const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ParseError("cannot open for writing: " + path);

  for (std::size_t i = 0; i < dataset.schema.segments.size(); ++i) {
    const auto& s = dataset.schema.segments[i];
    if (i) f << ',';
    f << s.name << ':' << s.offset << ':' << s.length;
  }
  f << ",label\n";

  for (std::size_t r = 0; r < dataset.n_rows(); ++r) {
    auto row = dataset.row(r);
    for (double v : row) f << format_double(v) << ',';
    f << dataset.label_of(r) << '\n';
  }
  if (!f) throw ParseError("write failed: " + path);
}

Dataset read_feature_csv(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw ParseError("cannot open: " + path);

  std::string line;
  if (!std::getline(f, line)) throw ParseError("feature csv: empty file");

  Dataset ds;
  {
    std::istringstream header(line);
    std::string cell;
    while (std::getline(header, cell, ',')) {
      if (cell == "label") continue;
      auto c1 = cell.find(':');
      auto c2 = cell.find(':', c1 + 1);
      if (c1 == std::string::npos || c2 == std::string::npos) {
        throw ParseError("feature csv: bad segment descriptor: " + cell);
      }
      SchemaSegment seg;
      seg.name = cell.substr(0, c1);
      seg.offset = std::stoull(cell.substr(c1 + 1, c2 - c1 - 1));
      seg.length = std::stoull(cell.substr(c2 + 1));
      ds.schema.segments.push_back(std::move(seg));
    }
  }
  std::size_t dim = ds.schema.dimension();

  std::map<std::string, int32_t> class_index;
  std::vector<std::string> row_labels;
  std::size_t line_no = 1;
  while (std::getline(f, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::size_t start = 0;
    std::size_t col = 0;
    while (col < dim) {
      std::size_t comma = line.find(',', start);
      if (comma == std::string::npos) {
        throw ParseError("feature csv line " + std::to_string(line_no) + ": too few columns");
      }
      double v;
      auto rc = std::from_chars(line.data() + start, line.data() + comma, v);
      if (rc.ec != std::errc{}) {
        throw ParseError("feature csv line " + std::to_string(line_no) + ": bad number");
      }
      ds.values.push_back(v);
      start = comma + 1;
      ++col;
    }
    row_labels.push_back(line.substr(start));
  }

  std::set<std::string> classes(row_labels.begin(), row_labels.end());
  ds.classes.assign(classes.begin(), classes.end());
  for (std::size_t c = 0; c < ds.classes.size(); ++c) class_index[ds.classes[c]] = static_cast<int32_t>(c);
  ds.labels.reserve(row_labels.size());
  for (const auto& l : row_labels) ds.labels.push_back(class_index.at(l));
  return ds;
}

}  // namespace wfp
