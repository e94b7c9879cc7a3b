#include "wfp/features.hpp"

#include <algorithm>

#include "wfp/error.hpp"
#include "wfp/rng.hpp"

namespace wfp {

namespace {

void require_nonempty(const Trace& trace, const char* op) {
  if (trace.empty()) throw FeaturizeError(std::string(op) + ": empty trace");
}

std::size_t axis_index(uint32_t size, FeatureCounters* counters) {
  uint32_t clamped = std::clamp(size, kSizeAxisMin, kSizeAxisMax);
  if (clamped != size && counters) ++counters->clamped_sizes;
  return clamped - kSizeAxisMin;
}

}  // namespace

const char* to_string(PacketCategory c) {
  switch (c) {
    case PacketCategory::PositiveTiny: return "positive_tiny";
    case PacketCategory::NegativeTiny: return "negative_tiny";
    case PacketCategory::PositiveSmall: return "positive_small";
    case PacketCategory::NegativeSmall: return "negative_small";
    case PacketCategory::PositiveMedium: return "positive_medium";
    case PacketCategory::NegativeMedium: return "negative_medium";
    case PacketCategory::PositiveLarge: return "positive_large";
    case PacketCategory::NegativeLarge: return "negative_large";
  }
  return "";
}

const char* to_string(FeatureSet f) {
  return f == FeatureSet::Simple ? "simple" : "transfer";
}

PacketCategory categorize(Direction direction, uint32_t size) {
  if (size < 1) throw FeaturizeError("categorize: size must be >= 1");
  int size_class;
  if (size <= kTinyMax) {
    size_class = 0;
  } else if (size <= kSmallMax) {
    size_class = 1;
  } else if (size <= kMediumMax) {
    size_class = 2;
  } else {
    size_class = 3;
  }
  int dir = (direction == Direction::Positive) ? 0 : 1;
  return static_cast<PacketCategory>(size_class * 2 + dir);
}

std::size_t FeatureSchema::dimension() const {
  std::size_t total = 0;
  for (const auto& s : segments) total += s.length;
  return total;
}

const SchemaSegment& FeatureSchema::segment(const std::string& name) const {
  for (const auto& s : segments) {
    if (s.name == name) return s;
  }
  throw InvalidParam("schema has no segment named " + name);
}

uint64_t FeatureSchema::hash() const {
  uint64_t h = 0xcbf29ce484222325ULL;
  for (const auto& s : segments) {
    h = fnv1a(s.name.data(), s.name.size(), h);
    uint64_t meta[2] = {s.offset, s.length};
    h = fnv1a(meta, sizeof(meta), h);
  }
  return h;
}

FeatureSchema simple_schema() {
  FeatureSchema schema;
  for (std::size_t i = 0; i < kCategoryCount; ++i) {
    schema.segments.push_back({to_string(static_cast<PacketCategory>(i)), i, 1});
  }
  return schema;
}

FeatureSchema transfer_schema(std::size_t k) {
  FeatureSchema schema;
  std::size_t offset = 0;
  auto add = [&](const char* name, std::size_t len) {
    schema.segments.push_back({name, offset, len});
    offset += len;
  };
  add("unique_size", kSizeAxisDim);
  add("size_count", kSizeAxisDim);
  add("order", k);
  add("inter_arrival", k);
  add("negative", 1);
  add("cum_size", 1);
  add("cum_size_dir", 1);
  add("burst_count", 1);
  add("burst_max", 1);
  add("burst_mean", 1);
  add("total_time", 1);
  return schema;
}

FeatureSchema schema_for(FeatureSet set, std::size_t k) {
  return set == FeatureSet::Simple ? simple_schema() : transfer_schema(k);
}

std::array<double, kCategoryCount> simple_features(const Trace& trace) {
  require_nonempty(trace, "simple_features");
  std::array<double, kCategoryCount> counts{};
  for (const Packet& p : trace.packets) {
    counts[static_cast<std::size_t>(categorize(p.direction, p.size))] += 1.0;
  }
  return counts;
}

std::array<double, kCategoryCount> simple_features_early(const Trace& trace, std::size_t k) {
  return simple_features(early(trace, k));
}

std::vector<double> unique_packet_size(const Trace& trace, FeatureCounters* counters) {
  require_nonempty(trace, "unique_packet_size");
  std::vector<double> v(kSizeAxisDim, 0.0);
  for (const Packet& p : trace.packets) v[axis_index(p.size, counters)] = 1.0;
  return v;
}

std::vector<double> packet_size_count(const Trace& trace, FeatureCounters* counters) {
  require_nonempty(trace, "packet_size_count");
  std::vector<double> v(kSizeAxisDim, 0.0);
  for (const Packet& p : trace.packets) v[axis_index(p.size, counters)] += 1.0;
  return v;
}

std::vector<double> packet_order(const Trace& trace, std::size_t k) {
  if (k < 1) throw InvalidParam("packet_order: k must be >= 1");
  std::vector<double> v(k, 0.0);
  std::size_t n = std::min(k, trace.size());
  for (std::size_t i = 0; i < n; ++i) v[i] = static_cast<double>(trace.packets[i].size);
  return v;
}

std::vector<double> inter_arrival(const Trace& trace, std::size_t k) {
  if (k < 1) throw InvalidParam("inter_arrival: k must be >= 1");
  std::vector<double> v(k, 0.0);
  std::size_t n = std::min(k, trace.size());
  double prev = 0.0;  // the anchor packet sits at time 0 by construction
  for (std::size_t i = 0; i < n; ++i) {
    double dt = trace.packets[i].timestamp - prev;
    if (dt < 0.0) {
      throw FeaturizeError("inter_arrival: negative interval at index " + std::to_string(i));
    }
    v[i] = dt;
    prev = trace.packets[i].timestamp;
  }
  return v;
}

double negative_count(const Trace& trace) {
  double n = 0.0;
  for (const Packet& p : trace.packets) {
    if (p.direction == Direction::Negative) n += 1.0;
  }
  return n;
}

double cumulative_size(const Trace& trace) {
  double total = 0.0;
  for (const Packet& p : trace.packets) total += static_cast<double>(p.size);
  return total;
}

double cumulative_size_directed(const Trace& trace) {
  double total = 0.0;
  for (const Packet& p : trace.packets) {
    double s = static_cast<double>(p.size);
    total += (p.direction == Direction::Positive) ? s : -s;
  }
  return total;
}

double total_time(const Trace& trace) {
  if (trace.size() < 2) return 0.0;
  return trace.packets.back().timestamp - trace.packets.front().timestamp;
}

BurstStats bursts(const Trace& trace) {
  require_nonempty(trace, "bursts");
  BurstStats stats;
  uint64_t run = 0;
  Direction run_dir = Direction::Positive;
  for (const Packet& p : trace.packets) {
    if (run == 0 || p.direction == run_dir) {
      ++run;
      run_dir = p.direction;
    } else {
      ++stats.count;
      stats.max_len = std::max(stats.max_len, run);
      run = 1;
      run_dir = p.direction;
    }
  }
  ++stats.count;
  stats.max_len = std::max(stats.max_len, run);
  stats.mean_len = static_cast<double>(trace.size()) / static_cast<double>(stats.count);
  return stats;
}

std::vector<double> transfer_features(const Trace& trace, std::size_t k,
                                      FeatureCounters* counters) {
  require_nonempty(trace, "transfer_features");
  if (k < 1) throw InvalidParam("transfer_features: k must be >= 1");
  Trace t = early(trace, k);

  std::vector<double> out;
  out.reserve(2 * kSizeAxisDim + 2 * k + 7);
  auto append = [&out](const std::vector<double>& v) { out.insert(out.end(), v.begin(), v.end()); };

  append(unique_packet_size(t, counters));
  append(packet_size_count(t, nullptr));  // clamps already counted once above
  append(packet_order(t, k));
  append(inter_arrival(t, k));
  out.push_back(negative_count(t));
  out.push_back(cumulative_size(t));
  out.push_back(cumulative_size_directed(t));
  BurstStats b = bursts(t);
  out.push_back(static_cast<double>(b.count));
  out.push_back(static_cast<double>(b.max_len));
  out.push_back(b.mean_len);
  out.push_back(total_time(t));
  return out;
}

}  // namespace wfp
