#pragma once
// Fingerprint extraction. Two feature sets over (optionally truncated)
// traces: eight direction-by-size-class counts, and the composite set
// carried over from TCP traffic analysis (size indicators and counts,
// order, inter-arrival, direction totals, bursts, total time).

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "wfp/trace.hpp"

namespace wfp {

// Size-class boundaries in wire bytes.
inline constexpr uint32_t kTinyMax = 79;
inline constexpr uint32_t kSmallMax = 159;
inline constexpr uint32_t kMediumMax = 1279;

// Size axis for the indicator/count vectors, inclusive.
inline constexpr uint32_t kSizeAxisMin = 54;
inline constexpr uint32_t kSizeAxisMax = 1514;
inline constexpr std::size_t kSizeAxisDim = kSizeAxisMax - kSizeAxisMin + 1;  // 1461

/// The eight direction-by-size categories, in feature-vector order.
enum class PacketCategory : uint8_t {
  PositiveTiny = 0,
  NegativeTiny,
  PositiveSmall,
  NegativeSmall,
  PositiveMedium,
  NegativeMedium,
  PositiveLarge,
  NegativeLarge,
};
inline constexpr std::size_t kCategoryCount = 8;

const char* to_string(PacketCategory c);

/// Unique category per the boundary table; requires size >= 1.
PacketCategory categorize(Direction direction, uint32_t size);

enum class FeatureSet : uint8_t { Simple, Transfer };

const char* to_string(FeatureSet f);

struct SchemaSegment {
  std::string name;
  std::size_t offset;
  std::size_t length;

  bool operator==(const SchemaSegment&) const = default;
};

struct FeatureSchema {
  std::vector<SchemaSegment> segments;

  std::size_t dimension() const;
  const SchemaSegment& segment(const std::string& name) const;  // throws if absent
  bool operator==(const FeatureSchema&) const = default;

  /// Stable fingerprint over segment names/offsets/lengths.
  uint64_t hash() const;
};

FeatureSchema simple_schema();
FeatureSchema transfer_schema(std::size_t k);
FeatureSchema schema_for(FeatureSet set, std::size_t k);

/// Out-of-range packet sizes are clamped onto the size axis; the clamp
/// count is reported through this counter when provided.
struct FeatureCounters {
  uint64_t clamped_sizes = 0;
};

// Individual feature operations. All are pure single passes over the
// trace; the ones with a non-empty precondition throw FeaturizeError.
std::array<double, kCategoryCount> simple_features(const Trace& trace);
std::vector<double> unique_packet_size(const Trace& trace, FeatureCounters* counters = nullptr);
std::vector<double> packet_size_count(const Trace& trace, FeatureCounters* counters = nullptr);
std::vector<double> packet_order(const Trace& trace, std::size_t k);
std::vector<double> inter_arrival(const Trace& trace, std::size_t k);
double negative_count(const Trace& trace);
double cumulative_size(const Trace& trace);
double cumulative_size_directed(const Trace& trace);
double total_time(const Trace& trace);

struct BurstStats {
  uint64_t count = 0;    // maximal same-direction runs
  uint64_t max_len = 0;  // longest run
  double mean_len = 0.0; // |T| / count
};

BurstStats bursts(const Trace& trace);

/// Truncates to early(trace, k), then concatenates every transfer
/// feature in schema order. Dimension: 2*1461 + 2*k + 7.
std::vector<double> transfer_features(const Trace& trace, std::size_t k,
                                      FeatureCounters* counters = nullptr);

/// Simple features after early(trace, k) truncation.
std::array<double, kCategoryCount> simple_features_early(const Trace& trace, std::size_t k);

}  // namespace wfp
