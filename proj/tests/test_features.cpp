#include <cmath>

#include "doctest.h"
#include "oracles.hpp"
#include "test_support.hpp"
#include "wfp/error.hpp"
#include "wfp/features.hpp"

using namespace wfp;

namespace {

Trace make(std::initializer_list<std::pair<char, uint32_t>> packets, double dt = 0.01) {
  Trace t;
  double ts = 0.0;
  for (auto [dir, size] : packets) {
    ts += dt;
    t.packets.push_back({ts, dir == '+' ? Direction::Positive : Direction::Negative, size});
  }
  return t;
}

constexpr double kTol = 1e-9;

}  // namespace

TEST_CASE("categorize boundary table") {
  CHECK(categorize(Direction::Positive, 100) == PacketCategory::PositiveSmall);
  CHECK(categorize(Direction::Negative, 1280) == PacketCategory::NegativeLarge);
  CHECK(categorize(Direction::Positive, 79) == PacketCategory::PositiveTiny);
  CHECK(categorize(Direction::Positive, 80) == PacketCategory::PositiveSmall);
  CHECK(categorize(Direction::Negative, 159) == PacketCategory::NegativeSmall);
  CHECK(categorize(Direction::Negative, 160) == PacketCategory::NegativeMedium);
  CHECK(categorize(Direction::Positive, 1279) == PacketCategory::PositiveMedium);
  CHECK_THROWS_AS(categorize(Direction::Positive, 0), FeaturizeError);

  // exhaustive partition scan: every size maps to exactly one category,
  // and to the same one the oracle picks
  for (uint32_t size = 1; size <= 2000; ++size) {
    for (Direction d : {Direction::Positive, Direction::Negative}) {
      int got = static_cast<int>(categorize(d, size));
      CHECK(got == oracle::category_index(d, size));
    }
  }
}

TEST_CASE("simple features count categories in tuple order") {
  Trace t = make({{'+', 100}, {'-', 1400}, {'-', 1400}});
  auto f = simple_features(t);
  std::array<double, 8> want = {0, 0, 1, 0, 0, 0, 0, 2};
  for (std::size_t i = 0; i < 8; ++i) CHECK(f[i] == want[i]);

  CHECK_THROWS_AS(simple_features(Trace{}), FeaturizeError);

  Rng rng(0x51);
  Trace big = testutil::random_trace(rng, 1000, 1000);
  auto counts = simple_features(big);
  auto expect = oracle::simple(big);
  double total = 0.0;
  for (std::size_t i = 0; i < 8; ++i) {
    CHECK(counts[i] == expect[i]);
    total += counts[i];
  }
  CHECK(total == static_cast<double>(big.size()));  // partition property
}

TEST_CASE("unique packet size endpoints and set semantics") {
  Trace t = make({{'+', 54}, {'-', 1514}});
  auto v = unique_packet_size(t);
  REQUIRE(v.size() == 1461);
  CHECK(v[0] == 1.0);
  CHECK(v[1460] == 1.0);
  double sum = 0;
  for (double x : v) sum += x;
  CHECK(sum == 2.0);

  // duplicates produce the identical indicator
  Trace dup = make({{'+', 300}, {'+', 300}, {'-', 300}});
  Trace once = make({{'+', 300}});
  CHECK(unique_packet_size(dup) == unique_packet_size(once));

  // clamping counts out-of-range sizes
  Trace wild = make({{'+', 40}, {'-', 2000}, {'+', 60}});
  FeatureCounters counters;
  auto w = unique_packet_size(wild, &counters);
  CHECK(counters.clamped_sizes == 2);
  CHECK(w[0] == 1.0);     // 40 -> 54
  CHECK(w[1460] == 1.0);  // 2000 -> 1514
  CHECK(w[6] == 1.0);
}

TEST_CASE("packet size count and the sign link") {
  Trace t = make({{'+', 60}, {'-', 60}, {'+', 70}});
  auto counts = packet_size_count(t);
  CHECK(counts[6] == 2.0);
  CHECK(counts[16] == 1.0);

  Rng rng(0x52);
  for (int it = 0; it < 50; ++it) {
    Trace r = testutil::random_trace(rng, 1, 200);
    auto cnt = packet_size_count(r);
    auto uniq = unique_packet_size(r);
    double total = 0.0;
    for (std::size_t i = 0; i < cnt.size(); ++i) {
      CHECK(uniq[i] == (cnt[i] > 0 ? 1.0 : 0.0));  // unique = sign(count)
      total += cnt[i];
    }
    CHECK(total == static_cast<double>(r.size()));
  }
}

TEST_CASE("packet order with zero padding") {
  Trace t = make({{'+', 100}, {'-', 200}});
  auto v = packet_order(t, 4);
  CHECK(v == std::vector<double>{100, 200, 0, 0});
  CHECK(packet_order(t, 2) == std::vector<double>{100, 200});

  // prefix property: first min(k,|T|) dims independent of k
  Rng rng(0x53);
  Trace r = testutil::random_trace(rng, 10, 30);
  auto v8 = packet_order(r, 8);
  auto v20 = packet_order(r, 20);
  for (std::size_t i = 0; i < 8; ++i) CHECK(v8[i] == v20[i]);
}

TEST_CASE("inter arrival anchored at zero") {
  Trace t;
  t.packets = {{0.1, Direction::Positive, 100}, {0.3, Direction::Negative, 200}};
  auto v = inter_arrival(t, 4);
  REQUIRE(v.size() == 4);
  CHECK(v[0] == doctest::Approx(0.1).epsilon(kTol));
  CHECK(v[1] == doctest::Approx(0.2).epsilon(kTol));
  CHECK(v[2] == 0.0);
  CHECK(v[3] == 0.0);

  Rng rng(0x54);
  for (int it = 0; it < 50; ++it) {
    Trace r = testutil::random_trace(rng, 1, 50);
    auto ia = inter_arrival(r, 60);
    double sum = 0.0;
    for (std::size_t i = 0; i < r.size(); ++i) {
      CHECK(ia[i] >= 0.0);
      sum += ia[i];
    }
    // telescoping: sum of first |T| dims = last timestamp - anchor
    CHECK(sum == doctest::Approx(r.packets.back().timestamp).epsilon(kTol));
  }

  Trace bad;
  bad.packets = {{0.5, Direction::Positive, 100}, {0.2, Direction::Positive, 100}};
  CHECK_THROWS_WITH_AS(inter_arrival(bad, 4), doctest::Contains("index 1"), FeaturizeError);
}

TEST_CASE("scalar features") {
  Trace t = make({{'+', 100}, {'-', 40}});
  CHECK(negative_count(t) == 1.0);
  CHECK(cumulative_size(t) == 140.0);
  CHECK(cumulative_size_directed(t) == 60.0);

  Trace pos = make({{'+', 10}, {'+', 20}});
  CHECK(negative_count(pos) == 0.0);
  CHECK(cumulative_size(pos) == cumulative_size_directed(pos));

  Trace neg = make({{'-', 10}, {'-', 20}, {'-', 30}});
  CHECK(negative_count(neg) == 3.0);

  Rng rng(0x55);
  for (int it = 0; it < 50; ++it) {
    Trace r = testutil::random_trace(rng, 1, 100);
    CHECK(negative_count(r) == oracle::negatives(r));
    double undirected = cumulative_size(r);
    double directed = cumulative_size_directed(r);
    double positive_sum = (undirected + directed) / 2.0;
    CHECK(directed == doctest::Approx(2.0 * positive_sum - undirected).epsilon(kTol));
  }

  // total time
  Trace single = make({{'+', 100}});
  CHECK(total_time(single) == 0.0);
  Trace two;
  two.packets = {{0.25, Direction::Positive, 100}, {0.75, Direction::Negative, 60}};
  CHECK(total_time(two) == doctest::Approx(0.5).epsilon(kTol));
}

TEST_CASE("burst statistics") {
  Trace t = make({{'+', 100}, {'+', 100}, {'-', 100}, {'+', 100}});
  BurstStats b = bursts(t);
  CHECK(b.count == 3);
  CHECK(b.max_len == 2);
  CHECK(b.mean_len == doctest::Approx(4.0 / 3.0).epsilon(kTol));

  Trace mono = make({{'-', 10}, {'-', 20}, {'-', 30}});
  b = bursts(mono);
  CHECK(b.count == 1);
  CHECK(b.max_len == 3);
  CHECK(b.mean_len == 3.0);

  Trace alt = make({{'+', 10}, {'-', 20}, {'+', 30}, {'-', 40}});
  b = bursts(alt);
  CHECK(b.count == 4);
  CHECK(b.max_len == 1);
  CHECK(b.mean_len == 1.0);

  CHECK_THROWS_AS(bursts(Trace{}), FeaturizeError);

  // conservation law: count * mean == |T|
  Rng rng(0x56);
  for (int it = 0; it < 200; ++it) {
    Trace r = testutil::random_trace(rng, 1, 80);
    b = bursts(r);
    CHECK(static_cast<double>(b.count) * b.mean_len ==
          doctest::Approx(static_cast<double>(r.size())).epsilon(kTol));
  }
}

TEST_CASE("transfer features: shape, truncation, segment extraction") {
  Rng rng(0x57);
  Trace t = testutil::random_trace(rng, 30, 60);
  std::size_t k = 20;

  auto v = transfer_features(t, k);
  CHECK(v.size() == 1461 + 1461 + k + k + 7);

  // truncation consistency
  auto direct = transfer_features(early(t, k), k);
  CHECK(v == direct);

  // segment extraction reproduces each component
  FeatureSchema schema = transfer_schema(k);
  Trace cut = early(t, k);
  auto check_segment = [&](const char* name, const std::vector<double>& expect) {
    const auto& seg = schema.segment(name);
    REQUIRE(seg.length == expect.size());
    for (std::size_t i = 0; i < seg.length; ++i) CHECK(v[seg.offset + i] == expect[i]);
  };
  check_segment("unique_size", unique_packet_size(cut));
  check_segment("size_count", packet_size_count(cut));
  check_segment("order", packet_order(cut, k));
  check_segment("inter_arrival", inter_arrival(cut, k));
  check_segment("negative", {negative_count(cut)});
  check_segment("cum_size", {cumulative_size(cut)});
  check_segment("cum_size_dir", {cumulative_size_directed(cut)});
  BurstStats b = bursts(cut);
  check_segment("burst_count", {static_cast<double>(b.count)});
  check_segment("burst_max", {static_cast<double>(b.max_len)});
  check_segment("burst_mean", {b.mean_len});
  check_segment("total_time", {total_time(cut)});

  CHECK_THROWS_AS(transfer_features(Trace{}, 5), FeaturizeError);
}

TEST_CASE("every feature operation matches the brute-force oracle") {
  Rng rng(0xFEA7);
  for (int it = 0; it < 300; ++it) {
    Trace t = testutil::random_trace(rng, 1, 300);
    std::size_t k = static_cast<std::size_t>(rng.uniform_int(1, 250));

    auto s = simple_features(t);
    auto so = oracle::simple(t);
    for (int i = 0; i < 8; ++i) CHECK(s[static_cast<std::size_t>(i)] == so[static_cast<std::size_t>(i)]);

    CHECK(unique_packet_size(t) == oracle::unique_size(t));
    CHECK(packet_size_count(t) == oracle::size_count(t));
    CHECK(packet_order(t, k) == oracle::order(t, k));

    auto ia = inter_arrival(t, k);
    auto iao = oracle::inter_arrival(t, k);
    REQUIRE(ia.size() == iao.size());
    for (std::size_t i = 0; i < ia.size(); ++i) {
      CHECK(ia[i] == doctest::Approx(iao[i]).epsilon(kTol));
    }

    auto v = transfer_features(t, k);
    auto vo = oracle::transfer(t, k);
    REQUIRE(v.size() == vo.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
      CHECK(v[i] == doctest::Approx(vo[i]).epsilon(kTol));
    }
  }
}

TEST_CASE("schema bookkeeping") {
  FeatureSchema simple = simple_schema();
  CHECK(simple.dimension() == 8);
  CHECK(simple.segments.size() == 8);
  CHECK(simple.segment("positive_medium").offset == 4);

  FeatureSchema transfer = transfer_schema(40);
  CHECK(transfer.dimension() == 1461 + 1461 + 40 + 40 + 7);
  CHECK(transfer.hash() != simple.hash());
  CHECK(transfer.hash() == transfer_schema(40).hash());
  CHECK(transfer.hash() != transfer_schema(41).hash());
  CHECK_THROWS_AS(simple.segment("nope"), InvalidParam);
}
