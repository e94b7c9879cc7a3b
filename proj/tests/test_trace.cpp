#include "doctest.h"
#include "test_support.hpp"
#include "wfp/error.hpp"
#include "wfp/trace.hpp"

using namespace wfp;

namespace {

Trace make_trace(std::initializer_list<Packet> packets) {
  Trace t;
  t.protocol = Protocol::HTTPS;
  t.label = "site-a";
  t.packets = packets;
  return t;
}

}  // namespace

TEST_CASE("early returns the k-prefix") {
  Trace t = make_trace({{0.0, Direction::Positive, 100},
                        {0.1, Direction::Negative, 200},
                        {0.2, Direction::Negative, 300}});

  Trace two = early(t, 2);
  CHECK(two.size() == 2);
  CHECK(two.packets[0].size == 100);
  CHECK(two.packets[1].size == 200);
  CHECK(two.protocol == Protocol::HTTPS);
  CHECK(two.label == "site-a");
  CHECK(t.size() == 3);  // input untouched

  CHECK(early(t, 10).size() == 3);

  Trace one = early(t, 1);
  CHECK(one.size() == 1);
  CHECK(one.packets[0].size == 100);

  CHECK(early(Trace{}, 4).empty());
  CHECK_THROWS_AS(early(t, 0), InvalidParam);
}

TEST_CASE("early truncation laws on random traces") {
  Rng rng(0xE19);
  for (int it = 0; it < 1000; ++it) {
    Trace t = testutil::random_trace(rng, 0, 60);
    std::size_t k2 = static_cast<std::size_t>(rng.uniform_int(1, 80));
    std::size_t k1 = static_cast<std::size_t>(rng.uniform_int(1, k2));

    Trace t1 = early(t, k1);
    Trace t2 = early(t, k2);

    // length law
    CHECK(t1.size() == std::min(k1, t.size()));
    CHECK(t2.size() == std::min(k2, t.size()));

    // prefix coherence: early(T,k1) is the first min(k1,|T|) packets of early(T,k2)
    Trace prefix = early(t2, k1);
    REQUIRE(prefix.size() == t1.size());
    for (std::size_t i = 0; i < t1.size(); ++i) {
      CHECK(t1.packets[i].timestamp == prefix.packets[i].timestamp);
      CHECK(t1.packets[i].size == prefix.packets[i].size);
      CHECK(t1.packets[i].direction == prefix.packets[i].direction);
    }

    // idempotence
    Trace again = early(t1, k1);
    CHECK(again.size() == t1.size());
  }
}

TEST_CASE("validate reports rule and index") {
  Trace good = make_trace({{0.0, Direction::Positive, 60}, {0.5, Direction::Negative, 1400}});
  CHECK(validate(good).empty());
  CHECK(validate(Trace{}).empty());

  Trace disordered = make_trace({{0.5, Direction::Positive, 60},
                                 {0.2, Direction::Negative, 60},
                                 {0.6, Direction::Negative, 60}});
  auto violations = validate(disordered);
  REQUIRE(violations.size() == 1);
  CHECK(violations[0].packet_index == 1);
  CHECK(violations[0].rule == "timestamp order");

  Trace zero_size = make_trace({{0.0, Direction::Positive, 0}});
  violations = validate(zero_size);
  REQUIRE(violations.size() == 1);
  CHECK(violations[0].packet_index == 0);
  CHECK(violations[0].rule == "size");

  Trace negative_ts = make_trace({{-0.1, Direction::Positive, 60}});
  violations = validate(negative_ts);
  REQUIRE(violations.size() == 1);
  CHECK(violations[0].rule == "timestamp");
}
