#include <algorithm>
#include <cmath>
#include <set>

#include "doctest.h"
#include "test_support.hpp"
#include "wfp/error.hpp"
#include "wfp/features.hpp"
#include "wfp/synth.hpp"

using namespace wfp;

TEST_CASE("generate_site is deterministic and honors ranges") {
  SiteParams params;
  params.n_resources = {5, 5};
  WebsiteModel a = generate_site(101, params);
  WebsiteModel b = generate_site(101, params);
  CHECK(a.resources == b.resources);
  CHECK(a.resources.size() == 5);
  for (uint64_t r : a.resources) CHECK(r >= 1);

  WebsiteModel c = generate_site(102, params);
  CHECK(a.resources != c.resources);

  params.n_resources = {4, 2};
  CHECK_THROWS_AS(generate_site(1, params), InvalidParam);
}

TEST_CASE("generated sizes track the log-normal quartiles") {
  SiteParams params;
  params.n_resources = {10, 10};
  params.log_mean = 9.0;
  params.log_sigma = 1.0;

  std::vector<double> sizes;
  for (uint64_t seed = 0; seed < 1000; ++seed) {
    WebsiteModel site = generate_site(seed, params);
    for (uint64_t r : site.resources) sizes.push_back(static_cast<double>(r));
  }
  std::sort(sizes.begin(), sizes.end());
  double q1 = sizes[sizes.size() / 4];
  double q3 = sizes[(sizes.size() * 3) / 4];

  // analytic quartiles of lognormal(mu, sigma): exp(mu +- 0.674489... * sigma)
  double z = 0.6744897501960817;
  double want_q1 = std::exp(params.log_mean - z * params.log_sigma);
  double want_q3 = std::exp(params.log_mean + z * params.log_sigma);
  CHECK(q1 > want_q1 * 0.8);
  CHECK(q1 < want_q1 * 1.2);
  CHECK(q3 > want_q3 * 0.8);
  CHECK(q3 < want_q3 * 1.2);
}

TEST_CASE("visit chunking follows the framing rule") {
  WebsiteModel site;
  site.site_id = "s";
  site.resources = {3000};
  site.request_size_range = {100, 100};
  NetworkCondition net{};  // no impairments
  VisitConfig config;
  config.mtu_payload = 1400;
  config.seed = 5;

  Trace t = simulate_visit(site, net, config);
  REQUIRE(t.size() == 4);
  CHECK(t.packets[0].direction == Direction::Positive);
  CHECK(t.packets[0].size == 154);  // 100 payload + 54 framing
  CHECK(t.packets[1].size == 1454);
  CHECK(t.packets[2].size == 1454);
  CHECK(t.packets[3].size == 254);
  for (std::size_t i = 1; i < 4; ++i) CHECK(t.packets[i].direction == Direction::Negative);
}

TEST_CASE("determinism and impairment-only divergence") {
  SiteParams params;
  WebsiteModel site = generate_site(42, params);
  site.site_id = "s";
  VisitConfig config;
  config.seed = 9;

  NetworkCondition clean{0.0, 0.0, 0.0};
  Trace a = simulate_visit(site, clean, config);
  Trace b = simulate_visit(site, clean, config);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a.packets[i].timestamp == b.packets[i].timestamp);
    CHECK(a.packets[i].size == b.packets[i].size);
  }

  // same seed under impairments: the request/response skeleton (sizes,
  // directions of original packets) is unchanged; only loss/jitter-driven
  // packets and timing differ
  NetworkCondition lossy{0.0, 0.01, 0.2};
  Trace c = simulate_visit(site, lossy, config);
  CHECK(c.size() >= a.size());  // duplicates only add packets
  auto originals = [](const Trace& t) {
    std::vector<std::pair<int, uint32_t>> v;
    for (const Packet& p : t.packets) v.push_back({p.direction == Direction::Positive ? 1 : -1, p.size});
    return v;
  };
  auto base = originals(a);
  auto noisy = originals(c);
  // every original (direction, size) multiset element still occurs
  std::multiset<std::pair<int, uint32_t>> base_set(base.begin(), base.end());
  std::multiset<std::pair<int, uint32_t>> noisy_set(noisy.begin(), noisy.end());
  for (const auto& e : base_set) CHECK(noisy_set.count(e) >= base_set.count(e));
}

TEST_CASE("visits validate and satisfy the chunk-count law") {
  SiteParams params;
  NetworkCondition net{1e8, 0.01, 0.0};
  auto traces = generate_dataset(5, 8, net, Protocol::IQUIC, 777);
  CHECK(traces.size() == 40);

  for (const Trace& t : traces) {
    CHECK(validate(t).empty());
    CHECK_FALSE(t.empty());
    CHECK(t.protocol == Protocol::IQUIC);
    CHECK_FALSE(t.label.empty());
  }

  // negative-packet count equals sum of ceil(resource / mtu) at zero loss
  auto sites = generate_sites(5, 777);
  for (uint32_t s = 0; s < 5; ++s) {
    uint64_t chunks = 0;
    for (uint64_t r : sites[s].resources) chunks += (r + 1399) / 1400;
    const Trace& t = traces[s * 8];  // first visit of site s
    uint64_t negatives = 0;
    for (const Packet& p : t.packets) {
      if (p.direction == Direction::Negative) ++negatives;
    }
    CHECK(negatives == chunks);
    CHECK(t.label == sites[s].site_id);
  }
}

TEST_CASE("doubling delay increases total time") {
  WebsiteModel site = generate_site(7, {});
  site.site_id = "s";
  VisitConfig config;
  config.seed = 3;
  Trace fast = simulate_visit(site, {0.0, 0.01, 0.0}, config);
  Trace slow = simulate_visit(site, {0.0, 0.02, 0.0}, config);
  CHECK(total_time(slow) > total_time(fast));
}

TEST_CASE("loss appends duplicates after the timeout") {
  WebsiteModel site;
  site.site_id = "s";
  site.resources = {1400};
  site.request_size_range = {100, 100};
  NetworkCondition lossy{0.0, 0.005, 0.9999};  // nearly every packet re-emitted
  VisitConfig config;
  config.seed = 11;

  Trace t = simulate_visit(site, lossy, config);
  CHECK(t.size() == 4);  // request + chunk, each with one duplicate
  CHECK(validate(t).empty());

  // duplicate of the request: same size, timeout later
  CHECK(t.packets[0].size == 154);
  double timeout = retransmit_timeout(lossy);
  bool found_dup = false;
  for (std::size_t i = 1; i < t.size(); ++i) {
    if (t.packets[i].size == 154 && t.packets[i].direction == Direction::Positive) {
      CHECK(t.packets[i].timestamp ==
            doctest::Approx(t.packets[0].timestamp + timeout).epsilon(1e-12));
      found_dup = true;
    }
  }
  CHECK(found_dup);
}

TEST_CASE("site models round trip through JSON") {
  auto sites = generate_sites(3, 31337);
  auto text = sites_to_json(sites);
  auto back = sites_from_json(text);
  REQUIRE(back.size() == sites.size());
  for (std::size_t i = 0; i < sites.size(); ++i) {
    CHECK(back[i].site_id == sites[i].site_id);
    CHECK(back[i].seed == sites[i].seed);
    CHECK(back[i].resources == sites[i].resources);
    CHECK(back[i].request_size_range == sites[i].request_size_range);
  }
}

TEST_CASE("parameter validation") {
  CHECK_THROWS_AS(generate_dataset(1, 5, {}, Protocol::GQUIC, 1), InvalidParam);
  CHECK_THROWS_AS(generate_dataset(3, 0, {}, Protocol::GQUIC, 1), InvalidParam);
  NetworkCondition bad_loss{0.0, 0.0, 1.0};
  CHECK_THROWS_AS(generate_dataset(3, 5, bad_loss, Protocol::GQUIC, 1), InvalidParam);

  WebsiteModel site = generate_site(1, {});
  VisitConfig config;
  config.mtu_payload = 100;  // below the medium lower bound
  CHECK_THROWS_AS(simulate_visit(site, {}, config), InvalidParam);
}
