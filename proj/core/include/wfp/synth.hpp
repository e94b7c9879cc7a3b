#pragma once
// Deterministic synthetic website traffic. A site is a fixed ordered
// resource set; a visit replays the request-response rendering loop
// against a configurable network (bandwidth, one-way delay, loss) and
// yields a tailored post-handshake trace.

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "wfp/trace.hpp"

namespace wfp {

struct WebsiteModel {
  std::string site_id;
  std::vector<uint64_t> resources;  // bytes; first entry is the HTML file
  std::pair<uint32_t, uint32_t> request_size_range;  // payload bytes, inclusive
  uint64_t seed = 0;
};

struct NetworkCondition {
  double bandwidth_bps = 0.0;  // 0 = unlimited
  double delay_s = 0.0;        // one-way
  double loss = 0.0;           // per-packet probability, < 1
};

struct VisitConfig {
  Protocol protocol = Protocol::GQUIC;
  uint32_t mtu_payload = 1400;  // response chunk payload bytes
  uint64_t seed = 0;
};

struct SiteParams {
  std::pair<uint32_t, uint32_t> n_resources = {5, 30};
  double log_mean = 9.5;   // log-normal resource size parameters
  double log_sigma = 1.2;
  std::pair<uint32_t, uint32_t> request_size_range = {80, 400};
};

/// Every simulated packet carries this much framing overhead on the wire,
/// which keeps sizes aligned with the [54, 1514] feature axis.
inline constexpr uint32_t kFrameOverhead = 54;

/// Retransmitted duplicates appear this long after the lost original.
inline double retransmit_timeout(const NetworkCondition& net) {
  return 2.0 * net.delay_s + 0.001;
}

/// Deterministic site profile drawn from the seed.
WebsiteModel generate_site(uint64_t seed, const SiteParams& params);

/// One visit: per resource, a positive request then ceil(size/mtu)
/// negative response chunks. Timestamps accrue one-way delay,
/// serialization time (size*8/bandwidth) per hop, and per-packet jitter
/// uniform in [0, 0.2*delay]. A lost packet stays in the trace at its
/// nominal time and a duplicate is re-emitted once after the timeout;
/// the result is sorted to keep timestamps monotone.
Trace simulate_visit(const WebsiteModel& site, const NetworkCondition& net,
                     const VisitConfig& config);

/// n_sites site models with visits_per_site labeled visits each, with
/// per-site and per-visit seeds derived from the master seed. Labels are
/// "site-000", "site-001", ...
std::vector<Trace> generate_dataset(uint32_t n_sites, uint32_t visits_per_site,
                                    const NetworkCondition& net, Protocol protocol,
                                    uint64_t master_seed, const SiteParams& params = {},
                                    uint32_t mtu_payload = 1400);

std::vector<WebsiteModel> generate_sites(uint32_t n_sites, uint64_t master_seed,
                                         const SiteParams& params = {});

/// Site profiles round-trip through JSON for corpus reuse.
std::string sites_to_json(const std::vector<WebsiteModel>& sites);
std::vector<WebsiteModel> sites_from_json(const std::string& json_text);

}  // namespace wfp
