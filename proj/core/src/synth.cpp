#include "wfp/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "json.hpp"
#include "wfp/error.hpp"
#include "wfp/rng.hpp"

namespace wfp {

namespace {

constexpr double kJitterFraction = 0.2;  // of one-way delay, per packet

double serialization_time(uint32_t wire_size, const NetworkCondition& net) {
  if (net.bandwidth_bps <= 0.0) return 0.0;
  return static_cast<double>(wire_size) * 8.0 / net.bandwidth_bps;
}

void validate_network(const NetworkCondition& net) {
  if (net.loss < 0.0 || net.loss >= 1.0) throw InvalidParam("network: loss must be in [0, 1)");
  if (net.delay_s < 0.0) throw InvalidParam("network: delay must be >= 0");
  if (net.bandwidth_bps < 0.0) throw InvalidParam("network: bandwidth must be >= 0");
}

}  // namespace

WebsiteModel generate_site(uint64_t seed, const SiteParams& params) {
  if (params.n_resources.first < 1 || params.n_resources.second < params.n_resources.first) {
    throw InvalidParam("generate_site: bad resource count range");
  }
  if (params.request_size_range.first < 1 ||
      params.request_size_range.second < params.request_size_range.first) {
    throw InvalidParam("generate_site: bad request size range");
  }
  if (params.log_sigma < 0.0) throw InvalidParam("generate_site: log_sigma must be >= 0");

  Rng rng(seed);
  WebsiteModel site;
  site.seed = seed;
  site.request_size_range = params.request_size_range;
  uint32_t n = static_cast<uint32_t>(
      rng.uniform_int(params.n_resources.first, params.n_resources.second));
  site.resources.reserve(n);
  for (uint32_t i = 0; i < n; ++i) {
    double s = rng.lognormal(params.log_mean, params.log_sigma);
    site.resources.push_back(std::max<uint64_t>(1, static_cast<uint64_t>(std::llround(s))));
  }
  return site;
}

Trace simulate_visit(const WebsiteModel& site, const NetworkCondition& net,
                     const VisitConfig& config) {
  validate_network(net);
  if (config.mtu_payload < 160) throw InvalidParam("visit: mtu_payload must be >= 160");
  if (site.resources.empty()) throw InvalidParam("visit: site has no resources");

  // Independent streams keep the request/response skeleton identical when
  // only the impairments change.
  Rng request_rng(mix_seed(config.seed, 1));
  Rng jitter_rng(mix_seed(config.seed, 2));
  Rng loss_rng(mix_seed(config.seed, 3));
  double timeout = retransmit_timeout(net);

  struct Event {
    double t;
    Direction dir;
    uint32_t size;
  };
  std::vector<Event> events;

  auto jitter = [&]() { return jitter_rng.uniform(0.0, kJitterFraction * net.delay_s); };
  auto emit = [&](double t, Direction dir, uint32_t wire) {
    events.push_back({t, dir, wire});
    // The capture point sits ahead of the loss point: the original stays
    // observable and the retransmitted duplicate lands after the timeout.
    if (net.loss > 0.0 && loss_rng.bernoulli(net.loss)) {
      events.push_back({t + timeout, dir, wire});
      return t + timeout;
    }
    return t;
  };

  double cursor = 0.0;  // anchor: handshake end
  for (uint64_t resource : site.resources) {
    uint32_t request_wire = kFrameOverhead +
                            static_cast<uint32_t>(request_rng.uniform_int(
                                site.request_size_range.first, site.request_size_range.second));
    double sent = emit(cursor, Direction::Positive, request_wire);
    double at_server = cursor + serialization_time(request_wire, net) + net.delay_s;

    uint64_t chunks = (resource + config.mtu_payload - 1) / config.mtu_payload;
    uint64_t remainder = resource - (chunks - 1) * config.mtu_payload;
    double server_clock = at_server;
    double last_arrival = sent;
    for (uint64_t c = 0; c < chunks; ++c) {
      uint32_t payload = (c + 1 < chunks) ? config.mtu_payload : static_cast<uint32_t>(remainder);
      uint32_t wire = kFrameOverhead + payload;
      server_clock += serialization_time(wire, net);
      double arrival = server_clock + net.delay_s + jitter();
      double observed = emit(arrival, Direction::Negative, wire);
      last_arrival = std::max(last_arrival, observed);
    }
    cursor = std::max(cursor, last_arrival);  // strict request-response
  }

  std::stable_sort(events.begin(), events.end(),
                   [](const Event& a, const Event& b) { return a.t < b.t; });

  Trace trace;
  trace.protocol = config.protocol;
  trace.label = site.site_id;
  trace.packets.reserve(events.size());
  for (const Event& e : events) trace.packets.push_back({e.t, e.dir, e.size});
  return trace;
}

std::vector<WebsiteModel> generate_sites(uint32_t n_sites, uint64_t master_seed,
                                         const SiteParams& params) {
  std::vector<WebsiteModel> sites;
  sites.reserve(n_sites);
  for (uint32_t s = 0; s < n_sites; ++s) {
    WebsiteModel site = generate_site(mix_seed(master_seed, s), params);
    char buf[32];
    std::snprintf(buf, sizeof(buf), "site-%03u", s);
    site.site_id = buf;
    sites.push_back(std::move(site));
  }
  return sites;
}

std::vector<Trace> generate_dataset(uint32_t n_sites, uint32_t visits_per_site,
                                    const NetworkCondition& net, Protocol protocol,
                                    uint64_t master_seed, const SiteParams& params,
                                    uint32_t mtu_payload) {
  if (n_sites < 2) throw InvalidParam("generate_dataset: needs at least 2 sites");
  if (visits_per_site < 1) throw InvalidParam("generate_dataset: needs at least 1 visit per site");
  validate_network(net);

  std::vector<WebsiteModel> sites = generate_sites(n_sites, master_seed, params);
  std::vector<Trace> traces;
  traces.reserve(static_cast<std::size_t>(n_sites) * visits_per_site);
  for (uint32_t s = 0; s < n_sites; ++s) {
    for (uint32_t v = 0; v < visits_per_site; ++v) {
      VisitConfig config;
      config.protocol = protocol;
      config.mtu_payload = mtu_payload;
      config.seed = mix_seed(sites[s].seed ^ 0x5157a5c1u, v);
      traces.push_back(simulate_visit(sites[s], net, config));
    }
  }
  return traces;
}

std::string sites_to_json(const std::vector<WebsiteModel>& sites) {
  nlohmann::ordered_json out = nlohmann::ordered_json::array();
  for (const WebsiteModel& s : sites) {
    nlohmann::ordered_json j;
    j["site_id"] = s.site_id;
    j["seed"] = s.seed;
    j["request_size_range"] = {s.request_size_range.first, s.request_size_range.second};
    j["resources"] = s.resources;
    out.push_back(std::move(j));
  }
  return out.dump(2);
}

std::vector<WebsiteModel> sites_from_json(const std::string& json_text) {
  nlohmann::json in = nlohmann::json::parse(json_text, nullptr, false);
  if (in.is_discarded() || !in.is_array()) throw ParseError("site json: not a JSON array");
  std::vector<WebsiteModel> sites;
  for (const auto& j : in) {
    WebsiteModel s;
    s.site_id = j.at("site_id").get<std::string>();
    s.seed = j.at("seed").get<uint64_t>();
    s.request_size_range = {j.at("request_size_range").at(0).get<uint32_t>(),
                            j.at("request_size_range").at(1).get<uint32_t>()};
    s.resources = j.at("resources").get<std::vector<uint64_t>>();
    sites.push_back(std::move(s));
  }
  return sites;
}

}  // namespace wfp
