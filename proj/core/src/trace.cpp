#include "wfp/trace.hpp"

#include "wfp/error.hpp"

namespace wfp {

const char* to_string(Protocol p) {
  switch (p) {
    case Protocol::GQUIC: return "GQUIC";
    case Protocol::IQUIC: return "IQUIC";
    case Protocol::HTTPS: return "HTTPS";
  }
  return "GQUIC";
}

std::optional<Protocol> protocol_from_string(std::string_view s) {
  if (s == "GQUIC" || s == "gquic") return Protocol::GQUIC;
  if (s == "IQUIC" || s == "iquic") return Protocol::IQUIC;
  if (s == "HTTPS" || s == "https") return Protocol::HTTPS;
  return std::nullopt;
}

Trace early(const Trace& trace, std::size_t k) {
  if (k < 1) throw InvalidParam("early: k must be >= 1");
  Trace out;
  out.protocol = trace.protocol;
  out.label = trace.label;
  std::size_t n = std::min(k, trace.packets.size());
  out.packets.assign(trace.packets.begin(), trace.packets.begin() + static_cast<std::ptrdiff_t>(n));
  return out;
}

std::vector<Violation> validate(const Trace& trace) {
  std::vector<Violation> out;
  for (std::size_t i = 0; i < trace.packets.size(); ++i) {
    const Packet& p = trace.packets[i];
    if (p.size < 1) out.push_back({i, "size"});
    if (p.timestamp < 0.0) out.push_back({i, "timestamp"});
    if (i > 0 && p.timestamp < trace.packets[i - 1].timestamp) {
      out.push_back({i, "timestamp order"});
    }
  }
  return out;
}

}  // namespace wfp
