#pragma once
// Packet/trace model shared by the whole pipeline: directed, sized,
// timestamped packet sequences, validation, and early-traffic truncation.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace wfp {

enum class Direction : uint8_t {
  Positive,  // client -> server
  Negative,  // server -> client
};

enum class Protocol : uint8_t { GQUIC, IQUIC, HTTPS };

const char* to_string(Protocol p);
std::optional<Protocol> protocol_from_string(std::string_view s);

struct Packet {
  double timestamp = 0.0;  // seconds since the conversation anchor, >= 0
  Direction direction = Direction::Positive;
  uint32_t size = 0;  // bytes on wire, >= 1
};

/// One tailored visit. Timestamps are relative to the handshake-end
/// anchor assigned at ingest (or 0 for synthetic traces). Immutable by
/// convention once built; safe to share across workers.
struct Trace {
  std::vector<Packet> packets;
  Protocol protocol = Protocol::GQUIC;
  std::string label;  // website identifier; empty = unlabeled

  std::size_t size() const { return packets.size(); }
  bool empty() const { return packets.empty(); }
};

/// First min(k, |T|) packets in original order; protocol/label preserved.
/// Requires k >= 1.
Trace early(const Trace& trace, std::size_t k);

struct Violation {
  std::size_t packet_index;
  std::string rule;  // "size", "timestamp", "timestamp order"
};

/// Empty result iff all Trace invariants hold. Never throws.
std::vector<Violation> validate(const Trace& trace);

}  // namespace wfp
