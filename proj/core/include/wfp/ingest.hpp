#pragma once
// Conversation extraction and traffic tailoring. A capture is grouped by
// port pair, split into conversations on protocol markers (GQUIC CID
// change, IQUIC DCID/SCID group change, HTTPS RST), and trimmed to the
// encrypted-data region that starts right after the handshake.

#include <optional>
#include <span>
#include <vector>

#include "wfp/pcap.hpp"
#include "wfp/trace.hpp"

namespace wfp {

struct Conversation {
  std::vector<RawPacket> raw_packets;  // timestamp order
  Protocol protocol = Protocol::GQUIC;
  uint16_t client_port = 0;  // endpoint that sent the first packet
  uint16_t server_port = 0;
  std::optional<std::size_t> handshake_end;     // index of the marker packet
  std::optional<std::size_t> conversation_end;  // index of the last packet
};

struct SplitResult {
  std::vector<Conversation> conversations;  // ordered by first-packet time
  uint64_t unreadable_cid = 0;  // packets kept in the current conversation
};

/// Groups packets by port pair and applies the per-protocol split rules.
/// Packets whose transport does not match the protocol (TCP for HTTPS,
/// UDP for GQUIC/IQUIC) are ignored.
SplitResult split_conversations(std::span<const RawPacket> packets, Protocol protocol);

/// Encrypted-data trace: packets strictly after the handshake-end marker,
/// directions relative to the client port, timestamps rebased to the
/// marker packet. Throws TailorError when no marker was detected unless
/// whole_conversation_fallback is set, in which case the entire
/// conversation is returned rebased to its first packet.
Trace tailor(const Conversation& conv, bool whole_conversation_fallback = false);

// Marker predicates, exposed for tests and capture tooling.
bool gquic_has_client_hello_tag(std::span<const uint8_t> payload);
std::optional<uint64_t> gquic_connection_id(std::span<const uint8_t> payload);

struct QuicLongHeader {
  uint8_t packet_type = 0;  // 0 Initial, 1 0-RTT, 2 Handshake, 3 Retry
  std::vector<uint8_t> dcid;
  std::vector<uint8_t> scid;
};
std::optional<QuicLongHeader> iquic_parse_long_header(std::span<const uint8_t> payload);

bool https_is_change_cipher_spec(std::span<const uint8_t> payload);

}  // namespace wfp
