#include "wfp/ingest.hpp"

#include <algorithm>
#include <cstring>
#include <map>
#include <set>
#include <string>

#include "wfp/error.hpp"

namespace wfp {

namespace {

// GQUIC Q043 public flags.
constexpr uint8_t kGquicFlagVersion = 0x01;
constexpr uint8_t kGquicFlagCid8 = 0x08;

// IQUIC long-header packet types (first byte bits 5..4).
constexpr uint8_t kIquicHandshake = 2;

constexpr uint8_t kCcsRecord[6] = {0x14, 0x03, 0x03, 0x00, 0x01, 0x01};

bool is_client(const RawPacket& p, uint16_t client_port) { return p.src_port == client_port; }

Transport expected_transport(Protocol protocol) {
  return protocol == Protocol::HTTPS ? Transport::TCP : Transport::UDP;
}

/// Second Client Hello from the client marks the GQUIC handshake end.
std::optional<std::size_t> gquic_marker(const Conversation& conv) {
  std::size_t hellos = 0;
  for (std::size_t i = 0; i < conv.raw_packets.size(); ++i) {
    const RawPacket& p = conv.raw_packets[i];
    if (!is_client(p, conv.client_port)) continue;
    if (p.payload_view.empty() || !(p.payload_view[0] & kGquicFlagVersion)) continue;
    if (!gquic_has_client_hello_tag(p.payload_view)) continue;
    if (++hellos == 2) return i;
  }
  return std::nullopt;
}

/// Last long-header Handshake packet marks the IQUIC handshake end.
std::optional<std::size_t> iquic_marker(const Conversation& conv) {
  std::optional<std::size_t> last;
  for (std::size_t i = 0; i < conv.raw_packets.size(); ++i) {
    auto hdr = iquic_parse_long_header(conv.raw_packets[i].payload_view);
    if (hdr && hdr->packet_type == kIquicHandshake) last = i;
  }
  return last;
}

/// Client's Change Cipher Spec marks the HTTPS (TLS) handshake end.
std::optional<std::size_t> https_marker(const Conversation& conv) {
  for (std::size_t i = 0; i < conv.raw_packets.size(); ++i) {
    const RawPacket& p = conv.raw_packets[i];
    if (is_client(p, conv.client_port) && https_is_change_cipher_spec(p.payload_view)) return i;
  }
  return std::nullopt;
}

void finalize(Conversation& conv) {
  if (!conv.raw_packets.empty()) conv.conversation_end = conv.raw_packets.size() - 1;
  switch (conv.protocol) {
    case Protocol::GQUIC: conv.handshake_end = gquic_marker(conv); break;
    case Protocol::IQUIC: conv.handshake_end = iquic_marker(conv); break;
    case Protocol::HTTPS: conv.handshake_end = https_marker(conv); break;
  }
}

struct PortPairGroup {
  uint16_t client_port;
  uint16_t server_port;
  std::vector<RawPacket> packets;
  std::size_t first_index;  // position of first packet in the capture
};

}  // namespace

bool gquic_has_client_hello_tag(std::span<const uint8_t> payload) {
  static constexpr uint8_t tag[4] = {'C', 'H', 'L', 'O'};
  if (payload.size() < 4) return false;
  auto it = std::search(payload.begin(), payload.end(), std::begin(tag), std::end(tag));
  return it != payload.end();
}

std::optional<uint64_t> gquic_connection_id(std::span<const uint8_t> payload) {
  if (payload.empty() || !(payload[0] & kGquicFlagCid8) || payload.size() < 9) {
    return std::nullopt;
  }
  uint64_t cid;
  std::memcpy(&cid, payload.data() + 1, 8);
  return cid;
}

std::optional<QuicLongHeader> iquic_parse_long_header(std::span<const uint8_t> payload) {
  if (payload.size() < 7 || !(payload[0] & 0x80)) return std::nullopt;
  QuicLongHeader hdr;
  hdr.packet_type = static_cast<uint8_t>((payload[0] & 0x30) >> 4);
  std::size_t pos = 5;  // skip flags + version
  uint8_t dcid_len = payload[pos++];
  if (dcid_len > 20 || payload.size() < pos + dcid_len + 1) return std::nullopt;
  hdr.dcid.assign(payload.begin() + pos, payload.begin() + pos + dcid_len);
  pos += dcid_len;
  uint8_t scid_len = payload[pos++];
  if (scid_len > 20 || payload.size() < pos + scid_len) return std::nullopt;
  hdr.scid.assign(payload.begin() + pos, payload.begin() + pos + scid_len);
  return hdr;
}

bool https_is_change_cipher_spec(std::span<const uint8_t> payload) {
  return payload.size() >= sizeof(kCcsRecord) &&
         std::memcmp(payload.data(), kCcsRecord, sizeof(kCcsRecord)) == 0;
}

SplitResult split_conversations(std::span<const RawPacket> packets, Protocol protocol) {
  SplitResult result;
  Transport want = expected_transport(protocol);

  // Group by unordered port pair; the first sender of a group is its client.
  std::map<uint32_t, std::size_t> group_index;
  std::vector<PortPairGroup> groups;
  for (std::size_t i = 0; i < packets.size(); ++i) {
    const RawPacket& p = packets[i];
    if (p.transport != want) continue;
    uint32_t key = (static_cast<uint32_t>(std::min(p.src_port, p.dst_port)) << 16) |
                   std::max(p.src_port, p.dst_port);
    auto [it, inserted] = group_index.try_emplace(key, groups.size());
    if (inserted) {
      groups.push_back({p.src_port, p.dst_port, {}, i});
    }
    groups[it->second].packets.push_back(p);
  }
  std::sort(groups.begin(), groups.end(),
            [](const PortPairGroup& a, const PortPairGroup& b) { return a.first_index < b.first_index; });

  for (const PortPairGroup& group : groups) {
    std::vector<Conversation> convs;
    auto open = [&] {
      Conversation c;
      c.protocol = protocol;
      c.client_port = group.client_port;
      c.server_port = group.server_port;
      convs.push_back(std::move(c));
    };
    open();

    if (protocol == Protocol::GQUIC) {
      std::optional<uint64_t> current_cid;
      for (const RawPacket& p : group.packets) {
        auto cid = gquic_connection_id(p.payload_view);
        if (!cid) {
          ++result.unreadable_cid;
        } else if (current_cid && *cid != *current_cid) {
          open();
          current_cid = cid;
        } else {
          current_cid = cid;
        }
        convs.back().raw_packets.push_back(p);
      }
    } else if (protocol == Protocol::IQUIC) {
      // A conversation is identified by the group of DCID/SCID values its
      // long headers use; a long header sharing none of them starts a new
      // conversation. Short-header packets stay with the current one.
      std::set<std::vector<uint8_t>> cid_group;
      for (const RawPacket& p : group.packets) {
        bool long_header = !p.payload_view.empty() && (p.payload_view[0] & 0x80);
        auto hdr = iquic_parse_long_header(p.payload_view);
        if (long_header && !hdr) {
          ++result.unreadable_cid;
        } else if (hdr) {
          bool known = cid_group.contains(hdr->dcid) || cid_group.contains(hdr->scid);
          if (!cid_group.empty() && !known) {
            open();
            cid_group.clear();
          }
          if (!hdr->dcid.empty()) cid_group.insert(hdr->dcid);
          if (!hdr->scid.empty()) cid_group.insert(hdr->scid);
        }
        convs.back().raw_packets.push_back(p);
      }
    } else {  // HTTPS
      bool closed = false;
      for (const RawPacket& p : group.packets) {
        if (closed) {
          open();
          closed = false;
        }
        convs.back().raw_packets.push_back(p);
        if (p.tcp_flags && (*p.tcp_flags & kTcpRst)) closed = true;
      }
    }

    for (Conversation& c : convs) {
      if (c.raw_packets.empty()) continue;
      finalize(c);
      result.conversations.push_back(std::move(c));
    }
  }

  std::stable_sort(result.conversations.begin(), result.conversations.end(),
                   [](const Conversation& a, const Conversation& b) {
                     return a.raw_packets.front().timestamp < b.raw_packets.front().timestamp;
                   });
  return result;
}

Trace tailor(const Conversation& conv, bool whole_conversation_fallback) {
  if (conv.raw_packets.empty()) throw InvalidParam("tailor: empty conversation");

  std::size_t start;
  double anchor;
  if (conv.handshake_end) {
    start = *conv.handshake_end + 1;
    anchor = conv.raw_packets[*conv.handshake_end].timestamp;
  } else if (whole_conversation_fallback) {
    start = 0;
    anchor = conv.raw_packets.front().timestamp;
  } else {
    throw TailorError(std::string("no handshake-end marker in ") + to_string(conv.protocol) +
                      " conversation " + std::to_string(conv.client_port) + "<->" +
                      std::to_string(conv.server_port));
  }

  Trace trace;
  trace.protocol = conv.protocol;
  trace.packets.reserve(conv.raw_packets.size() - start);
  for (std::size_t i = start; i < conv.raw_packets.size(); ++i) {
    const RawPacket& p = conv.raw_packets[i];
    Packet out;
    out.timestamp = p.timestamp - anchor;
    out.direction = (p.src_port == conv.client_port) ? Direction::Positive : Direction::Negative;
    out.size = p.wire_size;
    trace.packets.push_back(out);
  }
  return trace;
}

}  // namespace wfp
