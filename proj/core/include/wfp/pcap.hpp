#pragma once
// Classic pcap reader (24-byte global header, 16-byte record headers),
// both endiannesses, Ethernet link type. Extracts the transport-level
// view the tailoring stage needs; payload bytes beyond a small window
// are never retained.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace wfp {

enum class Transport : uint8_t { TCP, UDP };

// TCP flag bits as found in the header's 13th octet.
inline constexpr uint8_t kTcpFin = 0x01;
inline constexpr uint8_t kTcpSyn = 0x02;
inline constexpr uint8_t kTcpRst = 0x04;
inline constexpr uint8_t kTcpAck = 0x10;

/// Bytes of transport payload kept for protocol-marker detection.
inline constexpr std::size_t kPayloadViewBytes = 64;

struct RawPacket {
  double timestamp = 0.0;  // seconds since capture epoch
  uint16_t src_port = 0;
  uint16_t dst_port = 0;
  Transport transport = Transport::UDP;
  uint32_t wire_size = 0;  // original frame length on the wire
  std::vector<uint8_t> payload_view;  // first <= kPayloadViewBytes payload bytes
  std::optional<uint8_t> tcp_flags;
};

struct CaptureResult {
  std::vector<RawPacket> packets;
  uint64_t skipped_non_ip = 0;       // ARP, IPv6, ...
  uint64_t skipped_fragmented = 0;   // IPv4 fragments
  bool truncated_tail = false;       // final record was incomplete
};

/// Parses a classic pcap byte buffer. Throws ParseError for a missing or
/// malformed global header or a non-Ethernet link type; a truncated final
/// record only sets truncated_tail and keeps the preceding records.
CaptureResult parse_capture(std::span<const uint8_t> bytes);

CaptureResult parse_capture_file(const std::string& path);

}  // namespace wfp
