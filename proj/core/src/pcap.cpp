#include "wfp/pcap.hpp"

#include <cstring>
#include <fstream>

#include "wfp/error.hpp"

namespace wfp {

namespace {

constexpr uint32_t kMagicNative = 0xa1b2c3d4;
constexpr uint32_t kMagicSwapped = 0xd4c3b2a1;
constexpr uint32_t kLinkEthernet = 1;

uint32_t bswap32(uint32_t v) {
  return ((v & 0xff) << 24) | ((v & 0xff00) << 8) | ((v >> 8) & 0xff00) | (v >> 24);
}
uint16_t bswap16(uint16_t v) { return static_cast<uint16_t>((v << 8) | (v >> 8)); }

struct Reader {
  std::span<const uint8_t> data;
  std::size_t pos = 0;
  bool swap = false;

  std::size_t remaining() const { return data.size() - pos; }

  uint32_t u32() {
    uint32_t v;
    std::memcpy(&v, data.data() + pos, 4);
    pos += 4;
    return swap ? bswap32(v) : v;
  }
  uint16_t u16be() {  // network byte order inside frames
    uint16_t v;
    std::memcpy(&v, data.data() + pos, 2);
    pos += 2;
    return bswap16(v);  // host is little-endian on every supported target
  }
  uint8_t u8() { return data[pos++]; }
};

}  // namespace

CaptureResult parse_capture(std::span<const uint8_t> bytes) {
  if (bytes.size() < 24) throw ParseError("pcap: missing or short global header");

  Reader r{bytes};
  uint32_t magic;
  std::memcpy(&magic, bytes.data(), 4);
  r.pos = 4;
  if (magic == kMagicNative) {
    r.swap = false;
  } else if (magic == kMagicSwapped) {
    r.swap = true;
  } else {
    throw ParseError("pcap: unrecognized magic number");
  }
  r.pos = 20;  // skip version/thiszone/sigfigs/snaplen
  uint32_t linktype = r.u32();
  if (linktype != kLinkEthernet) {
    throw ParseError("pcap: unsupported link type " + std::to_string(linktype) +
                     " (Ethernet required)");
  }

  CaptureResult result;
  while (r.remaining() > 0) {
    if (r.remaining() < 16) {
      result.truncated_tail = true;
      break;
    }
    uint32_t ts_sec = r.u32();
    uint32_t ts_usec = r.u32();
    uint32_t incl_len = r.u32();
    uint32_t orig_len = r.u32();
    if (r.remaining() < incl_len) {
      result.truncated_tail = true;
      break;
    }
    std::span<const uint8_t> frame = bytes.subspan(r.pos, incl_len);
    r.pos += incl_len;

    // Ethernet header
    if (frame.size() < 14) {
      ++result.skipped_non_ip;
      continue;
    }
    uint16_t ethertype = static_cast<uint16_t>((frame[12] << 8) | frame[13]);
    if (ethertype != 0x0800) {  // IPv4 only
      ++result.skipped_non_ip;
      continue;
    }
    std::span<const uint8_t> ip = frame.subspan(14);
    if (ip.size() < 20 || (ip[0] >> 4) != 4) {
      ++result.skipped_non_ip;
      continue;
    }
    std::size_t ihl = static_cast<std::size_t>(ip[0] & 0x0f) * 4;
    if (ihl < 20 || ip.size() < ihl) {
      ++result.skipped_non_ip;
      continue;
    }
    uint16_t frag = static_cast<uint16_t>((ip[6] << 8) | ip[7]);
    bool more_fragments = (frag & 0x2000) != 0;
    uint16_t frag_offset = frag & 0x1fff;
    if (more_fragments || frag_offset != 0) {
      ++result.skipped_fragmented;
      continue;
    }
    uint8_t proto = ip[9];
    std::span<const uint8_t> transport = ip.subspan(ihl);

    RawPacket pkt;
    pkt.timestamp = static_cast<double>(ts_sec) + static_cast<double>(ts_usec) / 1e6;
    pkt.wire_size = orig_len;

    if (proto == 17) {  // UDP
      if (transport.size() < 8) {
        ++result.skipped_non_ip;
        continue;
      }
      pkt.transport = Transport::UDP;
      pkt.src_port = static_cast<uint16_t>((transport[0] << 8) | transport[1]);
      pkt.dst_port = static_cast<uint16_t>((transport[2] << 8) | transport[3]);
      std::span<const uint8_t> payload = transport.subspan(8);
      std::size_t n = std::min(payload.size(), kPayloadViewBytes);
      pkt.payload_view.assign(payload.begin(), payload.begin() + static_cast<std::ptrdiff_t>(n));
    } else if (proto == 6) {  // TCP
      if (transport.size() < 20) {
        ++result.skipped_non_ip;
        continue;
      }
      pkt.transport = Transport::TCP;
      pkt.src_port = static_cast<uint16_t>((transport[0] << 8) | transport[1]);
      pkt.dst_port = static_cast<uint16_t>((transport[2] << 8) | transport[3]);
      std::size_t doff = static_cast<std::size_t>(transport[12] >> 4) * 4;
      if (doff < 20 || transport.size() < doff) {
        ++result.skipped_non_ip;
        continue;
      }
      pkt.tcp_flags = transport[13];
      std::span<const uint8_t> payload = transport.subspan(doff);
      std::size_t n = std::min(payload.size(), kPayloadViewBytes);
      pkt.payload_view.assign(payload.begin(), payload.begin() + static_cast<std::ptrdiff_t>(n));
    } else {
      ++result.skipped_non_ip;
      continue;
    }

    result.packets.push_back(std::move(pkt));
  }
  return result;
}

CaptureResult parse_capture_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw ParseError("cannot open capture: " + path);
  std::vector<uint8_t> bytes((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
  return parse_capture(bytes);
}

}  // namespace wfp
