#pragma once
// Builds classic pcap byte streams and protocol payloads for the
// ingestion fixtures. Frames are minimal but structurally honest:
// Ethernet II + IPv4 + UDP/TCP with correct lengths.

#include <array>
#include <cstdint>
#include <cstring>
#include <string>
#include <vector>

namespace pcapfix {

using Bytes = std::vector<uint8_t>;

inline void put_u16be(Bytes& b, uint16_t v) {
  b.push_back(static_cast<uint8_t>(v >> 8));
  b.push_back(static_cast<uint8_t>(v & 0xff));
}

inline void put_u32(Bytes& b, uint32_t v, bool swapped) {
  uint8_t raw[4];
  std::memcpy(raw, &v, 4);
  if (swapped) std::swap(raw[0], raw[3]), std::swap(raw[1], raw[2]);
  b.insert(b.end(), raw, raw + 4);
}

class PcapWriter {
 public:
  explicit PcapWriter(bool swapped = false) : swapped_(swapped) {
    put_u32(bytes_, 0xa1b2c3d4, swapped_);
    put_u16file(2);  // version major
    put_u16file(4);  // version minor
    put_u32(bytes_, 0, swapped_);      // thiszone
    put_u32(bytes_, 0, swapped_);      // sigfigs
    put_u32(bytes_, 65535, swapped_);  // snaplen
    put_u32(bytes_, 1, swapped_);      // linktype: Ethernet
  }

  /// Appends a record at an absolute microsecond offset.
  void add(uint64_t micros, const Bytes& frame) {
    put_u32(bytes_, static_cast<uint32_t>(micros / 1000000), swapped_);
    put_u32(bytes_, static_cast<uint32_t>(micros % 1000000), swapped_);
    put_u32(bytes_, static_cast<uint32_t>(frame.size()), swapped_);
    put_u32(bytes_, static_cast<uint32_t>(frame.size()), swapped_);
    bytes_.insert(bytes_.end(), frame.begin(), frame.end());
  }

  /// A record header that promises more bytes than it delivers.
  void add_truncated(uint64_t micros, uint32_t claimed, const Bytes& partial) {
    put_u32(bytes_, static_cast<uint32_t>(micros / 1000000), swapped_);
    put_u32(bytes_, static_cast<uint32_t>(micros % 1000000), swapped_);
    put_u32(bytes_, claimed, swapped_);
    put_u32(bytes_, claimed, swapped_);
    bytes_.insert(bytes_.end(), partial.begin(), partial.end());
  }

  const Bytes& bytes() const { return bytes_; }

 private:
  void put_u16file(uint16_t v) {
    uint8_t lo = static_cast<uint8_t>(v & 0xff);
    uint8_t hi = static_cast<uint8_t>(v >> 8);
    if (swapped_) {
      bytes_.push_back(hi);
      bytes_.push_back(lo);
    } else {
      bytes_.push_back(lo);
      bytes_.push_back(hi);
    }
  }

  bool swapped_;
  Bytes bytes_;
};

inline Bytes eth_frame(uint16_t ethertype, const Bytes& payload) {
  Bytes f;
  for (int i = 0; i < 6; ++i) f.push_back(0x02);  // dst mac
  for (int i = 0; i < 6; ++i) f.push_back(0x04);  // src mac
  put_u16be(f, ethertype);
  f.insert(f.end(), payload.begin(), payload.end());
  return f;
}

inline Bytes ipv4(uint8_t proto, const Bytes& payload, uint16_t frag_field = 0) {
  Bytes p;
  p.push_back(0x45);  // v4, IHL 5
  p.push_back(0);
  put_u16be(p, static_cast<uint16_t>(20 + payload.size()));
  put_u16be(p, 0x1234);      // id
  put_u16be(p, frag_field);  // flags + fragment offset
  p.push_back(64);           // ttl
  p.push_back(proto);
  put_u16be(p, 0);  // checksum (unchecked)
  for (uint8_t b : {10, 0, 0, 1}) p.push_back(b);
  for (uint8_t b : {10, 0, 0, 2}) p.push_back(b);
  p.insert(p.end(), payload.begin(), payload.end());
  return p;
}

inline Bytes udp(uint16_t sport, uint16_t dport, const Bytes& payload) {
  Bytes p;
  put_u16be(p, sport);
  put_u16be(p, dport);
  put_u16be(p, static_cast<uint16_t>(8 + payload.size()));
  put_u16be(p, 0);  // checksum
  p.insert(p.end(), payload.begin(), payload.end());
  return p;
}

inline Bytes tcp(uint16_t sport, uint16_t dport, uint8_t flags, const Bytes& payload) {
  Bytes p;
  put_u16be(p, sport);
  put_u16be(p, dport);
  put_u32(p, 0, false);  // seq
  put_u32(p, 0, false);  // ack
  p.push_back(5 << 4);   // data offset 5, no options
  p.push_back(flags);
  put_u16be(p, 65535);  // window
  put_u16be(p, 0);      // checksum
  put_u16be(p, 0);      // urgent
  p.insert(p.end(), payload.begin(), payload.end());
  return p;
}

inline Bytes udp_frame(uint16_t sport, uint16_t dport, const Bytes& quic_payload) {
  return eth_frame(0x0800, ipv4(17, udp(sport, dport, quic_payload)));
}

inline Bytes tcp_frame(uint16_t sport, uint16_t dport, uint8_t flags, const Bytes& payload) {
  return eth_frame(0x0800, ipv4(6, tcp(sport, dport, flags, payload)));
}

inline Bytes arp_frame() {
  Bytes arp(28, 0);
  arp[0] = 0;
  arp[1] = 1;  // ethernet
  arp[2] = 8;
  arp[3] = 0;  // ipv4
  return eth_frame(0x0806, arp);
}

// ---- GQUIC (Q043-style public header) ----

inline Bytes gquic_client_hello(const std::array<uint8_t, 8>& cid, std::size_t payload_len) {
  Bytes p;
  p.push_back(0x09);  // version flag + 8-byte CID flag
  p.insert(p.end(), cid.begin(), cid.end());
  for (char c : {'Q', '0', '4', '3'}) p.push_back(static_cast<uint8_t>(c));
  p.push_back(1);  // packet number
  for (char c : {'C', 'H', 'L', 'O'}) p.push_back(static_cast<uint8_t>(c));
  while (p.size() < payload_len) p.push_back(0x20);
  return p;
}

inline Bytes gquic_data(const std::array<uint8_t, 8>& cid, std::size_t payload_len) {
  Bytes p;
  p.push_back(0x08);  // 8-byte CID, no version
  p.insert(p.end(), cid.begin(), cid.end());
  p.push_back(2);  // packet number
  while (p.size() < payload_len) p.push_back(0xaa);
  return p;
}

// ---- IQUIC (long/short headers, h3-29 version field) ----

inline Bytes iquic_long(uint8_t packet_type, const Bytes& dcid, const Bytes& scid,
                        std::size_t payload_len) {
  Bytes p;
  p.push_back(static_cast<uint8_t>(0x80 | 0x40 | (packet_type << 4)));
  for (uint8_t b : {0xff, 0x00, 0x00, 0x1d}) p.push_back(b);  // h3-29
  p.push_back(static_cast<uint8_t>(dcid.size()));
  p.insert(p.end(), dcid.begin(), dcid.end());
  p.push_back(static_cast<uint8_t>(scid.size()));
  p.insert(p.end(), scid.begin(), scid.end());
  while (p.size() < payload_len) p.push_back(0xbb);
  return p;
}

inline Bytes iquic_short(std::size_t payload_len) {
  Bytes p;
  p.push_back(0x40);  // short header
  while (p.size() < payload_len) p.push_back(0xcc);
  return p;
}

// ---- TLS records ----

inline Bytes tls_change_cipher_spec_and_finished() {
  Bytes p = {0x14, 0x03, 0x03, 0x00, 0x01, 0x01};  // CCS record
  Bytes fin = {0x16, 0x03, 0x03, 0x00, 0x28};      // handshake record header
  p.insert(p.end(), fin.begin(), fin.end());
  for (int i = 0; i < 40; ++i) p.push_back(0xdd);
  return p;
}

inline Bytes tls_handshake(std::size_t payload_len, uint8_t minor = 0x03) {
  Bytes p = {0x16, 0x03, minor};
  put_u16be(p, static_cast<uint16_t>(payload_len - 5));
  while (p.size() < payload_len) p.push_back(0xee);
  return p;
}

inline Bytes tls_appdata(std::size_t payload_len) {
  Bytes p = {0x17, 0x03, 0x03};
  put_u16be(p, static_cast<uint16_t>(payload_len - 5));
  while (p.size() < payload_len) p.push_back(0xff);
  return p;
}

}  // namespace pcapfix
