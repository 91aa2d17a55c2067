// Copyright 2026 The imgtrace Authors
//
// Licensed under the Apache License, Version 2.0 (the "License"); you may not
// use this file except in compliance with the License. You may obtain a copy
// of the License at https://www.apache.org/licenses/LICENSE-2.0

#pragma once

// Structural JPEG parsing: markers, segments, quantization tables. Nothing
// here decodes scan data; the walker only needs to skip it, keeping the
// parse lossless so a file can be re-serialized byte for byte.

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "imgtrace/bytes.hpp"
#include "imgtrace/errors.hpp"
#include "imgtrace/md5.hpp"

namespace imgtrace::jpeg {

// ---------------------------------------------------------------------------
// Zigzag order

// For zigzag position i, the row-major (natural) index of that coefficient.
inline constexpr std::array<std::uint8_t, 64> kZigzagToNatural = {
    0,  1,  8,  16, 9,  2,  3,  10, 17, 24, 32, 25, 18, 11, 4,  5,
    12, 19, 26, 33, 40, 48, 41, 34, 27, 20, 13, 6,  7,  14, 21, 28,
    35, 42, 49, 56, 57, 50, 43, 36, 29, 22, 15, 23, 30, 37, 44, 51,
    58, 59, 52, 45, 38, 31, 39, 46, 53, 60, 61, 54, 47, 55, 62, 63};

inline constexpr std::array<std::uint8_t, 64> kNaturalToZigzag = [] {
  std::array<std::uint8_t, 64> inverse{};
  for (int i = 0; i < 64; ++i) inverse[kZigzagToNatural[i]] = static_cast<std::uint8_t>(i);
  return inverse;
}();

template <typename T>
std::array<T, 64> zigzag_to_natural(const std::array<T, 64>& zz) {
  std::array<T, 64> nat{};
  for (int i = 0; i < 64; ++i) nat[kZigzagToNatural[i]] = zz[i];
  return nat;
}

template <typename T>
std::array<T, 64> natural_to_zigzag(const std::array<T, 64>& nat) {
  std::array<T, 64> zz{};
  for (int i = 0; i < 64; ++i) zz[i] = nat[kZigzagToNatural[i]];
  return zz;
}

// ---------------------------------------------------------------------------
// Markers

enum class MarkerKind {
  Soi,
  App,   // APP0..APP15, index carries n
  Dqt,
  Sof0,
  Sof2,
  Dht,
  Sos,
  Dri,
  Rst,   // RST0..RST7, index carries n
  Com,
  Eoi,
  Other,
};

struct Marker {
  std::uint16_t code = 0;  // full 0xFFxx value
  MarkerKind kind = MarkerKind::Other;
  int index = -1;  // APPn / RSTn parameter, -1 otherwise

  bool operator==(const Marker&) const = default;
};

inline Marker classify_marker(std::uint16_t code) {
  Marker m;
  m.code = code;
  const std::uint8_t lo = static_cast<std::uint8_t>(code & 0xFF);
  switch (lo) {
    case 0xD8: m.kind = MarkerKind::Soi; break;
    case 0xD9: m.kind = MarkerKind::Eoi; break;
    case 0xDB: m.kind = MarkerKind::Dqt; break;
    case 0xC0: m.kind = MarkerKind::Sof0; break;
    case 0xC2: m.kind = MarkerKind::Sof2; break;
    case 0xC4: m.kind = MarkerKind::Dht; break;
    case 0xDA: m.kind = MarkerKind::Sos; break;
    case 0xDD: m.kind = MarkerKind::Dri; break;
    case 0xFE: m.kind = MarkerKind::Com; break;
    default:
      if (lo >= 0xE0 && lo <= 0xEF) {
        m.kind = MarkerKind::App;
        m.index = lo - 0xE0;
      } else if (lo >= 0xD0 && lo <= 0xD7) {
        m.kind = MarkerKind::Rst;
        m.index = lo - 0xD0;
      } else {
        m.kind = MarkerKind::Other;
      }
  }
  return m;
}

// Markers that carry no length/payload at all.
inline bool is_standalone(MarkerKind k) {
  return k == MarkerKind::Soi || k == MarkerKind::Eoi || k == MarkerKind::Rst;
}

inline const char* marker_kind_name(MarkerKind k) {
  switch (k) {
    case MarkerKind::Soi: return "SOI";
    case MarkerKind::App: return "APP";
    case MarkerKind::Dqt: return "DQT";
    case MarkerKind::Sof0: return "SOF0";
    case MarkerKind::Sof2: return "SOF2";
    case MarkerKind::Dht: return "DHT";
    case MarkerKind::Sos: return "SOS";
    case MarkerKind::Dri: return "DRI";
    case MarkerKind::Rst: return "RST";
    case MarkerKind::Com: return "COM";
    case MarkerKind::Eoi: return "EOI";
    case MarkerKind::Other: return "OTHER";
  }
  return "?";
}

// ---------------------------------------------------------------------------
// Segments

struct Segment {
  Marker marker;
  std::size_t offset = 0;      // offset of the marker's leading 0xFF
  std::uint32_t fill_bytes = 0;  // 0xFF padding preceding the marker
  bool has_length = false;
  std::size_t payload_offset = 0;  // excludes the 2-byte length field
  std::size_t payload_size = 0;
  std::size_t entropy_offset = 0;  // SOS only: scan data with stuffing intact
  std::size_t entropy_size = 0;
};

// Owns a copy of the input bytes; segments index into it so the list stays
// valid independently of the caller's buffer.
class JpegSegmentList {
 public:
  std::vector<Segment> segments;
  bool missing_eoi = false;
  std::size_t trailer_offset = 0;
  std::size_t trailer_size = 0;

  ByteSpan payload(const Segment& s) const {
    return ByteSpan(bytes_).subspan(s.payload_offset, s.payload_size);
  }
  ByteSpan entropy(const Segment& s) const {
    return ByteSpan(bytes_).subspan(s.entropy_offset, s.entropy_size);
  }
  ByteSpan trailer() const {
    return ByteSpan(bytes_).subspan(trailer_offset, trailer_size);
  }
  ByteSpan bytes() const { return ByteSpan(bytes_); }

  const Segment* first(MarkerKind kind) const {
    for (const auto& s : segments)
      if (s.marker.kind == kind) return &s;
    return nullptr;
  }

  std::vector<const Segment*> all(MarkerKind kind) const {
    std::vector<const Segment*> out;
    for (const auto& s : segments)
      if (s.marker.kind == kind) out.push_back(&s);
    return out;
  }

  void adopt_bytes(ByteVec b) { bytes_ = std::move(b); }

 private:
  ByteVec bytes_;
};

inline JpegSegmentList parse_segments(ByteSpan stream) {
  if (stream.size() < 4) raise(Errc::MissingSoi, "stream shorter than 4 bytes");
  if (stream[0] != 0xFF || stream[1] != 0xD8)
    raise(Errc::MissingSoi, "first two bytes are not FFD8");

  JpegSegmentList list;
  list.adopt_bytes(ByteVec(stream.begin(), stream.end()));
  ByteSpan data = list.bytes();

  Segment soi;
  soi.marker = classify_marker(0xFFD8);
  soi.offset = 0;
  list.segments.push_back(soi);

  std::size_t i = 2;
  bool saw_eoi = false;
  while (i < data.size()) {
    // Fill bytes: any run of 0xFF before the marker code is legal padding.
    std::size_t fill_start = i;
    while (i + 1 < data.size() && data[i] == 0xFF && data[i + 1] == 0xFF) ++i;
    if (i + 1 >= data.size()) {
      // Dangling 0xFF or lone byte at end: truncated between segments.
      list.missing_eoi = true;
      list.trailer_offset = fill_start;
      list.trailer_size = data.size() - fill_start;
      return list;
    }
    if (data[i] != 0xFF)
      raise(Errc::MalformedMarker, "expected marker at offset " + std::to_string(i));
    const std::uint8_t lo = data[i + 1];
    if (lo == 0x00 || lo == 0xFF)
      raise(Errc::MalformedMarker, "invalid marker code at offset " + std::to_string(i));

    Segment seg;
    seg.marker = classify_marker(static_cast<std::uint16_t>(0xFF00 | lo));
    seg.offset = i;
    seg.fill_bytes = static_cast<std::uint32_t>(i - fill_start);
    i += 2;

    if (seg.marker.kind == MarkerKind::Eoi) {
      list.segments.push_back(seg);
      saw_eoi = true;
      list.trailer_offset = i;
      list.trailer_size = data.size() - i;
      break;
    }
    if (seg.marker.kind == MarkerKind::Soi) {
      // Stray SOI mid-stream; keep it and continue walking.
      list.segments.push_back(seg);
      continue;
    }

    if (!is_standalone(seg.marker.kind)) {
      if (i + 2 > data.size())
        raise(Errc::TruncatedSegment, "length field past end of stream");
      const std::size_t declared = (static_cast<std::size_t>(data[i]) << 8) | data[i + 1];
      if (declared < 2)
        raise(Errc::TruncatedSegment, "declared length below 2");
      if (i + declared > data.size())
        raise(Errc::TruncatedSegment,
              "declared length " + std::to_string(declared) +
                  " exceeds remaining bytes at offset " + std::to_string(i));
      seg.has_length = true;
      seg.payload_offset = i + 2;
      seg.payload_size = declared - 2;
      i += declared;
    }

    if (seg.marker.kind == MarkerKind::Sos) {
      // Skip entropy-coded data: stop only at a marker that is neither a
      // stuffed 0x00 nor a restart; leading 0xFF fill before that marker is
      // left to the next segment.
      const std::size_t start = i;
      while (i < data.size()) {
        if (data[i] != 0xFF) {
          ++i;
          continue;
        }
        if (i + 1 >= data.size()) break;  // trailing 0xFF, truncated
        const std::uint8_t next = data[i + 1];
        if (next == 0x00 || (next >= 0xD0 && next <= 0xD7)) {
          i += 2;
          continue;
        }
        break;  // real marker (or fill run before one)
      }
      seg.entropy_offset = start;
      seg.entropy_size = i - start;
      if (i >= data.size()) {
        list.segments.push_back(seg);
        list.missing_eoi = true;
        return list;
      }
    }

    list.segments.push_back(seg);
  }

  if (!saw_eoi) list.missing_eoi = true;
  return list;
}

// Rebuilds the byte stream from the parsed structure (not from the stored
// copy), which is what makes the lossless-parse property testable.
inline ByteVec serialize_segments(const JpegSegmentList& list) {
  ByteVec out;
  for (const auto& seg : list.segments) {
    for (std::uint32_t f = 0; f < seg.fill_bytes; ++f) out.push_back(0xFF);
    out.push_back(0xFF);
    out.push_back(static_cast<std::uint8_t>(seg.marker.code & 0xFF));
    if (seg.has_length) {
      put_u16be(out, static_cast<std::uint16_t>(seg.payload_size + 2));
      ByteSpan p = list.payload(seg);
      out.insert(out.end(), p.begin(), p.end());
    }
    if (seg.marker.kind == MarkerKind::Sos) {
      ByteSpan e = list.entropy(seg);
      out.insert(out.end(), e.begin(), e.end());
    }
  }
  ByteSpan t = list.trailer();
  out.insert(out.end(), t.begin(), t.end());
  return out;
}

// ---------------------------------------------------------------------------
// Quantization tables

struct QuantTable {
  int table_id = 0;
  bool sixteen_bit = false;
  std::array<std::uint16_t, 64> values_zigzag{};
  std::array<std::uint16_t, 64> values_natural{};

  bool operator==(const QuantTable&) const = default;
};

struct QuantTableSet {
  enum class Source { MainImage, Thumbnail };
  std::map<int, QuantTable> tables;
  Source source = Source::MainImage;

  bool empty() const { return tables.empty(); }
};

// Parses every DQT payload in the list. A single payload may carry several
// tables back to back; a later table with an id seen before replaces the
// earlier one, the same way a decoder would apply it.
inline QuantTableSet extract_dqt(const JpegSegmentList& list) {
  QuantTableSet set;
  auto dqts = list.all(MarkerKind::Dqt);
  if (dqts.empty()) raise(Errc::NoDqtFound, "no DQT segment in stream");
  for (const Segment* seg : dqts) {
    ByteSpan p = list.payload(*seg);
    std::size_t i = 0;
    while (i < p.size()) {
      const std::uint8_t pq_tq = p[i];
      const int precision = pq_tq >> 4;
      const int id = pq_tq & 0x0F;
      if (precision > 1 || id > 3)
        raise(Errc::MalformedDqt, "bad precision/id byte");
      const std::size_t value_bytes = precision ? 128 : 64;
      if (i + 1 + value_bytes > p.size())
        raise(Errc::MalformedDqt, "payload not consistent with table records");
      QuantTable t;
      t.table_id = id;
      t.sixteen_bit = precision == 1;
      for (int v = 0; v < 64; ++v) {
        std::uint16_t value = precision
            ? static_cast<std::uint16_t>((p[i + 1 + 2 * v] << 8) | p[i + 2 + 2 * v])
            : p[i + 1 + v];
        if (value == 0) raise(Errc::ZeroQuantValue, "quantizer value 0");
        t.values_zigzag[v] = value;
      }
      t.values_natural = zigzag_to_natural(t.values_zigzag);
      set.tables[id] = t;  // last definition wins
      i += 1 + value_bytes;
    }
  }
  return set;
}

// Canonical serialization for fingerprinting, normative for DB interop:
// tables in ascending id order; per table one id byte then the 64 values in
// zigzag order, one byte each for 8-bit tables, two big-endian bytes for
// 16-bit ones. Fingerprint is the lowercase-hex MD5 of those bytes.
inline ByteVec dqt_canonical_bytes(const QuantTableSet& set) {
  ByteVec out;
  for (const auto& [id, table] : set.tables) {  // std::map iterates id-sorted
    out.push_back(static_cast<std::uint8_t>(id));
    for (std::uint16_t v : table.values_zigzag) {
      if (table.sixteen_bit) {
        out.push_back(static_cast<std::uint8_t>(v >> 8));
        out.push_back(static_cast<std::uint8_t>(v & 0xFF));
      } else {
        out.push_back(static_cast<std::uint8_t>(v));
      }
    }
  }
  return out;
}

inline std::string dqt_fingerprint(const QuantTableSet& set) {
  if (set.empty()) raise(Errc::NoDqtFound, "fingerprint of empty table set");
  return md5_hex(ByteSpan(dqt_canonical_bytes(set)));
}

// ---------------------------------------------------------------------------
// Frame header (no scan decoding, just the SOF parameters)

struct FrameComponent {
  int id = 0;
  int h = 1;
  int v = 1;
  int quant_table_id = 0;
};

struct FrameHeader {
  std::uint8_t sof_lo = 0xC0;  // marker low byte, 0xC0..0xCF
  int precision = 8;
  int width = 0;
  int height = 0;
  std::vector<FrameComponent> components;

  bool baseline() const { return sof_lo == 0xC0; }
  bool progressive() const { return sof_lo == 0xC2; }
  bool arithmetic() const { return sof_lo >= 0xC9 && sof_lo <= 0xCF && sof_lo != 0xCC; }
};

inline FrameHeader parse_frame_payload(std::uint8_t sof_lo, ByteSpan p) {
  ByteReader r(p);
  FrameHeader h;
  h.sof_lo = sof_lo;
  h.precision = r.u8();
  h.height = r.u16be();
  h.width = r.u16be();
  const int n = r.u8();
  for (int c = 0; c < n; ++c) {
    FrameComponent fc;
    fc.id = r.u8();
    const std::uint8_t hv = r.u8();
    fc.h = hv >> 4;
    fc.v = hv & 0x0F;
    fc.quant_table_id = r.u8();
    h.components.push_back(fc);
  }
  return h;
}

// First SOFn segment of any flavor, parsed; nullopt when the stream has none.
inline std::optional<FrameHeader> find_frame_header(const JpegSegmentList& list) {
  for (const auto& seg : list.segments) {
    const std::uint8_t lo = static_cast<std::uint8_t>(seg.marker.code & 0xFF);
    const bool sof = lo >= 0xC0 && lo <= 0xCF && lo != 0xC4 && lo != 0xC8 && lo != 0xCC;
    if (sof) return parse_frame_payload(lo, list.payload(seg));
  }
  return std::nullopt;
}

}  // namespace imgtrace::jpeg
