// Copyright 2026 The imgtrace Authors
//
// Licensed under the Apache License, Version 2.0 (the "License"); you may not
// use this file except in compliance with the License. You may obtain a copy
// of the License at https://www.apache.org/licenses/LICENSE-2.0

#pragma once

// Exif (APP1) parsing: walks the TIFF structure far enough to recover the
// editor-identifying tags and the embedded thumbnail. IFD0 and IFD1 are
// interpreted; Exif SubIFD and GPS IFD offsets are recorded but not walked.
// MakerNotes stay opaque bytes.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "imgtrace/bytes.hpp"
#include "imgtrace/errors.hpp"
#include "imgtrace/jpeg_segments.hpp"

namespace imgtrace::exif {

inline constexpr std::uint16_t kTagSoftware = 0x0131;
inline constexpr std::uint16_t kTagArtist = 0x013B;
inline constexpr std::uint16_t kTagDateTime = 0x0132;
inline constexpr std::uint16_t kTagExifSubIfd = 0x8769;
inline constexpr std::uint16_t kTagGpsIfd = 0x8825;
inline constexpr std::uint16_t kTagJpegInterchange = 0x0201;
inline constexpr std::uint16_t kTagJpegInterchangeLength = 0x0202;

struct Rational {
  std::uint32_t numerator = 0;
  std::uint32_t denominator = 0;
  bool operator==(const Rational&) const = default;
};

struct TagValue {
  std::uint16_t type = 0;  // TIFF field type
  std::uint32_t count = 0;
  std::string ascii;                    // type 2, without the NUL terminator
  std::vector<std::uint32_t> uints;     // BYTE / SHORT / LONG
  std::vector<Rational> rationals;      // RATIONAL
  ByteVec raw;                          // exact value bytes (MakerNote etc.)

  bool operator==(const TagValue&) const = default;
};

struct ExifRecord {
  bool little_endian = false;
  std::map<std::uint16_t, TagValue> tags;       // IFD0
  std::map<std::uint16_t, TagValue> ifd1_tags;  // thumbnail IFD
  ByteVec thumbnail;                            // embedded JPEG, may be empty
  std::optional<std::uint32_t> exif_subifd_offset;
  std::optional<std::uint32_t> gps_ifd_offset;
  std::vector<std::string> diagnostics;

  bool has_thumbnail() const { return !thumbnail.empty(); }
};

struct EditorExifSignature {
  std::optional<std::string> software;
  std::optional<std::string> artist;

  bool operator==(const EditorExifSignature&) const = default;
};

namespace detail {

inline std::size_t type_size(std::uint16_t type) {
  switch (type) {
    case 1: case 2: case 6: case 7: return 1;   // BYTE, ASCII, SBYTE, UNDEFINED
    case 3: case 8: return 2;                   // SHORT, SSHORT
    case 4: case 9: case 11: return 4;          // LONG, SLONG, FLOAT
    case 5: case 10: case 12: return 8;         // RATIONAL, SRATIONAL, DOUBLE
    default: return 0;                          // unknown: skipped by caller
  }
}

// Walks one IFD starting at `ifd_off` (relative to the TIFF base) and fills
// `out`. Returns the next-IFD offset (0 when none).
inline std::uint32_t parse_ifd(ByteSpan tiff, std::uint32_t ifd_off, bool little,
                               std::map<std::uint16_t, TagValue>& out,
                               ExifRecord& rec) {
  const std::uint16_t count = u16_at(tiff, ifd_off, little);
  std::size_t pos = ifd_off + 2;
  for (std::uint16_t e = 0; e < count; ++e, pos += 12) {
    const std::uint16_t tag = u16_at(tiff, pos, little);
    const std::uint16_t type = u16_at(tiff, pos + 2, little);
    const std::uint32_t n = u32_at(tiff, pos + 4, little);
    const std::size_t elem = type_size(type);
    if (elem == 0) {
      rec.diagnostics.push_back("skipped tag with unknown type");
      continue;
    }
    const std::uint64_t total = static_cast<std::uint64_t>(elem) * n;
    std::size_t value_off;
    if (total <= 4) {
      value_off = pos + 8;
    } else {
      value_off = u32_at(tiff, pos + 8, little);
      if (value_off + total > tiff.size())
        raise(Errc::OffsetOutOfBounds, "tag value offset outside payload");
    }
    if (value_off + total > tiff.size())
      raise(Errc::OffsetOutOfBounds, "tag value runs past payload");

    TagValue v;
    v.type = type;
    v.count = n;
    v.raw.assign(tiff.begin() + value_off, tiff.begin() + value_off + total);
    switch (type) {
      case 2: {  // ASCII: strip trailing NULs
        std::size_t len = v.raw.size();
        while (len > 0 && v.raw[len - 1] == 0) --len;
        v.ascii.assign(v.raw.begin(), v.raw.begin() + len);
        break;
      }
      case 1: case 7:
        for (std::uint32_t i = 0; i < n; ++i) v.uints.push_back(v.raw[i]);
        break;
      case 3:
        for (std::uint32_t i = 0; i < n; ++i)
          v.uints.push_back(u16_at(tiff, value_off + 2 * i, little));
        break;
      case 4:
        for (std::uint32_t i = 0; i < n; ++i)
          v.uints.push_back(u32_at(tiff, value_off + 4 * i, little));
        break;
      case 5:
        for (std::uint32_t i = 0; i < n; ++i)
          v.rationals.push_back({u32_at(tiff, value_off + 8 * i, little),
                                 u32_at(tiff, value_off + 8 * i + 4, little)});
        break;
      default:
        break;  // signed/float types: raw bytes only
    }

    if (tag == kTagExifSubIfd && !v.uints.empty())
      rec.exif_subifd_offset = v.uints[0];
    else if (tag == kTagGpsIfd && !v.uints.empty())
      rec.gps_ifd_offset = v.uints[0];
    out[tag] = std::move(v);
  }
  return u32_at(tiff, pos, little);
}

}  // namespace detail

inline ExifRecord parse_exif(ByteSpan app1_payload) {
  static const std::uint8_t preamble[6] = {'E', 'x', 'i', 'f', 0, 0};
  if (app1_payload.size() < 6 ||
      !std::equal(preamble, preamble + 6, app1_payload.begin()))
    raise(Errc::BadPreamble, "APP1 payload does not start with Exif\\0\\0");
  ByteSpan tiff = app1_payload.subspan(6);
  if (tiff.size() < 8) raise(Errc::BadTiffHeader, "TIFF header truncated");

  bool little;
  if (tiff[0] == 'I' && tiff[1] == 'I')
    little = true;
  else if (tiff[0] == 'M' && tiff[1] == 'M')
    little = false;
  else
    raise(Errc::BadTiffHeader, "byte-order mark is neither II nor MM");
  if (u16_at(tiff, 2, little) != 42)
    raise(Errc::BadTiffHeader, "TIFF magic is not 42");

  ExifRecord rec;
  rec.little_endian = little;

  const std::uint32_t ifd0_off = u32_at(tiff, 4, little);
  if (ifd0_off + 2 > tiff.size())
    raise(Errc::OffsetOutOfBounds, "IFD0 offset outside payload");
  const std::uint32_t ifd1_off = detail::parse_ifd(tiff, ifd0_off, little, rec.tags, rec);

  if (ifd1_off != 0) {
    if (ifd1_off + 2 > tiff.size())
      raise(Errc::OffsetOutOfBounds, "IFD1 offset outside payload");
    detail::parse_ifd(tiff, ifd1_off, little, rec.ifd1_tags, rec);

    const auto fmt = rec.ifd1_tags.find(kTagJpegInterchange);
    const auto len = rec.ifd1_tags.find(kTagJpegInterchangeLength);
    if (fmt != rec.ifd1_tags.end() && len != rec.ifd1_tags.end() &&
        !fmt->second.uints.empty() && !len->second.uints.empty()) {
      const std::uint64_t off = fmt->second.uints[0];
      const std::uint64_t n = len->second.uints[0];
      if (off + n <= tiff.size()) {
        rec.thumbnail.assign(tiff.begin() + off, tiff.begin() + off + n);
      } else {
        rec.diagnostics.push_back("thumbnail span outside payload; ignored");
      }
    }
  }
  return rec;
}

// Software / Artist verbatim; matching policy (normalization, versions)
// belongs to the reference DB, not the parser.
inline std::optional<EditorExifSignature> extract_editor_signature(
    const ExifRecord& rec) {
  EditorExifSignature sig;
  if (auto it = rec.tags.find(kTagSoftware); it != rec.tags.end())
    sig.software = it->second.ascii;
  if (auto it = rec.tags.find(kTagArtist); it != rec.tags.end())
    sig.artist = it->second.ascii;
  if (!sig.software && !sig.artist) return std::nullopt;
  return sig;
}

// Thumbnails are best-effort evidence: anything malformed yields nullopt and
// a diagnostic rather than an error.
inline std::optional<jpeg::QuantTableSet> extract_thumbnail_dqt(
    const ExifRecord& rec, std::string* diagnostic = nullptr) {
  if (!rec.has_thumbnail()) return std::nullopt;
  try {
    auto list = jpeg::parse_segments(rec.thumbnail);
    auto set = jpeg::extract_dqt(list);
    set.source = jpeg::QuantTableSet::Source::Thumbnail;
    return set;
  } catch (const Error& e) {
    if (diagnostic) *diagnostic = std::string("thumbnail unparseable: ") + e.what();
    return std::nullopt;
  }
}

}  // namespace imgtrace::exif
