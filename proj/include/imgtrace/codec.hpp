// Copyright 2026 The imgtrace Authors
//
// Licensed under the Apache License, Version 2.0 (the "License"); you may not
// use this file except in compliance with the License. You may obtain a copy
// of the License at https://www.apache.org/licenses/LICENSE-2.0

#pragma once

// Minimal baseline JPEG codec. Decode handles SOF0 Huffman streams with
// 1 or 3 components and sampling factors 1 or 2; encode produces 4:4:4 or
// 4:2:0 streams with the ITU T.81 Annex K tables scaled by the usual IJG
// quality mapping. Good enough to power re-compression analysis and fixture
// generation; not a performance codec.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <vector>

#include "imgtrace/bytes.hpp"
#include "imgtrace/errors.hpp"
#include "imgtrace/jpeg_segments.hpp"

namespace imgtrace::codec {

// ---------------------------------------------------------------------------
// Image model

enum class ColorSpace { Grayscale, Rgb, YCbCr };
enum class Subsampling { S444, S420, S422, None };

struct Plane {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> samples;  // row-major

  std::uint8_t at(int x, int y) const { return samples[static_cast<std::size_t>(y) * width + x]; }
  std::uint8_t& at(int x, int y) { return samples[static_cast<std::size_t>(y) * width + x]; }
};

struct PixelImage {
  int width = 0;
  int height = 0;
  ColorSpace color_space = ColorSpace::Rgb;
  Subsampling subsampling_provenance = Subsampling::None;
  std::vector<Plane> planes;  // full resolution after decode

  static PixelImage make(int w, int h, ColorSpace cs) {
    PixelImage img;
    img.width = w;
    img.height = h;
    img.color_space = cs;
    const int n = cs == ColorSpace::Grayscale ? 1 : 3;
    for (int i = 0; i < n; ++i)
      img.planes.push_back(Plane{w, h, std::vector<std::uint8_t>(
                                           static_cast<std::size_t>(w) * h, 0)});
    return img;
  }
};

struct EncodeParams {
  int quality = 75;  // 1..100
  Subsampling subsampling = Subsampling::S444;
  std::optional<int> restart_interval;  // MCUs between RST markers
};

struct DecodeLimits {
  std::uint64_t max_pixels = 64ull << 20;  // decompression-bomb guard
};

// ---------------------------------------------------------------------------
// Annex K tables and quality scaling

inline constexpr std::array<std::uint16_t, 64> kAnnexKLuminance = {
    16, 11, 10, 16, 24,  40,  51,  61,  12, 12, 14, 19, 26,  58,  60,  55,
    14, 13, 16, 24, 40,  57,  69,  56,  14, 17, 22, 29, 51,  87,  80,  62,
    18, 22, 37, 56, 68,  109, 103, 77,  24, 35, 55, 64, 81,  104, 113, 92,
    49, 64, 78, 87, 103, 121, 120, 101, 72, 92, 95, 98, 112, 100, 103, 99};

inline constexpr std::array<std::uint16_t, 64> kAnnexKChrominance = {
    17, 18, 24, 47, 99, 99, 99, 99, 18, 21, 26, 66, 99, 99, 99, 99,
    24, 26, 56, 99, 99, 99, 99, 99, 47, 66, 99, 99, 99, 99, 99, 99,
    99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99,
    99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99};

// IJG mapping: q<50 uses 5000/q, q>=50 uses 200-2q; entries rounded and
// clamped to [1,255] so the emitted DQT stays comparable to what real
// editing tools write.
inline std::array<std::uint16_t, 64> scale_quant_table(
    const std::array<std::uint16_t, 64>& base, int quality) {
  if (quality < 1 || quality > 100)
    raise(Errc::InvalidArgument, "quality must be 1..100");
  const int scale = quality < 50 ? 5000 / quality : 200 - 2 * quality;
  std::array<std::uint16_t, 64> out{};
  for (int i = 0; i < 64; ++i) {
    long v = (static_cast<long>(base[i]) * scale + 50) / 100;
    out[i] = static_cast<std::uint16_t>(std::clamp(v, 1L, 255L));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Standard Huffman tables (Annex K.3)

struct HuffSpec {
  std::array<std::uint8_t, 16> bits;  // count of codes per length 1..16
  std::vector<std::uint8_t> values;
};

inline const HuffSpec& std_dc_luminance() {
  static const HuffSpec spec{
      {0, 1, 5, 1, 1, 1, 1, 1, 1, 0, 0, 0, 0, 0, 0, 0},
      {0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11}};
  return spec;
}

inline const HuffSpec& std_dc_chrominance() {
  static const HuffSpec spec{
      {0, 3, 1, 1, 1, 1, 1, 1, 1, 1, 1, 0, 0, 0, 0, 0},
      {0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11}};
  return spec;
}

inline const HuffSpec& std_ac_luminance() {
  static const HuffSpec spec{
      {0, 2, 1, 3, 3, 2, 4, 3, 5, 5, 4, 4, 0, 0, 1, 0x7d},
      {0x01, 0x02, 0x03, 0x00, 0x04, 0x11, 0x05, 0x12, 0x21, 0x31, 0x41,
       0x06, 0x13, 0x51, 0x61, 0x07, 0x22, 0x71, 0x14, 0x32, 0x81, 0x91,
       0xa1, 0x08, 0x23, 0x42, 0xb1, 0xc1, 0x15, 0x52, 0xd1, 0xf0, 0x24,
       0x33, 0x62, 0x72, 0x82, 0x09, 0x0a, 0x16, 0x17, 0x18, 0x19, 0x1a,
       0x25, 0x26, 0x27, 0x28, 0x29, 0x2a, 0x34, 0x35, 0x36, 0x37, 0x38,
       0x39, 0x3a, 0x43, 0x44, 0x45, 0x46, 0x47, 0x48, 0x49, 0x4a, 0x53,
       0x54, 0x55, 0x56, 0x57, 0x58, 0x59, 0x5a, 0x63, 0x64, 0x65, 0x66,
       0x67, 0x68, 0x69, 0x6a, 0x73, 0x74, 0x75, 0x76, 0x77, 0x78, 0x79,
       0x7a, 0x83, 0x84, 0x85, 0x86, 0x87, 0x88, 0x89, 0x8a, 0x92, 0x93,
       0x94, 0x95, 0x96, 0x97, 0x98, 0x99, 0x9a, 0xa2, 0xa3, 0xa4, 0xa5,
       0xa6, 0xa7, 0xa8, 0xa9, 0xaa, 0xb2, 0xb3, 0xb4, 0xb5, 0xb6, 0xb7,
       0xb8, 0xb9, 0xba, 0xc2, 0xc3, 0xc4, 0xc5, 0xc6, 0xc7, 0xc8, 0xc9,
       0xca, 0xd2, 0xd3, 0xd4, 0xd5, 0xd6, 0xd7, 0xd8, 0xd9, 0xda, 0xe1,
       0xe2, 0xe3, 0xe4, 0xe5, 0xe6, 0xe7, 0xe8, 0xe9, 0xea, 0xf1, 0xf2,
       0xf3, 0xf4, 0xf5, 0xf6, 0xf7, 0xf8, 0xf9, 0xfa}};
  return spec;
}

inline const HuffSpec& std_ac_chrominance() {
  static const HuffSpec spec{
      {0, 2, 1, 2, 4, 4, 3, 4, 7, 5, 4, 4, 0, 1, 2, 0x77},
      {0x00, 0x01, 0x02, 0x03, 0x11, 0x04, 0x05, 0x21, 0x31, 0x06, 0x12,
       0x41, 0x51, 0x07, 0x61, 0x71, 0x13, 0x22, 0x32, 0x81, 0x08, 0x14,
       0x42, 0x91, 0xa1, 0xb1, 0xc1, 0x09, 0x23, 0x33, 0x52, 0xf0, 0x15,
       0x62, 0x72, 0xd1, 0x0a, 0x16, 0x24, 0x34, 0xe1, 0x25, 0xf1, 0x17,
       0x18, 0x19, 0x1a, 0x26, 0x27, 0x28, 0x29, 0x2a, 0x35, 0x36, 0x37,
       0x38, 0x39, 0x3a, 0x43, 0x44, 0x45, 0x46, 0x47, 0x48, 0x49, 0x4a,
       0x53, 0x54, 0x55, 0x56, 0x57, 0x58, 0x59, 0x5a, 0x63, 0x64, 0x65,
       0x66, 0x67, 0x68, 0x69, 0x6a, 0x73, 0x74, 0x75, 0x76, 0x77, 0x78,
       0x79, 0x7a, 0x82, 0x83, 0x84, 0x85, 0x86, 0x87, 0x88, 0x89, 0x8a,
       0x92, 0x93, 0x94, 0x95, 0x96, 0x97, 0x98, 0x99, 0x9a, 0xa2, 0xa3,
       0xa4, 0xa5, 0xa6, 0xa7, 0xa8, 0xa9, 0xaa, 0xb2, 0xb3, 0xb4, 0xb5,
       0xb6, 0xb7, 0xb8, 0xb9, 0xba, 0xc2, 0xc3, 0xc4, 0xc5, 0xc6, 0xc7,
       0xc8, 0xc9, 0xca, 0xd2, 0xd3, 0xd4, 0xd5, 0xd6, 0xd7, 0xd8, 0xd9,
       0xda, 0xe2, 0xe3, 0xe4, 0xe5, 0xe6, 0xe7, 0xe8, 0xe9, 0xea, 0xf2,
       0xf3, 0xf4, 0xf5, 0xf6, 0xf7, 0xf8, 0xf9, 0xfa}};
  return spec;
}

// ---------------------------------------------------------------------------
// DCT (separable 1-D passes over the 8x8 cosine basis; the direct O(N^4)
// definition lives in the tests as the oracle)

namespace detail {

inline const std::array<std::array<double, 8>, 8>& dct_basis() {
  static const auto basis = [] {
    std::array<std::array<double, 8>, 8> m{};
    const double pi = std::acos(-1.0);
    for (int u = 0; u < 8; ++u) {
      const double cu = u == 0 ? 1.0 / std::sqrt(2.0) : 1.0;
      for (int x = 0; x < 8; ++x)
        m[u][x] = 0.5 * cu * std::cos((2 * x + 1) * u * pi / 16.0);
    }
    return m;
  }();
  return basis;
}

}  // namespace detail

// Forward DCT-II with JPEG normalization. No level shift here; the encode
// pipeline subtracts 128 before calling.
inline std::array<double, 64> fdct_block(const std::array<double, 64>& samples) {
  const auto& c = detail::dct_basis();
  std::array<double, 64> tmp{}, out{};
  for (int y = 0; y < 8; ++y)
    for (int u = 0; u < 8; ++u) {
      double acc = 0;
      for (int x = 0; x < 8; ++x) acc += c[u][x] * samples[y * 8 + x];
      tmp[y * 8 + u] = acc;
    }
  for (int u = 0; u < 8; ++u)
    for (int v = 0; v < 8; ++v) {
      double acc = 0;
      for (int y = 0; y < 8; ++y) acc += c[v][y] * tmp[y * 8 + u];
      out[v * 8 + u] = acc;
    }
  return out;
}

inline std::array<double, 64> idct_block(const std::array<double, 64>& coeffs) {
  const auto& c = detail::dct_basis();
  std::array<double, 64> tmp{}, out{};
  for (int v = 0; v < 8; ++v)
    for (int x = 0; x < 8; ++x) {
      double acc = 0;
      for (int u = 0; u < 8; ++u) acc += c[u][x] * coeffs[v * 8 + u];
      tmp[v * 8 + x] = acc;
    }
  for (int x = 0; x < 8; ++x)
    for (int y = 0; y < 8; ++y) {
      double acc = 0;
      for (int v = 0; v < 8; ++v) acc += c[v][y] * tmp[v * 8 + x];
      out[y * 8 + x] = acc;
    }
  return out;
}

// ---------------------------------------------------------------------------
// Color conversion (BT.601 full range)

namespace detail {

inline std::uint8_t clamp_u8(double v) {
  return static_cast<std::uint8_t>(std::clamp(std::lround(v), 0L, 255L));
}

inline void rgb_to_ycbcr(std::uint8_t r, std::uint8_t g, std::uint8_t b,
                         std::uint8_t& y, std::uint8_t& cb, std::uint8_t& cr) {
  y = clamp_u8(0.299 * r + 0.587 * g + 0.114 * b);
  cb = clamp_u8(-0.168736 * r - 0.331264 * g + 0.5 * b + 128.0);
  cr = clamp_u8(0.5 * r - 0.418688 * g - 0.081312 * b + 128.0);
}

inline void ycbcr_to_rgb(std::uint8_t y, std::uint8_t cb, std::uint8_t cr,
                         std::uint8_t& r, std::uint8_t& g, std::uint8_t& b) {
  const double yd = y, cbd = cb - 128.0, crd = cr - 128.0;
  r = clamp_u8(yd + 1.402 * crd);
  g = clamp_u8(yd - 0.344136 * cbd - 0.714136 * crd);
  b = clamp_u8(yd + 1.772 * cbd);
}

// ---------------------------------------------------------------------------
// Bit I/O with 0xFF stuffing

class BitWriter {
 public:
  explicit BitWriter(ByteVec& out) : out_(out) {}

  void put_bits(std::uint32_t bits, int count) {
    for (int i = count - 1; i >= 0; --i) put_bit((bits >> i) & 1);
  }

  // Pads the current byte with 1-bits, as required before a marker.
  void align() {
    while (nbits_ != 0) put_bit(1);
  }

 private:
  void put_bit(std::uint32_t b) {
    cur_ = static_cast<std::uint8_t>((cur_ << 1) | b);
    if (++nbits_ == 8) {
      out_.push_back(cur_);
      if (cur_ == 0xFF) out_.push_back(0x00);
      cur_ = 0;
      nbits_ = 0;
    }
  }

  ByteVec& out_;
  std::uint8_t cur_ = 0;
  int nbits_ = 0;
};

class BitReader {
 public:
  explicit BitReader(ByteSpan data) : data_(data) {}

  int next_bit() {
    if (nbits_ == 0) {
      if (pos_ >= data_.size())
        raise(Errc::CorruptEntropyData, "entropy data exhausted");
      std::uint8_t byte = data_[pos_++];
      if (byte == 0xFF) {
        if (pos_ >= data_.size())
          raise(Errc::CorruptEntropyData, "dangling 0xFF in entropy data");
        const std::uint8_t follow = data_[pos_];
        if (follow == 0x00) {
          ++pos_;  // stuffed data byte
        } else {
          raise(Errc::CorruptEntropyData, "unexpected marker in entropy data");
        }
      }
      cur_ = byte;
      nbits_ = 8;
    }
    --nbits_;
    return (cur_ >> nbits_) & 1;
  }

  std::uint32_t next_bits(int count) {
    std::uint32_t v = 0;
    for (int i = 0; i < count; ++i) v = (v << 1) | next_bit();
    return v;
  }

  // Consumes an expected restart marker and resynchronizes to the byte
  // following it.
  void consume_restart(int expected_index) {
    nbits_ = 0;
    while (pos_ + 1 < data_.size() && data_[pos_] == 0xFF && data_[pos_ + 1] == 0xFF)
      ++pos_;  // fill bytes
    if (pos_ + 2 > data_.size())
      raise(Errc::CorruptEntropyData, "missing restart marker");
    if (data_[pos_] != 0xFF || data_[pos_ + 1] != 0xD0 + expected_index)
      raise(Errc::CorruptEntropyData, "bad restart marker sequence");
    pos_ += 2;
  }

 private:
  ByteSpan data_;
  std::size_t pos_ = 0;
  std::uint8_t cur_ = 0;
  int nbits_ = 0;
};

// ---------------------------------------------------------------------------
// Huffman coding

struct HuffEncoder {
  std::array<std::uint16_t, 256> code{};
  std::array<std::uint8_t, 256> size{};

  explicit HuffEncoder(const HuffSpec& spec) {
    std::uint16_t c = 0;
    std::size_t k = 0;
    for (int len = 1; len <= 16; ++len) {
      for (int i = 0; i < spec.bits[len - 1]; ++i) {
        const std::uint8_t symbol = spec.values[k++];
        code[symbol] = c++;
        size[symbol] = static_cast<std::uint8_t>(len);
      }
      c = static_cast<std::uint16_t>(c << 1);
    }
  }

  void emit(BitWriter& w, std::uint8_t symbol) const {
    w.put_bits(code[symbol], size[symbol]);
  }
};

// T.81 F.2.2.3 style decode tables (mincode/maxcode/valptr per length).
struct HuffDecoder {
  std::array<std::int32_t, 17> mincode{};
  std::array<std::int32_t, 17> maxcode{};
  std::array<std::int32_t, 17> valptr{};
  std::vector<std::uint8_t> values;

  HuffDecoder() { maxcode.fill(-1); }

  explicit HuffDecoder(const std::array<std::uint8_t, 16>& bits,
                       std::vector<std::uint8_t> vals)
      : values(std::move(vals)) {
    std::int32_t code = 0;
    std::size_t k = 0;
    for (int len = 1; len <= 16; ++len) {
      if (bits[len - 1] == 0) {
        mincode[len] = 0;
        maxcode[len] = -1;
      } else {
        valptr[len] = static_cast<std::int32_t>(k);
        mincode[len] = code;
        code += bits[len - 1];
        k += bits[len - 1];
        maxcode[len] = code - 1;
      }
      code <<= 1;
    }
    if (k != values.size())
      raise(Errc::CorruptEntropyData, "DHT counts do not match symbol list");
  }

  std::uint8_t decode(BitReader& r) const {
    std::int32_t code = r.next_bit();
    int len = 1;
    while (code > maxcode[len]) {
      if (++len > 16) raise(Errc::CorruptEntropyData, "invalid Huffman code");
      code = (code << 1) | r.next_bit();
    }
    return values[valptr[len] + code - mincode[len]];
  }
};

// Magnitude category (number of bits) of a coefficient.
inline int bit_category(int v) {
  int a = v < 0 ? -v : v;
  int n = 0;
  while (a) {
    a >>= 1;
    ++n;
  }
  return n;
}

// T.81 EXTEND: map received magnitude bits back to a signed value.
inline int extend_value(std::uint32_t bits, int category) {
  if (category == 0) return 0;
  const std::int32_t v = static_cast<std::int32_t>(bits);
  if (v < (1 << (category - 1))) return v - (1 << category) + 1;
  return v;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Encoder

namespace detail {

struct CompLayout {
  int h = 1, v = 1;       // sampling factors
  int width = 0, height = 0;  // component resolution before padding
  Plane padded;           // padded to full MCUs
  int quant_id = 0;
};

inline Plane pad_plane(const Plane& src, int padded_w, int padded_h) {
  Plane out{padded_w, padded_h,
            std::vector<std::uint8_t>(static_cast<std::size_t>(padded_w) * padded_h)};
  for (int y = 0; y < padded_h; ++y) {
    const int sy = std::min(y, src.height - 1);
    for (int x = 0; x < padded_w; ++x)
      out.at(x, y) = src.at(std::min(x, src.width - 1), sy);
  }
  return out;
}

inline void append_segment(ByteVec& out, std::uint8_t marker_lo, ByteSpan payload) {
  out.push_back(0xFF);
  out.push_back(marker_lo);
  put_u16be(out, static_cast<std::uint16_t>(payload.size() + 2));
  out.insert(out.end(), payload.begin(), payload.end());
}

inline void encode_block(BitWriter& w, const std::array<double, 64>& samples,
                         const std::array<std::uint16_t, 64>& quant_natural,
                         const HuffEncoder& dc, const HuffEncoder& ac,
                         int& dc_pred) {
  const auto coeffs = fdct_block(samples);
  std::array<int, 64> q{};
  for (int i = 0; i < 64; ++i)
    q[i] = static_cast<int>(std::lround(coeffs[i] / quant_natural[i]));

  std::array<int, 64> zz{};
  for (int i = 0; i < 64; ++i) zz[i] = q[jpeg::kZigzagToNatural[i]];

  const int diff = zz[0] - dc_pred;
  dc_pred = zz[0];
  const int dc_cat = bit_category(diff);
  dc.emit(w, static_cast<std::uint8_t>(dc_cat));
  if (dc_cat > 0) {
    const std::uint32_t bits =
        diff >= 0 ? static_cast<std::uint32_t>(diff)
                  : static_cast<std::uint32_t>(diff + (1 << dc_cat) - 1);
    w.put_bits(bits, dc_cat);
  }

  int run = 0;
  for (int k = 1; k < 64; ++k) {
    const int v = zz[k];
    if (v == 0) {
      ++run;
      continue;
    }
    while (run > 15) {
      ac.emit(w, 0xF0);  // ZRL
      run -= 16;
    }
    const int cat = bit_category(v);
    ac.emit(w, static_cast<std::uint8_t>((run << 4) | cat));
    const std::uint32_t bits =
        v >= 0 ? static_cast<std::uint32_t>(v)
               : static_cast<std::uint32_t>(v + (1 << cat) - 1);
    w.put_bits(bits, cat);
    run = 0;
  }
  if (run > 0) ac.emit(w, 0x00);  // EOB
}

}  // namespace detail

inline ByteVec encode(const PixelImage& img, const EncodeParams& params) {
  if (img.width < 1 || img.height < 1)
    raise(Errc::InvalidArgument, "image dimensions must be >= 1");
  if (img.color_space == ColorSpace::YCbCr)
    raise(Errc::InvalidArgument, "encode expects RGB or Grayscale input");
  if (params.subsampling != Subsampling::S444 && params.subsampling != Subsampling::S420)
    raise(Errc::InvalidArgument, "encode supports 4:4:4 and 4:2:0");
  const std::uint64_t pixels =
      static_cast<std::uint64_t>(img.width) * static_cast<std::uint64_t>(img.height);
  if (pixels > (64ull << 20)) raise(Errc::DimensionOverflow, "image too large");

  const bool gray = img.color_space == ColorSpace::Grayscale;
  const bool s420 = !gray && params.subsampling == Subsampling::S420;

  // Color transform
  std::vector<Plane> comps;
  if (gray) {
    comps.push_back(img.planes[0]);
  } else {
    Plane y{img.width, img.height, std::vector<std::uint8_t>(pixels)};
    Plane cb = y, cr = y;
    for (int py = 0; py < img.height; ++py)
      for (int px = 0; px < img.width; ++px) {
        std::uint8_t yy, cbb, crr;
        detail::rgb_to_ycbcr(img.planes[0].at(px, py), img.planes[1].at(px, py),
                             img.planes[2].at(px, py), yy, cbb, crr);
        y.at(px, py) = yy;
        cb.at(px, py) = cbb;
        cr.at(px, py) = crr;
      }
    if (s420) {
      // 2x2 box average
      const int cw = (img.width + 1) / 2, ch = (img.height + 1) / 2;
      auto down = [&](const Plane& p) {
        Plane out{cw, ch, std::vector<std::uint8_t>(static_cast<std::size_t>(cw) * ch)};
        for (int yy = 0; yy < ch; ++yy)
          for (int xx = 0; xx < cw; ++xx) {
            int sum = 0, n = 0;
            for (int dy = 0; dy < 2; ++dy)
              for (int dx = 0; dx < 2; ++dx) {
                const int sx = 2 * xx + dx, sy = 2 * yy + dy;
                if (sx < p.width && sy < p.height) {
                  sum += p.at(sx, sy);
                  ++n;
                }
              }
            out.at(xx, yy) = static_cast<std::uint8_t>((sum + n / 2) / n);
          }
        return out;
      };
      comps.push_back(std::move(y));
      comps.push_back(down(cb));
      comps.push_back(down(cr));
    } else {
      comps.push_back(std::move(y));
      comps.push_back(std::move(cb));
      comps.push_back(std::move(cr));
    }
  }

  // Layouts and padding
  const int max_h = s420 ? 2 : 1, max_v = s420 ? 2 : 1;
  const int mcu_w = 8 * max_h, mcu_h = 8 * max_v;
  const int mcus_x = (img.width + mcu_w - 1) / mcu_w;
  const int mcus_y = (img.height + mcu_h - 1) / mcu_h;

  std::vector<detail::CompLayout> layout(comps.size());
  for (std::size_t c = 0; c < comps.size(); ++c) {
    auto& L = layout[c];
    L.h = (c == 0) ? max_h : 1;
    L.v = (c == 0) ? max_v : 1;
    L.width = comps[c].width;
    L.height = comps[c].height;
    L.quant_id = (c == 0) ? 0 : 1;
    L.padded = detail::pad_plane(comps[c], mcus_x * 8 * L.h, mcus_y * 8 * L.v);
  }

  const auto lum_q = scale_quant_table(kAnnexKLuminance, params.quality);
  const auto chr_q = scale_quant_table(kAnnexKChrominance, params.quality);

  ByteVec out;
  out.push_back(0xFF);
  out.push_back(0xD8);  // SOI

  {  // APP0 / JFIF
    ByteVec app0 = {'J', 'F', 'I', 'F', 0, 1, 1, 0, 0, 1, 0, 1, 0, 0};
    detail::append_segment(out, 0xE0, ByteSpan(app0));
  }

  {  // DQT: one segment carrying all tables
    ByteVec dqt;
    auto push_table = [&](int id, const std::array<std::uint16_t, 64>& nat) {
      dqt.push_back(static_cast<std::uint8_t>(id));  // 8-bit precision
      for (int i = 0; i < 64; ++i)
        dqt.push_back(static_cast<std::uint8_t>(nat[jpeg::kZigzagToNatural[i]]));
    };
    push_table(0, lum_q);
    if (!gray) push_table(1, chr_q);
    detail::append_segment(out, 0xDB, ByteSpan(dqt));
  }

  {  // SOF0
    ByteVec sof;
    sof.push_back(8);
    put_u16be(sof, static_cast<std::uint16_t>(img.height));
    put_u16be(sof, static_cast<std::uint16_t>(img.width));
    sof.push_back(static_cast<std::uint8_t>(comps.size()));
    for (std::size_t c = 0; c < comps.size(); ++c) {
      sof.push_back(static_cast<std::uint8_t>(c + 1));
      sof.push_back(static_cast<std::uint8_t>((layout[c].h << 4) | layout[c].v));
      sof.push_back(static_cast<std::uint8_t>(layout[c].quant_id));
    }
    detail::append_segment(out, 0xC0, ByteSpan(sof));
  }

  {  // DHT: one segment carrying all tables
    ByteVec dht;
    auto push_spec = [&](int tc, int th, const HuffSpec& spec) {
      dht.push_back(static_cast<std::uint8_t>((tc << 4) | th));
      dht.insert(dht.end(), spec.bits.begin(), spec.bits.end());
      dht.insert(dht.end(), spec.values.begin(), spec.values.end());
    };
    push_spec(0, 0, std_dc_luminance());
    push_spec(1, 0, std_ac_luminance());
    if (!gray) {
      push_spec(0, 1, std_dc_chrominance());
      push_spec(1, 1, std_ac_chrominance());
    }
    detail::append_segment(out, 0xC4, ByteSpan(dht));
  }

  if (params.restart_interval && *params.restart_interval > 0) {  // DRI
    ByteVec dri;
    put_u16be(dri, static_cast<std::uint16_t>(*params.restart_interval));
    detail::append_segment(out, 0xDD, ByteSpan(dri));
  }

  {  // SOS
    ByteVec sos;
    sos.push_back(static_cast<std::uint8_t>(comps.size()));
    for (std::size_t c = 0; c < comps.size(); ++c) {
      sos.push_back(static_cast<std::uint8_t>(c + 1));
      sos.push_back(c == 0 ? 0x00 : 0x11);
    }
    sos.push_back(0);     // Ss
    sos.push_back(63);    // Se
    sos.push_back(0);     // Ah/Al
    detail::append_segment(out, 0xDA, ByteSpan(sos));
  }

  // Entropy-coded data
  const detail::HuffEncoder dc_lum(std_dc_luminance()), ac_lum(std_ac_luminance());
  const detail::HuffEncoder dc_chr(std_dc_chrominance()), ac_chr(std_ac_chrominance());
  detail::BitWriter writer(out);
  std::vector<int> dc_pred(comps.size(), 0);
  const int restart = params.restart_interval.value_or(0);
  int rst_index = 0;
  int since_restart = 0;

  const long total_mcus = static_cast<long>(mcus_x) * mcus_y;
  long mcu_index = 0;
  for (int my = 0; my < mcus_y; ++my) {
    for (int mx = 0; mx < mcus_x; ++mx, ++mcu_index) {
      if (restart > 0 && since_restart == restart) {
        writer.align();
        out.push_back(0xFF);
        out.push_back(static_cast<std::uint8_t>(0xD0 + rst_index));
        rst_index = (rst_index + 1) % 8;
        std::fill(dc_pred.begin(), dc_pred.end(), 0);
        since_restart = 0;
      }
      for (std::size_t c = 0; c < comps.size(); ++c) {
        const auto& L = layout[c];
        for (int by = 0; by < L.v; ++by)
          for (int bx = 0; bx < L.h; ++bx) {
            std::array<double, 64> block{};
            const int ox = (mx * L.h + bx) * 8, oy = (my * L.v + by) * 8;
            for (int y = 0; y < 8; ++y)
              for (int x = 0; x < 8; ++x)
                block[y * 8 + x] = L.padded.at(ox + x, oy + y) - 128.0;
            detail::encode_block(writer, block, L.quant_id == 0 ? lum_q : chr_q,
                                 c == 0 ? dc_lum : dc_chr, c == 0 ? ac_lum : ac_chr,
                                 dc_pred[c]);
          }
      }
      ++since_restart;
    }
  }
  (void)total_mcus;
  writer.align();

  out.push_back(0xFF);
  out.push_back(0xD9);  // EOI
  return out;
}

// ---------------------------------------------------------------------------
// Decoder

inline PixelImage decode(ByteSpan stream, const DecodeLimits& limits = {}) {
  const jpeg::JpegSegmentList list = jpeg::parse_segments(stream);

  auto frame = jpeg::find_frame_header(list);
  if (!frame) raise(Errc::CorruptEntropyData, "no frame header");
  if (frame->progressive())
    raise(Errc::UnsupportedCoding, "progressive JPEG (SOF2) is not decoded");
  if (frame->arithmetic())
    raise(Errc::UnsupportedCoding, "arithmetic-coded JPEG is not decoded");
  if (!frame->baseline())
    raise(Errc::UnsupportedCoding, "only baseline sequential (SOF0) is decoded");
  if (frame->precision != 8)
    raise(Errc::UnsupportedCoding, "only 8-bit precision is decoded");
  const int ncomp = static_cast<int>(frame->components.size());
  if (ncomp != 1 && ncomp != 3)
    raise(Errc::UnsupportedCoding, "only 1- or 3-component images are decoded");
  if (frame->width < 1 || frame->height < 1)
    raise(Errc::CorruptEntropyData, "zero frame dimension");
  const std::uint64_t pixels =
      static_cast<std::uint64_t>(frame->width) * static_cast<std::uint64_t>(frame->height);
  if (pixels > limits.max_pixels)
    raise(Errc::DimensionOverflow, "frame exceeds pixel limit");

  int max_h = 1, max_v = 1;
  for (const auto& fc : frame->components) {
    if (fc.h < 1 || fc.h > 2 || fc.v < 1 || fc.v > 2)
      raise(Errc::UnsupportedCoding, "sampling factors beyond 2 are not decoded");
    max_h = std::max(max_h, fc.h);
    max_v = std::max(max_v, fc.v);
  }

  const auto qts = jpeg::extract_dqt(list);

  // Huffman tables
  std::array<std::optional<detail::HuffDecoder>, 4> dc_tables, ac_tables;
  for (const jpeg::Segment* seg : list.all(jpeg::MarkerKind::Dht)) {
    ByteSpan p = list.payload(*seg);
    std::size_t i = 0;
    while (i < p.size()) {
      if (i + 17 > p.size()) raise(Errc::CorruptEntropyData, "truncated DHT");
      const int tc = p[i] >> 4, th = p[i] & 0x0F;
      if (tc > 1 || th > 3) raise(Errc::CorruptEntropyData, "bad DHT class/id");
      std::array<std::uint8_t, 16> bits{};
      std::size_t total = 0;
      for (int b = 0; b < 16; ++b) {
        bits[b] = p[i + 1 + b];
        total += bits[b];
      }
      if (i + 17 + total > p.size()) raise(Errc::CorruptEntropyData, "truncated DHT symbols");
      std::vector<std::uint8_t> vals(p.begin() + i + 17, p.begin() + i + 17 + total);
      auto& slot = tc == 0 ? dc_tables[th] : ac_tables[th];
      slot.emplace(bits, std::move(vals));
      i += 17 + total;
    }
  }

  // Scan header
  const jpeg::Segment* sos = list.first(jpeg::MarkerKind::Sos);
  if (!sos) raise(Errc::CorruptEntropyData, "no SOS segment");
  ByteSpan sp = list.payload(*sos);
  ByteReader sr(sp);
  const int ns = sr.u8();
  if (ns != ncomp)
    raise(Errc::UnsupportedCoding, "multi-scan streams are not decoded");
  struct ScanComp {
    int comp_index;
    const detail::HuffDecoder* dc;
    const detail::HuffDecoder* ac;
    const std::array<std::uint16_t, 64>* quant;  // natural order
  };
  std::vector<ScanComp> scan;
  for (int s = 0; s < ns; ++s) {
    const int cs = sr.u8();
    const int tds = sr.u8();
    int idx = -1;
    for (int c = 0; c < ncomp; ++c)
      if (frame->components[c].id == cs) idx = c;
    if (idx < 0) raise(Errc::CorruptEntropyData, "scan references unknown component");
    const int td = tds >> 4, ta = tds & 0x0F;
    if (td > 3 || ta > 3 || !dc_tables[td] || !ac_tables[ta])
      raise(Errc::CorruptEntropyData, "scan references missing Huffman table");
    const int qid = frame->components[idx].quant_table_id;
    auto qit = qts.tables.find(qid);
    if (qit == qts.tables.end())
      raise(Errc::CorruptEntropyData, "scan references missing quant table");
    scan.push_back({idx, &*dc_tables[td], &*ac_tables[ta], &qit->second.values_natural});
  }

  // Restart interval: last DRI wins
  int restart = 0;
  for (const jpeg::Segment* seg : list.all(jpeg::MarkerKind::Dri)) {
    ByteSpan p = list.payload(*seg);
    if (p.size() >= 2) restart = (p[0] << 8) | p[1];
  }

  const int mcu_w = 8 * max_h, mcu_h = 8 * max_v;
  const int mcus_x = (frame->width + mcu_w - 1) / mcu_w;
  const int mcus_y = (frame->height + mcu_h - 1) / mcu_h;

  // Padded component planes
  std::vector<Plane> planes(ncomp);
  for (int c = 0; c < ncomp; ++c) {
    const auto& fc = frame->components[c];
    const int pw = mcus_x * 8 * fc.h, ph = mcus_y * 8 * fc.v;
    planes[c] = Plane{pw, ph, std::vector<std::uint8_t>(static_cast<std::size_t>(pw) * ph)};
  }

  detail::BitReader reader(list.entropy(*sos));
  std::vector<int> dc_pred(ncomp, 0);
  int rst_index = 0;
  int since_restart = 0;

  for (int my = 0; my < mcus_y; ++my) {
    for (int mx = 0; mx < mcus_x; ++mx) {
      if (restart > 0 && since_restart == restart) {
        reader.consume_restart(rst_index);
        rst_index = (rst_index + 1) % 8;
        std::fill(dc_pred.begin(), dc_pred.end(), 0);
        since_restart = 0;
      }
      for (const auto& sc : scan) {
        const auto& fc = frame->components[sc.comp_index];
        for (int by = 0; by < fc.v; ++by)
          for (int bx = 0; bx < fc.h; ++bx) {
            // One data unit
            std::array<int, 64> zz{};
            const int dc_cat = sc.dc->decode(reader);
            if (dc_cat > 11) raise(Errc::CorruptEntropyData, "DC category out of range");
            const int diff = detail::extend_value(reader.next_bits(dc_cat), dc_cat);
            dc_pred[sc.comp_index] += diff;
            zz[0] = dc_pred[sc.comp_index];
            for (int k = 1; k < 64;) {
              const std::uint8_t rs = sc.ac->decode(reader);
              const int run = rs >> 4, cat = rs & 0x0F;
              if (cat == 0) {
                if (run == 15) {
                  k += 16;  // ZRL
                  continue;
                }
                break;  // EOB
              }
              k += run;
              if (k > 63) raise(Errc::CorruptEntropyData, "AC index overrun");
              zz[k] = detail::extend_value(reader.next_bits(cat), cat);
              ++k;
            }
            std::array<double, 64> coeffs{};
            for (int k = 0; k < 64; ++k) {
              const int nat = jpeg::kZigzagToNatural[k];
              coeffs[nat] = static_cast<double>(zz[k]) * (*sc.quant)[nat];
            }
            const auto spatial = idct_block(coeffs);
            auto& plane = planes[sc.comp_index];
            const int ox = (mx * fc.h + bx) * 8, oy = (my * fc.v + by) * 8;
            for (int y = 0; y < 8; ++y)
              for (int x = 0; x < 8; ++x)
                plane.at(ox + x, oy + y) = detail::clamp_u8(spatial[y * 8 + x] + 128.0);
          }
      }
      ++since_restart;
    }
  }

  // Assemble output: upsample chroma (nearest neighbor), crop, color convert.
  PixelImage out;
  out.width = frame->width;
  out.height = frame->height;
  if (ncomp == 1) {
    out.color_space = ColorSpace::Grayscale;
    out.subsampling_provenance = Subsampling::None;
    Plane y{out.width, out.height,
            std::vector<std::uint8_t>(static_cast<std::size_t>(out.width) * out.height)};
    for (int py = 0; py < out.height; ++py)
      for (int px = 0; px < out.width; ++px) y.at(px, py) = planes[0].at(px, py);
    out.planes.push_back(std::move(y));
    return out;
  }

  out.color_space = ColorSpace::Rgb;
  const auto& cb_fc = frame->components[1];
  if (cb_fc.h == max_h && cb_fc.v == max_v)
    out.subsampling_provenance = Subsampling::S444;
  else if (cb_fc.h * 2 == max_h && cb_fc.v * 2 == max_v)
    out.subsampling_provenance = Subsampling::S420;
  else
    out.subsampling_provenance = Subsampling::S422;

  for (int i = 0; i < 3; ++i)
    out.planes.push_back(Plane{
        out.width, out.height,
        std::vector<std::uint8_t>(static_cast<std::size_t>(out.width) * out.height)});
  for (int py = 0; py < out.height; ++py)
    for (int px = 0; px < out.width; ++px) {
      auto sample = [&](int c) {
        const auto& fc = frame->components[c];
        return planes[c].at(px * fc.h / max_h, py * fc.v / max_v);
      };
      std::uint8_t r, g, b;
      detail::ycbcr_to_rgb(sample(0), sample(1), sample(2), r, g, b);
      out.planes[0].at(px, py) = r;
      out.planes[1].at(px, py) = g;
      out.planes[2].at(px, py) = b;
    }
  return out;
}

}  // namespace imgtrace::codec
