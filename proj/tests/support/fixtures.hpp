// Copyright 2026 The imgtrace Authors
//
// Licensed under the Apache License, Version 2.0 (the "License"); you may not
// use this file except in compliance with the License. You may obtain a copy
// of the License at https://www.apache.org/licenses/LICENSE-2.0

#pragma once

// Synthetic image and byte-stream fixtures shared across the test suites.

#include <cmath>
#include <cstdint>
#include <random>
#include <utility>
#include <vector>

#include "imgtrace/bytes.hpp"
#include "imgtrace/codec.hpp"

namespace testsupport {

using imgtrace::ByteSpan;
using imgtrace::ByteVec;
namespace codec = imgtrace::codec;

inline codec::PixelImage gray_gradient(int w, int h) {
  auto img = codec::PixelImage::make(w, h, codec::ColorSpace::Grayscale);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x)
      img.planes[0].at(x, y) =
          static_cast<std::uint8_t>((x * 255 / std::max(1, w - 1) +
                                     y * 255 / std::max(1, h - 1)) /
                                    2);
  return img;
}

inline codec::PixelImage rgb_gradient(int w, int h) {
  auto img = codec::PixelImage::make(w, h, codec::ColorSpace::Rgb);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      img.planes[0].at(x, y) = static_cast<std::uint8_t>(x * 255 / std::max(1, w - 1));
      img.planes[1].at(x, y) = static_cast<std::uint8_t>(y * 255 / std::max(1, h - 1));
      img.planes[2].at(x, y) = static_cast<std::uint8_t>(
          ((x + y) * 255) / std::max(1, w + h - 2));
    }
  return img;
}

inline codec::PixelImage rgb_constant(int w, int h, std::uint8_t r, std::uint8_t g,
                                      std::uint8_t b) {
  auto img = codec::PixelImage::make(w, h, codec::ColorSpace::Rgb);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      img.planes[0].at(x, y) = r;
      img.planes[1].at(x, y) = g;
      img.planes[2].at(x, y) = b;
    }
  return img;
}

inline codec::PixelImage rgb_noise(int w, int h, std::uint32_t seed) {
  auto img = codec::PixelImage::make(w, h, codec::ColorSpace::Rgb);
  std::mt19937 rng(seed);
  for (auto& plane : img.planes)
    for (auto& s : plane.samples) s = static_cast<std::uint8_t>(rng());
  return img;
}

// Smooth low-frequency content with a little texture, a stand-in for a
// photographic background.
inline codec::PixelImage rgb_textured(int w, int h, std::uint32_t seed) {
  auto img = codec::PixelImage::make(w, h, codec::ColorSpace::Rgb);
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> phase(0.0, 6.28);
  const double p0 = phase(rng), p1 = phase(rng), p2 = phase(rng);
  std::uniform_int_distribution<int> jitter(-6, 6);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      const double base = 120 + 60 * std::sin(x * 0.07 + p0) * std::cos(y * 0.05 + p1);
      const double wave = 25 * std::sin((x + 2 * y) * 0.11 + p2);
      const int j = jitter(rng);
      auto px = [&](double offset) {
        return static_cast<std::uint8_t>(
            std::clamp<long>(std::lround(base + wave + offset + j), 0, 255));
      };
      img.planes[0].at(x, y) = px(0);
      img.planes[1].at(x, y) = px(12);
      img.planes[2].at(x, y) = px(-15);
    }
  return img;
}

inline ByteVec encode_gray_gradient(int w, int h, int quality) {
  codec::EncodeParams p;
  p.quality = quality;
  return codec::encode(gray_gradient(w, h), p);
}

inline ByteVec encode_rgb_gradient(int w, int h, int quality) {
  codec::EncodeParams p;
  p.quality = quality;
  return codec::encode(rgb_gradient(w, h), p);
}

// Wraps raw (marker_lo, payload) pairs into SOI ... EOI.
inline ByteVec wrap_segments(
    const std::vector<std::pair<std::uint8_t, ByteVec>>& segs) {
  ByteVec out = {0xFF, 0xD8};
  for (const auto& [lo, payload] : segs) {
    out.push_back(0xFF);
    out.push_back(lo);
    imgtrace::put_u16be(out, static_cast<std::uint16_t>(payload.size() + 2));
    out.insert(out.end(), payload.begin(), payload.end());
  }
  out.push_back(0xFF);
  out.push_back(0xD9);
  return out;
}

// A structural (not decodable) stream touching every Table 4 marker kind:
// SOI, APPn, DQT, SOF0, SOF2, DHT, DRI, standalone RSTn, SOS with stuffed
// and restart-carrying entropy data, COM, EOI, plus a trailer.
inline ByteVec every_marker_fixture() {
  ByteVec out = {0xFF, 0xD8};
  auto seg = [&](std::uint8_t lo, const ByteVec& payload) {
    out.push_back(0xFF);
    out.push_back(lo);
    imgtrace::put_u16be(out, static_cast<std::uint16_t>(payload.size() + 2));
    out.insert(out.end(), payload.begin(), payload.end());
  };
  seg(0xE0, {'J', 'F', 'I', 'F', 0});
  seg(0xE1, {'E', 'x', 'i', 'f', 0, 0});
  seg(0xEF, {0xAA});
  ByteVec dqt(65, 1);
  dqt[0] = 0x00;
  seg(0xDB, dqt);
  seg(0xC0, {8, 0, 8, 0, 8, 1, 1, 0x11, 0});
  seg(0xC2, {8, 0, 8, 0, 8, 1, 1, 0x11, 0});
  seg(0xC4, {0x00, 1, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0x05});
  seg(0xDD, {0x00, 0x02});
  for (std::uint8_t n = 0; n < 8; ++n) {  // standalone restarts
    out.push_back(0xFF);
    out.push_back(static_cast<std::uint8_t>(0xD0 + n));
  }
  seg(0xDA, {1, 1, 0x00, 0, 63, 0});
  // entropy data with a stuffed 0xFF and an in-scan restart
  const ByteVec entropy = {0x12, 0xFF, 0x00, 0x34, 0xFF, 0xD1, 0x56};
  out.insert(out.end(), entropy.begin(), entropy.end());
  seg(0xFE, {'n', 'o', 't', 'e'});
  out.push_back(0xFF);
  out.push_back(0xD9);
  out.push_back('t');  // trailer bytes some editors append
  out.push_back('r');
  return out;
}

// A manipulated-image stand-in: a q70-resaved textured background with a
// never-compressed high-detail patch pasted in. `control` is the same
// background without the paste; `mask` marks the pasted region.
struct SpliceFixture {
  codec::PixelImage image;
  codec::PixelImage control;
  std::vector<std::uint8_t> mask;  // 1 = pasted region
};

inline SpliceFixture make_splice_fixture(int w, int h, std::uint32_t seed) {
  std::mt19937 rng(seed);
  const auto background = rgb_textured(w, h, seed * 17 + 3);
  codec::EncodeParams q70;
  q70.quality = 70;
  SpliceFixture fx;
  fx.control = codec::decode(codec::encode(background, q70));
  fx.image = fx.control;
  fx.mask.assign(static_cast<std::size_t>(w) * h, 0);

  // Paste rectangle: roughly a third of each dimension, jittered placement,
  // intentionally not block-aligned.
  const int pw = std::max(4, w / 3 + static_cast<int>(rng() % 5));
  const int ph = std::max(4, h / 3 + static_cast<int>(rng() % 5));
  const int x0 = 1 + static_cast<int>(rng() % std::max(1, w - pw - 2));
  const int y0 = 1 + static_cast<int>(rng() % std::max(1, h - ph - 2));
  const auto patch = rgb_noise(pw, ph, seed * 31 + 7);
  for (int y = 0; y < ph; ++y)
    for (int x = 0; x < pw; ++x) {
      for (int c = 0; c < 3; ++c)
        fx.image.planes[c].at(x0 + x, y0 + y) = patch.planes[c].at(x, y);
      fx.mask[static_cast<std::size_t>(y0 + y) * w + (x0 + x)] = 1;
    }
  return fx;
}

inline double psnr(const codec::PixelImage& a, const codec::PixelImage& b) {
  double sse = 0;
  std::size_t n = 0;
  for (std::size_t p = 0; p < a.planes.size(); ++p)
    for (int y = 0; y < a.height; ++y)
      for (int x = 0; x < a.width; ++x) {
        const double d = static_cast<double>(a.planes[p].at(x, y)) -
                         static_cast<double>(b.planes[p].at(x, y));
        sse += d * d;
        ++n;
      }
  if (sse == 0) return 99.0;
  const double mse = sse / static_cast<double>(n);
  return 10.0 * std::log10(255.0 * 255.0 / mse);
}

}  // namespace testsupport
