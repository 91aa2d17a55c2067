// Copyright 2026 The imgtrace Authors
//
// Licensed under the Apache License, Version 2.0 (the "License"); you may not
// use this file except in compliance with the License. You may obtain a copy
// of the License at https://www.apache.org/licenses/LICENSE-2.0

#include "imgtrace/codec.hpp"

#include <gtest/gtest.h>

#include <random>

#include "support/fixtures.hpp"
#include "support/oracles.hpp"

namespace {

using namespace imgtrace;
using namespace imgtrace::codec;

std::array<double, 64> random_block(std::mt19937& rng) {
  std::uniform_real_distribution<double> dist(-128.0, 127.0);
  std::array<double, 64> b{};
  for (auto& v : b) v = dist(rng);
  return b;
}

// --- DCT ---

TEST(Dct, ConstantZeroBlock) {
  std::array<double, 64> zero{};
  for (double v : fdct_block(zero)) EXPECT_EQ(v, 0.0);
}

TEST(Dct, ConstantBlockIsDcOnly) {
  std::array<double, 64> block{};
  block.fill(37.0);
  auto F = fdct_block(block);
  EXPECT_NEAR(F[0], 8.0 * 37.0, 1e-9);
  for (int i = 1; i < 64; ++i) EXPECT_NEAR(F[i], 0.0, 1e-9);
}

TEST(Dct, MatchesDefinitionalOracle) {
  std::mt19937 rng(42);
  for (int iter = 0; iter < 200; ++iter) {
    const auto block = random_block(rng);
    const auto fast = fdct_block(block);
    const auto ref = testsupport::dct_reference(block);
    for (int i = 0; i < 64; ++i) EXPECT_NEAR(fast[i], ref[i], 1e-6);
    const auto back = idct_block(fast);
    const auto back_ref = testsupport::idct_reference(ref);
    for (int i = 0; i < 64; ++i) {
      EXPECT_NEAR(back[i], block[i], 1e-6);
      EXPECT_NEAR(back_ref[i], block[i], 1e-6);
    }
  }
}

TEST(Dct, PreservesEnergy) {
  std::mt19937 rng(43);
  for (int iter = 0; iter < 50; ++iter) {
    const auto block = random_block(rng);
    const auto F = fdct_block(block);
    double e_in = 0, e_out = 0;
    for (int i = 0; i < 64; ++i) {
      e_in += block[i] * block[i];
      e_out += F[i] * F[i];
    }
    EXPECT_NEAR(e_out / e_in, 1.0, 1e-3);
  }
}

// --- quality scaling ---

TEST(QuantScaling, Quality50IsAnnexKVerbatim) {
  EXPECT_EQ(scale_quant_table(kAnnexKLuminance, 50), kAnnexKLuminance);
  EXPECT_EQ(scale_quant_table(kAnnexKChrominance, 50), kAnnexKChrominance);
}

TEST(QuantScaling, Quality100AllOnes) {
  // (base*0 + 50)/100 truncates to 0 and clamps up to 1 for every entry.
  for (auto v : scale_quant_table(kAnnexKLuminance, 100)) EXPECT_EQ(v, 1);
  for (auto v : scale_quant_table(kAnnexKChrominance, 100)) EXPECT_EQ(v, 1);
}

TEST(QuantScaling, MonotoneInQuality) {
  for (int q = 1; q < 100; ++q) {
    const auto lo = scale_quant_table(kAnnexKLuminance, q);
    const auto hi = scale_quant_table(kAnnexKLuminance, q + 1);
    for (int i = 0; i < 64; ++i) EXPECT_GE(lo[i], hi[i]) << "q=" << q << " i=" << i;
  }
}

// --- round trips ---

TEST(Codec, MidGrayQuality100Exact) {
  const auto img = testsupport::rgb_constant(8, 8, 128, 128, 128);
  EncodeParams p;
  p.quality = 100;
  p.subsampling = Subsampling::S444;
  const auto decoded = decode(encode(img, p));
  ASSERT_EQ(decoded.width, 8);
  ASSERT_EQ(decoded.height, 8);
  for (int c = 0; c < 3; ++c)
    for (int y = 0; y < 8; ++y)
      for (int x = 0; x < 8; ++x) EXPECT_EQ(decoded.planes[c].at(x, y), 128);
}

TEST(Codec, GradientQuality90Psnr) {
  const auto img = testsupport::rgb_gradient(16, 16);
  EncodeParams p;
  p.quality = 90;
  const auto decoded = decode(encode(img, p));
  const double psnr = testsupport::psnr(img, decoded);
  EXPECT_GE(psnr, 35.0);
}

TEST(Codec, SmoothContentQuality95Psnr) {
  const auto img = testsupport::rgb_gradient(64, 48);
  EncodeParams p;
  p.quality = 95;
  const auto decoded = decode(encode(img, p));
  EXPECT_GE(testsupport::psnr(img, decoded), 40.0);
}

TEST(Codec, DimensionsPreservedForAwkwardSizes) {
  for (auto [w, h] : {std::pair{1, 1}, {7, 5}, {8, 8}, {9, 17}, {16, 16},
                      {17, 31}, {23, 8}}) {
    for (auto sub : {Subsampling::S444, Subsampling::S420}) {
      auto img = testsupport::rgb_noise(w, h, 1000 + w * 31 + h);
      EncodeParams p;
      p.quality = 85;
      p.subsampling = sub;
      const auto decoded = decode(encode(img, p));
      EXPECT_EQ(decoded.width, w);
      EXPECT_EQ(decoded.height, h);
      EXPECT_EQ(decoded.color_space, ColorSpace::Rgb);
    }
  }
}

TEST(Codec, GrayscaleRoundTrip) {
  const auto img = testsupport::gray_gradient(20, 14);
  EncodeParams p;
  p.quality = 92;
  const auto decoded = decode(encode(img, p));
  EXPECT_EQ(decoded.color_space, ColorSpace::Grayscale);
  EXPECT_EQ(decoded.width, 20);
  EXPECT_EQ(decoded.height, 14);
  EXPECT_GE(testsupport::psnr(img, decoded), 35.0);
}

TEST(Codec, SubsamplingProvenanceReported) {
  const auto img = testsupport::rgb_gradient(32, 32);
  EncodeParams p444;
  p444.subsampling = Subsampling::S444;
  EXPECT_EQ(decode(encode(img, p444)).subsampling_provenance, Subsampling::S444);
  EncodeParams p420;
  p420.subsampling = Subsampling::S420;
  EXPECT_EQ(decode(encode(img, p420)).subsampling_provenance, Subsampling::S420);
}

TEST(Codec, RestartIntervalRoundTrip) {
  const auto img = testsupport::rgb_noise(48, 32, 77);
  EncodeParams plain;
  plain.quality = 88;
  EncodeParams rst = plain;
  rst.restart_interval = 2;
  const auto without = decode(encode(img, plain));
  const auto with = decode(encode(img, rst));
  // Restart markers change framing, not content.
  for (int c = 0; c < 3; ++c)
    EXPECT_EQ(with.planes[c].samples, without.planes[c].samples);
  // DRI segment is present in the restart stream.
  auto list = jpeg::parse_segments(encode(img, rst));
  EXPECT_NE(list.first(jpeg::MarkerKind::Dri), nullptr);
}

// --- unsupported / malformed input ---

TEST(Codec, ProgressiveIsTypedUnsupported) {
  // Hand-built SOF2 stream.
  auto bytes = testsupport::wrap_segments({
      {0xDB, [] { ByteVec p(65, 1); p[0] = 0; return p; }()},
      {0xC2, {8, 0, 8, 0, 8, 1, 1, 0x11, 0}},
  });
  try {
    decode(bytes);
    FAIL() << "expected UnsupportedCoding";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::UnsupportedCoding);
  }
}

TEST(Codec, ArithmeticIsTypedUnsupported) {
  auto bytes = testsupport::wrap_segments({
      {0xDB, [] { ByteVec p(65, 1); p[0] = 0; return p; }()},
      {0xC9, {8, 0, 8, 0, 8, 1, 1, 0x11, 0}},
  });
  try {
    decode(bytes);
    FAIL() << "expected UnsupportedCoding";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::UnsupportedCoding);
  }
}

TEST(Codec, DimensionOverflowGuard) {
  auto bytes = testsupport::wrap_segments({
      {0xDB, [] { ByteVec p(65, 1); p[0] = 0; return p; }()},
      {0xC0, {8, 0xFF, 0xFF, 0xFF, 0xFF, 1, 1, 0x11, 0}},
  });
  DecodeLimits limits;
  limits.max_pixels = 1 << 20;
  try {
    decode(bytes, limits);
    FAIL() << "expected DimensionOverflow";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::DimensionOverflow);
  }
}

TEST(Codec, FuzzTotality) {
  std::mt19937 rng(2024);
  const auto seed_jpeg = testsupport::encode_rgb_gradient(16, 16, 80);
  for (int iter = 0; iter < 500; ++iter) {
    ByteVec bytes;
    if (iter % 2 == 0) {
      bytes.resize(rng() % 400);
      for (auto& b : bytes) b = static_cast<std::uint8_t>(rng());
    } else {
      bytes = seed_jpeg;  // mutate a valid stream
      const int flips = 1 + rng() % 8;
      for (int f = 0; f < flips && !bytes.empty(); ++f)
        bytes[rng() % bytes.size()] = static_cast<std::uint8_t>(rng());
    }
    try {
      (void)decode(bytes);
    } catch (const Error&) {
      // typed error: acceptable
    }
  }
}

}  // namespace
