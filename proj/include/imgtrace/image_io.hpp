// Copyright 2026 The imgtrace Authors
//
// Licensed under the Apache License, Version 2.0 (the "License"); you may not
// use this file except in compliance with the License. You may obtain a copy
// of the License at https://www.apache.org/licenses/LICENSE-2.0

#pragma once

// Small-format I/O: content sniffing by magic bytes, PGM/PPM as the raw
// interchange format for PixelImage, and a minimal non-interlaced 8-bit
// grayscale PNG writer (zlib-backed) for heatmap exports.

#include <zlib.h>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "imgtrace/bytes.hpp"
#include "imgtrace/codec.hpp"
#include "imgtrace/errors.hpp"

namespace imgtrace::io {

enum class SniffedFormat { Jpeg, Png, Unknown };

inline SniffedFormat sniff_format(ByteSpan head) {
  static const std::uint8_t png_sig[8] = {0x89, 0x50, 0x4E, 0x47, 0x0D, 0x0A, 0x1A, 0x0A};
  if (head.size() >= 3 && head[0] == 0xFF && head[1] == 0xD8 && head[2] == 0xFF)
    return SniffedFormat::Jpeg;
  if (head.size() >= 8 && std::equal(png_sig, png_sig + 8, head.begin()))
    return SniffedFormat::Png;
  return SniffedFormat::Unknown;
}

inline ByteVec read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) raise(Errc::FileUnreadable, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  const std::string s = ss.str();
  return ByteVec(s.begin(), s.end());
}

inline void write_file(const std::filesystem::path& path, ByteSpan data) {
  std::ofstream out(path, std::ios::binary);
  if (!out) raise(Errc::FileUnreadable, "cannot open " + path.string() + " for write");
  out.write(reinterpret_cast<const char*>(data.data()),
            static_cast<std::streamsize>(data.size()));
}

// --- PGM / PPM (binary, maxval 255) ---

inline ByteVec write_pnm(const codec::PixelImage& img) {
  if (img.planes.empty()) raise(Errc::InvalidArgument, "empty image");
  const bool gray = img.planes.size() == 1;
  std::string header = std::string(gray ? "P5" : "P6") + "\n" +
                       std::to_string(img.width) + " " + std::to_string(img.height) +
                       "\n255\n";
  ByteVec out(header.begin(), header.end());
  for (int y = 0; y < img.height; ++y)
    for (int x = 0; x < img.width; ++x)
      for (const auto& plane : img.planes) out.push_back(plane.at(x, y));
  return out;
}

inline codec::PixelImage read_pnm(ByteSpan data) {
  std::string s(data.begin(), data.end());
  std::istringstream in(s);
  std::string magic;
  int w = 0, h = 0, maxval = 0;
  in >> magic >> w >> h >> maxval;
  if ((magic != "P5" && magic != "P6") || w < 1 || h < 1 || maxval != 255)
    raise(Errc::UnparseableImage, "not a binary PGM/PPM with maxval 255");
  in.get();  // single whitespace after maxval
  const std::size_t offset = static_cast<std::size_t>(in.tellg());
  const int channels = magic == "P5" ? 1 : 3;
  const std::size_t need = static_cast<std::size_t>(w) * h * channels;
  if (data.size() < offset + need)
    raise(Errc::UnparseableImage, "PNM sample data truncated");
  auto img = codec::PixelImage::make(
      w, h, channels == 1 ? codec::ColorSpace::Grayscale : codec::ColorSpace::Rgb);
  std::size_t i = offset;
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x)
      for (int c = 0; c < channels; ++c) img.planes[c].at(x, y) = data[i++];
  return img;
}

// --- PNG (8-bit grayscale, non-interlaced) ---

namespace detail {

inline void put_u32be(ByteVec& out, std::uint32_t v) {
  for (int i = 3; i >= 0; --i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

inline void png_chunk(ByteVec& out, const char type[4], ByteSpan payload) {
  put_u32be(out, static_cast<std::uint32_t>(payload.size()));
  const std::size_t crc_start = out.size();
  out.insert(out.end(), type, type + 4);
  out.insert(out.end(), payload.begin(), payload.end());
  const auto crc = crc32(0L, out.data() + crc_start, static_cast<uInt>(out.size() - crc_start));
  put_u32be(out, static_cast<std::uint32_t>(crc));
}

}  // namespace detail

inline ByteVec write_png_gray8(int width, int height,
                               const std::vector<std::uint8_t>& samples) {
  if (width < 1 || height < 1 ||
      samples.size() != static_cast<std::size_t>(width) * height)
    raise(Errc::InvalidArgument, "bad PNG dimensions");
  ByteVec out = {0x89, 'P', 'N', 'G', 0x0D, 0x0A, 0x1A, 0x0A};

  ByteVec ihdr;
  detail::put_u32be(ihdr, static_cast<std::uint32_t>(width));
  detail::put_u32be(ihdr, static_cast<std::uint32_t>(height));
  ihdr.push_back(8);  // bit depth
  ihdr.push_back(0);  // color type: grayscale
  ihdr.push_back(0);  // compression
  ihdr.push_back(0);  // filter
  ihdr.push_back(0);  // interlace: none
  detail::png_chunk(out, "IHDR", ihdr);

  // filter byte 0 per scanline
  ByteVec rawdata;
  rawdata.reserve(samples.size() + height);
  for (int y = 0; y < height; ++y) {
    rawdata.push_back(0);
    rawdata.insert(rawdata.end(), samples.begin() + static_cast<std::size_t>(y) * width,
                   samples.begin() + static_cast<std::size_t>(y + 1) * width);
  }
  uLongf comp_len = compressBound(static_cast<uLong>(rawdata.size()));
  ByteVec comp(comp_len);
  if (compress2(comp.data(), &comp_len, rawdata.data(),
                static_cast<uLong>(rawdata.size()), 6) != Z_OK)
    raise(Errc::FileUnreadable, "zlib compression failed");
  comp.resize(comp_len);
  detail::png_chunk(out, "IDAT", comp);
  detail::png_chunk(out, "IEND", {});
  return out;
}

}  // namespace imgtrace::io
