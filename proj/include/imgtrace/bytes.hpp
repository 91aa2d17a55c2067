// Copyright 2026 The imgtrace Authors
//
// Licensed under the Apache License, Version 2.0 (the "License"); you may not
// use this file except in compliance with the License. You may obtain a copy
// of the License at https://www.apache.org/licenses/LICENSE-2.0

#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "imgtrace/errors.hpp"

namespace imgtrace {

using ByteSpan = std::span<const std::uint8_t>;
using ByteVec = std::vector<std::uint8_t>;

// Sequential big-endian cursor over a byte span. Out-of-range reads throw
// TruncatedSegment; random-access helpers below throw OffsetOutOfBounds.
class ByteReader {
 public:
  explicit ByteReader(ByteSpan data) : data_(data) {}

  std::size_t pos() const noexcept { return pos_; }
  std::size_t remaining() const noexcept { return data_.size() - pos_; }
  bool eof() const noexcept { return pos_ >= data_.size(); }

  std::uint8_t peek(std::size_t ahead = 0) const {
    if (pos_ + ahead >= data_.size())
      raise(Errc::TruncatedSegment, "peek past end of stream");
    return data_[pos_ + ahead];
  }

  std::uint8_t u8() {
    if (pos_ >= data_.size())
      raise(Errc::TruncatedSegment, "read past end of stream");
    return data_[pos_++];
  }

  std::uint16_t u16be() {
    std::uint16_t hi = u8();
    return static_cast<std::uint16_t>((hi << 8) | u8());
  }

  ByteSpan bytes(std::size_t n) {
    if (remaining() < n)
      raise(Errc::TruncatedSegment, "byte run past end of stream");
    ByteSpan out = data_.subspan(pos_, n);
    pos_ += n;
    return out;
  }

  void skip(std::size_t n) {
    if (remaining() < n)
      raise(Errc::TruncatedSegment, "skip past end of stream");
    pos_ += n;
  }

  void seek(std::size_t pos) {
    if (pos > data_.size()) raise(Errc::TruncatedSegment, "seek past end");
    pos_ = pos;
  }

 private:
  ByteSpan data_;
  std::size_t pos_ = 0;
};

// Random-access reads with an explicit byte order, used by the TIFF walker.
inline std::uint8_t u8_at(ByteSpan data, std::size_t off) {
  if (off >= data.size()) raise(Errc::OffsetOutOfBounds, "u8 offset");
  return data[off];
}

inline std::uint16_t u16_at(ByteSpan data, std::size_t off, bool little) {
  if (off + 2 > data.size()) raise(Errc::OffsetOutOfBounds, "u16 offset");
  return little ? static_cast<std::uint16_t>(data[off] | (data[off + 1] << 8))
                : static_cast<std::uint16_t>((data[off] << 8) | data[off + 1]);
}

inline std::uint32_t u32_at(ByteSpan data, std::size_t off, bool little) {
  if (off + 4 > data.size()) raise(Errc::OffsetOutOfBounds, "u32 offset");
  if (little)
    return static_cast<std::uint32_t>(data[off]) |
           (static_cast<std::uint32_t>(data[off + 1]) << 8) |
           (static_cast<std::uint32_t>(data[off + 2]) << 16) |
           (static_cast<std::uint32_t>(data[off + 3]) << 24);
  return (static_cast<std::uint32_t>(data[off]) << 24) |
         (static_cast<std::uint32_t>(data[off + 1]) << 16) |
         (static_cast<std::uint32_t>(data[off + 2]) << 8) |
         static_cast<std::uint32_t>(data[off + 3]);
}

inline void put_u16be(ByteVec& out, std::uint16_t v) {
  out.push_back(static_cast<std::uint8_t>(v >> 8));
  out.push_back(static_cast<std::uint8_t>(v & 0xFF));
}

}  // namespace imgtrace
