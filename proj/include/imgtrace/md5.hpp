// Copyright 2026 The imgtrace Authors
//
// Licensed under the Apache License, Version 2.0 (the "License"); you may not
// use this file except in compliance with the License. You may obtain a copy
// of the License at https://www.apache.org/licenses/LICENSE-2.0

#pragma once

// RFC 1321 MD5. Fingerprinting quantization tables needs a stable, widely
// implemented digest that other tools can reproduce; cryptographic strength
// is irrelevant here.

#include <array>
#include <cstdint>
#include <cstring>
#include <span>
#include <string>

namespace imgtrace {

class Md5 {
 public:
  Md5() { reset(); }

  void reset() {
    state_ = {0x67452301u, 0xefcdab89u, 0x98badcfeu, 0x10325476u};
    total_len_ = 0;
    buf_len_ = 0;
  }

  void update(std::span<const std::uint8_t> data) {
    total_len_ += data.size();
    std::size_t i = 0;
    if (buf_len_ > 0) {
      std::size_t take = std::min<std::size_t>(64 - buf_len_, data.size());
      std::memcpy(buf_.data() + buf_len_, data.data(), take);
      buf_len_ += take;
      i = take;
      if (buf_len_ == 64) {
        transform(buf_.data());
        buf_len_ = 0;
      }
    }
    for (; i + 64 <= data.size(); i += 64) transform(data.data() + i);
    if (i < data.size()) {
      buf_len_ = data.size() - i;
      std::memcpy(buf_.data(), data.data() + i, buf_len_);
    }
  }

  std::array<std::uint8_t, 16> finish() {
    std::uint64_t bit_len = total_len_ * 8;
    std::uint8_t pad[72] = {0x80};
    std::size_t pad_len = (buf_len_ < 56) ? 56 - buf_len_ : 120 - buf_len_;
    update({pad, pad_len});
    std::uint8_t len_bytes[8];
    for (int i = 0; i < 8; ++i)
      len_bytes[i] = static_cast<std::uint8_t>(bit_len >> (8 * i));
    update({len_bytes, 8});
    std::array<std::uint8_t, 16> digest{};
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j)
        digest[i * 4 + j] = static_cast<std::uint8_t>(state_[i] >> (8 * j));
    return digest;
  }

 private:
  static std::uint32_t rotl(std::uint32_t x, int n) {
    return (x << n) | (x >> (32 - n));
  }

  void transform(const std::uint8_t* block) {
    static constexpr std::uint32_t k[64] = {
        0xd76aa478, 0xe8c7b756, 0x242070db, 0xc1bdceee, 0xf57c0faf,
        0x4787c62a, 0xa8304613, 0xfd469501, 0x698098d8, 0x8b44f7af,
        0xffff5bb1, 0x895cd7be, 0x6b901122, 0xfd987193, 0xa679438e,
        0x49b40821, 0xf61e2562, 0xc040b340, 0x265e5a51, 0xe9b6c7aa,
        0xd62f105d, 0x02441453, 0xd8a1e681, 0xe7d3fbc8, 0x21e1cde6,
        0xc33707d6, 0xf4d50d87, 0x455a14ed, 0xa9e3e905, 0xfcefa3f8,
        0x676f02d9, 0x8d2a4c8a, 0xfffa3942, 0x8771f681, 0x6d9d6122,
        0xfde5380c, 0xa4beea44, 0x4bdecfa9, 0xf6bb4b60, 0xbebfbc70,
        0x289b7ec6, 0xeaa127fa, 0xd4ef3085, 0x04881d05, 0xd9d4d039,
        0xe6db99e5, 0x1fa27cf8, 0xc4ac5665, 0xf4292244, 0x432aff97,
        0xab9423a7, 0xfc93a039, 0x655b59c3, 0x8f0ccc92, 0xffeff47d,
        0x85845dd1, 0x6fa87e4f, 0xfe2ce6e0, 0xa3014314, 0x4e0811a1,
        0xf7537e82, 0xbd3af235, 0x2ad7d2bb, 0xeb86d391};
    static constexpr int s[64] = {7, 12, 17, 22, 7, 12, 17, 22, 7, 12, 17,
                                  22, 7, 12, 17, 22, 5, 9,  14, 20, 5, 9,
                                  14, 20, 5, 9,  14, 20, 5,  9,  14, 20, 4,
                                  11, 16, 23, 4, 11, 16, 23, 4,  11, 16, 23,
                                  4,  11, 16, 23, 6, 10, 15, 21, 6,  10, 15,
                                  21, 6,  10, 15, 21, 6, 10, 15, 21};
    std::uint32_t m[16];
    for (int i = 0; i < 16; ++i)
      m[i] = static_cast<std::uint32_t>(block[i * 4]) |
             (static_cast<std::uint32_t>(block[i * 4 + 1]) << 8) |
             (static_cast<std::uint32_t>(block[i * 4 + 2]) << 16) |
             (static_cast<std::uint32_t>(block[i * 4 + 3]) << 24);
    std::uint32_t a = state_[0], b = state_[1], c = state_[2], d = state_[3];
    for (int i = 0; i < 64; ++i) {
      std::uint32_t f;
      int g;
      if (i < 16) {
        f = (b & c) | (~b & d);
        g = i;
      } else if (i < 32) {
        f = (d & b) | (~d & c);
        g = (5 * i + 1) % 16;
      } else if (i < 48) {
        f = b ^ c ^ d;
        g = (3 * i + 5) % 16;
      } else {
        f = c ^ (b | ~d);
        g = (7 * i) % 16;
      }
      std::uint32_t tmp = d;
      d = c;
      c = b;
      b = b + rotl(a + f + k[i] + m[g], s[i]);
      a = tmp;
    }
    state_[0] += a;
    state_[1] += b;
    state_[2] += c;
    state_[3] += d;
  }

  std::array<std::uint32_t, 4> state_;
  std::uint64_t total_len_ = 0;
  std::array<std::uint8_t, 64> buf_;
  std::size_t buf_len_ = 0;
};

inline std::string md5_hex(std::span<const std::uint8_t> data) {
  Md5 md5;
  md5.update(data);
  auto digest = md5.finish();
  static const char* hex = "0123456789abcdef";
  std::string out;
  out.reserve(32);
  for (std::uint8_t byte : digest) {
    out.push_back(hex[byte >> 4]);
    out.push_back(hex[byte & 0xF]);
  }
  return out;
}

inline std::string md5_hex(const std::string& s) {
  return md5_hex(std::span<const std::uint8_t>(
      reinterpret_cast<const std::uint8_t*>(s.data()), s.size()));
}

}  // namespace imgtrace
