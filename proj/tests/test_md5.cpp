// Copyright 2026 The imgtrace Authors
//
// Licensed under the Apache License, Version 2.0 (the "License"); you may not
// use this file except in compliance with the License. You may obtain a copy
// of the License at https://www.apache.org/licenses/LICENSE-2.0

#include "imgtrace/md5.hpp"

#include <gtest/gtest.h>

#include <random>
#include <string>

namespace {

using imgtrace::md5_hex;

TEST(Md5, Rfc1321Vectors) {
  EXPECT_EQ(md5_hex(std::string("")), "d41d8cd98f00b204e9800998ecf8427e");
  EXPECT_EQ(md5_hex(std::string("abc")), "900150983cd24fb0d6963f7d28e17f72");
  EXPECT_EQ(md5_hex(std::string("message digest")),
            "f96b697d7cb7938d525a2f31aaf161d0");
  EXPECT_EQ(md5_hex(std::string("abcdefghijklmnopqrstuvwxyz")),
            "c3fcd3d76192e4007dfb496cca67e13b");
}

TEST(Md5, ChunkedUpdatesMatchOneShot) {
  std::mt19937 rng(7);
  std::vector<std::uint8_t> data(1000);
  for (auto& b : data) b = static_cast<std::uint8_t>(rng());

  imgtrace::Md5 chunked;
  std::size_t i = 0;
  while (i < data.size()) {
    const std::size_t take = std::min<std::size_t>(1 + rng() % 97, data.size() - i);
    chunked.update({data.data() + i, take});
    i += take;
  }
  auto digest = chunked.finish();

  imgtrace::Md5 oneshot;
  oneshot.update(data);
  EXPECT_EQ(digest, oneshot.finish());
}

TEST(Md5, BoundaryLengths) {
  // 55/56/64 byte messages cross the padding boundaries.
  EXPECT_EQ(md5_hex(std::string(55, 'a')), md5_hex(std::string(55, 'a')));
  EXPECT_EQ(md5_hex(std::string(64, 'x')).size(), 32u);
  EXPECT_NE(md5_hex(std::string(56, 'a')), md5_hex(std::string(57, 'a')));
}

}  // namespace
