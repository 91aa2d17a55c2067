// Copyright 2026 The imgtrace Authors
//
// Licensed under the Apache License, Version 2.0 (the "License"); you may not
// use this file except in compliance with the License. You may obtain a copy
// of the License at https://www.apache.org/licenses/LICENSE-2.0

#include "imgtrace/exif.hpp"

#include <gtest/gtest.h>

#include <random>

#include "support/exif_writer.hpp"
#include "support/fixtures.hpp"

namespace {

using namespace imgtrace;
using namespace imgtrace::exif;

TEST(ParseExif, SoftwareTagRecovered) {
  testsupport::ExifSpec spec;
  spec.ascii_tags[kTagSoftware] = "Snapseed 2.0";
  auto rec = parse_exif(testsupport::write_exif_app1(spec));
  ASSERT_TRUE(rec.tags.contains(kTagSoftware));
  EXPECT_EQ(rec.tags.at(kTagSoftware).ascii, "Snapseed 2.0");
}

TEST(ParseExif, ArtistAndSoftwareRecovered) {
  testsupport::ExifSpec spec;
  spec.ascii_tags[kTagArtist] = "Meitu";
  spec.ascii_tags[kTagSoftware] = "Meitu 9755";
  auto rec = parse_exif(testsupport::write_exif_app1(spec));
  EXPECT_EQ(rec.tags.at(kTagArtist).ascii, "Meitu");
  EXPECT_EQ(rec.tags.at(kTagSoftware).ascii, "Meitu 9755");
}

TEST(ParseExif, MinimalZeroEntryIfd) {
  testsupport::ExifSpec spec;  // no tags, no thumbnail
  auto rec = parse_exif(testsupport::write_exif_app1(spec));
  EXPECT_TRUE(rec.tags.empty());
  EXPECT_FALSE(rec.has_thumbnail());
  EXPECT_TRUE(rec.little_endian);
}

TEST(ParseExif, ByteOrderRoundTrip) {
  // The same logical record serialized II and MM parses identically.
  for (std::uint16_t extra : {std::uint16_t{0x0132}}) {
    testsupport::ExifSpec le;
    le.little_endian = true;
    le.ascii_tags[kTagSoftware] = "Adobe Photoshop Express (Android)";
    le.ascii_tags[kTagArtist] = "someone";
    le.ascii_tags[extra] = "2023:04:01 12:34:56";
    testsupport::ExifSpec be = le;
    be.little_endian = false;

    auto rec_le = parse_exif(testsupport::write_exif_app1(le));
    auto rec_be = parse_exif(testsupport::write_exif_app1(be));
    EXPECT_TRUE(rec_le.little_endian);
    EXPECT_FALSE(rec_be.little_endian);
    ASSERT_EQ(rec_le.tags.size(), rec_be.tags.size());
    for (const auto& [tag, value] : rec_le.tags) {
      ASSERT_TRUE(rec_be.tags.contains(tag));
      EXPECT_EQ(rec_be.tags.at(tag).ascii, value.ascii);
    }
  }
}

TEST(ParseExif, BadPreamble) {
  ByteVec junk = {'J', 'F', 'I', 'F', 0, 0, 'I', 'I'};
  try {
    parse_exif(junk);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::BadPreamble);
  }
}

TEST(ParseExif, BadTiffHeader) {
  ByteVec payload = {'E', 'x', 'i', 'f', 0, 0, 'X', 'X', 0, 42, 0, 0, 0, 8};
  try {
    parse_exif(payload);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::BadTiffHeader);
  }
}

TEST(ParseExif, OffsetOutOfBoundsIsTyped) {
  // IFD0 offset points far past the payload.
  ByteVec payload = {'E', 'x', 'i', 'f', 0, 0,
                     'I', 'I', 42, 0, 0xFF, 0xFF, 0, 0};
  try {
    parse_exif(payload);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::OffsetOutOfBounds);
  }
}

TEST(ParseExif, FuzzOffsetsNeverCrash) {
  testsupport::ExifSpec spec;
  spec.ascii_tags[kTagSoftware] = "AdvaSoft TouchRetouch";
  spec.ascii_tags[kTagDateTime] = "2023:04:01 00:00:00";
  const auto base = testsupport::write_exif_app1(spec);
  std::mt19937 rng(555);
  for (int iter = 0; iter < 3000; ++iter) {
    ByteVec mutated = base;
    const int flips = 1 + rng() % 6;
    for (int f = 0; f < flips; ++f)
      mutated[rng() % mutated.size()] = static_cast<std::uint8_t>(rng());
    try {
      auto rec = parse_exif(mutated);
      (void)rec;
    } catch (const Error&) {
      // typed errors only
    }
  }
}

TEST(ExtractEditorSignature, PresentAndAbsent) {
  testsupport::ExifSpec with;
  with.ascii_tags[kTagSoftware] = "Adobe Photoshop Express (Android)";
  auto sig = extract_editor_signature(parse_exif(testsupport::write_exif_app1(with)));
  ASSERT_TRUE(sig.has_value());
  EXPECT_EQ(sig->software, "Adobe Photoshop Express (Android)");
  EXPECT_FALSE(sig->artist.has_value());

  testsupport::ExifSpec datetime_only;
  datetime_only.ascii_tags[kTagDateTime] = "2023:04:01 12:00:00";
  EXPECT_FALSE(extract_editor_signature(
                   parse_exif(testsupport::write_exif_app1(datetime_only)))
                   .has_value());

  testsupport::ExifSpec touchretouch;
  touchretouch.ascii_tags[kTagSoftware] = "AdvaSoft TouchRetouch";
  auto sig2 =
      extract_editor_signature(parse_exif(testsupport::write_exif_app1(touchretouch)));
  ASSERT_TRUE(sig2.has_value());
  EXPECT_EQ(sig2->software, "AdvaSoft TouchRetouch");
}

TEST(ExtractEditorSignature, VerbatimIncludingWhitespace) {
  testsupport::ExifSpec spec;
  spec.ascii_tags[kTagSoftware] = "  Meitu 9755  ";
  auto sig = extract_editor_signature(parse_exif(testsupport::write_exif_app1(spec)));
  ASSERT_TRUE(sig.has_value());
  EXPECT_EQ(sig->software, "  Meitu 9755  ");
}

TEST(ExtractThumbnailDqt, NoIfd1) {
  testsupport::ExifSpec spec;
  spec.ascii_tags[kTagSoftware] = "Snapseed 2.0";
  auto rec = parse_exif(testsupport::write_exif_app1(spec));
  EXPECT_FALSE(extract_thumbnail_dqt(rec).has_value());
}

TEST(ExtractThumbnailDqt, EncoderThumbnailTables) {
  // Thumbnail encoded by our own codec at quality 50: its tables must come
  // back as the Annex-K pair, tagged as thumbnail-sourced.
  testsupport::ExifSpec spec;
  spec.ascii_tags[kTagSoftware] = "Snapseed 2.0";
  spec.thumbnail = testsupport::encode_rgb_gradient(8, 8, 50);
  auto rec = parse_exif(testsupport::write_exif_app1(spec));
  ASSERT_TRUE(rec.has_thumbnail());
  auto set = extract_thumbnail_dqt(rec);
  ASSERT_TRUE(set.has_value());
  EXPECT_EQ(set->source, jpeg::QuantTableSet::Source::Thumbnail);
  EXPECT_EQ(set->tables.at(0).values_natural[0], 16);
  EXPECT_EQ(jpeg::dqt_fingerprint(*set), "c44701e8185306f5e6d09be16a2b0fbd");
}

TEST(ExtractThumbnailDqt, GarbageThumbnailIsDiagnosed) {
  testsupport::ExifSpec spec;
  spec.ascii_tags[kTagSoftware] = "x";
  spec.thumbnail = ByteVec{0xDE, 0xAD, 0xBE, 0xEF, 0x01, 0x02};
  auto rec = parse_exif(testsupport::write_exif_app1(spec));
  std::string diag;
  EXPECT_FALSE(extract_thumbnail_dqt(rec, &diag).has_value());
  EXPECT_FALSE(diag.empty());
}

TEST(ParseExif, UnknownTagTypesAreSkippedNotMisparsed) {
  // Hand-build an IFD whose single entry has a bogus type; the walker must
  // skip it and still read the terminator cleanly.
  ByteVec tiff = {'I', 'I', 42, 0, 8, 0, 0, 0};
  auto put16 = [&](std::uint16_t v) {
    tiff.push_back(v & 0xFF);
    tiff.push_back(v >> 8);
  };
  auto put32 = [&](std::uint32_t v) {
    for (int i = 0; i < 4; ++i) tiff.push_back((v >> (8 * i)) & 0xFF);
  };
  put16(1);            // one entry
  put16(kTagSoftware);
  put16(0x7777);       // unknown type
  put32(1);
  put32(0);
  put32(0);            // next IFD
  ByteVec payload = {'E', 'x', 'i', 'f', 0, 0};
  payload.insert(payload.end(), tiff.begin(), tiff.end());
  auto rec = parse_exif(payload);
  EXPECT_FALSE(rec.tags.contains(kTagSoftware));
  EXPECT_FALSE(rec.diagnostics.empty());
}

}  // namespace
