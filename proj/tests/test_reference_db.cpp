// Copyright 2026 The imgtrace Authors
//
// Licensed under the Apache License, Version 2.0 (the "License"); you may not
// use this file except in compliance with the License. You may obtain a copy
// of the License at https://www.apache.org/licenses/LICENSE-2.0

#include "imgtrace/reference_db.hpp"

#include <gtest/gtest.h>

#include <random>

#include "support/exif_writer.hpp"
#include "support/fixtures.hpp"

namespace {

using namespace imgtrace;
using namespace imgtrace::refdb;

constexpr std::int64_t kNow = 1690000000;

ByteVec snapseed_fixture() {
  testsupport::ExifSpec spec;
  spec.ascii_tags[exif::kTagSoftware] = "Snapseed 2.0";
  return testsupport::insert_app1(testsupport::encode_rgb_gradient(16, 16, 95),
                                  testsupport::write_exif_app1(spec));
}

ByteVec png_stub() {
  // Signature-only PNG; the DB never decodes PNG content.
  return ByteVec{0x89, 'P', 'N', 'G', 0x0D, 0x0A, 0x1A, 0x0A, 0, 0, 0, 0};
}

TEST(Ingest, SnapseedFixtureCreatesAllThreeRowKinds) {
  ReferenceDb db;
  const auto rec = db.ingest_labeled_image(snapseed_fixture(), "a_edited.jpeg",
                                           "Snapseed", "2.19", kNow);
  ASSERT_EQ(db.editors().size(), 1u);
  EXPECT_EQ(db.editors()[0].name, "Snapseed");
  EXPECT_EQ(db.editors()[0].version, "2.19");

  ASSERT_EQ(db.exif_dqt_entries().size(), 1u);
  const auto& row = db.exif_dqt_entries()[0];
  EXPECT_EQ(row.exif_software, "Snapseed 2.0");
  ASSERT_TRUE(row.dqt_fingerprint.has_value());
  EXPECT_EQ(row.dqt_fingerprint->size(), 32u);
  EXPECT_EQ(row.sample_count, 1);
  EXPECT_EQ(row.first_seen, kNow);

  ASSERT_EQ(db.signature_entries().size(), 1u);
  EXPECT_EQ(db.signature_entries()[0].filename_signature, "edited");
  EXPECT_EQ(db.signature_entries()[0].pattern_name, "snapseed_export");
  EXPECT_TRUE(rec.exif_dqt_row);
  EXPECT_EQ(rec.signature_rows, 1);
}

TEST(Ingest, IdempotentUpToSampleCount) {
  ReferenceDb db;
  const auto fixture = snapseed_fixture();
  db.ingest_labeled_image(fixture, "a_edited.jpeg", "Snapseed", "2.19", kNow);
  db.ingest_labeled_image(fixture, "a_edited.jpeg", "Snapseed", "2.19", kNow + 60);
  EXPECT_EQ(db.editors().size(), 1u);
  ASSERT_EQ(db.exif_dqt_entries().size(), 1u);
  EXPECT_EQ(db.exif_dqt_entries()[0].sample_count, 2);
  EXPECT_EQ(db.exif_dqt_entries()[0].first_seen, kNow);
  EXPECT_EQ(db.exif_dqt_entries()[0].last_seen, kNow + 60);
  EXPECT_EQ(db.signature_entries().size(), 1u);
}

TEST(Ingest, PngContributesFilenameEvidenceOnly) {
  ReferenceDb db;
  const auto rec = db.ingest_labeled_image(png_stub(), "photostudio_20230401.png",
                                           "Photo Studio", "2.6", kNow);
  EXPECT_FALSE(rec.exif_dqt_row);
  EXPECT_TRUE(db.exif_dqt_entries().empty());
  ASSERT_EQ(db.signature_entries().size(), 1u);
  EXPECT_EQ(db.signature_entries()[0].filename_signature, "photostudio");
}

TEST(Ingest, UnparseableImageIsTyped) {
  ReferenceDb db;
  const ByteVec junk = {1, 2, 3, 4, 5, 6, 7, 8};
  try {
    db.ingest_labeled_image(junk, "x.bin", "X", "1", kNow);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::UnparseableImage);
  }
}

TEST(Ingest, ParseFailuresBecomeDiagnostics) {
  ReferenceDb db;
  // Valid JPEG signature but truncated immediately: ingest records the
  // parse failure and still keeps filename evidence.
  ByteVec broken = {0xFF, 0xD8, 0xFF, 0xDB, 0x00, 0x40, 1, 2};
  const auto rec = db.ingest_labeled_image(broken, "PSX_20230401_123456.jpg",
                                           "Photoshop Express", "8.8", kNow);
  EXPECT_FALSE(rec.diagnostics.empty());
  EXPECT_EQ(rec.signature_rows, 1);
}

TEST(Lookup, ExifExactStringEquality) {
  ReferenceDb db;
  db.ingest_labeled_image(snapseed_fixture(), "a_edited.jpeg", "Snapseed", "2.19",
                          kNow);
  exif::EditorExifSignature probe;
  probe.software = "Snapseed 2.0";
  auto result = db.lookup(probe, std::nullopt, {});
  ASSERT_EQ(result.candidates.size(), 1u);
  EXPECT_EQ(result.candidates[0].editor_name, "Snapseed");
  EXPECT_EQ(result.candidates[0].kind, EvidenceKind::Exif);

  probe.software = "Snapseed";  // prefix is deliberately not a match
  EXPECT_TRUE(db.lookup(probe, std::nullopt, {}).empty());
}

TEST(Lookup, SharedDqtFingerprintFlagsAllOwners) {
  ReferenceDb db;
  // Same q95 tables ingested under two different editors, as with the shared
  // representative tables real tools exhibit.
  const auto img = testsupport::encode_rgb_gradient(16, 16, 95);
  db.ingest_labeled_image(img, "a.jpg", "Snapseed", "2.19", kNow);
  db.ingest_labeled_image(img, "b.jpg", "Meitu", "9.7", kNow);
  const auto fp = jpeg::dqt_fingerprint(jpeg::extract_dqt(jpeg::parse_segments(img)));

  auto result = db.lookup(std::nullopt, fp, {});
  ASSERT_EQ(result.candidates.size(), 2u);
  for (const auto& c : result.candidates) {
    EXPECT_EQ(c.kind, EvidenceKind::Dqt);
    EXPECT_TRUE(c.shared);
  }
}

TEST(Lookup, EmptyProbeYieldsEmptyResult) {
  ReferenceDb db;
  db.ingest_labeled_image(snapseed_fixture(), "a_edited.jpeg", "Snapseed", "2.19",
                          kNow);
  EXPECT_TRUE(db.lookup(std::nullopt, std::nullopt, {}).empty());
}

TEST(Lookup, FilenameCandidatesRequireDbEditor) {
  ReferenceDb db;
  db.ensure_editor("Photoshop Express", "8.8");
  auto matches = fname::match_filename("PSX_20230401_123456.jpg",
                                       fname::builtin_matcher());
  auto result = db.lookup(std::nullopt, std::nullopt, matches);
  ASSERT_EQ(result.candidates.size(), 1u);
  EXPECT_EQ(result.candidates[0].kind, EvidenceKind::Filename);

  auto unknown = fname::match_filename("MTXX_MH20230401123456.jpg",
                                       fname::builtin_matcher());
  EXPECT_TRUE(db.lookup(std::nullopt, std::nullopt, unknown).empty());
}

TEST(Lookup, OrderingExifThenFilenameThenDqt) {
  ReferenceDb db;
  const auto img = snapseed_fixture();
  db.ingest_labeled_image(img, "a_edited.jpeg", "Snapseed", "2.19", kNow);
  exif::EditorExifSignature probe;
  probe.software = "Snapseed 2.0";
  const auto fp = jpeg::dqt_fingerprint(jpeg::extract_dqt(jpeg::parse_segments(img)));
  auto matches = fname::match_filename("b_edited.jpeg", fname::builtin_matcher());

  auto result = db.lookup(probe, fp, matches);
  ASSERT_EQ(result.candidates.size(), 3u);
  EXPECT_EQ(result.candidates[0].kind, EvidenceKind::Exif);
  EXPECT_EQ(result.candidates[1].kind, EvidenceKind::Filename);
  EXPECT_EQ(result.candidates[2].kind, EvidenceKind::Dqt);
}

TEST(Lookup, NeverFabricatesCandidates) {
  // Random DBs and probes: every candidate must trace back to a stored row.
  std::mt19937 rng(404);
  const std::vector<std::string> names = {"A", "B", "C", "D"};
  for (int iter = 0; iter < 50; ++iter) {
    ReferenceDb db;
    for (int e = 0; e < 1 + static_cast<int>(rng() % 4); ++e)
      db.ensure_editor(names[rng() % names.size()], std::to_string(rng() % 3));
    exif::EditorExifSignature probe;
    probe.software = "S" + std::to_string(rng() % 5);
    auto result = db.lookup(probe, std::string(32, 'a'), {});
    // no exifdqt rows at all: nothing can match
    EXPECT_TRUE(result.empty());
  }
}

TEST(Snapshot, RoundTripIdentity) {
  ReferenceDb db;
  db.ingest_labeled_image(snapseed_fixture(), "a_edited.jpeg", "Snapseed", "2.19",
                          kNow);
  db.ingest_labeled_image(png_stub(), "photostudio_20230401.png", "Photo Studio",
                          "2.6", kNow + 5);
  const auto text = db.export_snapshot_text();
  const auto back = ReferenceDb::import_snapshot(text);
  EXPECT_EQ(back, db);
  EXPECT_EQ(back.content_digest(), db.content_digest());
}

TEST(Snapshot, EmptyDbIsHeaderOnly) {
  ReferenceDb db;
  EXPECT_EQ(db.export_snapshot_text(), std::string(ReferenceDb::kSnapshotHeader) + "\n");
}

TEST(Snapshot, UnknownVersionIsTyped) {
  try {
    ReferenceDb::import_snapshot("imgtrace-refdb 99\n");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::SchemaVersionMismatch);
  }
  try {
    ReferenceDb::import_snapshot("something else\n");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::MalformedSnapshot);
  }
}

TEST(Snapshot, AwkwardStringsSurviveEscaping) {
  ReferenceDb db;
  const auto id = db.ensure_editor("We|rd % Name", "-");
  (void)id;
  const auto back = ReferenceDb::import_snapshot(db.export_snapshot_text());
  ASSERT_EQ(back.editors().size(), 1u);
  EXPECT_EQ(back.editors()[0].name, "We|rd % Name");
  EXPECT_EQ(back.editors()[0].version, "-");
}

TEST(Snapshot, MalformedRowsAreTyped) {
  const std::string header = std::string(ReferenceDb::kSnapshotHeader) + "\n";
  for (const std::string& bad :
       {header + "editor|notanumber|X|1\n",
        header + "exifdqt|1|a|b|c|1|2\n",          // arity
        header + "filesig|7|sig|pat\n",            // unknown editor
        header + "mystery|1|2\n"}) {
    try {
      ReferenceDb::import_snapshot(bad);
      FAIL() << bad;
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), Errc::MalformedSnapshot);
    }
  }
}

TEST(Snapshot, FileRoundTrip) {
  namespace fs = std::filesystem;
  const auto dir = fs::temp_directory_path() / "imgtrace_refdb_test";
  fs::create_directories(dir);
  const auto path = dir / "ref.db";
  ReferenceDb db;
  db.ingest_labeled_image(snapseed_fixture(), "x_edited.jpeg", "Snapseed", "2.19",
                          kNow);
  db.save_file(path);
  EXPECT_EQ(ReferenceDb::load_file(path), db);
  fs::remove_all(dir);
  // missing file loads as empty
  EXPECT_TRUE(ReferenceDb::load_file(path).editors().empty());
}

}  // namespace
