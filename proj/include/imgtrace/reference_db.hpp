// Copyright 2026 The imgtrace Authors
//
// Licensed under the Apache License, Version 2.0 (the "License"); you may not
// use this file except in compliance with the License. You may obtain a copy
// of the License at https://www.apache.org/licenses/LICENSE-2.0

#pragma once

// The reference database: editors, their Exif signatures, DQT fingerprints
// and filename signatures, built by ingesting labeled images and consulted
// during detection. Rows live in memory; the versioned line-oriented snapshot
// format doubles as the on-disk representation and the interoperability
// contract (see docs/formats.md). Intended use is single-writer /
// multi-reader: ingestion is serialized by the caller, lookups are const.

#include <algorithm>
#include <cstdint>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "imgtrace/errors.hpp"
#include "imgtrace/exif.hpp"
#include "imgtrace/filename_sig.hpp"
#include "imgtrace/image_io.hpp"
#include "imgtrace/jpeg_segments.hpp"
#include "imgtrace/md5.hpp"

namespace imgtrace::refdb {

struct ImageEditor {
  std::int64_t editor_id = 0;
  std::string name;
  std::string version;

  bool operator==(const ImageEditor&) const = default;
};

struct ExifDqtEntry {
  std::int64_t editor_id = 0;
  std::optional<std::string> exif_software;
  std::optional<std::string> exif_artist;
  std::optional<std::string> dqt_fingerprint;  // 32 lowercase hex chars
  std::int64_t sample_count = 1;
  std::int64_t first_seen = 0;  // epoch seconds
  std::int64_t last_seen = 0;

  bool operator==(const ExifDqtEntry&) const = default;
};

struct EditorSignatureEntry {
  std::int64_t editor_id = 0;
  std::string filename_signature;
  std::string pattern_name;

  bool operator==(const EditorSignatureEntry&) const = default;
};

enum class EvidenceKind { Exif, Filename, Dqt };

inline const char* evidence_kind_name(EvidenceKind k) {
  switch (k) {
    case EvidenceKind::Exif: return "exif";
    case EvidenceKind::Filename: return "filename";
    case EvidenceKind::Dqt: return "dqt";
  }
  return "?";
}

struct LookupCandidate {
  std::string editor_name;
  std::string editor_version;
  EvidenceKind kind = EvidenceKind::Exif;
  std::int64_t sample_count = 0;
  bool shared = false;  // DQT fingerprint maps to more than one editor

  bool operator==(const LookupCandidate&) const = default;
};

struct LookupResult {
  std::vector<LookupCandidate> candidates;

  bool empty() const { return candidates.empty(); }
};

struct IngestionRecord {
  std::int64_t editor_id = 0;
  std::optional<std::string> software;
  std::optional<std::string> artist;
  std::optional<std::string> fingerprint;
  std::vector<fname::FilenameMatch> filename_matches;
  bool exif_dqt_row = false;
  int signature_rows = 0;
  std::vector<std::string> diagnostics;
};

namespace detail {

// Snapshot field encoding: '-' marks an absent optional; '%', '|', CR, LF
// and a value that is exactly "-" are percent-encoded so every byte round
// trips.
inline std::string encode_field(const std::optional<std::string>& v) {
  if (!v) return "-";
  std::string out;
  for (char c : *v) {
    if (c == '%' || c == '|' || c == '\n' || c == '\r') {
      static const char* hex = "0123456789abcdef";
      out.push_back('%');
      out.push_back(hex[static_cast<std::uint8_t>(c) >> 4]);
      out.push_back(hex[static_cast<std::uint8_t>(c) & 0xF]);
    } else {
      out.push_back(c);
    }
  }
  if (out == "-") return "%2d";
  return out;
}

inline std::optional<std::string> decode_field(const std::string& s) {
  if (s == "-") return std::nullopt;
  std::string out;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '%') {
      if (i + 2 >= s.size()) raise(Errc::MalformedSnapshot, "truncated escape");
      auto hexval = [](char c) -> int {
        if (c >= '0' && c <= '9') return c - '0';
        if (c >= 'a' && c <= 'f') return c - 'a' + 10;
        if (c >= 'A' && c <= 'F') return c - 'A' + 10;
        raise(Errc::MalformedSnapshot, "bad escape digit");
      };
      out.push_back(static_cast<char>(hexval(s[i + 1]) * 16 + hexval(s[i + 2])));
      i += 2;
    } else {
      out.push_back(s[i]);
    }
  }
  return out;
}

inline std::int64_t parse_int(const std::string& s) {
  try {
    std::size_t used = 0;
    const std::int64_t v = std::stoll(s, &used);
    if (used != s.size()) raise(Errc::MalformedSnapshot, "trailing junk in number");
    return v;
  } catch (const Error&) {
    throw;
  } catch (...) {
    raise(Errc::MalformedSnapshot, "bad integer field: " + s);
  }
}

}  // namespace detail

class ReferenceDb {
 public:
  static constexpr const char* kSnapshotHeader = "imgtrace-refdb 1";

  const std::vector<ImageEditor>& editors() const { return editors_; }
  const std::vector<ExifDqtEntry>& exif_dqt_entries() const { return exif_dqt_; }
  const std::vector<EditorSignatureEntry>& signature_entries() const {
    return signatures_;
  }

  bool operator==(const ReferenceDb&) const = default;

  std::int64_t ensure_editor(const std::string& name, const std::string& version) {
    for (const auto& e : editors_)
      if (e.name == name && e.version == version) return e.editor_id;
    const std::int64_t id = next_editor_id_++;
    editors_.push_back({id, name, version});
    return id;
  }

  const ImageEditor* find_editor(std::int64_t id) const {
    for (const auto& e : editors_)
      if (e.editor_id == id) return &e;
    return nullptr;
  }

  // -------------------------------------------------------------------------
  // Ingestion

  // Parses one labeled image and upserts rows. JPEG inputs contribute Exif,
  // DQT and filename evidence; PNG inputs filename evidence only. Inner
  // parse failures become diagnostics, not aborts: partial evidence from a
  // truncated file is still evidence.
  IngestionRecord ingest_labeled_image(
      ByteSpan image, const std::string& filename, const std::string& editor_name,
      const std::string& editor_version, std::int64_t now_epoch_seconds,
      const fname::FilenameMatcher& matcher = fname::builtin_matcher()) {
    const auto format = io::sniff_format(image);
    if (format == io::SniffedFormat::Unknown)
      raise(Errc::UnparseableImage, "neither JPEG nor PNG signature: " + filename);

    IngestionRecord rec;
    rec.editor_id = ensure_editor(editor_name, editor_version);

    if (format == io::SniffedFormat::Jpeg) {
      try {
        const auto segments = jpeg::parse_segments(image);
        for (const jpeg::Segment* app1 : segments.all(jpeg::MarkerKind::App)) {
          if (app1->marker.index != 1) continue;
          try {
            const auto exif_rec = exif::parse_exif(segments.payload(*app1));
            if (auto sig = exif::extract_editor_signature(exif_rec)) {
              rec.software = sig->software;
              rec.artist = sig->artist;
            }
            break;
          } catch (const Error& e) {
            rec.diagnostics.push_back(std::string("exif: ") + e.what());
          }
        }
        try {
          rec.fingerprint = jpeg::dqt_fingerprint(jpeg::extract_dqt(segments));
        } catch (const Error& e) {
          rec.diagnostics.push_back(std::string("dqt: ") + e.what());
        }
      } catch (const Error& e) {
        rec.diagnostics.push_back(std::string("segments: ") + e.what());
      }
    }

    rec.filename_matches = fname::match_filename(filename, matcher);

    if (rec.software || rec.artist || rec.fingerprint) {
      rec.exif_dqt_row = true;
      upsert_exif_dqt(rec.editor_id, rec.software, rec.artist, rec.fingerprint,
                      now_epoch_seconds);
    }

    for (const auto& m : rec.filename_matches) {
      if (m.editor_name != editor_name) {
        rec.diagnostics.push_back("filename also matches pattern of " + m.editor_name);
        continue;
      }
      if (!m.db_signature) continue;  // structural shape with no recordable literal
      if (upsert_signature(rec.editor_id, *m.db_signature, m.pattern_name))
        ++rec.signature_rows;
    }
    return rec;
  }

  // -------------------------------------------------------------------------
  // Lookup

  // Union of matches across the three evidence tables. Candidate ordering is
  // a toolkit convention: evidence kind (exif, then filename, then dqt), then
  // sample_count descending, then name/version.
  LookupResult lookup(const std::optional<exif::EditorExifSignature>& exif_sig,
                      const std::optional<std::string>& dqt_fp,
                      const std::vector<fname::FilenameMatch>& filename_matches) const {
    LookupResult result;
    std::map<std::pair<std::int64_t, EvidenceKind>, LookupCandidate> found;
    auto add_candidate = [&](std::int64_t editor_id, EvidenceKind kind,
                             std::int64_t samples, bool shared) {
      const ImageEditor* editor = find_editor(editor_id);
      if (!editor) return;
      auto it = found.find({editor_id, kind});
      if (it == found.end()) {
        LookupCandidate cand;
        cand.editor_name = editor->name;
        cand.editor_version = editor->version;
        cand.kind = kind;
        cand.sample_count = samples;
        cand.shared = shared;
        found.emplace(std::make_pair(editor_id, kind), std::move(cand));
      } else {
        it->second.sample_count += samples;
        it->second.shared = it->second.shared || shared;
      }
    };

    if (exif_sig) {
      for (const auto& row : exif_dqt_) {
        const bool software_hit = exif_sig->software && row.exif_software &&
                                  *exif_sig->software == *row.exif_software;
        const bool artist_hit = exif_sig->artist && row.exif_artist &&
                                *exif_sig->artist == *row.exif_artist;
        if (!software_hit && !artist_hit) continue;
        add_candidate(row.editor_id, EvidenceKind::Exif, row.sample_count, false);
      }
    }

    if (dqt_fp) {
      std::set<std::int64_t> editors_sharing;
      for (const auto& row : exif_dqt_)
        if (row.dqt_fingerprint && *row.dqt_fingerprint == *dqt_fp)
          editors_sharing.insert(row.editor_id);
      const bool shared = editors_sharing.size() > 1;
      for (const auto& row : exif_dqt_)
        if (row.dqt_fingerprint && *row.dqt_fingerprint == *dqt_fp)
          add_candidate(row.editor_id, EvidenceKind::Dqt, row.sample_count, shared);
    }

    for (const auto& m : filename_matches) {
      for (const auto& e : editors_) {
        if (e.name != m.editor_name) continue;
        std::int64_t rows = 0;
        for (const auto& s : signatures_)
          if (s.editor_id == e.editor_id) ++rows;
        add_candidate(e.editor_id, EvidenceKind::Filename, rows, false);
      }
    }

    for (auto& [key, cand] : found) result.candidates.push_back(cand);
    std::sort(result.candidates.begin(), result.candidates.end(),
              [](const LookupCandidate& a, const LookupCandidate& b) {
                auto rank = [](EvidenceKind k) {
                  switch (k) {
                    case EvidenceKind::Exif: return 0;
                    case EvidenceKind::Filename: return 1;
                    case EvidenceKind::Dqt: return 2;
                  }
                  return 3;
                };
                if (rank(a.kind) != rank(b.kind)) return rank(a.kind) < rank(b.kind);
                if (a.sample_count != b.sample_count)
                  return a.sample_count > b.sample_count;
                if (a.editor_name != b.editor_name) return a.editor_name < b.editor_name;
                return a.editor_version < b.editor_version;
              });
    return result;
  }

  // -------------------------------------------------------------------------
  // Snapshot

  void export_snapshot(std::ostream& out) const {
    out << kSnapshotHeader << "\n";
    for (const auto& e : editors_)
      out << "editor|" << e.editor_id << "|" << detail::encode_field(e.name) << "|"
          << detail::encode_field(e.version) << "\n";
    for (const auto& r : exif_dqt_)
      out << "exifdqt|" << r.editor_id << "|" << detail::encode_field(r.exif_software)
          << "|" << detail::encode_field(r.exif_artist) << "|"
          << detail::encode_field(r.dqt_fingerprint) << "|" << r.sample_count << "|"
          << r.first_seen << "|" << r.last_seen << "\n";
    for (const auto& s : signatures_)
      out << "filesig|" << s.editor_id << "|"
          << detail::encode_field(s.filename_signature) << "|"
          << detail::encode_field(s.pattern_name) << "\n";
  }

  std::string export_snapshot_text() const {
    std::ostringstream ss;
    export_snapshot(ss);
    return ss.str();
  }

  static ReferenceDb import_snapshot(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line)) raise(Errc::MalformedSnapshot, "empty snapshot");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.rfind("imgtrace-refdb ", 0) != 0)
      raise(Errc::MalformedSnapshot, "not a reference DB snapshot");
    if (line != kSnapshotHeader)
      raise(Errc::SchemaVersionMismatch, "unsupported snapshot version: " + line);

    ReferenceDb db;
    while (std::getline(in, line)) {
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.empty() || line[0] == '#') continue;
      std::vector<std::string> fields;
      std::string field;
      std::istringstream fs(line);
      while (std::getline(fs, field, '|')) fields.push_back(field);
      if (fields.empty()) continue;
      const std::string& tag = fields[0];
      if (tag == "editor") {
        if (fields.size() != 4) raise(Errc::MalformedSnapshot, "editor arity");
        ImageEditor e;
        e.editor_id = detail::parse_int(fields[1]);
        auto name = detail::decode_field(fields[2]);
        if (!name || name->empty())
          raise(Errc::MalformedSnapshot, "editor without a name");
        e.name = *name;
        e.version = detail::decode_field(fields[3]).value_or("");
        db.editors_.push_back(e);
        db.next_editor_id_ = std::max(db.next_editor_id_, e.editor_id + 1);
      } else if (tag == "exifdqt") {
        if (fields.size() != 8) raise(Errc::MalformedSnapshot, "exifdqt arity");
        ExifDqtEntry r;
        r.editor_id = detail::parse_int(fields[1]);
        r.exif_software = detail::decode_field(fields[2]);
        r.exif_artist = detail::decode_field(fields[3]);
        r.dqt_fingerprint = detail::decode_field(fields[4]);
        r.sample_count = detail::parse_int(fields[5]);
        r.first_seen = detail::parse_int(fields[6]);
        r.last_seen = detail::parse_int(fields[7]);
        if (!r.exif_software && !r.exif_artist && !r.dqt_fingerprint)
          raise(Errc::MalformedSnapshot, "exifdqt row with no evidence");
        if (!db.find_editor(r.editor_id))
          raise(Errc::MalformedSnapshot, "exifdqt references unknown editor");
        db.exif_dqt_.push_back(std::move(r));
      } else if (tag == "filesig") {
        if (fields.size() != 4) raise(Errc::MalformedSnapshot, "filesig arity");
        EditorSignatureEntry s;
        s.editor_id = detail::parse_int(fields[1]);
        auto sig = detail::decode_field(fields[2]);
        if (!sig || sig->empty())
          raise(Errc::MalformedSnapshot, "filesig without a signature");
        s.filename_signature = *sig;
        s.pattern_name = detail::decode_field(fields[3]).value_or("");
        if (!db.find_editor(s.editor_id))
          raise(Errc::MalformedSnapshot, "filesig references unknown editor");
        db.signatures_.push_back(std::move(s));
      } else {
        raise(Errc::MalformedSnapshot, "unknown record tag: " + tag);
      }
    }
    return db;
  }

  // Content digest of the canonical snapshot text; reports carry it for
  // chain-of-custody reproducibility.
  std::string content_digest() const { return md5_hex(export_snapshot_text()); }

  static ReferenceDb load_file(const std::filesystem::path& path) {
    if (!std::filesystem::exists(path)) return ReferenceDb{};
    const auto bytes = io::read_file(path);
    return import_snapshot(std::string(bytes.begin(), bytes.end()));
  }

  void save_file(const std::filesystem::path& path) const {
    const std::string text = export_snapshot_text();
    io::write_file(path, ByteSpan(reinterpret_cast<const std::uint8_t*>(text.data()),
                                  text.size()));
  }

 private:
  void upsert_exif_dqt(std::int64_t editor_id,
                       const std::optional<std::string>& software,
                       const std::optional<std::string>& artist,
                       const std::optional<std::string>& fingerprint,
                       std::int64_t now) {
    for (auto& row : exif_dqt_) {
      if (row.editor_id == editor_id && row.exif_software == software &&
          row.exif_artist == artist && row.dqt_fingerprint == fingerprint) {
        ++row.sample_count;
        row.last_seen = std::max(row.last_seen, now);
        return;
      }
    }
    ExifDqtEntry row;
    row.editor_id = editor_id;
    row.exif_software = software;
    row.exif_artist = artist;
    row.dqt_fingerprint = fingerprint;
    row.sample_count = 1;
    row.first_seen = row.last_seen = now;
    exif_dqt_.push_back(std::move(row));
  }

  bool upsert_signature(std::int64_t editor_id, const std::string& signature,
                        const std::string& pattern_name) {
    for (const auto& s : signatures_)
      if (s.editor_id == editor_id && s.filename_signature == signature &&
          s.pattern_name == pattern_name)
        return false;
    signatures_.push_back({editor_id, signature, pattern_name});
    return true;
  }

  std::vector<ImageEditor> editors_;
  std::vector<ExifDqtEntry> exif_dqt_;
  std::vector<EditorSignatureEntry> signatures_;
  std::int64_t next_editor_id_ = 1;
};

}  // namespace imgtrace::refdb
