// Copyright 2026 The imgtrace Authors
//
// Licensed under the Apache License, Version 2.0 (the "License"); you may not
// use this file except in compliance with the License. You may obtain a copy
// of the License at https://www.apache.org/licenses/LICENSE-2.0

#pragma once

// Scanner over a mounted Android filesystem extraction. Detects editor
// packages by their app-data paths, recovers edited images / masks /
// originals, parses edit logs through named grammars, and carves cached
// images by content signature. Per-app knowledge (package names, artifact
// paths, log line shapes) is data: profiles ship as a structured text format
// with built-in defaults and can be replaced in the field. The scanner only
// ever reads; symlinks are never followed.

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <regex>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "imgtrace/errors.hpp"
#include "imgtrace/exif.hpp"
#include "imgtrace/image_io.hpp"
#include "imgtrace/jpeg_segments.hpp"
#include "imgtrace/reference_db.hpp"

namespace imgtrace::scanner {

namespace fs = std::filesystem;

enum class ArtifactKind { EditedImage, Mask, OriginalImage, EditLog, Cache };

inline const char* artifact_kind_name(ArtifactKind k) {
  switch (k) {
    case ArtifactKind::EditedImage: return "edited-image";
    case ArtifactKind::Mask: return "mask";
    case ArtifactKind::OriginalImage: return "original-image";
    case ArtifactKind::EditLog: return "edit-log";
    case ArtifactKind::Cache: return "cache";
  }
  return "?";
}

enum class ContentRule { JpegSignature, PngSignature, Any, LogGrammar };

enum class DetectedFormat { Jpeg, Png, Text, Unknown };

inline const char* detected_format_name(DetectedFormat f) {
  switch (f) {
    case DetectedFormat::Jpeg: return "JPEG";
    case DetectedFormat::Png: return "PNG";
    case DetectedFormat::Text: return "text";
    case DetectedFormat::Unknown: return "unknown";
  }
  return "?";
}

struct ArtifactRule {
  ArtifactKind kind = ArtifactKind::EditedImage;
  std::string path_template;  // extraction-relative, {package_name} placeholder
  ContentRule content = ContentRule::Any;
  std::string log_grammar;  // content == LogGrammar
  std::string note;
};

struct PackageProfile {
  std::string package_name;
  std::string editor_name;
  std::vector<std::string> probe_paths = {
      "data/data/{package_name}",
      "storage/emulated/0/Android/data/{package_name}",
  };
  std::vector<ArtifactRule> artifact_rules;
};

struct LogGrammar {
  std::string name;
  std::vector<std::string> fields;  // one per capture group
  std::string line_pattern;         // ECMAScript regex over a full line
};

struct ArtifactFinding {
  std::string package_name;
  ArtifactKind kind = ArtifactKind::EditedImage;
  std::string path;  // extraction-relative, '/'-separated
  DetectedFormat detected_format = DetectedFormat::Unknown;
  std::optional<std::string> recovered_extension;
  std::optional<std::int64_t> mtime_epoch_seconds;
  std::string notes;
  std::map<std::string, std::string> fields;  // log fields, stage-1 results
};

struct PackageHit {
  PackageProfile profile;
  std::vector<std::string> present_paths;
};

enum class Consideration {
  EditedImage,
  ManipulatedRegion,
  OriginalImage,
  EditLogs,
  ImageCaching,
};

inline const char* consideration_name(Consideration c) {
  switch (c) {
    case Consideration::EditedImage: return "edited image";
    case Consideration::ManipulatedRegion: return "manipulated region";
    case Consideration::OriginalImage: return "original image";
    case Consideration::EditLogs: return "edit logs";
    case Consideration::ImageCaching: return "image caching";
  }
  return "?";
}

inline Consideration consideration_of(ArtifactKind k) {
  switch (k) {
    case ArtifactKind::EditedImage: return Consideration::EditedImage;
    case ArtifactKind::Mask: return Consideration::ManipulatedRegion;
    case ArtifactKind::OriginalImage: return Consideration::OriginalImage;
    case ArtifactKind::EditLog: return Consideration::EditLogs;
    case ArtifactKind::Cache: return Consideration::ImageCaching;
  }
  return Consideration::EditedImage;
}

struct ExtractionReport {
  struct PackageRow {
    std::string package_name;
    std::string editor_name;
    std::map<Consideration, bool> matrix;
  };
  std::vector<PackageRow> packages;
  std::vector<ArtifactFinding> findings;
  std::vector<std::string> diagnostics;
  // Columns the toolkit deliberately does not evaluate (OS-level databases).
  std::vector<std::string> not_evaluated = {"account info", "installation time",
                                            "recent usage time"};
};

// ---------------------------------------------------------------------------
// Helpers

namespace detail {

inline std::string substitute(const std::string& tmpl, const std::string& pkg) {
  std::string out = tmpl;
  const std::string ph = "{package_name}";
  for (std::size_t pos = out.find(ph); pos != std::string::npos; pos = out.find(ph))
    out.replace(pos, ph.size(), pkg);
  return out;
}

inline DetectedFormat sniff_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) return DetectedFormat::Unknown;
  std::array<char, 512> head{};
  in.read(head.data(), head.size());
  const std::streamsize n = in.gcount();
  if (n <= 0) return DetectedFormat::Unknown;
  ByteSpan span(reinterpret_cast<const std::uint8_t*>(head.data()),
                static_cast<std::size_t>(n));
  switch (io::sniff_format(span)) {
    case io::SniffedFormat::Jpeg: return DetectedFormat::Jpeg;
    case io::SniffedFormat::Png: return DetectedFormat::Png;
    case io::SniffedFormat::Unknown: break;
  }
  for (std::streamsize i = 0; i < n; ++i) {
    const unsigned char c = static_cast<unsigned char>(head[i]);
    if (c != '\n' && c != '\r' && c != '\t' && (c < 0x20 || c > 0x7E))
      return DetectedFormat::Unknown;
  }
  return DetectedFormat::Text;
}

inline std::optional<std::int64_t> file_mtime(const fs::path& p) {
  std::error_code ec;
  const auto t = fs::last_write_time(p, ec);
  if (ec) return std::nullopt;
  const auto sys = std::chrono::file_clock::to_sys(t);
  return std::chrono::duration_cast<std::chrono::seconds>(sys.time_since_epoch())
      .count();
}

// Regular files under `dir` (recursively), sorted by path for determinism.
// Symlinks are not followed.
inline std::vector<fs::path> files_under(const fs::path& dir) {
  std::vector<fs::path> out;
  std::error_code ec;
  if (!fs::exists(fs::symlink_status(dir, ec))) return out;
  if (fs::is_symlink(fs::symlink_status(dir, ec))) return out;
  if (fs::is_regular_file(dir, ec)) {
    out.push_back(dir);
    return out;
  }
  fs::recursive_directory_iterator it(
      dir, fs::directory_options::skip_permission_denied, ec);
  if (ec) return out;
  for (auto end = fs::recursive_directory_iterator(); it != end; ++it) {
    if (it->is_symlink(ec)) {
      it.disable_recursion_pending();
      continue;
    }
    if (it->is_regular_file(ec)) out.push_back(it->path());
  }
  std::sort(out.begin(), out.end());
  return out;
}

inline std::string relative_generic(const fs::path& p, const fs::path& root) {
  std::error_code ec;
  const fs::path rel = fs::relative(p, root, ec);
  return ec ? p.generic_string() : rel.generic_string();
}

// Stage-1 cross-link for a carved/recovered JPEG: fingerprint, Exif
// signature and, when a reference DB is supplied, its candidates.
inline void attach_stage1(ArtifactFinding& finding, const fs::path& file,
                          const refdb::ReferenceDb* db) {
  try {
    const auto bytes = io::read_file(file);
    const auto segments = jpeg::parse_segments(bytes);
    std::optional<std::string> fp;
    try {
      fp = jpeg::dqt_fingerprint(jpeg::extract_dqt(segments));
      finding.fields["dqt_fingerprint"] = *fp;
    } catch (const Error&) {
    }
    std::optional<exif::EditorExifSignature> sig;
    for (const jpeg::Segment* app1 : segments.all(jpeg::MarkerKind::App)) {
      if (app1->marker.index != 1) continue;
      try {
        sig = exif::extract_editor_signature(exif::parse_exif(segments.payload(*app1)));
      } catch (const Error&) {
      }
      break;
    }
    if (sig) {
      if (sig->software) finding.fields["exif_software"] = *sig->software;
      if (sig->artist) finding.fields["exif_artist"] = *sig->artist;
    }
    if (db) {
      const auto result = db->lookup(sig, fp, {});
      if (!result.empty()) {
        std::string cands;
        for (const auto& c : result.candidates) {
          if (!cands.empty()) cands += "; ";
          cands += c.editor_name + " " + c.editor_version + " (" +
                   refdb::evidence_kind_name(c.kind) + (c.shared ? ", shared" : "") +
                   ")";
        }
        finding.fields["reference_db_candidates"] = cands;
        finding.notes += finding.notes.empty() ? "" : "; ";
        finding.notes += "reference DB candidates: " + cands;
      }
    }
  } catch (const Error&) {
    // unreadable or unparseable: the sniffed format already tells the story
  }
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Operations

inline std::vector<PackageHit> detect_packages(
    const fs::path& root, const std::vector<PackageProfile>& profiles) {
  std::error_code ec;
  if (!fs::exists(root, ec) || !fs::is_directory(root, ec))
    raise(Errc::RootNotFound, "extraction root not found: " + root.string());
  std::vector<PackageHit> hits;
  for (const auto& profile : profiles) {
    PackageHit hit;
    hit.profile = profile;
    for (const auto& tmpl : profile.probe_paths) {
      const fs::path p = root / detail::substitute(tmpl, profile.package_name);
      if (fs::exists(fs::symlink_status(p, ec)) && fs::is_directory(p, ec))
        hit.present_paths.push_back(detail::relative_generic(p, root));
    }
    if (!hit.present_paths.empty()) hits.push_back(std::move(hit));
  }
  return hits;
}

inline std::vector<ArtifactFinding> carve_cache(
    const fs::path& root, const PackageProfile& profile,
    const refdb::ReferenceDb* db = nullptr) {
  std::vector<ArtifactFinding> findings;
  for (const auto& rule : profile.artifact_rules) {
    if (rule.kind != ArtifactKind::Cache) continue;
    const fs::path dir =
        root / detail::substitute(rule.path_template, profile.package_name);
    for (const fs::path& file : detail::files_under(dir)) {
      const std::string name = file.filename().string();
      const bool dot_zero = name.size() > 2 && name.ends_with(".0");
      const bool extensionless = name.find('.') == std::string::npos;
      if (!dot_zero && !extensionless) continue;

      ArtifactFinding f;
      f.package_name = profile.package_name;
      f.kind = ArtifactKind::Cache;
      f.path = detail::relative_generic(file, root);
      f.detected_format = detail::sniff_file(file);
      f.mtime_epoch_seconds = detail::file_mtime(file);
      f.notes = rule.note;
      if (f.detected_format == DetectedFormat::Jpeg) {
        f.recovered_extension = ".jpg";
        detail::attach_stage1(f, file, db);
      } else if (f.detected_format == DetectedFormat::Png) {
        f.recovered_extension = ".png";
      }
      findings.push_back(std::move(f));
    }
  }
  return findings;
}

inline std::vector<ArtifactFinding> recover_artifacts(
    const fs::path& root, const PackageProfile& profile,
    const refdb::ReferenceDb* db = nullptr) {
  std::vector<ArtifactFinding> findings;
  for (const auto& rule : profile.artifact_rules) {
    if (rule.kind == ArtifactKind::Cache || rule.kind == ArtifactKind::EditLog)
      continue;
    const fs::path dir =
        root / detail::substitute(rule.path_template, profile.package_name);
    for (const fs::path& file : detail::files_under(dir)) {
      const DetectedFormat format = detail::sniff_file(file);
      if (rule.content == ContentRule::JpegSignature && format != DetectedFormat::Jpeg)
        continue;
      if (rule.content == ContentRule::PngSignature && format != DetectedFormat::Png)
        continue;
      ArtifactFinding f;
      f.package_name = profile.package_name;
      f.kind = rule.kind;
      f.path = detail::relative_generic(file, root);
      f.detected_format = format;
      f.mtime_epoch_seconds = detail::file_mtime(file);
      f.notes = rule.note;
      if (format == DetectedFormat::Jpeg) detail::attach_stage1(f, file, db);
      findings.push_back(std::move(f));
    }
  }
  return findings;
}

inline std::vector<ArtifactFinding> parse_edit_logs(
    const fs::path& root, const PackageProfile& profile,
    const std::vector<LogGrammar>& grammars,
    std::vector<std::string>* diagnostics = nullptr) {
  auto diag = [&](const std::string& msg) {
    if (diagnostics) diagnostics->push_back(msg);
  };
  std::vector<ArtifactFinding> findings;
  for (const auto& rule : profile.artifact_rules) {
    if (rule.kind != ArtifactKind::EditLog) continue;
    const LogGrammar* grammar = nullptr;
    for (const auto& g : grammars)
      if (g.name == rule.log_grammar) grammar = &g;
    if (!grammar) {
      diag(profile.package_name + ": unknown log grammar " + rule.log_grammar);
      continue;
    }
    const std::regex re(grammar->line_pattern);
    const fs::path dir =
        root / detail::substitute(rule.path_template, profile.package_name);
    for (const fs::path& file : detail::files_under(dir)) {
      std::ifstream in(file);
      if (!in) continue;
      std::string line;
      std::size_t line_no = 0, matched = 0;
      while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::smatch m;
        if (!std::regex_match(line, m, re)) {
          diag(detail::relative_generic(file, root) + ":" + std::to_string(line_no) +
               ": line does not match grammar " + grammar->name);
          continue;
        }
        ++matched;
        ArtifactFinding f;
        f.package_name = profile.package_name;
        f.kind = ArtifactKind::EditLog;
        f.path = detail::relative_generic(file, root);
        f.detected_format = DetectedFormat::Text;
        f.mtime_epoch_seconds = detail::file_mtime(file);
        f.notes = rule.note.empty() ? ("grammar " + grammar->name)
                                    : rule.note + "; grammar " + grammar->name;
        f.fields["line"] = std::to_string(line_no);
        for (std::size_t g = 0; g < grammar->fields.size() && g + 1 < m.size(); ++g)
          f.fields[grammar->fields[g]] = m[g + 1].str();
        findings.push_back(std::move(f));
      }
      if (matched == 0 && line_no == 0)
        diag(detail::relative_generic(file, root) + ": empty log file");
    }
  }
  return findings;
}

// ---------------------------------------------------------------------------
// Built-in profiles (the 11 supported editors) and log grammars

inline const std::string& builtin_profile_text();

inline std::pair<std::vector<PackageProfile>, std::vector<LogGrammar>>
parse_profile_file(const std::string& text) {
  std::vector<PackageProfile> profiles;
  std::vector<LogGrammar> grammars;
  std::istringstream in(text);
  std::string line;
  bool saw_header = false;
  auto find_profile = [&](const std::string& pkg) -> PackageProfile* {
    for (auto& p : profiles)
      if (p.package_name == pkg) return &p;
    return nullptr;
  };
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    if (!saw_header) {
      if (line != "imgtrace-profiles 1")
        raise(Errc::InvalidArgument, "profile file header missing or unsupported");
      saw_header = true;
      continue;
    }
    std::vector<std::string> f;
    std::size_t start = 0;
    // loggrammar rows keep their last field verbatim (regexes contain '|')
    const bool is_grammar = line.rfind("loggrammar|", 0) == 0;
    const std::size_t max_fields = is_grammar ? 4 : std::string::npos;
    while (start <= line.size()) {
      if (f.size() + 1 == max_fields) {
        f.push_back(line.substr(start));
        break;
      }
      const std::size_t bar = line.find('|', start);
      if (bar == std::string::npos) {
        f.push_back(line.substr(start));
        break;
      }
      f.push_back(line.substr(start, bar - start));
      start = bar + 1;
    }
    if (f[0] == "package") {
      if (f.size() != 3) raise(Errc::InvalidArgument, "package arity: " + line);
      PackageProfile p;
      p.package_name = f[1];
      p.editor_name = f[2];
      profiles.push_back(std::move(p));
    } else if (f[0] == "rule") {
      if (f.size() != 6) raise(Errc::InvalidArgument, "rule arity: " + line);
      PackageProfile* p = find_profile(f[1]);
      if (!p) raise(Errc::InvalidArgument, "rule for unknown package: " + f[1]);
      ArtifactRule r;
      if (f[2] == "edited") r.kind = ArtifactKind::EditedImage;
      else if (f[2] == "mask") r.kind = ArtifactKind::Mask;
      else if (f[2] == "original") r.kind = ArtifactKind::OriginalImage;
      else if (f[2] == "log") r.kind = ArtifactKind::EditLog;
      else if (f[2] == "cache") r.kind = ArtifactKind::Cache;
      else raise(Errc::InvalidArgument, "unknown artifact kind: " + f[2]);
      r.path_template = f[3];
      if (f[4] == "jpeg") r.content = ContentRule::JpegSignature;
      else if (f[4] == "png") r.content = ContentRule::PngSignature;
      else if (f[4] == "any") r.content = ContentRule::Any;
      else if (f[4].rfind("log:", 0) == 0) {
        r.content = ContentRule::LogGrammar;
        r.log_grammar = f[4].substr(4);
      } else {
        raise(Errc::InvalidArgument, "unknown content rule: " + f[4]);
      }
      r.note = f[5];
      p->artifact_rules.push_back(std::move(r));
    } else if (f[0] == "loggrammar") {
      if (f.size() != 4) raise(Errc::InvalidArgument, "loggrammar arity: " + line);
      LogGrammar g;
      g.name = f[1];
      std::istringstream names(f[2]);
      std::string n;
      while (std::getline(names, n, ',')) g.fields.push_back(n);
      g.line_pattern = f[3];
      (void)std::regex(g.line_pattern);  // validate early
      grammars.push_back(std::move(g));
    } else {
      raise(Errc::InvalidArgument, "unknown profile record: " + f[0]);
    }
  }
  if (!saw_header)
    raise(Errc::InvalidArgument, "profile file header missing or unsupported");
  return {profiles, grammars};
}

inline const std::string& builtin_profile_text() {
  static const std::string text = R"(imgtrace-profiles 1
# Packages of the 11 supported editors and their artifact rules. Paths are
# extraction-relative defaults validated on repo fixtures; field updates for
# new app versions belong here, not in code.
package|com.niksoftware.snapseed|Snapseed
rule|com.niksoftware.snapseed|edited|data/data/{package_name}/cache|jpeg|random-number filename, recovered by JPEG signature; low confidence
rule|com.niksoftware.snapseed|edited|data/data/{package_name}/files|jpeg|random-number filename, recovered by JPEG signature; low confidence
rule|com.niksoftware.snapseed|cache|data/data/{package_name}/cache/image_manager_disk_cache|any|
package|com.mt.mtxx.mtxx|Meitu
rule|com.mt.mtxx.mtxx|edited|storage/emulated/0/Android/data/{package_name}/files|jpeg|private external storage
rule|com.mt.mtxx.mtxx|original|storage/emulated/0/Android/data/{package_name}/files/original|jpeg|private external storage
rule|com.mt.mtxx.mtxx|log|data/data/{package_name}/files/logs|log:meitu_edit_log|
rule|com.mt.mtxx.mtxx|cache|data/data/{package_name}/cache/image_manager_disk_cache|any|
package|vn.remove.photo.content|Remove Unwanted Object
rule|vn.remove.photo.content|cache|data/data/{package_name}/cache/image_manager_disk_cache|any|
package|snapedit.app.remove|SnapEdit
rule|snapedit.app.remove|edited|data/data/{package_name}/files/edited|jpeg|most recent edit only
rule|snapedit.app.remove|mask|data/data/{package_name}/files/mask|any|object-removal mask
rule|snapedit.app.remove|original|data/data/{package_name}/files/original|jpeg|
package|com.adobe.adobephotoshopfix|Adobe Photoshop Fix
rule|com.adobe.adobephotoshopfix|original|data/data/{package_name}/files/original|jpeg|
rule|com.adobe.adobephotoshopfix|log|data/data/{package_name}/files/projects|log:project_log|project-based edits
rule|com.adobe.adobephotoshopfix|cache|data/data/{package_name}/cache/image_manager_disk_cache|any|
package|com.adobe.psmobile|Photoshop Express
rule|com.adobe.psmobile|cache|data/data/{package_name}/cache/image_manager_disk_cache|any|
package|com.sec.android.mimage.photoretouching|Samsung Photo Editor
rule|com.sec.android.mimage.photoretouching|original|data/sec/photoeditor/0/storage/emulated/0/DCIM/Camera|jpeg|pre-edit original kept for Revert
package|bg.remove.android|removebg
rule|bg.remove.android|original|data/data/{package_name}/files/original|any|
package|photoeditor.cutout.backgrounderaser|Background Eraser (Inshot)
rule|photoeditor.cutout.backgrounderaser|edited|storage/emulated/0/Android/data/{package_name}/files|jpeg|most recent edit only; private external storage
rule|photoeditor.cutout.backgrounderaser|original|storage/emulated/0/Android/data/{package_name}/files/original|jpeg|most recent edit only
rule|photoeditor.cutout.backgrounderaser|log|data/data/{package_name}/files/log|log:inshot_edit_log|
rule|photoeditor.cutout.backgrounderaser|cache|data/data/{package_name}/cache/image_manager_disk_cache|any|
package|com.handycloset.android.eraser|Background Eraser (handy)
rule|com.handycloset.android.eraser|original|data/data/{package_name}/files|png|most recent edit only
package|com.kvadgroup.photostudio|Photo Studio
rule|com.kvadgroup.photostudio|edited|data/data/{package_name}/files/projects|jpeg|kept while the project exists
rule|com.kvadgroup.photostudio|mask|data/data/{package_name}/files/projects/mask|any|mask saved as {EditTimeInfo}.jpg
rule|com.kvadgroup.photostudio|log|data/data/{package_name}/files/projects|log:project_log|project-based edits
rule|com.kvadgroup.photostudio|cache|data/data/{package_name}/cache/image_manager_disk_cache|any|
loggrammar|meitu_edit_log|start_time,edited_path,original_filename,edited_filename,function|^(\d{4}-\d{2}-\d{2} \d{2}:\d{2}:\d{2}) save path=(\S+) original=(\S+) edited=(\S+) func=(\S+)$
loggrammar|inshot_edit_log|edited_filename,start_time,save_time|^edited=(\S+) start=(\d{4}-\d{2}-\d{2} \d{2}:\d{2}:\d{2}) saved=(\d{4}-\d{2}-\d{2} \d{2}:\d{2}:\d{2})$
loggrammar|project_log|project,created,modified|^project=(\S+) created=(\d{4}-\d{2}-\d{2} \d{2}:\d{2}:\d{2}) modified=(\d{4}-\d{2}-\d{2} \d{2}:\d{2}:\d{2})$
)";
  return text;
}

inline const std::vector<PackageProfile>& builtin_profiles() {
  static const auto parsed = parse_profile_file(builtin_profile_text());
  return parsed.first;
}

inline const std::vector<LogGrammar>& builtin_log_grammars() {
  static const auto parsed = parse_profile_file(builtin_profile_text());
  return parsed.second;
}

// ---------------------------------------------------------------------------
// Full scan

inline ExtractionReport build_extraction_report(
    const fs::path& root, const refdb::ReferenceDb* db = nullptr,
    const std::vector<PackageProfile>& profiles = builtin_profiles(),
    const std::vector<LogGrammar>& grammars = builtin_log_grammars()) {
  ExtractionReport report;
  const auto hits = detect_packages(root, profiles);
  for (const auto& hit : hits) {
    ExtractionReport::PackageRow row;
    row.package_name = hit.profile.package_name;
    row.editor_name = hit.profile.editor_name;
    for (Consideration c :
         {Consideration::EditedImage, Consideration::ManipulatedRegion,
          Consideration::OriginalImage, Consideration::EditLogs,
          Consideration::ImageCaching})
      row.matrix[c] = false;

    auto absorb = [&](std::vector<ArtifactFinding> batch) {
      for (auto& f : batch) {
        row.matrix[consideration_of(f.kind)] = true;
        report.findings.push_back(std::move(f));
      }
    };
    absorb(recover_artifacts(root, hit.profile, db));
    absorb(carve_cache(root, hit.profile, db));
    absorb(parse_edit_logs(root, hit.profile, grammars, &report.diagnostics));
    report.packages.push_back(std::move(row));
  }
  std::sort(report.packages.begin(), report.packages.end(),
            [](const auto& a, const auto& b) {
              return a.package_name < b.package_name;
            });
  std::sort(report.findings.begin(), report.findings.end(),
            [](const ArtifactFinding& a, const ArtifactFinding& b) {
              if (a.package_name != b.package_name)
                return a.package_name < b.package_name;
              if (a.path != b.path) return a.path < b.path;
              if (a.kind != b.kind) return a.kind < b.kind;
              return a.fields < b.fields;
            });
  return report;
}

}  // namespace imgtrace::scanner
