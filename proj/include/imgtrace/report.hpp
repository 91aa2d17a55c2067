// Copyright 2026 The imgtrace Authors
//
// Licensed under the Apache License, Version 2.0 (the "License"); you may not
// use this file except in compliance with the License. You may obtain a copy
// of the License at https://www.apache.org/licenses/LICENSE-2.0

#pragma once

// Report serialization. The JSON schemas are versioned ("imgtrace-report/1",
// "imgtrace-scan/1") and the emitters/parsers here are the contract: parsing
// an emitted report and re-emitting it reproduces the same document. Text
// rendering orders evidence by strength for human reading.

#include <json.hpp>

#include <sstream>
#include <string>
#include <vector>

#include "imgtrace/artifact_scanner.hpp"
#include "imgtrace/pipeline.hpp"
#include "imgtrace/reference_db.hpp"
#include "imgtrace/version.hpp"

namespace imgtrace::report {

using nlohmann::json;

// ---------------------------------------------------------------------------
// Image verdicts

inline json timestamp_to_json(const fname::Timestamp& ts) {
  json j = json::object();
  if (ts.year >= 0) j["year"] = ts.year;
  if (ts.month >= 0) j["month"] = ts.month;
  if (ts.day >= 0) j["day"] = ts.day;
  if (ts.hour >= 0) j["hour"] = ts.hour;
  if (ts.minute >= 0) j["minute"] = ts.minute;
  if (ts.second >= 0) j["second"] = ts.second;
  if (ts.millisecond >= 0) j["millisecond"] = ts.millisecond;
  return j;
}

inline fname::Timestamp timestamp_from_json(const json& j) {
  fname::Timestamp ts;
  ts.year = j.value("year", -1);
  ts.month = j.value("month", -1);
  ts.day = j.value("day", -1);
  ts.hour = j.value("hour", -1);
  ts.minute = j.value("minute", -1);
  ts.second = j.value("second", -1);
  ts.millisecond = j.value("millisecond", -1);
  return ts;
}

inline json to_json(const pipeline::ImageVerdict& v) {
  json j;
  j["target"] = v.target;
  j["verdict"] = pipeline::verdict_name(v.verdict);

  json s1;
  switch (v.stage1.format) {
    case io::SniffedFormat::Jpeg: s1["format"] = "jpeg"; break;
    case io::SniffedFormat::Png: s1["format"] = "png"; break;
    case io::SniffedFormat::Unknown: s1["format"] = "unknown"; break;
  }
  if (v.stage1.exif_signature) {
    if (v.stage1.exif_signature->software)
      s1["exif_software"] = *v.stage1.exif_signature->software;
    if (v.stage1.exif_signature->artist)
      s1["exif_artist"] = *v.stage1.exif_signature->artist;
  }
  if (v.stage1.dqt_fingerprint) s1["dqt_fingerprint"] = *v.stage1.dqt_fingerprint;
  if (v.stage1.thumbnail_dqt_fingerprint)
    s1["thumbnail_dqt_fingerprint"] = *v.stage1.thumbnail_dqt_fingerprint;
  s1["progressive"] = v.stage1.progressive;
  s1["missing_eoi"] = v.stage1.missing_eoi;
  s1["trailer_bytes"] = v.stage1.trailer_bytes;
  s1["filename_matches"] = json::array();
  for (const auto& m : v.stage1.filename_matches) {
    json jm;
    jm["editor"] = m.editor_name;
    jm["pattern"] = m.pattern_name;
    jm["strength"] =
        m.strength == fname::MatchStrength::Signature ? "signature" : "structural";
    if (m.extracted_datetime) {
      jm["datetime"] = timestamp_to_json(*m.extracted_datetime);
      jm["datetime_display"] = m.extracted_datetime->to_string();
    }
    if (m.extracted_original_name) jm["original_name"] = *m.extracted_original_name;
    if (m.db_signature) jm["signature"] = *m.db_signature;
    s1["filename_matches"].push_back(jm);
  }
  s1["candidates"] = json::array();
  for (const auto& c : v.stage1.lookup.candidates) {
    json jc;
    jc["editor"] = c.editor_name;
    jc["version"] = c.editor_version;
    jc["kind"] = refdb::evidence_kind_name(c.kind);
    jc["sample_count"] = c.sample_count;
    jc["shared"] = c.shared;
    s1["candidates"].push_back(jc);
  }
  j["stage1"] = s1;

  json s2;
  s2["ran"] = v.stage2.ran;
  if (!v.stage2.ran) s2["skip_reason"] = v.stage2.skip_reason;
  s2["region_score"] = v.stage2.region_score;
  s2["mean_heat"] = v.stage2.mean_heat;
  s2["indicates"] = v.stage2.indicates;
  s2["analyses"] = json::array();
  for (const auto& a : v.stage2.analyses) {
    json ja;
    ja["name"] = a.name;
    ja["region_score"] = a.region_score;
    ja["region_mean_heat"] = a.region_mean_heat;
    ja["mean_heat"] = a.mean_heat;
    ja["threshold"] = a.threshold_used;
    if (!a.heatmap_path.empty()) ja["heatmap"] = a.heatmap_path;
    s2["analyses"].push_back(ja);
  }
  j["stage2"] = s2;

  j["rationale"] = json::array();
  for (const auto& r : v.rationale)
    j["rationale"].push_back(json{{"kind", r.kind}, {"detail", r.detail}});
  return j;
}

inline pipeline::ImageVerdict image_verdict_from_json(const json& j) {
  pipeline::ImageVerdict v;
  v.target = j.at("target").get<std::string>();
  const std::string verdict = j.at("verdict").get<std::string>();
  if (verdict == "manipulation-indicated")
    v.verdict = pipeline::Verdict::ManipulationIndicated;
  else if (verdict == "inconclusive")
    v.verdict = pipeline::Verdict::Inconclusive;
  else
    v.verdict = pipeline::Verdict::NoSignal;

  const json& s1 = j.at("stage1");
  const std::string format = s1.at("format").get<std::string>();
  v.stage1.format = format == "jpeg" ? io::SniffedFormat::Jpeg
                    : format == "png" ? io::SniffedFormat::Png
                                      : io::SniffedFormat::Unknown;
  if (s1.contains("exif_software") || s1.contains("exif_artist")) {
    exif::EditorExifSignature sig;
    if (s1.contains("exif_software"))
      sig.software = s1.at("exif_software").get<std::string>();
    if (s1.contains("exif_artist"))
      sig.artist = s1.at("exif_artist").get<std::string>();
    v.stage1.exif_signature = sig;
  }
  if (s1.contains("dqt_fingerprint"))
    v.stage1.dqt_fingerprint = s1.at("dqt_fingerprint").get<std::string>();
  if (s1.contains("thumbnail_dqt_fingerprint"))
    v.stage1.thumbnail_dqt_fingerprint =
        s1.at("thumbnail_dqt_fingerprint").get<std::string>();
  v.stage1.progressive = s1.at("progressive").get<bool>();
  v.stage1.missing_eoi = s1.at("missing_eoi").get<bool>();
  v.stage1.trailer_bytes = s1.at("trailer_bytes").get<std::uint64_t>();
  for (const auto& jm : s1.at("filename_matches")) {
    fname::FilenameMatch m;
    m.editor_name = jm.at("editor").get<std::string>();
    m.pattern_name = jm.at("pattern").get<std::string>();
    m.strength = jm.at("strength").get<std::string>() == "signature"
                     ? fname::MatchStrength::Signature
                     : fname::MatchStrength::Structural;
    if (jm.contains("datetime"))
      m.extracted_datetime = timestamp_from_json(jm.at("datetime"));
    if (jm.contains("original_name"))
      m.extracted_original_name = jm.at("original_name").get<std::string>();
    if (jm.contains("signature"))
      m.db_signature = jm.at("signature").get<std::string>();
    v.stage1.filename_matches.push_back(std::move(m));
  }
  for (const auto& jc : s1.at("candidates")) {
    refdb::LookupCandidate c;
    c.editor_name = jc.at("editor").get<std::string>();
    c.editor_version = jc.at("version").get<std::string>();
    const std::string kind = jc.at("kind").get<std::string>();
    c.kind = kind == "exif" ? refdb::EvidenceKind::Exif
             : kind == "filename" ? refdb::EvidenceKind::Filename
                                  : refdb::EvidenceKind::Dqt;
    c.sample_count = jc.at("sample_count").get<std::int64_t>();
    c.shared = jc.at("shared").get<bool>();
    v.stage1.lookup.candidates.push_back(std::move(c));
  }

  const json& s2 = j.at("stage2");
  v.stage2.ran = s2.at("ran").get<bool>();
  if (s2.contains("skip_reason"))
    v.stage2.skip_reason = s2.at("skip_reason").get<std::string>();
  v.stage2.region_score = s2.at("region_score").get<double>();
  v.stage2.mean_heat = s2.at("mean_heat").get<double>();
  v.stage2.indicates = s2.at("indicates").get<bool>();
  for (const auto& ja : s2.at("analyses")) {
    pipeline::Stage2Analysis a;
    a.name = ja.at("name").get<std::string>();
    a.region_score = ja.at("region_score").get<double>();
    a.region_mean_heat = ja.at("region_mean_heat").get<double>();
    a.mean_heat = ja.at("mean_heat").get<double>();
    a.threshold_used = ja.at("threshold").get<double>();
    if (ja.contains("heatmap")) a.heatmap_path = ja.at("heatmap").get<std::string>();
    v.stage2.analyses.push_back(std::move(a));
  }

  for (const auto& jr : j.at("rationale"))
    v.rationale.push_back(
        {jr.at("kind").get<std::string>(), jr.at("detail").get<std::string>()});
  return v;
}

inline json db_info(const refdb::ReferenceDb& db) {
  json j;
  j["digest"] = db.content_digest();
  j["editors"] = db.editors().size();
  j["exif_dqt_rows"] = db.exif_dqt_entries().size();
  j["signature_rows"] = db.signature_entries().size();
  return j;
}

inline json image_report(const std::vector<pipeline::ImageVerdict>& verdicts,
                         const refdb::ReferenceDb& db) {
  json j;
  j["schema"] = kReportSchema;
  j["tool_version"] = kToolVersion;
  j["db"] = db_info(db);
  j["images"] = json::array();
  for (const auto& v : verdicts) j["images"].push_back(to_json(v));
  return j;
}

inline std::string render_image_report_text(
    const std::vector<pipeline::ImageVerdict>& verdicts,
    const refdb::ReferenceDb& db) {
  std::ostringstream out;
  out << "imgtrace " << kToolVersion << " | reference db " << db.content_digest()
      << " (" << db.editors().size() << " editors)\n";
  for (const auto& v : verdicts) {
    out << "\n" << v.target << ": " << pipeline::verdict_name(v.verdict) << "\n";
    for (const auto& r : v.rationale)
      out << "  [" << r.kind << "] " << r.detail << "\n";
    if (v.stage2.ran)
      for (const auto& a : v.stage2.analyses) {
        out << "  stage2 " << a.name << ": region score " << a.region_score;
        if (!a.heatmap_path.empty()) out << " heatmap " << a.heatmap_path;
        out << "\n";
      }
  }
  return out.str();
}

// ---------------------------------------------------------------------------
// Extraction scan reports

inline json scan_report(const scanner::ExtractionReport& rep, const std::string& root,
                        const refdb::ReferenceDb* db) {
  json j;
  j["schema"] = kScanSchema;
  j["tool_version"] = kToolVersion;
  if (db) j["db"] = db_info(*db);
  j["root"] = root;
  j["packages"] = json::array();
  for (const auto& row : rep.packages) {
    json jp;
    jp["package"] = row.package_name;
    jp["editor"] = row.editor_name;
    json matrix;
    for (const auto& [consideration, present] : row.matrix)
      matrix[scanner::consideration_name(consideration)] = present;
    for (const auto& col : rep.not_evaluated) matrix[col] = "not evaluated";
    jp["matrix"] = matrix;
    j["packages"].push_back(jp);
  }
  j["findings"] = json::array();
  for (const auto& f : rep.findings) {
    json jf;
    jf["package"] = f.package_name;
    jf["kind"] = scanner::artifact_kind_name(f.kind);
    jf["path"] = f.path;
    jf["format"] = scanner::detected_format_name(f.detected_format);
    if (f.recovered_extension) jf["recovered_extension"] = *f.recovered_extension;
    if (f.mtime_epoch_seconds) jf["mtime"] = *f.mtime_epoch_seconds;
    if (!f.notes.empty()) jf["notes"] = f.notes;
    if (!f.fields.empty()) {
      json fields;
      for (const auto& [k, value] : f.fields) fields[k] = value;
      jf["fields"] = fields;
    }
    j["findings"].push_back(jf);
  }
  j["diagnostics"] = rep.diagnostics;
  return j;
}

inline std::string render_scan_report_text(const scanner::ExtractionReport& rep,
                                           const std::string& root) {
  std::ostringstream out;
  out << "imgtrace " << kToolVersion << " | extraction scan of " << root << "\n";
  if (rep.packages.empty()) {
    out << "no known editor packages detected\n";
    return out.str();
  }
  for (const auto& row : rep.packages) {
    out << "\n" << row.editor_name << " (" << row.package_name << ")\n";
    for (const auto& [consideration, present] : row.matrix)
      out << "  " << scanner::consideration_name(consideration) << ": "
          << (present ? "present" : "-") << "\n";
    for (const auto& col : rep.not_evaluated)
      out << "  " << col << ": not evaluated\n";
  }
  out << "\nfindings (" << rep.findings.size() << "):\n";
  for (const auto& f : rep.findings) {
    out << "  " << f.package_name << " " << scanner::artifact_kind_name(f.kind)
        << " " << f.path << " [" << scanner::detected_format_name(f.detected_format);
    if (f.recovered_extension) out << " -> " << *f.recovered_extension;
    out << "]";
    if (!f.notes.empty()) out << " " << f.notes;
    out << "\n";
    for (const auto& [k, value] : f.fields)
      if (k != "line") out << "      " << k << ": " << value << "\n";
  }
  if (!rep.diagnostics.empty()) {
    out << "\ndiagnostics:\n";
    for (const auto& d : rep.diagnostics) out << "  " << d << "\n";
  }
  return out.str();
}

}  // namespace imgtrace::report
