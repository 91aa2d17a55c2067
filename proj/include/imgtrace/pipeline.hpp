// Copyright 2026 The imgtrace Authors
//
// Licensed under the Apache License, Version 2.0 (the "License"); you may not
// use this file except in compliance with the License. You may obtain a copy
// of the License at https://www.apache.org/licenses/LICENSE-2.0

#pragma once

// Per-image orchestration: stage 1 (metadata vs reference DB) always runs;
// stage 2 (pixel analyses) runs when the baseline codec can decode the file.
// Evidence combines by a documented, non-normative priority: exif match >
// filename match > dqt match > stage-2 region score. The pipeline never
// claims an image is original: absence of evidence is "no-signal".

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "imgtrace/artifact_scanner.hpp"
#include "imgtrace/codec.hpp"
#include "imgtrace/exif.hpp"
#include "imgtrace/filename_sig.hpp"
#include "imgtrace/image_io.hpp"
#include "imgtrace/jpeg_segments.hpp"
#include "imgtrace/pixel_analysis.hpp"
#include "imgtrace/reference_db.hpp"
#include "imgtrace/version.hpp"

namespace imgtrace::pipeline {

enum class Verdict { ManipulationIndicated, Inconclusive, NoSignal };

inline const char* verdict_name(Verdict v) {
  switch (v) {
    case Verdict::ManipulationIndicated: return "manipulation-indicated";
    case Verdict::Inconclusive: return "inconclusive";
    case Verdict::NoSignal: return "no-signal";
  }
  return "?";
}

struct AnalysisOptions {
  int ela_quality = 95;
  double ela_amplification = 20.0;
  int median_window = 3;
  // Stage-2 indication: ELA Otsu-region score >= threshold AND whole-map
  // mean heat >= min_mean_heat. The ratio alone saturates on near-flat
  // heatmaps (outside-mean goes to zero on any once-compressed image), so an
  // absolute floor keeps pristine inputs quiet.
  double stage2_score_threshold = 1.5;
  double stage2_min_mean_heat = 4.0;
  bool run_stage2 = true;
  std::optional<std::filesystem::path> heatmap_dir;
  codec::DecodeLimits decode_limits;
};

struct Stage1Evidence {
  io::SniffedFormat format = io::SniffedFormat::Unknown;
  std::optional<exif::EditorExifSignature> exif_signature;
  std::optional<std::string> dqt_fingerprint;
  std::optional<std::string> thumbnail_dqt_fingerprint;  // kept separate
  std::vector<fname::FilenameMatch> filename_matches;
  refdb::LookupResult lookup;
  bool progressive = false;
  bool missing_eoi = false;
  std::uint64_t trailer_bytes = 0;
};

struct Stage2Analysis {
  std::string name;  // "ela", "noise", "luminance-gradient", "pca"
  double region_score = 0.0;
  double region_mean_heat = 0.0;  // mean heat inside the Otsu mask
  double mean_heat = 0.0;         // mean heat over the whole map
  double threshold_used = 0.0;
  std::string heatmap_path;  // written artifact, when requested
};

struct Stage2Evidence {
  bool ran = false;
  std::string skip_reason;
  std::vector<Stage2Analysis> analyses;
  // The stage-2 region score used for the verdict is the ELA one.
  double region_score = 0.0;
  double mean_heat = 0.0;
  bool indicates = false;
};

struct EvidenceItem {
  std::string kind;    // "exif-match", "filename-match", "dqt-match",
                       // "stage2", "signal", "diagnostic"
  std::string detail;

  bool operator==(const EvidenceItem&) const = default;
};

struct ImageVerdict {
  std::string target;
  Stage1Evidence stage1;
  Stage2Evidence stage2;
  Verdict verdict = Verdict::NoSignal;
  std::vector<EvidenceItem> rationale;
};

namespace detail {

inline std::string basename_of(const std::string& path) {
  return std::filesystem::path(path).filename().string();
}

inline void run_stage2(const ByteVec& bytes, const std::string& stem,
                       const AnalysisOptions& options, Stage2Evidence& out) {
  codec::PixelImage img;
  try {
    img = codec::decode(bytes, options.decode_limits);
  } catch (const Error& e) {
    out.ran = false;
    out.skip_reason = e.what();
    return;
  }
  out.ran = true;

  auto emit = [&](const std::string& name, const analysis::Heatmap& heat) {
    const auto verdict = analysis::verdict_from_heatmap(heat);
    Stage2Analysis a;
    a.name = name;
    a.region_score = verdict.score;
    a.threshold_used = verdict.threshold_used;
    double sum = 0;
    std::size_t n = 0;
    for (std::size_t i = 0; i < heat.values.size(); ++i)
      if (verdict.suspicious_mask[i]) {
        sum += heat.values[i];
        ++n;
      }
    a.region_mean_heat = n ? sum / static_cast<double>(n) : 0.0;
    a.mean_heat = heat.mean();
    if (options.heatmap_dir) {
      std::filesystem::create_directories(*options.heatmap_dir);
      const auto path = *options.heatmap_dir / (stem + "_" + name + ".png");
      io::write_file(path, io::write_png_gray8(heat.width, heat.height,
                                               analysis::heatmap_to_gray8(heat)));
      a.heatmap_path = path.generic_string();
    }
    out.analyses.push_back(a);
    return a;
  };

  const auto ela_entry = emit("ela", analysis::ela(img, options.ela_quality,
                                                   options.ela_amplification));
  out.region_score = ela_entry.region_score;
  out.mean_heat = ela_entry.mean_heat;
  out.indicates = ela_entry.region_score >= options.stage2_score_threshold &&
                  ela_entry.mean_heat >= options.stage2_min_mean_heat;

  try {
    emit("noise", analysis::noise_analysis(img, options.median_window));
  } catch (const Error&) {
    // window larger than a tiny image: skip quietly, ELA already ran
  }
  emit("luminance-gradient", analysis::luminance_gradient(img));
  if (img.color_space == codec::ColorSpace::Rgb) {
    try {
      emit("pca", analysis::pca_projection(img, 1));
    } catch (const Error&) {
      // constant image: degenerate covariance carries no region signal
    }
  }
}

}  // namespace detail

// Core analysis over in-memory bytes; `target` is used for filename matching
// and report labeling.
inline ImageVerdict analyze_bytes(const ByteVec& bytes, const std::string& target,
                                  const refdb::ReferenceDb& db,
                                  const AnalysisOptions& options = {}) {
  ImageVerdict out;
  out.target = target;
  auto& s1 = out.stage1;
  auto diag = [&](const std::string& msg) {
    out.rationale.push_back({"diagnostic", msg});
  };

  s1.format = io::sniff_format(bytes);

  if (s1.format == io::SniffedFormat::Jpeg) {
    try {
      const auto segments = jpeg::parse_segments(bytes);
      s1.missing_eoi = segments.missing_eoi;
      s1.trailer_bytes = segments.trailer_size;
      if (auto frame = jpeg::find_frame_header(segments))
        s1.progressive = frame->progressive() || frame->arithmetic();
      for (const jpeg::Segment* app1 : segments.all(jpeg::MarkerKind::App)) {
        if (app1->marker.index != 1) continue;
        try {
          const auto rec = exif::parse_exif(segments.payload(*app1));
          s1.exif_signature = exif::extract_editor_signature(rec);
          std::string thumb_diag;
          if (auto thumb = exif::extract_thumbnail_dqt(rec, &thumb_diag))
            s1.thumbnail_dqt_fingerprint = jpeg::dqt_fingerprint(*thumb);
          else if (!thumb_diag.empty())
            diag(thumb_diag);
        } catch (const Error& e) {
          diag(std::string("exif: ") + e.what());
        }
        break;
      }
      try {
        s1.dqt_fingerprint = jpeg::dqt_fingerprint(jpeg::extract_dqt(segments));
      } catch (const Error& e) {
        diag(std::string("dqt: ") + e.what());
      }
    } catch (const Error& e) {
      diag(std::string("segments: ") + e.what());
    }
  } else if (s1.format == io::SniffedFormat::Unknown) {
    diag("content is neither JPEG nor PNG; filename evidence only");
  }

  s1.filename_matches =
      fname::match_filename(detail::basename_of(target), fname::builtin_matcher());
  s1.lookup = db.lookup(s1.exif_signature, s1.dqt_fingerprint, s1.filename_matches);

  // Stage 2
  if (!options.run_stage2) {
    out.stage2.skip_reason = "disabled by options";
  } else if (s1.format != io::SniffedFormat::Jpeg) {
    out.stage2.skip_reason = "not a JPEG stream; pixel analyses need the baseline codec";
  } else {
    std::string stem = std::filesystem::path(target).stem().string();
    if (stem.empty()) stem = "image";
    detail::run_stage2(bytes, stem, options, out.stage2);
  }

  // Rationale, ordered by the documented evidence priority.
  for (const auto& cand : s1.lookup.candidates) {
    std::string kind;
    switch (cand.kind) {
      case refdb::EvidenceKind::Exif: kind = "exif-match"; break;
      case refdb::EvidenceKind::Filename: kind = "filename-match"; break;
      case refdb::EvidenceKind::Dqt: kind = "dqt-match"; break;
    }
    out.rationale.push_back(
        {kind, cand.editor_name + " " + cand.editor_version + " (samples " +
                   std::to_string(cand.sample_count) +
                   (cand.shared ? ", fingerprint shared across editors)" : ")")});
  }
  if (out.stage2.ran) {
    out.rationale.push_back(
        {"stage2", "ela region score " + std::to_string(out.stage2.region_score) +
                       ", mean heat " + std::to_string(out.stage2.mean_heat) +
                       (out.stage2.indicates ? " (above thresholds)"
                                             : " (below thresholds)")});
  } else {
    out.rationale.push_back({"stage2", "skipped: " + out.stage2.skip_reason});
  }
  if (s1.exif_signature && s1.lookup.empty()) {
    std::string text = "exif signature present but not in reference DB:";
    if (s1.exif_signature->software) text += " software=" + *s1.exif_signature->software;
    if (s1.exif_signature->artist) text += " artist=" + *s1.exif_signature->artist;
    out.rationale.push_back({"signal", text});
  }
  for (const auto& m : s1.filename_matches) {
    bool matched_in_db = false;
    for (const auto& cand : s1.lookup.candidates)
      if (cand.kind == refdb::EvidenceKind::Filename &&
          cand.editor_name == m.editor_name)
        matched_in_db = true;
    if (!matched_in_db)
      out.rationale.push_back(
          {"signal", "filename matches " + m.editor_name + " pattern (" +
                         m.pattern_name + ", " +
                         (m.strength == fname::MatchStrength::Signature
                              ? "signature"
                              : "structural") +
                         ") but editor is not in reference DB"});
  }
  if (s1.trailer_bytes > 0)
    out.rationale.push_back(
        {"signal", std::to_string(s1.trailer_bytes) + " trailer bytes after EOI"});
  if (s1.missing_eoi) out.rationale.push_back({"signal", "EOI marker missing"});

  // Verdict
  const bool strong = !s1.lookup.empty() || out.stage2.indicates;
  bool weak = false;
  for (const auto& item : out.rationale)
    if (item.kind == "signal") weak = true;
  out.verdict = strong ? Verdict::ManipulationIndicated
                       : (weak ? Verdict::Inconclusive : Verdict::NoSignal);
  return out;
}

inline ImageVerdict analyze_image(const std::filesystem::path& path,
                                  const refdb::ReferenceDb& db,
                                  const AnalysisOptions& options = {}) {
  const auto bytes = io::read_file(path);  // FileUnreadable on failure
  return analyze_bytes(bytes, path.generic_string(), db, options);
}

}  // namespace imgtrace::pipeline
