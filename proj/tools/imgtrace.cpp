// Copyright 2026 The imgtrace Authors
//
// Licensed under the Apache License, Version 2.0 (the "License"); you may not
// use this file except in compliance with the License. You may obtain a copy
// of the License at https://www.apache.org/licenses/LICENSE-2.0

// imgtrace CLI: stage-1/2 image analysis, extraction scanning, and
// reference-DB maintenance. Exit codes: 0 analysis completed (whatever the
// verdict), 1 I/O or data errors, 2 usage errors.

#include <CLI11.hpp>

#include <filesystem>
#include <future>
#include <iostream>
#include <string>
#include <vector>

#include "imgtrace/artifact_scanner.hpp"
#include "imgtrace/errors.hpp"
#include "imgtrace/exif.hpp"
#include "imgtrace/image_io.hpp"
#include "imgtrace/jpeg_segments.hpp"
#include "imgtrace/pipeline.hpp"
#include "imgtrace/reference_db.hpp"
#include "imgtrace/report.hpp"
#include "imgtrace/version.hpp"

namespace fs = std::filesystem;
using namespace imgtrace;

namespace {

struct GlobalOptions {
  std::string db_path = "imgtrace.db";
  std::string report_format = "text";  // text | json
  std::string out_dir;
};

int cmd_analyze(const GlobalOptions& g, const std::vector<std::string>& images,
                pipeline::AnalysisOptions options) {
  const auto db = refdb::ReferenceDb::load_file(g.db_path);
  if (!g.out_dir.empty()) options.heatmap_dir = fs::path(g.out_dir);

  std::vector<std::future<pipeline::ImageVerdict>> futures;
  futures.reserve(images.size());
  for (const auto& image : images)
    futures.push_back(std::async(std::launch::async, [&db, &options, image] {
      return pipeline::analyze_image(image, db, options);
    }));
  std::vector<pipeline::ImageVerdict> verdicts;
  verdicts.reserve(images.size());
  for (auto& f : futures) verdicts.push_back(f.get());

  if (g.report_format == "json")
    std::cout << report::image_report(verdicts, db).dump(2) << "\n";
  else
    std::cout << report::render_image_report_text(verdicts, db);
  return 0;
}

int cmd_scan(const GlobalOptions& g, const std::string& root,
             const std::string& profile_file) {
  const auto db = refdb::ReferenceDb::load_file(g.db_path);
  std::vector<scanner::PackageProfile> profiles = scanner::builtin_profiles();
  std::vector<scanner::LogGrammar> grammars = scanner::builtin_log_grammars();
  if (!profile_file.empty()) {
    const auto bytes = io::read_file(profile_file);
    std::tie(profiles, grammars) =
        scanner::parse_profile_file(std::string(bytes.begin(), bytes.end()));
  }
  const auto rep = scanner::build_extraction_report(root, &db, profiles, grammars);
  if (g.report_format == "json")
    std::cout << report::scan_report(rep, root, &db).dump(2) << "\n";
  else
    std::cout << report::render_scan_report_text(rep, root);
  return 0;
}

int cmd_db_ingest(const GlobalOptions& g, const std::string& dir,
                  const std::string& label) {
  const auto at = label.find('@');
  if (at == std::string::npos || at == 0) {
    std::cerr << "label must be <editor>@<version>\n";
    return 2;
  }
  const std::string name = label.substr(0, at);
  const std::string version = label.substr(at + 1);

  auto db = refdb::ReferenceDb::load_file(g.db_path);
  const std::int64_t now = std::chrono::duration_cast<std::chrono::seconds>(
                               std::chrono::system_clock::now().time_since_epoch())
                               .count();
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir))
    if (entry.is_regular_file()) files.push_back(entry.path());
  std::sort(files.begin(), files.end());

  std::size_t ingested = 0, skipped = 0;
  for (const auto& file : files) {
    try {
      const auto bytes = io::read_file(file);
      const auto rec = db.ingest_labeled_image(bytes, file.filename().string(), name,
                                               version, now);
      ++ingested;
      for (const auto& d : rec.diagnostics)
        std::cerr << file.filename().string() << ": " << d << "\n";
    } catch (const Error& e) {
      ++skipped;
      std::cerr << file.filename().string() << ": skipped (" << e.what() << ")\n";
    }
  }
  db.save_file(g.db_path);
  std::cout << "ingested " << ingested << " image(s) for " << name << "@" << version
            << ", skipped " << skipped << "; db now has " << db.editors().size()
            << " editor(s), " << db.exif_dqt_entries().size() << " exif/dqt row(s), "
            << db.signature_entries().size() << " signature row(s)\n";
  return 0;
}

int cmd_db_export(const GlobalOptions& g, const std::string& out_file) {
  const auto db = refdb::ReferenceDb::load_file(g.db_path);
  const std::string text = db.export_snapshot_text();
  io::write_file(out_file, ByteSpan(reinterpret_cast<const std::uint8_t*>(text.data()),
                                    text.size()));
  std::cout << "exported " << db.editors().size() << " editor(s) to " << out_file
            << " (digest " << db.content_digest() << ")\n";
  return 0;
}

int cmd_db_import(const GlobalOptions& g, const std::string& in_file) {
  const auto bytes = io::read_file(in_file);
  const auto db =
      refdb::ReferenceDb::import_snapshot(std::string(bytes.begin(), bytes.end()));
  db.save_file(g.db_path);
  std::cout << "imported " << db.editors().size() << " editor(s) into " << g.db_path
            << " (digest " << db.content_digest() << ")\n";
  return 0;
}

int cmd_dqt(const std::string& image) {
  const auto bytes = io::read_file(image);
  const auto segments = jpeg::parse_segments(bytes);
  const auto set = jpeg::extract_dqt(segments);
  for (const auto& [id, table] : set.tables) {
    std::cout << "table " << id << " (" << (table.sixteen_bit ? "16" : "8")
              << "-bit, natural order):\n";
    for (int row = 0; row < 8; ++row) {
      std::cout << " ";
      for (int col = 0; col < 8; ++col)
        std::cout << " " << table.values_natural[row * 8 + col];
      std::cout << "\n";
    }
  }
  std::cout << "fingerprint " << jpeg::dqt_fingerprint(set) << "\n";
  return 0;
}

int cmd_exif(const std::string& image) {
  const auto bytes = io::read_file(image);
  const auto segments = jpeg::parse_segments(bytes);
  for (const jpeg::Segment* app1 : segments.all(jpeg::MarkerKind::App)) {
    if (app1->marker.index != 1) continue;
    const auto rec = exif::parse_exif(segments.payload(*app1));
    std::cout << "byte order: " << (rec.little_endian ? "II" : "MM") << "\n";
    for (const auto& [tag, value] : rec.tags) {
      if (value.type != 2) continue;
      std::cout << "tag 0x" << std::hex << tag << std::dec << ": " << value.ascii
                << "\n";
    }
    if (rec.has_thumbnail()) {
      std::cout << "thumbnail: " << rec.thumbnail.size() << " bytes";
      if (auto set = exif::extract_thumbnail_dqt(rec))
        std::cout << ", dqt fingerprint " << jpeg::dqt_fingerprint(*set);
      std::cout << "\n";
    }
    return 0;
  }
  std::cout << "no APP1/Exif segment\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"imgtrace: image manipulation detection toolkit"};
  app.set_version_flag("--version", kToolVersion);
  app.require_subcommand(1);

  GlobalOptions g;
  app.add_option("--db", g.db_path, "Reference DB file")->capture_default_str();
  app.add_option("--report", g.report_format, "Report format: text or json")
      ->check(CLI::IsMember({"text", "json"}))
      ->capture_default_str();
  app.add_option("--out", g.out_dir, "Directory for heatmap artifacts");

  // analyze
  auto* analyze = app.add_subcommand("analyze", "Analyze images (stages 1 and 2)");
  std::vector<std::string> images;
  pipeline::AnalysisOptions options;
  analyze->add_option("images", images, "Image files")->required()->expected(-1);
  analyze->add_option("--ela-quality", options.ela_quality, "ELA re-encode quality")
      ->check(CLI::Range(1, 100));
  analyze->add_option("--ela-amplification", options.ela_amplification,
                      "ELA difference amplification");
  analyze->add_option("--median-window", options.median_window,
                      "Noise analysis median window (odd, >=3)");
  analyze->add_option("--stage2-threshold", options.stage2_score_threshold,
                      "Region score at or above which stage 2 indicates");
  analyze->add_option("--stage2-min-heat", options.stage2_min_mean_heat,
                      "Minimum mean ELA heat for a stage-2 indication");
  analyze->add_flag_callback("--no-stage2", [&] { options.run_stage2 = false; },
                             "Skip pixel analyses");

  // scan
  auto* scan = app.add_subcommand("scan", "Scan an Android filesystem extraction");
  std::string scan_root, profile_file;
  scan->add_option("root", scan_root, "Extraction root directory")->required();
  scan->add_option("--profiles", profile_file, "Package profile definition file");

  // db
  auto* dbcmd = app.add_subcommand("db", "Reference DB maintenance");
  dbcmd->require_subcommand(1);
  auto* ingest = dbcmd->add_subcommand("ingest", "Ingest a directory of labeled images");
  std::string ingest_dir, ingest_label;
  ingest->add_option("dir", ingest_dir, "Directory of images")->required();
  ingest->add_option("--label", ingest_label, "Editor label <name>@<version>")
      ->required();
  auto* db_export = dbcmd->add_subcommand("export", "Export DB snapshot");
  std::string export_file;
  db_export->add_option("file", export_file, "Snapshot file")->required();
  auto* db_import = dbcmd->add_subcommand("import", "Import DB snapshot");
  std::string import_file;
  db_import->add_option("file", import_file, "Snapshot file")->required();

  // dqt / exif
  auto* dqt = app.add_subcommand("dqt", "Print quantization tables and fingerprint");
  std::string dqt_image;
  dqt->add_option("image", dqt_image, "JPEG file")->required();
  auto* exif_cmd = app.add_subcommand("exif", "Print Exif signature tags");
  std::string exif_image;
  exif_cmd->add_option("image", exif_image, "JPEG file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;  // help/version exit 0, usage errors exit 2
  }

  try {
    if (*analyze) return cmd_analyze(g, images, options);
    if (*scan) return cmd_scan(g, scan_root, profile_file);
    if (*ingest) return cmd_db_ingest(g, ingest_dir, ingest_label);
    if (*db_export) return cmd_db_export(g, export_file);
    if (*db_import) return cmd_db_import(g, import_file);
    if (*dqt) return cmd_dqt(dqt_image);
    if (*exif_cmd) return cmd_exif(exif_image);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
