// Copyright 2026 The imgtrace Authors
//
// Licensed under the Apache License, Version 2.0 (the "License"); you may not
// use this file except in compliance with the License. You may obtain a copy
// of the License at https://www.apache.org/licenses/LICENSE-2.0

#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace imgtrace {

// Every failure the library reports carries one of these codes so callers
// (and the pipeline in particular) can branch on the cause instead of
// string-matching messages.
enum class Errc {
  // JPEG structure
  MissingSoi,
  TruncatedSegment,
  MalformedMarker,
  MissingEoi,
  NoDqtFound,
  MalformedDqt,
  ZeroQuantValue,
  // Exif / TIFF
  BadPreamble,
  BadTiffHeader,
  OffsetOutOfBounds,
  // Filename patterns
  InvalidPattern,
  // Reference DB
  UnparseableImage,
  SchemaVersionMismatch,
  MalformedSnapshot,
  // Codec
  UnsupportedCoding,
  CorruptEntropyData,
  DimensionOverflow,
  // Pixel analysis
  WindowTooLarge,
  DegenerateCovariance,
  DimensionMismatch,
  // Scanner / IO / misc
  RootNotFound,
  FileUnreadable,
  InvalidArgument,
};

inline const char* errc_name(Errc c) {
  switch (c) {
    case Errc::MissingSoi: return "MissingSoi";
    case Errc::TruncatedSegment: return "TruncatedSegment";
    case Errc::MalformedMarker: return "MalformedMarker";
    case Errc::MissingEoi: return "MissingEoi";
    case Errc::NoDqtFound: return "NoDqtFound";
    case Errc::MalformedDqt: return "MalformedDqt";
    case Errc::ZeroQuantValue: return "ZeroQuantValue";
    case Errc::BadPreamble: return "BadPreamble";
    case Errc::BadTiffHeader: return "BadTiffHeader";
    case Errc::OffsetOutOfBounds: return "OffsetOutOfBounds";
    case Errc::InvalidPattern: return "InvalidPattern";
    case Errc::UnparseableImage: return "UnparseableImage";
    case Errc::SchemaVersionMismatch: return "SchemaVersionMismatch";
    case Errc::MalformedSnapshot: return "MalformedSnapshot";
    case Errc::UnsupportedCoding: return "UnsupportedCoding";
    case Errc::CorruptEntropyData: return "CorruptEntropyData";
    case Errc::DimensionOverflow: return "DimensionOverflow";
    case Errc::WindowTooLarge: return "WindowTooLarge";
    case Errc::DegenerateCovariance: return "DegenerateCovariance";
    case Errc::DimensionMismatch: return "DimensionMismatch";
    case Errc::RootNotFound: return "RootNotFound";
    case Errc::FileUnreadable: return "FileUnreadable";
    case Errc::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& message)
      : std::runtime_error(std::string(errc_name(code)) + ": " + message),
        code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

[[noreturn]] inline void raise(Errc code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace imgtrace
