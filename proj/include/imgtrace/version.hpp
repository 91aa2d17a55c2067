// Copyright 2026 The imgtrace Authors
//
// Licensed under the Apache License, Version 2.0 (the "License"); you may not
// use this file except in compliance with the License. You may obtain a copy
// of the License at https://www.apache.org/licenses/LICENSE-2.0

#pragma once

namespace imgtrace {

inline constexpr const char* kToolVersion = "1.0.0";
inline constexpr const char* kReportSchema = "imgtrace-report/1";
inline constexpr const char* kScanSchema = "imgtrace-scan/1";

}  // namespace imgtrace
