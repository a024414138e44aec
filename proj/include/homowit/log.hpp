// Copyright 2026 The homowit Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <functional>
#include <string>
#include <string_view>

namespace homowit {

/// Receives non-fatal diagnostics (truncation leakage, clipped estimates, ...).
using WarningSink = std::function<void(std::string_view)>;

/// Replaces the process-wide warning sink and returns the previous one.
/// The default sink writes "homowit: warning: <msg>" to std::clog.
WarningSink set_warning_sink(WarningSink sink);

void warn(std::string_view message);

}  // namespace homowit
