// SPDX-License-Identifier: Apache-2.0
#pragma once

namespace toolplanner::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitDataError = 1;
inline constexpr int kExitUsage = 2;

/// Parses argv, runs one pipeline stage and maps failures to exit codes.
int run(int argc, char** argv);

} // namespace toolplanner::cli
