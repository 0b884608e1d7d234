// tools/cli.h

// Copyright 2026  The ramdec Authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#ifndef RAMDEC_TOOLS_CLI_H_
#define RAMDEC_TOOLS_CLI_H_

#include <string>
#include <vector>

namespace ramdec {

enum ExitCode { kExitSuccess = 0, kExitDataError = 1, kExitUsage = 2 };

/// Runs one ramdec invocation; `args` excludes the program name.
/// Diagnostics go to stderr, data to files or stdout.
int RunCommandLine(const std::vector<std::string> &args);

}  // namespace ramdec

#endif  // RAMDEC_TOOLS_CLI_H_
