// lplda/cli.h

// Copyright 2026  The lplda Authors

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

#ifndef LPLDA_CLI_H_
#define LPLDA_CLI_H_

#include <string>
#include <vector>

namespace lplda {

/// Entry point of the lplda tool.  `args` excludes the program name.
/// Returns 0 on success, 1 on usage errors and 2 on data/validation errors.
/// Diagnostics go to stderr; data only to files.
int RunCli(const std::vector<std::string> &args);

}  // namespace lplda

#endif  // LPLDA_CLI_H_
