// Copyright 2026 The mpa-eval Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef MPA_CLI_HPP_
#define MPA_CLI_HPP_

#include <string>
#include <vector>

namespace mpa::cli {

enum ExitCode : int {
  kOk = 0,
  kInputError = 1,  // parse, validation or usage errors; --strict diagnostics
  kInternalError = 2,
};

/// Runs the mpa-eval command line. `args` excludes the program name.
int run(const std::vector<std::string>& args);

int run(int argc, char** argv);

}  // namespace mpa::cli

#endif  // MPA_CLI_HPP_
