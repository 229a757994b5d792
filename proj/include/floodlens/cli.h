// Copyright 2026 The FloodLens Authors.
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

#ifndef FLOODLENS_CLI_H_
#define FLOODLENS_CLI_H_

#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace floodlens::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitData = 2;
inline constexpr int kExitInternal = 3;

using EnvLookup = std::function<std::optional<std::string>(const std::string &)>;

// Reads the process environment.
EnvLookup process_env();

// Runs one invocation; |args| excludes the program name. Settings apply in
// the order defaults, --config file, FLOODLENS_* environment, flags.
int run(const std::vector<std::string> &args, std::ostream &out, std::ostream &err,
        const EnvLookup &env = process_env());

}  // namespace floodlens::cli

#endif  // FLOODLENS_CLI_H_
