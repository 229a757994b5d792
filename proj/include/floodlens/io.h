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

#ifndef FLOODLENS_IO_H_
#define FLOODLENS_IO_H_

#include <filesystem>
#include <string>
#include <string_view>

namespace floodlens {

// Reads a whole file; throws DataError naming the path on failure.
std::string read_file(const std::filesystem::path &path);

// Writes |content| to a sibling temporary file and renames it over |path|,
// so readers never observe a partially written artifact.
void write_file_atomic(const std::filesystem::path &path,
                       std::string_view content);

// Shortest decimal representation that round-trips to the same double.
std::string format_double(double value);

// Parses a finite double, rejecting trailing garbage.
bool parse_double(std::string_view text, double &out);
bool parse_int64(std::string_view text, long long &out);

std::string trim(std::string_view text);
std::string to_lower_ascii(std::string_view text);

}  // namespace floodlens

#endif  // FLOODLENS_IO_H_
