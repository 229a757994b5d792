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

#ifndef FLOODLENS_CSV_H_
#define FLOODLENS_CSV_H_

#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace floodlens::csv {

struct Record {
  std::vector<std::string> fields;
  std::size_t line = 0;  // 1-based line on which the record starts
};

// A parsed RFC 4180 file with a mandatory header row.
class Table {
 public:
  // Parses |text|. |source| is used in error messages only.
  static Table parse(std::string_view text, const std::string &source);
  static Table read(const std::filesystem::path &path);

  // Throws DataError unless every name in |columns| is present in the header.
  void require(const std::vector<std::string> &columns) const;

  // Index of |column| in the header; throws DataError when absent.
  std::size_t index(std::string_view column) const;

  const std::vector<std::string> &header() const { return header_; }
  const std::vector<Record> &records() const { return records_; }
  const std::string &source() const { return source_; }

  // "file:line" location string for error messages.
  std::string where(const Record &record) const;

 private:
  std::string source_;
  std::vector<std::string> header_;
  std::vector<Record> records_;
};

// Accumulates CSV text. Fields are quoted only when necessary.
class Writer {
 public:
  explicit Writer(const std::vector<std::string> &header);

  void row(const std::vector<std::string> &fields);
  const std::string &str() const { return out_; }

 private:
  std::size_t width_;
  std::string out_;
};

std::string escape(std::string_view field);

}  // namespace floodlens::csv

#endif  // FLOODLENS_CSV_H_
