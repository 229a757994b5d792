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

#include "floodlens/csv.h"

#include <algorithm>

#include "floodlens/error.h"
#include "floodlens/io.h"

namespace floodlens::csv {

namespace {

// Splits |text| into records, honoring quoted fields with embedded commas,
// doubled quotes and newlines. A trailing CR before LF is dropped.
std::vector<Record> split_records(std::string_view text,
                                  const std::string &source) {
  std::vector<Record> out;
  Record current;
  std::string field;
  std::size_t line = 1;
  current.line = 1;
  bool in_quotes = false;
  bool field_started = false;
  bool record_has_content = false;

  auto end_field = [&] {
    current.fields.push_back(std::move(field));
    field.clear();
    field_started = false;
  };
  auto end_record = [&] {
    if (record_has_content || !current.fields.empty() || field_started) {
      end_field();
      out.push_back(std::move(current));
    }
    current = Record{};
    current.line = line;
    record_has_content = false;
  };

  for (std::size_t i = 0; i < text.size(); ++i) {
    char c = text[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        if (c == '\n') ++line;
        field.push_back(c);
      }
      continue;
    }
    switch (c) {
      case '"':
        if (field_started && !field.empty()) {
          throw DataError(source + ":" + std::to_string(line),
                          "unexpected quote inside unquoted field");
        }
        in_quotes = true;
        field_started = true;
        record_has_content = true;
        break;
      case ',':
        end_field();
        record_has_content = true;
        break;
      case '\r':
        if (i + 1 < text.size() && text[i + 1] == '\n') break;
        field.push_back(c);
        field_started = true;
        record_has_content = true;
        break;
      case '\n':
        ++line;
        end_record();
        break;
      default:
        field.push_back(c);
        field_started = true;
        record_has_content = true;
    }
  }
  if (in_quotes) {
    throw DataError(source + ":" + std::to_string(current.line),
                    "unterminated quoted field");
  }
  end_record();
  return out;
}

}  // namespace

Table Table::parse(std::string_view text, const std::string &source) {
  // Skip a UTF-8 byte order mark.
  if (text.substr(0, 3) == "\xEF\xBB\xBF") text.remove_prefix(3);
  Table table;
  table.source_ = source;
  std::vector<Record> records = split_records(text, source);
  if (records.empty()) throw DataError(source, "missing CSV header");
  table.header_ = std::move(records.front().fields);
  for (std::size_t i = 1; i < records.size(); ++i) {
    Record &r = records[i];
    // Blank lines carry a single empty field.
    if (r.fields.size() == 1 && r.fields[0].empty()) continue;
    if (r.fields.size() != table.header_.size()) {
      throw DataError(table.where(r),
                      "expected " + std::to_string(table.header_.size()) +
                          " fields, found " + std::to_string(r.fields.size()));
    }
    table.records_.push_back(std::move(r));
  }
  return table;
}

Table Table::read(const std::filesystem::path &path) {
  return parse(read_file(path), path.string());
}

void Table::require(const std::vector<std::string> &columns) const {
  for (const auto &c : columns) index(c);
}

std::size_t Table::index(std::string_view column) const {
  auto it = std::find(header_.begin(), header_.end(), column);
  if (it == header_.end()) {
    throw DataError(source_, "missing column '" + std::string(column) + "'");
  }
  return static_cast<std::size_t>(it - header_.begin());
}

std::string Table::where(const Record &record) const {
  return source_ + ":" + std::to_string(record.line);
}

std::string escape(std::string_view field) {
  bool quote = field.find_first_of(",\"\r\n") != std::string_view::npos;
  if (!quote) return std::string(field);
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

Writer::Writer(const std::vector<std::string> &header)
    : width_(header.size()) {
  row(header);
}

void Writer::row(const std::vector<std::string> &fields) {
  if (fields.size() != width_) {
    throw Error("csv::Writer: row width " + std::to_string(fields.size()) +
                " != header width " + std::to_string(width_));
  }
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out_.push_back(',');
    out_ += escape(fields[i]);
  }
  out_.push_back('\n');
}

}  // namespace floodlens::csv
