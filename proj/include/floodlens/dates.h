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

#ifndef FLOODLENS_DATES_H_
#define FLOODLENS_DATES_H_

#include <chrono>
#include <compare>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace floodlens {

using Date = std::chrono::year_month_day;

// Accepts "YYYY-MM-DD" or an ISO-8601 timestamp "YYYY-MM-DDThh:mm[:ss[.f]]"
// with optional "Z" or "+hh:mm"/"-hh:mm" offset; timestamps are converted
// to their UTC calendar date. Returns nullopt for anything else.
std::optional<Date> parse_date(std::string_view text);
std::string format_date(const Date &date);

// ISO-8601 week: weeks start on Monday and week 1 contains the year's first
// Thursday, so late-December dates may belong to week 1 of the next year and
// early-January dates to week 52/53 of the previous one.
struct IsoWeek {
  int year = 0;
  int week = 0;

  auto operator<=>(const IsoWeek &) const = default;

  // "2017-W33"
  std::string str() const;
  static std::optional<IsoWeek> parse(std::string_view text);

  std::chrono::sys_days monday() const;
  IsoWeek plus(int weeks) const;
};

IsoWeek iso_week_of(const Date &date);
IsoWeek iso_week_of(std::chrono::sys_days day);

// Number of ISO weeks in |iso_year| (52 or 53).
int weeks_in_iso_year(int iso_year);

// Signed week distance b - a.
int weeks_between(const IsoWeek &a, const IsoWeek &b);

// Inclusive range of consecutive ISO weeks.
struct WeekRange {
  IsoWeek first;
  IsoWeek last;

  bool contains(const IsoWeek &w) const { return first <= w && w <= last; }
  int size() const { return weeks_between(first, last) + 1; }
  std::vector<IsoWeek> weeks() const;
  std::string str() const;

  // "2017-W09:2017-W52"
  static std::optional<WeekRange> parse(std::string_view text);
};

}  // namespace floodlens

#endif  // FLOODLENS_DATES_H_
