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

#include "floodlens/dates.h"

#include <charconv>
#include <cstdio>

namespace floodlens {

namespace {

using namespace std::chrono;

bool parse_fixed(std::string_view s, std::size_t pos, std::size_t len,
                 int &out) {
  if (pos + len > s.size()) return false;
  for (std::size_t i = pos; i < pos + len; ++i) {
    if (s[i] < '0' || s[i] > '9') return false;
  }
  auto [p, ec] = std::from_chars(s.data() + pos, s.data() + pos + len, out);
  return ec == std::errc() && p == s.data() + pos + len;
}

}  // namespace

std::optional<Date> parse_date(std::string_view text) {
  int y, m, d;
  if (text.size() < 10 || text[4] != '-' || text[7] != '-') return std::nullopt;
  if (!parse_fixed(text, 0, 4, y) || !parse_fixed(text, 5, 2, m) ||
      !parse_fixed(text, 8, 2, d)) {
    return std::nullopt;
  }
  Date date{year{y}, month{static_cast<unsigned>(m)},
            day{static_cast<unsigned>(d)}};
  if (!date.ok()) return std::nullopt;
  if (text.size() == 10) return date;

  // Timestamp form.
  if (text[10] != 'T' && text[10] != ' ') return std::nullopt;
  int hh, mm, ss = 0;
  if (!parse_fixed(text, 11, 2, hh) || text.size() < 16 || text[13] != ':' ||
      !parse_fixed(text, 14, 2, mm)) {
    return std::nullopt;
  }
  std::size_t pos = 16;
  if (pos < text.size() && text[pos] == ':') {
    if (!parse_fixed(text, pos + 1, 2, ss)) return std::nullopt;
    pos += 3;
    if (pos < text.size() && (text[pos] == '.' || text[pos] == ',')) {
      ++pos;
      std::size_t start = pos;
      while (pos < text.size() && text[pos] >= '0' && text[pos] <= '9') ++pos;
      if (pos == start) return std::nullopt;
    }
  }
  if (hh > 23 || mm > 59 || ss > 60) return std::nullopt;
  int offset_minutes = 0;
  if (pos < text.size()) {
    char c = text[pos];
    if (c == 'Z' && pos + 1 == text.size()) {
      // UTC
    } else if ((c == '+' || c == '-') && text.size() == pos + 6 &&
               text[pos + 3] == ':') {
      int oh, om;
      if (!parse_fixed(text, pos + 1, 2, oh) ||
          !parse_fixed(text, pos + 4, 2, om)) {
        return std::nullopt;
      }
      offset_minutes = (oh * 60 + om) * (c == '+' ? 1 : -1);
    } else {
      return std::nullopt;
    }
  }
  sys_seconds local = sys_days(date) + hours(hh) + minutes(mm) + seconds(ss);
  sys_seconds utc = local - minutes(offset_minutes);
  return Date{floor<days>(utc)};
}

std::string format_date(const Date &date) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%04d-%02u-%02u",
                static_cast<int>(date.year()),
                static_cast<unsigned>(date.month()),
                static_cast<unsigned>(date.day()));
  return buf;
}

IsoWeek iso_week_of(sys_days day) {
  // The Thursday of the same Monday-based week decides the ISO year.
  weekday wd{day};
  int iso_wd = static_cast<int>(wd.iso_encoding());  // Mon=1..Sun=7
  sys_days thursday = day - days(iso_wd - 1) + days(3);
  year_month_day ymd{thursday};
  sys_days jan1 = sys_days(ymd.year() / January / 1);
  int week = static_cast<int>((thursday - jan1).count() / 7) + 1;
  return IsoWeek{static_cast<int>(ymd.year()), week};
}

IsoWeek iso_week_of(const Date &date) { return iso_week_of(sys_days(date)); }

sys_days IsoWeek::monday() const {
  // Jan 4 is always in week 1.
  sys_days jan4 = sys_days(std::chrono::year{year} / January / 4);
  int jan4_wd = static_cast<int>(weekday{jan4}.iso_encoding());
  sys_days week1_monday = jan4 - days(jan4_wd - 1);
  return week1_monday + days(7 * (week - 1));
}

IsoWeek IsoWeek::plus(int weeks) const {
  return iso_week_of(monday() + days(7 * weeks));
}

int weeks_in_iso_year(int iso_year) {
  return iso_week_of(sys_days(std::chrono::year{iso_year} / December / 28))
      .week;
}

int weeks_between(const IsoWeek &a, const IsoWeek &b) {
  return static_cast<int>((b.monday() - a.monday()).count() / 7);
}

std::string IsoWeek::str() const {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%04d-W%02d", year, week);
  return buf;
}

std::optional<IsoWeek> IsoWeek::parse(std::string_view text) {
  int y, w;
  if (text.size() != 8 || text[4] != '-' || text[5] != 'W') return std::nullopt;
  if (!parse_fixed(text, 0, 4, y) || !parse_fixed(text, 6, 2, w)) {
    return std::nullopt;
  }
  if (w < 1 || w > weeks_in_iso_year(y)) return std::nullopt;
  return IsoWeek{y, w};
}

std::vector<IsoWeek> WeekRange::weeks() const {
  std::vector<IsoWeek> out;
  if (last < first) return out;
  out.reserve(static_cast<std::size_t>(size()));
  for (IsoWeek w = first; w <= last; w = w.plus(1)) out.push_back(w);
  return out;
}

std::string WeekRange::str() const { return first.str() + ":" + last.str(); }

std::optional<WeekRange> WeekRange::parse(std::string_view text) {
  auto colon = text.find(':');
  if (colon == std::string_view::npos) return std::nullopt;
  auto a = IsoWeek::parse(text.substr(0, colon));
  auto b = IsoWeek::parse(text.substr(colon + 1));
  if (!a || !b || *b < *a) return std::nullopt;
  return WeekRange{*a, *b};
}

}  // namespace floodlens
