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

#include <ctime>

#include <doctest.h>

#include "floodlens/dates.h"
#include "unit/test_util.h"

using namespace floodlens;
using namespace std::chrono;

namespace {

// ISO week by the C library's %G-W%V formatting.
std::string strftime_week(sys_days day) {
  const std::time_t t = system_clock::to_time_t(time_point_cast<system_clock::duration>(day));
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[16];
  std::strftime(buf, sizeof buf, "%G-W%V", &tm);
  return buf;
}

Date d(int y, unsigned m, unsigned dd) { return year{y} / month{m} / day{dd}; }

}  // namespace

TEST_CASE("known ISO weeks") {
  CHECK(iso_week_of(d(2017, 8, 14)).str() == "2017-W33");
  CHECK(iso_week_of(d(2021, 1, 1)).str() == "2020-W53");
  CHECK(iso_week_of(d(2019, 12, 30)).str() == "2020-W01");
  CHECK(iso_week_of(d(2017, 1, 1)).str() == "2016-W52");
  CHECK(iso_week_of(d(2017, 1, 2)).str() == "2017-W01");
}

TEST_CASE("iso_week_of agrees with strftime over five decades") {
  for (sys_days day = sys_days(d(1995, 1, 1)); day <= sys_days(d(2045, 12, 31)); day += days(1))
    REQUIRE(iso_week_of(day).str() == strftime_week(day));
}

TEST_CASE("weeks_in_iso_year matches the week of December 28") {
  for (int y = 1990; y <= 2050; ++y)
    CHECK(weeks_in_iso_year(y) == iso_week_of(d(y, 12, 28)).week);
  CHECK(weeks_in_iso_year(2020) == 53);
  CHECK(weeks_in_iso_year(2017) == 52);
}

TEST_CASE("monday, plus and weeks_between are consistent") {
  testing::Gen g(11);
  for (int i = 0; i < 2000; ++i) {
    const sys_days day = sys_days(d(2000, 1, 1)) + days(g.integer(0, 12000));
    const IsoWeek w = iso_week_of(day);
    CHECK(weekday(w.monday()) == Monday);
    CHECK(iso_week_of(w.monday()) == w);
    CHECK(w.monday() <= day);
    CHECK(day - w.monday() < days(7));
    const int n = g.integer(-300, 300);
    const IsoWeek v = w.plus(n);
    CHECK(weeks_between(w, v) == n);
    CHECK((v.monday() - w.monday()).count() == 7 * n);
  }
}

TEST_CASE("IsoWeek text round trip and rejection") {
  auto w = IsoWeek::parse("2020-W53");
  REQUIRE(w);
  CHECK(w->year == 2020);
  CHECK(w->week == 53);
  CHECK(w->str() == "2020-W53");
  CHECK_FALSE(IsoWeek::parse("2017-W53"));  // 2017 has 52 weeks
  CHECK_FALSE(IsoWeek::parse("2017-W00"));
  CHECK_FALSE(IsoWeek::parse("2017W33"));
  CHECK_FALSE(IsoWeek::parse("2017-W3"));
  CHECK(IsoWeek::parse("2017-W09")->week == 9);
}

TEST_CASE("parse_date accepts dates and timestamps") {
  CHECK(parse_date("2017-08-14") == d(2017, 8, 14));
  CHECK(parse_date("2017-08-14T10:20:30Z") == d(2017, 8, 14));
  CHECK(parse_date("2017-08-14T10:20") == d(2017, 8, 14));
  CHECK(parse_date("2017-08-14T10:20:30.125+00:00") == d(2017, 8, 14));
  // 01:00 in Dhaka (+06:00) is still the previous day in UTC.
  CHECK(parse_date("2017-08-14T01:00:00+06:00") == d(2017, 8, 13));
  CHECK(parse_date("2017-08-14T22:00:00-03:00") == d(2017, 8, 15));
}

TEST_CASE("parse_date rejects malformed input") {
  for (const char *bad : {"", "2017-02-30", "2017-13-01", "17-08-14", "2017-08-14 junk",
                          "2017/08/14", "2017-08-14T25:00", "2017-08-14T10:00+5"})
    CHECK_FALSE(parse_date(bad));
}

TEST_CASE("format_date round trip") {
  CHECK(format_date(d(2017, 8, 4)) == "2017-08-04");
  CHECK(parse_date(format_date(d(1999, 12, 31))) == d(1999, 12, 31));
}

TEST_CASE("WeekRange") {
  auto r = WeekRange::parse("2017-W09:2017-W52");
  REQUIRE(r);
  CHECK(r->size() == 44);
  CHECK(r->weeks().size() == 44);
  CHECK(r->weeks().front().str() == "2017-W09");
  CHECK(r->weeks().back().str() == "2017-W52");
  CHECK(r->contains(*IsoWeek::parse("2017-W33")));
  CHECK_FALSE(r->contains(*IsoWeek::parse("2018-W01")));
  CHECK(r->str() == "2017-W09:2017-W52");
  auto across = WeekRange::parse("2020-W52:2021-W02");
  REQUIRE(across);
  CHECK(across->size() == 4);  // W52, W53, W01, W02
  CHECK_FALSE(WeekRange::parse("2017-W09"));
}
