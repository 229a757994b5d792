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

#include <algorithm>
#include <set>
#include <tuple>

#include <doctest.h>

#include "floodlens/error.h"
#include "floodlens/refdata.h"
#include "unit/test_util.h"

using namespace floodlens;
using namespace floodlens::refdata;
using series::RegionSeries;
using series::Unit;

namespace {

const geo::Gazetteer &gaz() { return geo::Gazetteer::builtin(); }

Date d(const char *s) { return *parse_date(s); }

RegionSeries weeks_series(const std::string &id, int first, int last, double offset = 0.0) {
  RegionSeries s{id, Unit::FloodFraction, {}};
  for (int w = first; w <= last; ++w) s.points[{2017, w}] = offset + w * 0.01;
  return s;
}

}  // namespace

TEST_CASE("satellite: eight divisions over 44 weeks") {
  testing::Gen g(2);
  std::string csv = "division,week_start_date,inundated_area_km2\n";
  std::map<IsoWeek, double> sums;
  const auto first = IsoWeek{2017, 9}.monday();
  for (const auto *div : gaz().divisions())
    for (int w = 0; w < 44; ++w) {
      const double area = std::round(g.uniform(0, 5000) * 8) / 8;
      const auto day = first + std::chrono::days(7 * w);
      csv += div->name + "," + format_date(Date(day)) + "," + std::to_string(area) + "\n";
      sums[iso_week_of(day)] += area;
    }
  testing::TempDir dir("sat");
  dir.write("s.csv", csv);
  const auto s = load_satellite(dir / "s.csv", gaz());
  REQUIRE(s.size() == 9);
  for (const auto &x : s) {
    CHECK(x.points.size() == 44);
    CHECK(x.unit == Unit::AreaKm2);
  }
  CHECK(s.back().region_id == "bd");
  for (const auto &[w, v] : sums) CHECK(s.back().points.at(w) == doctest::Approx(v).epsilon(1e-12));

  // Re-serialization is lossless.
  const auto recs = read_satellite(dir / "s.csv", gaz());
  write_satellite(recs, dir / "t.csv", gaz());
  const auto again = read_satellite(dir / "t.csv", gaz());
  REQUIRE(again.size() == recs.size());
  for (std::size_t i = 0; i < recs.size(); ++i) {
    CHECK(again[i].division_id == recs[i].division_id);
    CHECK(again[i].week_start == recs[i].week_start);
    CHECK(again[i].area_km2 == recs[i].area_km2);
  }
}

TEST_CASE("satellite: single row and name resolution") {
  testing::TempDir dir("sat1");
  dir.write("s.csv", "division,week_start_date,inundated_area_km2\nBarishal,2017-08-14,12.5\n");
  const auto s = load_satellite(dir / "s.csv", gaz());
  REQUIRE(s.size() == 2);
  CHECK(s[0].region_id == "bd-barisal");
  CHECK(s[1].points == s[0].points);
  // A mid-week date lands in its ISO week.
  dir.write("m.csv", "division,week_start_date,inundated_area_km2\nbd-sylhet,2017-08-16,1\n");
  CHECK(load_satellite(dir / "m.csv", gaz())[0].points.begin()->first.str() == "2017-W33");
}

TEST_CASE("satellite: rejected rows") {
  testing::TempDir dir("satbad");
  const std::string h = "division,week_start_date,inundated_area_km2\n";
  dir.write("a.csv", h + "Atlantis,2017-08-14,1\n");
  CHECK_THROWS_WITH_AS(load_satellite(dir / "a.csv", gaz()), doctest::Contains("unknown division"), DataError);
  dir.write("b.csv", h + "Sylhet,2017-08-14,1\nSylhet Division,2017-08-15,2\n");
  CHECK_THROWS_WITH_AS(load_satellite(dir / "b.csv", gaz()), doctest::Contains("duplicate"), DataError);
  dir.write("c.csv", h + "Sylhet,2017-08-14,-1\n");
  CHECK_THROWS_WITH_AS(load_satellite(dir / "c.csv", gaz()), doctest::Contains("c.csv:2"), DataError);
  dir.write("d.csv", h + "Sunamganj,2017-08-14,1\n");
  CHECK_THROWS_AS(load_satellite(dir / "d.csv", gaz()), DataError);
  dir.write("e.csv", h + "Sylhet,14/08/2017,1\n");
  CHECK_THROWS_WITH_AS(load_satellite(dir / "e.csv", gaz()), doctest::Contains("week_start_date"), DataError);
}

TEST_CASE("EM-DAT spreading") {
  const std::vector<EmdatEvent> one = {{d("2017-08-14"), d("2017-08-20"), 1000}};
  const WeekRange r{{2017, 30}, {2017, 36}};
  const auto s1 = emdat_to_series(one, r, "bd");
  CHECK(s1.unit == Unit::PeopleAffected);
  CHECK(s1.points.size() == 7);
  for (const auto &[w, v] : s1.points) CHECK(v == (w.week == 33 ? 1000.0 : 0.0));

  const std::vector<EmdatEvent> four = {{d("2017-08-14"), d("2017-09-10"), 1000}};
  const auto s4 = emdat_to_series(four, std::nullopt, "bd");
  CHECK(s4.points.size() == 4);
  for (const auto &[w, v] : s4.points) CHECK(v == 250.0);

  // 1000 over W33..W36 and 900 over W35..W37: 250, 250, 550, 550, 300.
  const std::vector<EmdatEvent> overlap = {four[0], {d("2017-08-30"), d("2017-09-17"), 900}};
  const auto so = emdat_to_series(overlap, std::nullopt, "bd");
  const std::vector<double> want = {250, 250, 550, 550, 300};
  CHECK(so.values() == want);

  CHECK_THROWS_AS(emdat_to_series(std::vector<EmdatEvent>{}, r, "bd"), DataError);
}

TEST_CASE("EM-DAT file") {
  testing::TempDir dir("emdat");
  const std::vector<EmdatEvent> ev = {{d("2017-06-12"), d("2017-06-30"), 125000.5},
                                      {d("2017-08-11"), d("2017-08-11"), 0}};
  write_emdat(ev, dir / "e.csv");
  const auto back = read_emdat(dir / "e.csv");
  REQUIRE(back.size() == 2);
  CHECK(back[0].start == ev[0].start);
  CHECK(back[0].end == ev[0].end);
  CHECK(back[0].people_affected == ev[0].people_affected);
  dir.write("bad.csv", "start_date,end_date,people_affected\n2017-08-20,2017-08-10,5\n");
  CHECK_THROWS_WITH_AS(read_emdat(dir / "bad.csv"), doctest::Contains("precedes"), DataError);
  dir.write("neg.csv", "start_date,end_date,people_affected\n2017-08-01,2017-08-10,-5\n");
  CHECK_THROWS_AS(read_emdat(dir / "neg.csv"), DataError);
}

TEST_CASE("align examples") {
  const auto a = weeks_series("a", 9, 52);
  const auto b = weeks_series("b", 9, 52, 1.0);
  CHECK(align(a, b).n() == 44);
  CHECK_THROWS_WITH_AS(align(weeks_series("a", 1, 10), weeks_series("b", 20, 30)),
                       doctest::Contains("insufficient overlap"), DataError);
  CHECK_THROWS_AS(align(weeks_series("a", 1, 10), weeks_series("b", 9, 20)), DataError);
  const auto p = align(weeks_series("a", 1, 10), weeks_series("b", 6, 15));
  CHECK(p.n() == 5);
  CHECK(p.weeks.front().week == 6);
  CHECK(p.weeks.back().week == 10);
  // a(w) pairs with b(w - 2).
  const auto lagged = align(weeks_series("a", 1, 10), weeks_series("b", 6, 15), 2);
  CHECK(lagged.n() == 3);
  CHECK(lagged.weeks.front().week == 8);
  CHECK(lagged.y.front() == doctest::Approx(0.06));
}

TEST_CASE("align is symmetric") {
  testing::Gen g(12);
  for (int i = 0; i < 300; ++i) {
    RegionSeries a{"a", Unit::FloodFraction, {}}, b{"b", Unit::AreaKm2, {}};
    for (int w = 1; w <= 52; ++w) {
      if (g.coin(0.6)) a.points[{2017, w}] = g.uniform(0, 1);
      if (g.coin(0.6)) b.points[{2017, w}] = g.uniform(0, 100);
    }
    std::set<IsoWeek> common;
    for (const auto &[w, v] : a.points)
      if (b.points.contains(w)) common.insert(w);
    if (common.size() < 3) {
      CHECK_THROWS_AS(align(a, b), DataError);
      CHECK_THROWS_AS(align(b, a), DataError);
      continue;
    }
    const auto ab = align(a, b), ba = align(b, a);
    CHECK(ab.n() == common.size());
    CHECK(ab.n() == ba.n());
    CHECK(ab.x == ba.y);
    CHECK(ab.y == ba.x);
    CHECK(std::is_sorted(ab.weeks.begin(), ab.weeks.end()));
  }
}

TEST_CASE("event-level pairs") {
  RegionSeries news{"bd", Unit::FloodFraction, {}};
  for (int w = 20; w <= 40; ++w) news.points[{2017, w}] = w == 27 ? 0.9 : 0.1 * (w % 3);
  const std::vector<EmdatEvent> ev = {{d("2017-07-03"), d("2017-07-16"), 100},   // W27..W28
                                      {d("2017-05-22"), d("2017-05-28"), 50},    // W21
                                      {d("2017-09-04"), d("2017-09-04"), 70},    // W36
                                      {d("2018-01-01"), d("2018-01-07"), 10}};   // no news
  const auto p = event_level_pairs(ev, news);
  REQUIRE(p.n() == 3);
  CHECK(p.x[0] == 0.9);
  CHECK(p.y[0] == 100);
  CHECK(p.x[1] == news.points.at({2017, 21}));
  CHECK(p.x[2] == news.points.at({2017, 36}));
  CHECK_THROWS_AS(event_level_pairs(std::span(ev).subspan(2), news), DataError);
}
