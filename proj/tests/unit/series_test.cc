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
#include <cmath>
#include <map>

#include <doctest.h>

#include "floodlens/error.h"
#include "floodlens/series.h"
#include "floodlens/stats.h"
#include "floodlens/synth.h"
#include "unit/test_util.h"

using namespace floodlens;
using namespace floodlens::series;
using corpus::Label;
using geo::EventRecord;

namespace {

const geo::Gazetteer &gaz() { return geo::Gazetteer::builtin(); }

IsoWeek wk(int w) { return {2017, w}; }

EventRecord ev(const std::string &id, Label label, const std::string &region, int week) {
  return {id, label, region, wk(week)};
}

// |flood| Flood records and |dry| NotFlood records in |region| for |week|.
void add(std::vector<EventRecord> &out, const std::string &region, int week, int flood, int dry) {
  for (int i = 0; i < flood; ++i) out.push_back(ev("f" + std::to_string(out.size()), Label::Flood, region, week));
  for (int i = 0; i < dry; ++i) out.push_back(ev("n" + std::to_string(out.size()), Label::NotFlood, region, week));
}

// Random events over weeks 10..19 in random regions.
std::vector<EventRecord> random_events(testing::Gen &g, std::size_t n) {
  const auto &regions = gaz().regions();
  std::vector<EventRecord> out;
  for (std::size_t i = 0; i < n; ++i)
    out.push_back(ev("r" + std::to_string(i), g.coin(0.3) ? Label::Flood : Label::NotFlood,
                     regions[std::size_t(g.integer(0, int(regions.size()) - 1))].id, g.integer(10, 19)));
  for (int w = 10; w <= 19; ++w) out.push_back(ev("pad" + std::to_string(w), Label::NotFlood, "bd", w));
  return out;
}

}  // namespace

TEST_CASE("flood fraction is flood count over total") {
  std::vector<EventRecord> e;
  add(e, "bd-sylhet", 30, 3, 7);
  const WeekRange r{wk(30), wk(30)};
  const auto s = build_flood_series(e, "bd-sylhet", r, Denominators::from_events(e), gaz());
  CHECK(s.points.at(wk(30)) == doctest::Approx(0.3));
  CHECK(s.unit == Unit::FloodFraction);
  // The country counts everything, the other divisions nothing.
  CHECK(build_flood_series(e, "bd", r, Denominators::from_events(e), gaz()).points.at(wk(30)) ==
        doctest::Approx(0.3));
  CHECK(build_flood_series(e, "bd-dhaka", r, Denominators::from_events(e), gaz()).points.at(wk(30)) == 0.0);
}

TEST_CASE("no flood events gives an all-zero full-length series") {
  std::vector<EventRecord> e;
  for (int w = 9; w <= 52; ++w) add(e, "bd-dhaka", w, 0, 2);
  const WeekRange r{wk(9), wk(52)};
  const auto s = build_flood_series(e, "bd", r, Denominators::from_events(e), gaz());
  CHECK(s.points.size() == 44);
  for (double v : s.values()) CHECK(v == 0.0);
  CHECK(event_week_range(e).size() == 44);
}

TEST_CASE("district records count toward their division") {
  std::vector<EventRecord> e;
  add(e, "bd-sylhet-sunamganj", 30, 2, 0);
  add(e, "bd-sylhet", 30, 1, 1);
  const WeekRange r{wk(30), wk(30)};
  const auto d = Denominators::from_events(e);
  CHECK(build_flood_counts(e, "bd-sylhet", r, d, gaz()).points.at(wk(30)).flood == 3);
  CHECK(build_flood_counts(e, "bd-sylhet-sunamganj", r, d, gaz()).points.at(wk(30)).flood == 2);
  CHECK_THROWS_WITH_AS(build_flood_counts(e, "bd-atlantis", r, d, gaz()), doctest::Contains("unknown region"),
                       DataError);
}

TEST_CASE("a missing denominator names the week") {
  std::vector<EventRecord> e;
  add(e, "bd-dhaka", 30, 1, 1);
  add(e, "bd-dhaka", 32, 1, 1);
  const WeekRange r{wk(30), wk(32)};
  CHECK_THROWS_WITH_AS(build_flood_series(e, "bd", r, Denominators::from_events(e), gaz()),
                       doctest::Contains("2017-W31"), DataError);

  testing::TempDir dir("den");
  dir.write("d.csv", "region_id,iso_week,total_articles\nbd,2017-W30,10\nbd,2017-W31,0\nbd,2017-W32,5\n");
  CHECK_THROWS_WITH_AS(build_flood_series(e, "bd", r, Denominators::load(dir / "d.csv"), gaz()),
                       doctest::Contains("2017-W31"), DataError);
  dir.write("bad.csv", "region_id,iso_week,total_articles\nbd,2017-W30,-1\n");
  CHECK_THROWS_WITH_AS(Denominators::load(dir / "bad.csv"), doctest::Contains("bad.csv:2"), DataError);
  dir.write("dup.csv", "region_id,iso_week,total_articles\nbd,2017-W30,1\nbd,2017-W30,2\n");
  CHECK_THROWS_WITH_AS(Denominators::load(dir / "dup.csv"), doctest::Contains("duplicate"), DataError);
}

TEST_CASE("external denominators with a national fallback") {
  testing::TempDir dir("den2");
  dir.write("d.csv",
            "region_id,iso_week,total_articles\n"
            "*,2017-W30,100\n*,2017-W31,50\n"
            "bd-sylhet,2017-W30,20\nbd-sylhet,2017-W31,10\n");
  const auto d = Denominators::load(dir / "d.csv");
  CHECK(d.total("bd-sylhet", wk(30)) == 20.0);
  CHECK(d.total("bd-dhaka", wk(31)) == 50.0);
  CHECK_FALSE(d.total("bd-dhaka", wk(32)).has_value());
  std::vector<EventRecord> e;
  add(e, "bd-sylhet", 30, 4, 0);
  add(e, "bd-dhaka", 31, 5, 0);
  const WeekRange r{wk(30), wk(31)};
  const auto syl = build_flood_series(e, "bd-sylhet", r, d, gaz());
  CHECK(syl.points.at(wk(30)) == doctest::Approx(0.2));
  CHECK(syl.points.at(wk(31)) == 0.0);
  CHECK(build_flood_series(e, "bd-dhaka", r, d, gaz()).points.at(wk(31)) == doctest::Approx(0.1));
}

TEST_CASE("aggregation sums numerators and denominators") {
  std::vector<EventRecord> a, b;
  add(a, "bd-sylhet-sunamganj", 30, 1, 9);
  add(b, "bd-sylhet-habiganj", 30, 3, 7);
  const WeekRange r{wk(30), wk(30)};
  const auto ca = build_flood_counts(a, "bd-sylhet-sunamganj", r, Denominators::from_events(a), gaz());
  const auto cb = build_flood_counts(b, "bd-sylhet-habiganj", r, Denominators::from_events(b), gaz());
  const std::vector<CountSeries> both = {ca, cb};
  CHECK(aggregate_to_division(both, "bd-sylhet").points.at(wk(30)) == doctest::Approx(0.2));
  const std::vector<CountSeries> one = {ca};
  CHECK(aggregate_to_division(one, "bd-sylhet").points == ca.to_series().points);

  auto mixed = both;
  mixed[1].unit = Unit::TweetIndex;
  CHECK_THROWS_WITH_AS(aggregate_counts(mixed, "x"), doctest::Contains("mixed units"), DataError);
  auto shifted = both;
  shifted[1].range = {wk(29), wk(30)};
  CHECK_THROWS_AS(aggregate_counts(shifted, "x"), DataError);
  CHECK_THROWS_AS(aggregate_counts(std::vector<CountSeries>{}, "x"), DataError);
}

TEST_CASE("division flood counts sum to the country count") {
  testing::Gen g(30);
  for (int round = 0; round < 25; ++round) {
    const auto e = random_events(g, std::size_t(g.integer(20, 400)));
    const WeekRange r{wk(10), wk(19)};
    const auto all = build_all_counts(e, r, Denominators::from_events(e), gaz(), round % 2 == 0);
    REQUIRE(all.front().region_id == "bd");
    for (const IsoWeek &w : r.weeks()) {
      double sum = 0.0, districts = 0.0;
      for (const auto &c : all) {
        const auto *reg = gaz().find(c.region_id);
        if (reg->level == geo::Level::Division) sum += c.points.at(w).flood;
        if (reg->level == geo::Level::District) districts += c.points.at(w).flood;
      }
      // Country-level records belong to no division.
      double country_only = 0;
      for (const auto &x : e) country_only += x.label == Label::Flood && x.week == w && x.region_id == "bd";
      CHECK(sum + country_only == all.front().points.at(w).flood);
      if (round % 2 == 0) CHECK(districts <= sum);
    }
    // Single-region builds agree with the one-pass build.
    for (const auto &c : all) {
      const auto single = build_flood_counts(e, c.region_id, r, Denominators::from_events(e), gaz());
      for (const IsoWeek &w : r.weeks()) CHECK(single.points.at(w).flood == c.points.at(w).flood);
    }
  }
}

TEST_CASE("scaling denominators leaves ranks unchanged") {
  testing::Gen g(31);
  const auto e = random_events(g, 300);
  const WeekRange r{wk(10), wk(19)};
  const auto base = build_flood_series(e, "bd", r, Denominators::from_events(e), gaz());
  testing::TempDir dir("scale");
  std::string csv = "region_id,iso_week,total_articles\n";
  const auto d = Denominators::from_events(e);
  for (const IsoWeek &w : r.weeks()) csv += "*," + w.str() + "," + std::to_string(*d.total("bd", w) * 3.0) + "\n";
  dir.write("d.csv", csv);
  const auto scaled = build_flood_series(e, "bd", r, Denominators::load(dir / "d.csv"), gaz());
  const auto a = base.values(), b = scaled.values();
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(b[i] == doctest::Approx(a[i] / 3.0));
  CHECK(stats::rank(a) == stats::rank(b));
}

TEST_CASE("adding a NotFlood record changes only the denominator") {
  testing::Gen g(32);
  for (int round = 0; round < 20; ++round) {
    auto e = random_events(g, 100);
    const WeekRange r{wk(10), wk(19)};
    const auto before = build_all_counts(e, r, Denominators::from_events(e), gaz(), true);
    const int w = g.integer(10, 19);
    e.push_back(ev("extra", Label::NotFlood, gaz().regions()[std::size_t(g.integer(0, 72))].id, w));
    const auto after = build_all_counts(e, r, Denominators::from_events(e), gaz(), true);
    for (std::size_t i = 0; i < before.size(); ++i)
      for (const IsoWeek &x : r.weeks()) {
        CHECK(after[i].points.at(x).flood == before[i].points.at(x).flood);
        CHECK(after[i].points.at(x).total == before[i].points.at(x).total + (x == wk(w) ? 1 : 0));
      }
  }
}

TEST_CASE("series validation and CSV round trip") {
  RegionSeries s{"bd", Unit::FloodFraction, {{wk(1), 0.5}, {wk(2), 1.5}}};
  CHECK_THROWS_AS(s.validate(), DataError);
  s.points[wk(2)] = std::nan("");
  CHECK_THROWS_WITH_AS(s.validate(), doctest::Contains("NaN"), DataError);
  s.points[wk(2)] = 0.1 + 0.2;
  CHECK_NOTHROW(s.validate());
  RegionSeries area{"bd-sylhet", Unit::AreaKm2, {{wk(1), 1234.5}, {{2018, 1}, 1e-7}}};
  testing::TempDir dir("series");
  const std::vector<RegionSeries> both = {s, area};
  write_series(both, dir / "s.csv");
  const auto back = load_series(dir / "s.csv");
  REQUIRE(back.size() == 2);
  CHECK(back[0].region_id == "bd");
  CHECK(back[0].points == s.points);
  CHECK(back[1].unit == Unit::AreaKm2);
  CHECK(back[1].points == area.points);

  dir.write("bad.csv", "region_id,iso_week,value,unit\nbd,2017-W01,1,furlongs\n");
  CHECK_THROWS_WITH_AS(load_series(dir / "bad.csv"), doctest::Contains("unknown unit"), DataError);
  dir.write("dup.csv", "region_id,iso_week,value,unit\nbd,2017-W01,1,tweet_index\nbd,2017-W01,2,tweet_index\n");
  CHECK_THROWS_WITH_AS(load_series(dir / "dup.csv"), doctest::Contains("duplicate week"), DataError);

  std::vector<EventRecord> e;
  add(e, "bd-sylhet", 30, 3, 7);
  const auto counts = build_all_counts(e, {wk(30), wk(30)}, Denominators::from_events(e), gaz(), false);
  write_counts(counts, dir / "c.csv");
  const auto cback = load_counts(dir / "c.csv");
  REQUIRE(cback.size() == counts.size());
  for (std::size_t i = 0; i < counts.size(); ++i) {
    CHECK(cback[i].region_id == counts[i].region_id);
    CHECK(cback[i].points.at(wk(30)).flood == counts[i].points.at(wk(30)).flood);
  }
}

TEST_CASE("series of a synthetic corpus track the planted fractions") {
  synth::SynthConfig cfg;
  cfg.total_articles = 3000;
  const auto bundle = synth::generate(cfg, gaz());
  geo::PredictionMap pred;
  std::map<std::pair<std::string, IsoWeek>, double> planted;
  std::map<IsoWeek, double> totals;
  for (const auto &t : bundle.truth) {
    pred[t.article_id] = t.label;
    totals[t.week] += 1;
    if (t.label == Label::Flood) planted[{gaz().division_of(t.region_id)->id, t.week}] += 1;
  }
  const corpus::Corpus c(bundle.articles);
  const auto events = geo::build_events(c, pred, gaz());
  const auto all = build_all_counts(events, cfg.weeks, Denominators::from_events(events), gaz(), false);
  std::size_t exact = 0, cells = 0;
  for (const auto &s : all) {
    if (s.region_id == "bd") continue;
    for (const auto &[w, p] : s.points) {
      const double want = planted[{s.region_id, w}] / totals[w];
      const double got = p.flood / p.total;
      CHECK(std::abs(got - want) <= 1.0 / totals[w] + 1e-12);
      exact += got == want;
      ++cells;
    }
  }
  CHECK(double(exact) / double(cells) > 0.95);
}
