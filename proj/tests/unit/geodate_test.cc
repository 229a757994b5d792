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
#include <cctype>

#include <doctest.h>

#include "floodlens/error.h"
#include "floodlens/geodate.h"
#include "unit/test_util.h"

using namespace floodlens;
using namespace floodlens::geo;
using corpus::Label;

namespace {

corpus::Article article(const std::string &title, const std::string &body,
                        const std::string &date = "2017-08-14", const std::string &id = "a") {
  corpus::Article a;
  a.id = id;
  a.source = "daily-star";
  a.title = title;
  a.body = body;
  a.published = *parse_date(date);
  return a;
}

std::string where(const std::string &title, const std::string &body) {
  return extract_location(article(title, body), Gazetteer::builtin()).region_id;
}

std::string upper(std::string s) {
  for (auto &c : s) c = char(std::toupper(static_cast<unsigned char>(c)));
  return s;
}

}  // namespace

TEST_CASE("builtin gazetteer") {
  const auto &g = Gazetteer::builtin();
  std::size_t districts = 0;
  for (const auto &r : g.regions()) districts += r.level == Level::District;
  CHECK(g.country().id == "bd");
  CHECK(g.divisions().size() == 8);
  CHECK(districts == 64);
  for (const auto *d : g.divisions()) CHECK_FALSE(g.districts_of(d->id).empty());
  CHECK(g.resolve("Chattogram")->id == "bd-chittagong");
  CHECK(g.resolve("barishal")->id == "bd-barisal");
  CHECK(g.resolve("bd-sylhet-sunamganj")->name == "Sunamganj");
  CHECK(g.resolve("Atlantis") == nullptr);
  CHECK(g.within("bd-sylhet-sunamganj", "bd-sylhet"));
  CHECK(g.within("bd-sylhet-sunamganj", "bd"));
  CHECK_FALSE(g.within("bd-sylhet-sunamganj", "bd-dhaka"));
  CHECK(g.division_of("bd-sylhet-sunamganj")->id == "bd-sylhet");
  CHECK(g.division_of("bd") == nullptr);
  // Every district rolls up to exactly one division.
  for (const auto &r : g.regions())
    if (r.level == Level::District) CHECK(g.division_of(r.id)->id == r.parent_id);
}

TEST_CASE("location examples") {
  CHECK(where("", "Sylhet city was inundated") == "bd-sylhet");
  CHECK(where("", "Dhaka Dhaka, Khulna. Dhaka and Dhaka; Dhaka") == "bd-dhaka");
  CHECK(where("", "Heavy rain continued across the region") == "bd");
  CHECK(where("", "") == "bd");
}

TEST_CASE("location scoring and tie-breaks") {
  // A district outranks higher-scoring divisions.
  CHECK(where("Dhaka", "Dhaka Dhaka Sylhet Bhola") == "bd-barisal-bhola");
  // Title mentions weigh double.
  CHECK(where("Rangpur", "Sylhet") == "bd-rangpur");
  CHECK(where("", "Rangpur Sylhet Sylhet") == "bd-sylhet");
  // Equal scores: title presence first, then earliest mention.
  CHECK(where("Rangpur", "Sylhet Sylhet") == "bd-rangpur");
  CHECK(where("", "Khulna then Dhaka") == "bd-khulna");
  CHECK(where("", "Dhaka then Khulna") == "bd-dhaka");
  // Longest alias wins over its prefix.
  CHECK(where("", "Dhaka District hospitals") == "bd-dhaka-dhaka");
  CHECK(where("", "Moulvi Bazar") == "bd-sylhet-moulvibazar");
  // Whole words only.
  CHECK(where("", "Dhakaiya cuisine") == "bd");

  const auto loc = extract_location(article("Sylhet", "Sunamganj and Dhaka"), Gazetteer::builtin());
  CHECK(loc.region_id == "bd-sylhet-sunamganj");
  CHECK(loc.multi_region);
  CHECK(loc.evidence.size() == 3);
  CHECK_FALSE(extract_location(article("Sylhet", "Sylhet"), Gazetteer::builtin()).multi_region);
}

TEST_CASE("location is invariant under case and alias-free suffixes") {
  testing::Gen g(21);
  const auto &gaz = Gazetteer::builtin();
  std::vector<std::string> vocab;
  for (const auto &r : gaz.regions())
    for (const auto &a : r.aliases) vocab.push_back(a);
  for (const char *w : {"river", "rain", "embankment", "the", "homes"}) vocab.emplace_back(w);
  const std::vector<std::string> filler = {"water", "levels", "rose", "overnight", "relief", "camps"};
  for (int i = 0; i < 400; ++i) {
    std::string title, body, tail;
    for (int k = g.integer(0, 3); k > 0; --k) title += vocab[std::size_t(g.integer(0, int(vocab.size()) - 1))] + " ";
    for (int k = g.integer(0, 8); k > 0; --k) body += vocab[std::size_t(g.integer(0, int(vocab.size()) - 1))] + ", ";
    for (int k = g.integer(1, 6); k > 0; --k) tail += " " + filler[std::size_t(g.integer(0, 5))];
    const auto base = where(title, body);
    CAPTURE(title);
    CAPTURE(body);
    CHECK(gaz.find(base) != nullptr);
    CHECK(where(upper(title), upper(body)) == base);
    CHECK(where(title, body + tail) == base);
    CHECK(where(title + tail, body) == base);
  }
}

TEST_CASE("weeks come from the publication date") {
  CHECK(extract_week(article("", "", "2017-08-14")).str() == "2017-W33");
  CHECK(extract_week(article("", "", "2021-01-01")).str() == "2020-W53");
  CHECK(extract_week(article("", "", "2019-12-30")).str() == "2020-W01");
}

TEST_CASE("build_events") {
  std::vector<corpus::Article> arts = {article("Sylhet floods", "", "2017-08-14", "a"),
                                       article("Cricket", "Dhaka", "2017-08-20", "b"),
                                       article("Rain", "Bhola", "2017-08-21", "c")};
  const corpus::Corpus c(arts);
  PredictionMap pred = {{"a", Label::Flood}, {"b", Label::NotFlood}, {"c", Label::Flood}};
  const auto ev = build_events(c, pred, Gazetteer::builtin());
  REQUIRE(ev.size() == 3);
  CHECK(ev[0].region_id == "bd-sylhet");
  CHECK(ev[0].week.str() == "2017-W33");
  CHECK(ev[1].label == Label::NotFlood);
  CHECK(ev[1].week.str() == "2017-W33");
  CHECK(ev[2].region_id == "bd-barisal-bhola");
  CHECK(ev[2].week.str() == "2017-W34");
  CHECK(std::count_if(ev.begin(), ev.end(), [](const auto &e) { return e.label == Label::Flood; }) == 2);

  for (auto &[k, v] : pred) v = Label::NotFlood;
  const auto none = build_events(c, pred, Gazetteer::builtin());
  CHECK(std::none_of(none.begin(), none.end(), [](const auto &e) { return e.label == Label::Flood; }));

  pred.erase("b");
  CHECK_THROWS_WITH_AS(build_events(c, pred, Gazetteer::builtin()), doctest::Contains("'b'"), DataError);
}

TEST_CASE("build_events is independent of the thread count") {
  testing::Gen g(5);
  std::vector<corpus::Article> arts;
  PredictionMap pred;
  const std::vector<std::string> places = {"Sylhet", "Bhola", "Dhaka", "Rangpur", "nowhere", "Jashore"};
  for (int i = 0; i < 300; ++i) {
    const std::string id = "n" + std::to_string(i);
    arts.push_back(article(places[std::size_t(g.integer(0, 5))], places[std::size_t(g.integer(0, 5))],
                           "2017-0" + std::to_string(g.integer(1, 9)) + "-1" + std::to_string(g.integer(0, 9)), id));
    pred[id] = g.coin() ? Label::Flood : Label::NotFlood;
  }
  const corpus::Corpus c(arts);
  const auto one = build_events(c, pred, Gazetteer::builtin(), 1);
  const auto four = build_events(c, pred, Gazetteer::builtin(), 4);
  REQUIRE(one.size() == four.size());
  for (std::size_t i = 0; i < one.size(); ++i) {
    CHECK(one[i].article_id == four[i].article_id);
    CHECK(one[i].region_id == four[i].region_id);
    CHECK(one[i].week == four[i].week);
  }

  testing::TempDir dir("events");
  write_events(one, dir / "events.csv");
  const auto back = load_events(dir / "events.csv", Gazetteer::builtin());
  REQUIRE(back.size() == one.size());
  for (std::size_t i = 0; i < one.size(); ++i) {
    CHECK(back[i].article_id == one[i].article_id);
    CHECK(back[i].label == one[i].label);
    CHECK(back[i].region_id == one[i].region_id);
    CHECK(back[i].week == one[i].week);
  }
}

TEST_CASE("events file errors") {
  testing::TempDir dir("events-bad");
  const auto &g = Gazetteer::builtin();
  dir.write("a.csv", "article_id,label,region_id,iso_week\nx,flood,bd-atlantis,2017-W01\n");
  CHECK_THROWS_WITH_AS(load_events(dir / "a.csv", g), doctest::Contains("a.csv:2"), DataError);
  dir.write("b.csv", "article_id,label,region_id,iso_week\nx,wet,bd,2017-W01\n");
  CHECK_THROWS_WITH_AS(load_events(dir / "b.csv", g), doctest::Contains("invalid label"), DataError);
  dir.write("c.csv", "article_id,label,region_id,iso_week\nx,flood,bd,2017-W60\n");
  CHECK_THROWS_WITH_AS(load_events(dir / "c.csv", g), doctest::Contains("ISO week"), DataError);
}

TEST_CASE("gazetteer validation") {
  const std::string csv(Gazetteer::builtin_csv());
  CHECK(Gazetteer::parse(csv, "copy").regions().size() == Gazetteer::builtin().regions().size());
  // Drop one division row and its districts.
  std::string fewer;
  std::size_t pos = 0;
  while (pos < csv.size()) {
    auto eol = csv.find('\n', pos);
    if (eol == std::string::npos) eol = csv.size();
    const auto line = csv.substr(pos, eol - pos);
    if (line.rfind("bd-sylhet", 0) != 0) fewer += line + "\n";
    pos = eol + 1;
  }
  CHECK_THROWS_WITH_AS(Gazetteer::parse(fewer, "g"), doctest::Contains("8 divisions"), DataError);
  CHECK_THROWS_WITH_AS(Gazetteer::parse(csv + "bd-x,X,district,bd-nowhere,\n", "g"),
                       doctest::Contains("parent"), DataError);
  CHECK_THROWS_WITH_AS(Gazetteer::parse(csv + "bd-x,X,village,bd-dhaka,\n", "g"),
                       doctest::Contains("unknown level"), DataError);
  CHECK_THROWS_WITH_AS(Gazetteer::parse(csv + "bd-x,X,district,bd-dhaka,Sylhet\n", "g"),
                       doctest::Contains("Sylhet"), DataError);
  CHECK_THROWS_WITH_AS(Gazetteer::parse(csv + "bd,Again,district,bd-dhaka,\n", "g"),
                       doctest::Contains("duplicate region_id"), DataError);
  CHECK_THROWS_WITH_AS(Gazetteer::parse(csv + "bd-x,X,district,bd-dhaka,---\n", "g"),
                       doctest::Contains("no word characters"), DataError);
}
