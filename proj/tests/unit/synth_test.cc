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
#include <sstream>

#include <doctest.h>

#include "floodlens/classify.h"
#include "floodlens/csv.h"
#include "floodlens/error.h"
#include "floodlens/io.h"
#include "floodlens/pipeline.h"
#include "floodlens/synth.h"
#include "unit/test_util.h"

using namespace floodlens;
using namespace floodlens::synth;
using corpus::Label;

namespace {

const geo::Gazetteer &gaz() { return geo::Gazetteer::builtin(); }

SynthConfig small() {
  SynthConfig c;
  c.total_articles = 2500;
  c.annotated_flood = 200;
  c.annotated_not_flood = 400;
  return c;
}

double keyword_recall(const Bundle &b) {
  const classify::KeywordRule rule;
  std::size_t flood = 0, hit = 0;
  for (std::size_t i = 0; i < b.articles.size(); ++i) {
    if (b.truth[i].label != Label::Flood) continue;
    ++flood;
    hit += classify::keyword_predict(b.articles[i], rule) == Label::Flood;
  }
  return double(hit) / double(flood);
}

bool has_stem(const std::string &text) {
  return classify::keyword_match(text, classify::KeywordRule{});
}

const RegionScore &country(const ScoreReport &r) { return r.regions.front(); }

// Runs the whole pipeline on a bundle and scores it.
ScoreReport run_and_score(const SynthConfig &cfg, const testing::TempDir &dir, const std::string &tag) {
  const auto bundle = generate(cfg, gaz());
  write_bundle(bundle, dir / (tag + "-bundle"), gaz());
  pipeline::PipelineConfig pc;
  pc.bundle = dir / (tag + "-bundle");
  pc.out_dir = dir / (tag + "-out");
  std::ostringstream out, err;
  pipeline::run_all(pc, {out, err});
  return score_pipeline(pc.bundle, pc.out_dir, gaz());
}

}  // namespace

TEST_CASE("generation is deterministic per seed") {
  testing::TempDir dir("synth-det");
  const auto cfg = small();
  write_bundle(generate(cfg, gaz()), dir / "a", gaz());
  write_bundle(generate(cfg, gaz()), dir / "b", gaz());
  std::size_t files = 0;
  for (const auto &entry : std::filesystem::directory_iterator(dir / "a")) {
    const auto name = entry.path().filename();
    CAPTURE(name);
    CHECK(read_file(entry.path()) == read_file(dir / "b" / name));
    ++files;
  }
  CHECK(files == 9);
  auto other = cfg;
  other.seed = 8;
  write_bundle(generate(other, gaz()), dir / "c", gaz());
  CHECK(read_file(dir / "a" / "corpus.jsonl") != read_file(dir / "c" / "corpus.jsonl"));
}

TEST_CASE("bundle contents are consistent") {
  const auto cfg = small();
  const auto b = generate(cfg, gaz());
  CHECK(b.articles.size() == 2500);
  REQUIRE(b.truth.size() == b.articles.size());
  CHECK(b.embeddings.size() == b.articles.size());
  CHECK(b.embeddings.dim() == cfg.embedding_dim);
  CHECK(b.annotations.size() == 600);
  std::size_t ann_flood = 0;
  for (const auto &a : b.annotations) ann_flood += a.label == Label::Flood;
  CHECK(ann_flood == 200);
  CHECK(b.satellite.size() == 8u * 44u);
  CHECK(b.emdat.size() == cfg.emdat_events);
  CHECK(b.intensity.size() == 9);
  for (std::size_t i = 0; i < b.articles.size(); ++i) {
    const auto &a = b.articles[i];
    const auto &t = b.truth[i];
    CHECK(t.article_id == a.id);
    CHECK(iso_week_of(a.published) == t.week);
    CHECK(cfg.weeks.contains(t.week));
    CHECK(gaz().find(t.region_id) != nullptr);
    CHECK(b.embeddings.find(a.id) == long(i));
    if (i) CHECK(b.articles[i - 1].published <= a.published);
    if (t.label == Label::Flood) CHECK(t.has_keyword == has_stem(a.title + " " + a.body));
  }
  // Every article parses back through the strict loader.
  testing::TempDir dir("synth-load");
  write_bundle(b, dir.path(), gaz());
  const auto loaded = corpus::load_corpus(dir / "corpus.jsonl");
  CHECK(loaded.errors.empty());
  CHECK(loaded.corpus.size() == b.articles.size());
  const auto gt = load_ground_truth(dir / "ground_truth.csv");
  REQUIRE(gt.size() == b.truth.size());
  CHECK(gt[17].region_id == b.truth[17].region_id);
  CHECK(gt[17].annotated == b.truth[17].annotated);
}

TEST_CASE("keyword probability controls keyword recall") {
  auto cfg = small();
  cfg.keyword_prob = 1.0;
  CHECK(keyword_recall(generate(cfg, gaz())) == 1.0);
  cfg.keyword_prob = 0.6;
  cfg.total_articles = 8000;
  CHECK(std::abs(keyword_recall(generate(cfg, gaz())) - 0.6) <= 0.05);
  cfg.keyword_prob = 0.0;
  CHECK(keyword_recall(generate(cfg, gaz())) == 0.0);
}

TEST_CASE("zero intensity plants no floods") {
  auto cfg = small();
  cfg.bumps.clear();
  cfg.intensity_floor = 0.0;
  cfg.emdat_events = 0;
  const auto b = generate(cfg, gaz());
  CHECK(std::none_of(b.truth.begin(), b.truth.end(), [](const auto &t) { return t.label == Label::Flood; }));
  for (const auto &s : b.intensity)
    for (double v : s.values()) CHECK(v == 0.0);
  CHECK(b.emdat.empty());
  // A perfect classifier yields an all-zero news series.
  geo::PredictionMap pred;
  for (const auto &t : b.truth) pred[t.article_id] = t.label;
  const auto ev = geo::build_events(corpus::Corpus(b.articles), pred, gaz());
  const auto s = series::build_flood_series(ev, "bd", cfg.weeks, series::Denominators::from_events(ev), gaz());
  CHECK(s.points.size() == 44);
  for (double v : s.values()) CHECK(v == 0.0);
}

TEST_CASE("templates") {
  CHECK(contextual_templates().size() >= 20);
  for (const auto &t : contextual_templates()) CHECK_FALSE(has_stem(t));
  for (const auto &t : keyword_templates()) CHECK(has_stem(t));
  for (const auto &t : distractor_templates()) CHECK(has_stem(t));
}

TEST_CASE("planted counts conserve across divisions") {
  const auto b = generate(small(), gaz());
  std::map<IsoWeek, double> by_week;
  for (const auto &t : b.truth) {
    if (t.label == Label::Flood) {
      CHECK(gaz().division_of(t.region_id) != nullptr);
      by_week[t.week] += 1;
    }
  }
  double planted_total = 0;
  for (auto &[w, v] : by_week) planted_total += v;
  CHECK(planted_total > 100);
  // Planted intensity: country row is the sum of the division rows.
  for (const auto &[w, v] : b.intensity.back().points) {
    double sum = 0;
    for (std::size_t i = 0; i + 1 < b.intensity.size(); ++i) sum += b.intensity[i].points.at(w);
    CHECK(v == doctest::Approx(sum).epsilon(1e-12));
  }
}

TEST_CASE("config validation") {
  auto cfg = small();
  cfg.keyword_prob = 1.5;
  CHECK_THROWS_AS(cfg.validate(), UsageError);
  cfg = small();
  cfg.bumps["bd-sylhet-sunamganj"] = {{1, 1, 1}};
  CHECK_THROWS_AS(generate(cfg, gaz()), UsageError);
  cfg = small();
  cfg.total_articles = 10;
  CHECK_THROWS_AS(generate(cfg, gaz()), UsageError);
  CHECK(small().describe().find("seed=7") != std::string::npos);
}

TEST_CASE("a perfect classifier recovers the planted series") {
  testing::TempDir dir("synth-perfect");
  const auto cfg = small();
  const auto b = generate(cfg, gaz());
  write_bundle(b, dir / "bundle", gaz());
  pipeline::PipelineConfig pc;
  pc.bundle = dir / "bundle";
  pc.out_dir = dir / "out";
  std::ostringstream out, err;
  pipeline::ingest(pc, {out, err});
  csv::Writer w({"article_id", "prediction", "score"});
  for (const auto &t : b.truth) w.row({t.article_id, std::string(corpus::label_name(t.label)), "1"});
  write_file_atomic(dir / "out" / "predictions.csv", w.str());
  pipeline::extract(pc, {out, err});
  pipeline::build_series(pc, {out, err});
  const auto r = score_pipeline(pc.bundle, pc.out_dir, gaz());
  CHECK(r.accuracy == 1.0);
  CHECK(r.f1 == 1.0);
  CHECK(r.region_recovery >= 0.95);
  CHECK(r.week_recovery == 1.0);
  CHECK(std::abs(r.detected_district_fraction - r.planted_district_fraction) <= 0.05);
  REQUIRE(country(r).news_rho.has_value());
  CHECK(*country(r).news_rho >= 0.9);
}

TEST_CASE("corpus size barely moves the country correlation") {
  testing::TempDir dir("synth-rate");
  auto cfg = small();
  cfg.total_articles.reset();
  cfg.base_rate = 40;
  const auto a = run_and_score(cfg, dir, "a");
  cfg.base_rate = 80;
  const auto b = run_and_score(cfg, dir, "b");
  REQUIRE(country(a).news_rho.has_value());
  REQUIRE(country(b).news_rho.has_value());
  CHECK(std::abs(*country(a).news_rho - *country(b).news_rho) <= 0.05);
}

TEST_CASE("scoring requires pipeline outputs") {
  testing::TempDir dir("synth-missing");
  write_bundle(generate(small(), gaz()), dir / "bundle", gaz());
  std::filesystem::create_directories(dir / "work");
  CHECK_THROWS_WITH_AS(score_pipeline(dir / "bundle", dir / "work", gaz()),
                       doctest::Contains("missing pipeline output"), DataError);
}
