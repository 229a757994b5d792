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

#ifndef FLOODLENS_SYNTH_H_
#define FLOODLENS_SYNTH_H_

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "floodlens/corpus.h"
#include "floodlens/dates.h"
#include "floodlens/embedding.h"
#include "floodlens/geodate.h"
#include "floodlens/refdata.h"
#include "floodlens/series.h"

namespace floodlens::synth {

// Gaussian bump of flood intensity (expected flood articles per week).
struct Bump {
  double center = 0.0;  // weeks after the first week of the range
  double width = 1.0;   // standard deviation in weeks
  double peak = 0.0;
};

struct SynthConfig {
  std::uint64_t seed = 7;
  WeekRange weeks{{2017, 9}, {2017, 52}};

  // Division id -> intensity bumps.
  std::map<std::string, std::vector<Bump>> bumps = default_bumps();
  double intensity_floor = 0.1;  // added to every division-week

  // Either a fixed corpus size (non-flood count = total - flood count,
  // spread multinomially over weeks) or a Poisson base rate per week.
  std::optional<std::size_t> total_articles = 5000;
  double base_rate = 80.0;

  std::size_t annotated_flood = 400;
  std::size_t annotated_not_flood = 980;

  double keyword_prob = 0.6;     // flood article carries a keyword stem
  double distractor_prob = 0.12;  // non-flood article carries a stem
  double context_leak_prob = 0.1;  // non-flood article has a contextual phrase
  double topic_mix_prob = 0.25;    // flood article has an unrelated topic phrase
  double district_prob = 0.5;    // flood article names a district
  double district_coverage = 0.8;  // share of districts that ever flood
  double secondary_mention_prob = 0.15;

  double area_scale = 120.0;  // km² per unit intensity
  double noise_scale = 0.05;  // satellite noise sd, in units of area_scale

  std::uint32_t embedding_dim = 32;
  double embedding_separation = 3.0;  // distance of class means / sigma

  // Disaster-database events: the largest bumps with disjoint core windows
  // (center +- width/2); people affected follow the planted national mass.
  std::size_t emdat_events = 5;
  double people_per_intensity_week = 20000.0;

  static std::map<std::string, std::vector<Bump>> default_bumps();
  void validate() const;
  // key=value lines, in a fixed order.
  std::string describe() const;
};

struct GroundTruth {
  std::string article_id;
  corpus::Label label = corpus::Label::NotFlood;
  std::string region_id;
  IsoWeek week;
  bool annotated = false;
  bool has_keyword = false;
};

struct Bundle {
  SynthConfig config;
  std::vector<corpus::Article> articles;  // sorted by id == publication order
  std::vector<corpus::Annotation> annotations;
  embedding::EmbeddingTable embeddings;
  std::vector<refdata::SatelliteRecord> satellite;
  std::vector<refdata::EmdatEvent> emdat;
  std::vector<GroundTruth> truth;
  // Planted intensity per division, then the country sum.
  std::vector<series::RegionSeries> intensity;
};

// Contextual phrases carry no keyword stem; keyword and distractor phrases
// always do. Exposed for tests.
const std::vector<std::string> &contextual_templates();
const std::vector<std::string> &keyword_templates();
const std::vector<std::string> &distractor_templates();

Bundle generate(const SynthConfig &config, const geo::Gazetteer &gazetteer);

// Writes corpus.jsonl, annotations.csv, embeddings.flemb (+ .json sidecar),
// satellite.csv, emdat.csv, ground_truth.csv, planted_intensity.csv and
// synth_config.txt into |dir|.
void write_bundle(const Bundle &bundle, const std::filesystem::path &dir,
                  const geo::Gazetteer &gazetteer);

std::vector<GroundTruth> load_ground_truth(const std::filesystem::path &path);

struct RegionScore {
  std::string region_id;
  double planted_peak = 0.0;
  std::optional<double> news_rho;     // news vs satellite
  std::optional<double> planted_rho;  // planted intensity vs satellite
  std::optional<double> news_p;
};

struct ScoreReport {
  double accuracy = 0.0, precision = 0.0, recall = 0.0, f1 = 0.0;
  double region_recovery = 0.0;  // flood-predicted flood articles, planted region
  double week_recovery = 0.0;
  double planted_district_fraction = 0.0;
  double detected_district_fraction = 0.0;
  std::vector<RegionScore> regions;  // country first, then divisions

  std::string str() const;
};

// Compares pipeline outputs in |work_dir| (predictions.csv, events.csv,
// series.csv) against the ground truth of |bundle_dir|. Throws DataError
// when an output is missing.
ScoreReport score_pipeline(const std::filesystem::path &bundle_dir,
                           const std::filesystem::path &work_dir,
                           const geo::Gazetteer &gazetteer);

}  // namespace floodlens::synth

#endif  // FLOODLENS_SYNTH_H_
