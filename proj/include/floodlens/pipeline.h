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

#ifndef FLOODLENS_PIPELINE_H_
#define FLOODLENS_PIPELINE_H_

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "floodlens/classify.h"
#include "floodlens/corpus.h"
#include "floodlens/dates.h"
#include "floodlens/forest.h"
#include "floodlens/model.h"
#include "floodlens/stats.h"
#include "floodlens/synth.h"
#include "floodlens/textfeat.h"

namespace floodlens::pipeline {

namespace fs = std::filesystem;

// Everything a run needs. Stages read their inputs from |out_dir| (files
// written by earlier stages) or from the input paths below, and write their
// artifacts back to |out_dir|.
struct PipelineConfig {
  // Inputs. A bundle directory fills in any of these left empty.
  fs::path bundle;
  fs::path corpus;
  fs::path annotations;
  fs::path gazetteer;  // empty: built-in Bangladesh gazetteer
  fs::path satellite;
  fs::path emdat;
  fs::path twitter;
  fs::path embeddings;
  fs::path denominators;  // empty: in-corpus weekly totals
  fs::path split;         // explicit `article_id,partition` file
  fs::path out_dir = "floodlens-out";

  std::vector<std::string> sources = corpus::default_sources();  // empty: any
  bool skip_invalid = false;

  std::uint64_t seed = 7;
  unsigned threads = 1;

  // Methods trained and evaluated; empty means all five (the embedding head
  // only when embeddings are configured).
  std::vector<classify::Method> methods;
  classify::Method predictor = classify::Method::Logistic;
  double test_fraction = 880.0 / 1380.0;
  textfeat::VocabConfig vocab;
  classify::KeywordRule keywords;
  classify::LinearConfig logistic;
  classify::LinearConfig svm = classify::default_svm_config();
  classify::ForestConfig forest;
  classify::LinearConfig head;

  std::optional<WeekRange> weeks;
  bool districts = false;
  int lag = 0;
  stats::PValueMode pvalue = stats::PValueMode::Auto;

  synth::SynthConfig synth;
};

struct KeyInfo {
  std::string key;
  std::string help;
};

// Every key accepted by config files, FLOODLENS_* variables and --key flags.
// Setting "seed" also resets the split, SVM, forest and synth seeds, so a
// later component-specific key can still override one of them.
const std::vector<KeyInfo> &config_keys();

// Throws UsageError for unknown keys and malformed values.
void apply_setting(PipelineConfig &config, const std::string &key, const std::string &value);

// key=value lines; '#' starts a comment; blank lines are ignored.
void apply_config_file(PipelineConfig &config, const fs::path &path);

// "FLOODLENS_" + key uppercased with '.' and '-' mapped to '_'.
std::string env_name(const std::string &key);

// Canonical key=value dump, written next to the artifacts of every stage.
std::string describe(const PipelineConfig &config);

struct Streams {
  std::ostream &out;
  std::ostream &err;
};

// Standard artifact names inside out_dir.
inline constexpr const char *kCorpusFile = "corpus.jsonl";
inline constexpr const char *kAnnotationsFile = "annotations.csv";
inline constexpr const char *kSplitFile = "split.csv";
inline constexpr const char *kVocabularyFile = "vocabulary.csv";
inline constexpr const char *kEvalFile = "eval.csv";
inline constexpr const char *kPredictionsFile = "predictions.csv";
inline constexpr const char *kEventsFile = "events.csv";
inline constexpr const char *kCountsFile = "news_counts.csv";
inline constexpr const char *kNewsSeriesFile = "news_series.csv";
inline constexpr const char *kSatelliteSeriesFile = "satellite_series.csv";
inline constexpr const char *kEmdatSeriesFile = "emdat_series.csv";
inline constexpr const char *kTwitterSeriesFile = "twitter_series.csv";
inline constexpr const char *kCorrelationsFile = "correlations.csv";
inline constexpr const char *kReportDir = "report";

std::string model_file(classify::Method m);

void ingest(const PipelineConfig &config, Streams io);
void train(const PipelineConfig &config, Streams io);
void eval(const PipelineConfig &config, Streams io);
void predict(const PipelineConfig &config, Streams io);
void extract(const PipelineConfig &config, Streams io);
void build_series(const PipelineConfig &config, Streams io);
void correlate(const PipelineConfig &config, Streams io);
void report(const PipelineConfig &config, Streams io);
void synthesize(const PipelineConfig &config, Streams io);

// ingest through report in order.
void run_all(const PipelineConfig &config, Streams io);

}  // namespace floodlens::pipeline

#endif  // FLOODLENS_PIPELINE_H_
