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

#ifndef FLOODLENS_SERIES_H_
#define FLOODLENS_SERIES_H_

#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "floodlens/dates.h"
#include "floodlens/geodate.h"

namespace floodlens::series {

// Intensity is the expected weekly flood-article count planted by synth.
enum class Unit { FloodFraction, AreaKm2, PeopleAffected, TweetIndex, Intensity };

std::string_view unit_name(Unit unit);
std::optional<Unit> parse_unit(std::string_view text);

// Weekly series. Weeks are the map keys, hence strictly increasing.
struct RegionSeries {
  std::string region_id;
  Unit unit = Unit::FloodFraction;
  std::map<IsoWeek, double> points;

  // Throws DataError on NaN, or on FloodFraction values outside [0,1].
  void validate() const;
  std::vector<double> values() const;
};

struct CountPoint {
  double flood = 0.0;
  double total = 0.0;
};

// Numerators and denominators kept apart so that regions can be merged by
// summing counts rather than averaging ratios.
struct CountSeries {
  std::string region_id;
  Unit unit = Unit::FloodFraction;
  WeekRange range;
  std::map<IsoWeek, CountPoint> points;  // every week of |range|

  RegionSeries to_series() const;
};

// Total published articles per (region, week).
class Denominators {
 public:
  // Region-agnostic in-corpus totals: every article of the week counts.
  static Denominators from_events(std::span<const geo::EventRecord> events);
  // CSV `region_id,iso_week,total_articles`. Rows with region_id "*" apply
  // to regions without rows of their own.
  static Denominators load(const std::filesystem::path &path);

  std::optional<double> total(std::string_view region_id, const IsoWeek &week) const;

 private:
  std::map<IsoWeek, double> national_;
  std::map<std::pair<std::string, IsoWeek>, double> regional_;
  std::map<std::string, bool, std::less<>> has_regional_;
};

// Smallest range covering every event week.
WeekRange event_week_range(std::span<const geo::EventRecord> events);

// value(w) = flood records located in |region_id| or below, divided by the
// region's denominator for w. Throws DataError naming the first week in
// |range| whose denominator is missing or zero.
CountSeries build_flood_counts(std::span<const geo::EventRecord> events,
                               std::string_view region_id, const WeekRange &range,
                               const Denominators &denominators,
                               const geo::Gazetteer &gazetteer);
RegionSeries build_flood_series(std::span<const geo::EventRecord> events,
                                std::string_view region_id, const WeekRange &range,
                                const Denominators &denominators,
                                const geo::Gazetteer &gazetteer);

// Country, the eight divisions and, optionally, every district, in
// gazetteer order, from a single pass over |events|.
std::vector<CountSeries> build_all_counts(std::span<const geo::EventRecord> events,
                                          const WeekRange &range,
                                          const Denominators &denominators,
                                          const geo::Gazetteer &gazetteer,
                                          bool include_districts);

// Sums numerators and denominators week by week. Inputs must share unit and
// week range.
CountSeries aggregate_counts(std::span<const CountSeries> parts,
                             std::string region_id);
RegionSeries aggregate_to_division(std::span<const CountSeries> districts,
                                   std::string division_id);

// `region_id,iso_week,value,unit`, shared by news, satellite, Twitter and
// EM-DAT series.
void write_series(std::span<const RegionSeries> series, const std::filesystem::path &path);
std::string series_csv(std::span<const RegionSeries> series);
// Series in first-appearance order of region ids.
std::vector<RegionSeries> load_series(const std::filesystem::path &path);

// `region_id,iso_week,flood_count,total_articles`.
void write_counts(std::span<const CountSeries> counts, const std::filesystem::path &path);
std::vector<CountSeries> load_counts(const std::filesystem::path &path);

}  // namespace floodlens::series

#endif  // FLOODLENS_SERIES_H_
