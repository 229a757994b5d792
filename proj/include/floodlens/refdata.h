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

#ifndef FLOODLENS_REFDATA_H_
#define FLOODLENS_REFDATA_H_

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "floodlens/dates.h"
#include "floodlens/geodate.h"
#include "floodlens/series.h"

namespace floodlens::refdata {

struct SatelliteRecord {
  std::string division_id;
  Date week_start;
  double area_km2 = 0.0;

  IsoWeek week() const { return iso_week_of(week_start); }
};

// CSV `division,week_start_date,inundated_area_km2`. Division names resolve
// through the gazetteer (any alias or region id).
std::vector<SatelliteRecord> read_satellite(const std::filesystem::path &path,
                                            const geo::Gazetteer &gazetteer);
void write_satellite(std::span<const SatelliteRecord> records,
                     const std::filesystem::path &path,
                     const geo::Gazetteer &gazetteer);

// One AreaKm2 series per division present (gazetteer order), then the
// country series: the per-week sum over divisions.
std::vector<series::RegionSeries> satellite_series(std::span<const SatelliteRecord> records,
                                                   const geo::Gazetteer &gazetteer);
std::vector<series::RegionSeries> load_satellite(const std::filesystem::path &path,
                                                 const geo::Gazetteer &gazetteer);

struct EmdatEvent {
  Date start;
  Date end;
  double people_affected = 0.0;

  WeekRange weeks() const { return {iso_week_of(start), iso_week_of(end)}; }
};

// CSV `start_date,end_date,people_affected`.
std::vector<EmdatEvent> read_emdat(const std::filesystem::path &path);
void write_emdat(std::span<const EmdatEvent> events, const std::filesystem::path &path);

// Spreads each event's people_affected uniformly over the ISO weeks it
// touches and sums overlapping events. Weeks of |range| without events are
// zero; without a range the series spans the events.
series::RegionSeries emdat_to_series(std::span<const EmdatEvent> events,
                                     const std::optional<WeekRange> &range,
                                     const std::string &country_id);

struct Paired {
  std::vector<IsoWeek> weeks;  // weeks of the first series
  std::vector<double> x;
  std::vector<double> y;

  std::size_t n() const { return x.size(); }
};

// Inner join on weeks: a(w) is paired with b(w - lag). Throws DataError
// "insufficient overlap" when fewer than three pairs remain.
Paired align(const series::RegionSeries &a, const series::RegionSeries &b, int lag = 0);

// Event-level pairing: each EM-DAT event against the largest news value
// inside its span. Events without any news week are dropped.
Paired event_level_pairs(std::span<const EmdatEvent> events,
                         const series::RegionSeries &news);

}  // namespace floodlens::refdata

#endif  // FLOODLENS_REFDATA_H_
