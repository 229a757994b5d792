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

#include "floodlens/refdata.h"

#include <algorithm>
#include <map>
#include <set>

#include "floodlens/csv.h"
#include "floodlens/error.h"
#include "floodlens/io.h"

namespace floodlens::refdata {

using series::RegionSeries;
using series::Unit;

std::vector<SatelliteRecord> read_satellite(const std::filesystem::path &path,
                                            const geo::Gazetteer &gazetteer) {
  csv::Table table = csv::Table::read(path);
  const std::size_t div_col = table.index("division");
  const std::size_t date_col = table.index("week_start_date");
  const std::size_t area_col = table.index("inundated_area_km2");
  std::vector<SatelliteRecord> out;
  std::set<std::pair<std::string, IsoWeek>> seen;
  for (const auto &rec : table.records()) {
    const geo::Region *r = gazetteer.resolve(rec.fields[div_col]);
    if (!r || r->level != geo::Level::Division) {
      throw DataError(table.where(rec), "unknown division '" + rec.fields[div_col] + "'");
    }
    auto date = parse_date(trim(rec.fields[date_col]));
    if (!date) throw DataError(table.where(rec), "invalid week_start_date");
    double area;
    if (!parse_double(rec.fields[area_col], area) || area < 0) {
      throw DataError(table.where(rec), "inundated_area_km2 must be finite and >= 0");
    }
    SatelliteRecord s{r->id, *date, area};
    if (!seen.emplace(s.division_id, s.week()).second) {
      throw DataError(table.where(rec), "duplicate row for " + r->name + " in week " +
                                            s.week().str());
    }
    out.push_back(std::move(s));
  }
  return out;
}

void write_satellite(std::span<const SatelliteRecord> records,
                     const std::filesystem::path &path, const geo::Gazetteer &gazetteer) {
  csv::Writer w({"division", "week_start_date", "inundated_area_km2"});
  for (const auto &r : records) {
    const geo::Region *region = gazetteer.find(r.division_id);
    w.row({region ? region->name : r.division_id, format_date(r.week_start),
           format_double(r.area_km2)});
  }
  write_file_atomic(path, w.str());
}

std::vector<RegionSeries> satellite_series(std::span<const SatelliteRecord> records,
                                           const geo::Gazetteer &gazetteer) {
  std::map<std::string, RegionSeries> by_division;
  RegionSeries country{gazetteer.country().id, Unit::AreaKm2, {}};
  for (const auto &r : records) {
    auto &s = by_division[r.division_id];
    s.region_id = r.division_id;
    s.unit = Unit::AreaKm2;
    s.points[r.week()] = r.area_km2;
    country.points[r.week()] += r.area_km2;
  }
  std::vector<RegionSeries> out;
  for (const geo::Region *d : gazetteer.divisions()) {
    auto it = by_division.find(d->id);
    if (it != by_division.end()) out.push_back(std::move(it->second));
  }
  if (!records.empty()) out.push_back(std::move(country));
  return out;
}

std::vector<RegionSeries> load_satellite(const std::filesystem::path &path,
                                         const geo::Gazetteer &gazetteer) {
  return satellite_series(read_satellite(path, gazetteer), gazetteer);
}

std::vector<EmdatEvent> read_emdat(const std::filesystem::path &path) {
  csv::Table table = csv::Table::read(path);
  const std::size_t start_col = table.index("start_date");
  const std::size_t end_col = table.index("end_date");
  const std::size_t people_col = table.index("people_affected");
  std::vector<EmdatEvent> out;
  for (const auto &rec : table.records()) {
    auto start = parse_date(trim(rec.fields[start_col]));
    auto end = parse_date(trim(rec.fields[end_col]));
    if (!start || !end) throw DataError(table.where(rec), "invalid date");
    if (std::chrono::sys_days(*end) < std::chrono::sys_days(*start)) {
      throw DataError(table.where(rec), "end_date precedes start_date");
    }
    double people;
    if (!parse_double(rec.fields[people_col], people) || people < 0) {
      throw DataError(table.where(rec), "people_affected must be a non-negative number");
    }
    out.push_back({*start, *end, people});
  }
  return out;
}

void write_emdat(std::span<const EmdatEvent> events, const std::filesystem::path &path) {
  csv::Writer w({"start_date", "end_date", "people_affected"});
  for (const auto &e : events) {
    w.row({format_date(e.start), format_date(e.end), format_double(e.people_affected)});
  }
  write_file_atomic(path, w.str());
}

RegionSeries emdat_to_series(std::span<const EmdatEvent> events,
                             const std::optional<WeekRange> &range,
                             const std::string &country_id) {
  if (events.empty()) throw DataError("emdat", "no events");
  WeekRange span = events.front().weeks();
  for (const auto &e : events) {
    span.first = std::min(span.first, e.weeks().first);
    span.last = std::max(span.last, e.weeks().last);
  }
  const WeekRange out_range = range.value_or(span);

  RegionSeries s{country_id, Unit::PeopleAffected, {}};
  for (const IsoWeek &w : out_range.weeks()) s.points[w] = 0.0;
  for (const auto &e : events) {
    WeekRange weeks = e.weeks();
    const double share = e.people_affected / static_cast<double>(weeks.size());
    for (const IsoWeek &w : weeks.weeks()) {
      if (out_range.contains(w)) s.points[w] += share;
    }
  }
  return s;
}

Paired align(const RegionSeries &a, const RegionSeries &b, int lag) {
  Paired p;
  for (const auto &[week, value] : a.points) {
    auto it = b.points.find(lag == 0 ? week : week.plus(-lag));
    if (it == b.points.end()) continue;
    p.weeks.push_back(week);
    p.x.push_back(value);
    p.y.push_back(it->second);
  }
  if (p.n() < 3) {
    throw DataError("align " + a.region_id + " vs " + b.region_id,
                    "insufficient overlap (" + std::to_string(p.n()) + " common weeks)");
  }
  return p;
}

Paired event_level_pairs(std::span<const EmdatEvent> events, const RegionSeries &news) {
  Paired p;
  for (const auto &e : events) {
    WeekRange weeks = e.weeks();
    std::optional<double> best;
    for (auto it = news.points.lower_bound(weeks.first);
         it != news.points.end() && it->first <= weeks.last; ++it) {
      best = best ? std::max(*best, it->second) : it->second;
    }
    if (!best) continue;
    p.weeks.push_back(weeks.first);
    p.x.push_back(*best);
    p.y.push_back(e.people_affected);
  }
  if (p.n() < 3) {
    throw DataError("emdat events vs " + news.region_id,
                    "insufficient overlap (" + std::to_string(p.n()) + " events with news)");
  }
  return p;
}

}  // namespace floodlens::refdata
