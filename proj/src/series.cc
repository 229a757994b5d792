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

#include "floodlens/series.h"

#include <algorithm>
#include <cmath>
#include <unordered_map>

#include "floodlens/csv.h"
#include "floodlens/error.h"
#include "floodlens/io.h"

namespace floodlens::series {

using corpus::Label;

std::string_view unit_name(Unit unit) {
  switch (unit) {
    case Unit::FloodFraction: return "flood_fraction";
    case Unit::AreaKm2: return "area_km2";
    case Unit::PeopleAffected: return "people_affected";
    case Unit::TweetIndex: return "tweet_index";
    case Unit::Intensity: return "intensity";
  }
  return "?";
}

std::optional<Unit> parse_unit(std::string_view text) {
  for (Unit u : {Unit::FloodFraction, Unit::AreaKm2, Unit::PeopleAffected,
                 Unit::TweetIndex, Unit::Intensity}) {
    if (unit_name(u) == text) return u;
  }
  return std::nullopt;
}

void RegionSeries::validate() const {
  for (const auto &[week, v] : points) {
    if (std::isnan(v)) {
      throw DataError("series " + region_id, "NaN at " + week.str());
    }
    if (unit == Unit::FloodFraction && (v < 0.0 || v > 1.0)) {
      throw DataError("series " + region_id,
                      "flood fraction " + format_double(v) + " outside [0,1] at " +
                          week.str());
    }
  }
}

std::vector<double> RegionSeries::values() const {
  std::vector<double> out;
  out.reserve(points.size());
  for (const auto &[w, v] : points) out.push_back(v);
  return out;
}

RegionSeries CountSeries::to_series() const {
  RegionSeries s;
  s.region_id = region_id;
  s.unit = unit;
  for (const auto &[week, c] : points) {
    if (!(c.total > 0)) {
      throw DataError("series " + region_id,
                      "zero or missing denominator for week " + week.str());
    }
    s.points[week] = c.flood / c.total;
  }
  s.validate();
  return s;
}

Denominators Denominators::from_events(std::span<const geo::EventRecord> events) {
  Denominators d;
  for (const auto &e : events) d.national_[e.week] += 1.0;
  return d;
}

Denominators Denominators::load(const std::filesystem::path &path) {
  csv::Table table = csv::Table::read(path);
  const std::size_t region_col = table.index("region_id");
  const std::size_t week_col = table.index("iso_week");
  const std::size_t total_col = table.index("total_articles");
  Denominators d;
  for (const auto &rec : table.records()) {
    auto week = IsoWeek::parse(trim(rec.fields[week_col]));
    if (!week) throw DataError(table.where(rec), "invalid ISO week");
    double total;
    if (!parse_double(rec.fields[total_col], total) || total < 0) {
      throw DataError(table.where(rec), "total_articles must be a non-negative number");
    }
    std::string region = trim(rec.fields[region_col]);
    bool inserted;
    if (region == "*") {
      inserted = d.national_.emplace(*week, total).second;
    } else {
      inserted = d.regional_.emplace(std::make_pair(region, *week), total).second;
      d.has_regional_[region] = true;
    }
    if (!inserted) throw DataError(table.where(rec), "duplicate (region, week) row");
  }
  return d;
}

std::optional<double> Denominators::total(std::string_view region_id,
                                          const IsoWeek &week) const {
  if (has_regional_.find(region_id) != has_regional_.end()) {
    auto it = regional_.find({std::string(region_id), week});
    if (it == regional_.end()) return std::nullopt;
    return it->second;
  }
  auto it = national_.find(week);
  if (it == national_.end()) return std::nullopt;
  return it->second;
}

WeekRange event_week_range(std::span<const geo::EventRecord> events) {
  if (events.empty()) throw DataError("series", "no events");
  WeekRange r{events.front().week, events.front().week};
  for (const auto &e : events) {
    r.first = std::min(r.first, e.week);
    r.last = std::max(r.last, e.week);
  }
  return r;
}

namespace {

CountSeries with_denominators(std::string region_id, const WeekRange &range,
                              const std::map<IsoWeek, double> &flood,
                              const Denominators &denominators) {
  CountSeries s;
  s.region_id = std::move(region_id);
  s.range = range;
  for (const IsoWeek &w : range.weeks()) {
    auto total = denominators.total(s.region_id, w);
    if (!total || !(*total > 0)) {
      throw DataError("denominators", "zero or missing total for region " +
                                          s.region_id + " week " + w.str());
    }
    auto it = flood.find(w);
    double count = it == flood.end() ? 0.0 : it->second;
    if (count > *total) {
      throw DataError("denominators", "flood count exceeds total for region " +
                                          s.region_id + " week " + w.str());
    }
    s.points[w] = {count, *total};
  }
  return s;
}

}  // namespace

CountSeries build_flood_counts(std::span<const geo::EventRecord> events,
                               std::string_view region_id, const WeekRange &range,
                               const Denominators &denominators,
                               const geo::Gazetteer &gazetteer) {
  if (!gazetteer.find(region_id)) {
    throw DataError("series", "unknown region '" + std::string(region_id) + "'");
  }
  std::map<IsoWeek, double> flood;
  for (const auto &e : events) {
    if (e.label == Label::Flood && range.contains(e.week) &&
        gazetteer.within(e.region_id, region_id)) {
      flood[e.week] += 1.0;
    }
  }
  return with_denominators(std::string(region_id), range, flood, denominators);
}

RegionSeries build_flood_series(std::span<const geo::EventRecord> events,
                                std::string_view region_id, const WeekRange &range,
                                const Denominators &denominators,
                                const geo::Gazetteer &gazetteer) {
  return build_flood_counts(events, region_id, range, denominators, gazetteer).to_series();
}

std::vector<CountSeries> build_all_counts(std::span<const geo::EventRecord> events,
                                          const WeekRange &range,
                                          const Denominators &denominators,
                                          const geo::Gazetteer &gazetteer,
                                          bool include_districts) {
  std::unordered_map<std::string, std::map<IsoWeek, double>> flood;
  for (const auto &e : events) {
    if (e.label != Label::Flood || !range.contains(e.week)) continue;
    const geo::Region *r = gazetteer.find(e.region_id);
    if (!r) throw DataError("events", "unknown region '" + e.region_id + "'");
    while (r) {
      flood[r->id][e.week] += 1.0;
      r = r->parent_id.empty() ? nullptr : gazetteer.find(r->parent_id);
    }
  }
  std::vector<CountSeries> out;
  for (const auto &region : gazetteer.regions()) {
    if (region.level == geo::Level::District && !include_districts) continue;
    out.push_back(with_denominators(region.id, range, flood[region.id], denominators));
  }
  return out;
}

CountSeries aggregate_counts(std::span<const CountSeries> parts, std::string region_id) {
  if (parts.empty()) throw DataError("aggregate", "no input series");
  CountSeries out;
  out.region_id = std::move(region_id);
  out.unit = parts.front().unit;
  out.range = parts.front().range;
  for (const auto &p : parts) {
    if (p.unit != out.unit) {
      throw DataError("aggregate", "mixed units (" + std::string(unit_name(p.unit)) +
                                       " vs " + std::string(unit_name(out.unit)) + ")");
    }
    if (p.range.first != out.range.first || p.range.last != out.range.last) {
      throw DataError("aggregate", "series " + p.region_id + " covers " +
                                       p.range.str() + ", expected " + out.range.str());
    }
    for (const auto &[w, c] : p.points) {
      CountPoint &acc = out.points[w];
      acc.flood += c.flood;
      acc.total += c.total;
    }
  }
  return out;
}

RegionSeries aggregate_to_division(std::span<const CountSeries> districts,
                                   std::string division_id) {
  return aggregate_counts(districts, std::move(division_id)).to_series();
}

std::string series_csv(std::span<const RegionSeries> series) {
  csv::Writer w({"region_id", "iso_week", "value", "unit"});
  for (const auto &s : series) {
    for (const auto &[week, v] : s.points) {
      w.row({s.region_id, week.str(), format_double(v), std::string(unit_name(s.unit))});
    }
  }
  return w.str();
}

void write_series(std::span<const RegionSeries> series, const std::filesystem::path &path) {
  write_file_atomic(path, series_csv(series));
}

std::vector<RegionSeries> load_series(const std::filesystem::path &path) {
  csv::Table table = csv::Table::read(path);
  const std::size_t region_col = table.index("region_id");
  const std::size_t week_col = table.index("iso_week");
  const std::size_t value_col = table.index("value");
  const std::size_t unit_col = table.index("unit");
  std::vector<RegionSeries> out;
  std::unordered_map<std::string, std::size_t> index;
  for (const auto &rec : table.records()) {
    std::string region = trim(rec.fields[region_col]);
    auto week = IsoWeek::parse(trim(rec.fields[week_col]));
    if (!week) throw DataError(table.where(rec), "invalid ISO week");
    double value;
    if (!parse_double(rec.fields[value_col], value)) {
      throw DataError(table.where(rec), "value must be a finite number");
    }
    auto unit = parse_unit(trim(rec.fields[unit_col]));
    if (!unit) throw DataError(table.where(rec), "unknown unit '" + rec.fields[unit_col] + "'");
    auto [it, inserted] = index.emplace(region, out.size());
    if (inserted) {
      out.push_back(RegionSeries{region, *unit, {}});
    }
    RegionSeries &s = out[it->second];
    if (s.unit != *unit) throw DataError(table.where(rec), "mixed units within region " + region);
    if (!s.points.emplace(*week, value).second) {
      throw DataError(table.where(rec), "duplicate week " + week->str() + " for " + region);
    }
  }
  for (const auto &s : out) {
    try {
      s.validate();
    } catch (const DataError &e) {
      throw DataError(path.string(), e.what());
    }
  }
  return out;
}

void write_counts(std::span<const CountSeries> counts, const std::filesystem::path &path) {
  csv::Writer w({"region_id", "iso_week", "flood_count", "total_articles"});
  for (const auto &s : counts) {
    for (const auto &[week, c] : s.points) {
      w.row({s.region_id, week.str(), format_double(c.flood), format_double(c.total)});
    }
  }
  write_file_atomic(path, w.str());
}

std::vector<CountSeries> load_counts(const std::filesystem::path &path) {
  csv::Table table = csv::Table::read(path);
  const std::size_t region_col = table.index("region_id");
  const std::size_t week_col = table.index("iso_week");
  const std::size_t flood_col = table.index("flood_count");
  const std::size_t total_col = table.index("total_articles");
  std::vector<CountSeries> out;
  std::unordered_map<std::string, std::size_t> index;
  for (const auto &rec : table.records()) {
    auto week = IsoWeek::parse(trim(rec.fields[week_col]));
    double flood, total;
    if (!week || !parse_double(rec.fields[flood_col], flood) ||
        !parse_double(rec.fields[total_col], total)) {
      throw DataError(table.where(rec), "malformed count row");
    }
    std::string region = trim(rec.fields[region_col]);
    auto [it, inserted] = index.emplace(region, out.size());
    if (inserted) {
      CountSeries s;
      s.region_id = region;
      s.range = {*week, *week};
      out.push_back(std::move(s));
    }
    CountSeries &s = out[it->second];
    s.points[*week] = {flood, total};
    s.range.first = std::min(s.range.first, *week);
    s.range.last = std::max(s.range.last, *week);
  }
  return out;
}

}  // namespace floodlens::series
