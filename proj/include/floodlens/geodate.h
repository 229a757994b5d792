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

#ifndef FLOODLENS_GEODATE_H_
#define FLOODLENS_GEODATE_H_

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "floodlens/corpus.h"
#include "floodlens/dates.h"

namespace floodlens::geo {

enum class Level { Country, Division, District };

std::string_view level_name(Level level);

struct Region {
  std::string id;
  std::string name;
  Level level = Level::Country;
  std::string parent_id;             // empty for the country
  std::vector<std::string> aliases;  // includes the name
};

// Administrative hierarchy with alias matching. Exactly one country and
// eight divisions; districts hang under divisions. Alias token sequences are
// unique across regions.
class Gazetteer {
 public:
  // CSV `region_id,name,level,parent_id,aliases`, aliases pipe-separated.
  static Gazetteer parse(std::string_view csv_text, const std::string &source);
  static Gazetteer load(const std::filesystem::path &path);
  // The Bangladesh gazetteer shipped in data/gazetteer_bd.csv.
  static const Gazetteer &builtin();
  static std::string_view builtin_csv();

  const std::vector<Region> &regions() const { return regions_; }
  const Region *find(std::string_view id) const;
  const Region &country() const { return regions_[country_]; }
  std::vector<const Region *> divisions() const;
  std::vector<const Region *> districts_of(std::string_view division_id) const;

  // True when |id| is |ancestor| or lies below it.
  bool within(std::string_view id, std::string_view ancestor) const;
  // The division containing |id| (itself for a division), or nullptr.
  const Region *division_of(std::string_view id) const;

  // Region whose id, name or alias equals |text| (case-insensitive).
  const Region *resolve(std::string_view text) const;

  struct Mention {
    std::size_t region;     // index into regions()
    std::size_t alias;      // index into that region's aliases
    std::size_t position;   // token offset of the match
  };
  // Non-overlapping alias mentions, longest match first, left to right.
  std::vector<Mention> mentions(const std::vector<std::string> &tokens) const;

 private:
  struct AliasKey {
    std::vector<std::string> tokens;
    std::size_t region;
    std::size_t alias;
  };

  std::vector<Region> regions_;
  std::unordered_map<std::string, std::size_t> by_id_;
  std::size_t country_ = 0;
  // first token -> candidate aliases, longest first
  std::unordered_map<std::string, std::vector<AliasKey>> by_first_token_;
  std::unordered_map<std::string, std::size_t> by_key_;
};

// Tokens used for alias matching: lowercase, no minimum length.
std::vector<std::string> match_tokens(std::string_view text);

struct Evidence {
  std::string region_id;
  std::string alias;
  int title_count = 0;
  int body_count = 0;
};

struct Location {
  std::string region_id;
  std::vector<Evidence> evidence;  // every matched alias
  // More than one region other than the country was mentioned.
  bool multi_region = false;
};

// Scores each region as 2 x title mentions + body mentions and picks the
// best district, else the best division, else the country. Ties go to the
// region present in the title, then to the earliest first mention.
Location extract_location(const corpus::Article &article, const Gazetteer &gazetteer);

IsoWeek extract_week(const corpus::Article &article);

struct EventRecord {
  std::string article_id;
  corpus::Label label = corpus::Label::NotFlood;
  std::string region_id;
  IsoWeek week;
};

using PredictionMap = std::unordered_map<std::string, corpus::Label>;

// One record per article in corpus order. Throws DataError when an article
// has no prediction.
std::vector<EventRecord> build_events(const corpus::Corpus &corpus,
                                      const PredictionMap &predictions,
                                      const Gazetteer &gazetteer,
                                      unsigned threads = 1);

// CSV `article_id,label,region_id,iso_week`.
void write_events(std::span<const EventRecord> events,
                  const std::filesystem::path &path);
std::vector<EventRecord> load_events(const std::filesystem::path &path,
                                     const Gazetteer &gazetteer);

}  // namespace floodlens::geo

#endif  // FLOODLENS_GEODATE_H_
