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

#include "floodlens/geodate.h"

#include <algorithm>
#include <map>
#include <thread>

#include "floodlens/csv.h"
#include "floodlens/error.h"
#include "floodlens/io.h"
#include "floodlens/textfeat.h"

namespace floodlens::geo {

extern const std::string_view kBuiltinGazetteerCsv;

using corpus::Label;

std::string_view level_name(Level level) {
  switch (level) {
    case Level::Country: return "country";
    case Level::Division: return "division";
    case Level::District: return "district";
  }
  return "?";
}

std::vector<std::string> match_tokens(std::string_view text) {
  return textfeat::tokenize(text, {.lowercase = true, .min_length = 1});
}

namespace {

std::string join_tokens(const std::vector<std::string> &tokens) {
  std::string out;
  for (const auto &t : tokens) {
    if (!out.empty()) out.push_back(' ');
    out += t;
  }
  return out;
}

std::vector<std::string> split_aliases(const std::string &field) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= field.size()) {
    std::size_t bar = field.find('|', start);
    if (bar == std::string::npos) bar = field.size();
    std::string alias = trim(std::string_view(field).substr(start, bar - start));
    if (!alias.empty()) out.push_back(std::move(alias));
    start = bar + 1;
  }
  return out;
}

}  // namespace

Gazetteer Gazetteer::parse(std::string_view csv_text, const std::string &source) {
  csv::Table table = csv::Table::parse(csv_text, source);
  const std::size_t id_col = table.index("region_id");
  const std::size_t name_col = table.index("name");
  const std::size_t level_col = table.index("level");
  const std::size_t parent_col = table.index("parent_id");
  const std::size_t alias_col = table.index("aliases");

  Gazetteer g;
  std::vector<std::size_t> lines;
  for (const auto &rec : table.records()) {
    Region r;
    r.id = trim(rec.fields[id_col]);
    r.name = trim(rec.fields[name_col]);
    std::string level = to_lower_ascii(trim(rec.fields[level_col]));
    if (level == "country") {
      r.level = Level::Country;
    } else if (level == "division") {
      r.level = Level::Division;
    } else if (level == "district") {
      r.level = Level::District;
    } else {
      throw DataError(table.where(rec), "unknown level '" + level + "'");
    }
    r.parent_id = trim(rec.fields[parent_col]);
    if (r.id.empty() || r.name.empty()) {
      throw DataError(table.where(rec), "region_id and name are required");
    }
    r.aliases.push_back(r.name);
    for (auto &a : split_aliases(rec.fields[alias_col])) {
      if (std::find(r.aliases.begin(), r.aliases.end(), a) == r.aliases.end()) {
        r.aliases.push_back(std::move(a));
      }
    }
    if (!g.by_id_.emplace(r.id, g.regions_.size()).second) {
      throw DataError(table.where(rec), "duplicate region_id '" + r.id + "'");
    }
    g.regions_.push_back(std::move(r));
    lines.push_back(rec.line);
  }

  // Hierarchy checks.
  std::size_t countries = 0, divisions = 0;
  for (std::size_t i = 0; i < g.regions_.size(); ++i) {
    const Region &r = g.regions_[i];
    std::string where = source + ":" + std::to_string(lines[i]);
    switch (r.level) {
      case Level::Country:
        ++countries;
        g.country_ = i;
        if (!r.parent_id.empty()) throw DataError(where, "country must not have a parent");
        break;
      case Level::Division: {
        ++divisions;
        const Region *p = g.find(r.parent_id);
        if (!p || p->level != Level::Country) {
          throw DataError(where, "division parent must be the country");
        }
        break;
      }
      case Level::District: {
        const Region *p = g.find(r.parent_id);
        if (!p || p->level != Level::Division) {
          throw DataError(where, "district '" + r.id + "' parent must be a division");
        }
        break;
      }
    }
  }
  if (countries != 1) throw DataError(source, "gazetteer needs exactly one country");
  if (divisions != 8) {
    throw DataError(source, "gazetteer needs exactly 8 divisions, found " +
                                std::to_string(divisions));
  }

  // Alias index; token sequences must be unique across regions.
  for (std::size_t i = 0; i < g.regions_.size(); ++i) {
    const Region &r = g.regions_[i];
    for (std::size_t a = 0; a < r.aliases.size(); ++a) {
      auto tokens = match_tokens(r.aliases[a]);
      if (tokens.empty()) {
        throw DataError(source, "alias '" + r.aliases[a] + "' has no word characters");
      }
      std::string key = join_tokens(tokens);
      auto [it, inserted] = g.by_key_.emplace(key, i);
      if (!inserted) {
        if (it->second == i) continue;  // spelling variant of the same key
        throw DataError(source, "alias '" + r.aliases[a] + "' of " + r.id +
                                    " collides with region " +
                                    g.regions_[it->second].id);
      }
      g.by_first_token_[tokens.front()].push_back({std::move(tokens), i, a});
    }
  }
  for (auto &[first, keys] : g.by_first_token_) {
    std::stable_sort(keys.begin(), keys.end(), [](const AliasKey &x, const AliasKey &y) {
      return x.tokens.size() > y.tokens.size();
    });
  }
  return g;
}

Gazetteer Gazetteer::load(const std::filesystem::path &path) {
  return parse(read_file(path), path.string());
}

std::string_view Gazetteer::builtin_csv() { return kBuiltinGazetteerCsv; }

const Gazetteer &Gazetteer::builtin() {
  static const Gazetteer g = parse(kBuiltinGazetteerCsv, "builtin gazetteer");
  return g;
}

const Region *Gazetteer::find(std::string_view id) const {
  auto it = by_id_.find(std::string(id));
  return it == by_id_.end() ? nullptr : &regions_[it->second];
}

std::vector<const Region *> Gazetteer::divisions() const {
  std::vector<const Region *> out;
  for (const auto &r : regions_) {
    if (r.level == Level::Division) out.push_back(&r);
  }
  return out;
}

std::vector<const Region *> Gazetteer::districts_of(std::string_view division_id) const {
  std::vector<const Region *> out;
  for (const auto &r : regions_) {
    if (r.level == Level::District && r.parent_id == division_id) out.push_back(&r);
  }
  return out;
}

bool Gazetteer::within(std::string_view id, std::string_view ancestor) const {
  const Region *r = find(id);
  while (r != nullptr) {
    if (r->id == ancestor) return true;
    r = r->parent_id.empty() ? nullptr : find(r->parent_id);
  }
  return false;
}

const Region *Gazetteer::division_of(std::string_view id) const {
  const Region *r = find(id);
  if (!r || r->level == Level::Country) return nullptr;
  return r->level == Level::Division ? r : find(r->parent_id);
}

const Region *Gazetteer::resolve(std::string_view text) const {
  if (const Region *r = find(trim(text))) return r;
  auto it = by_key_.find(join_tokens(match_tokens(text)));
  return it == by_key_.end() ? nullptr : &regions_[it->second];
}

std::vector<Gazetteer::Mention> Gazetteer::mentions(
    const std::vector<std::string> &tokens) const {
  std::vector<Mention> out;
  std::size_t i = 0;
  while (i < tokens.size()) {
    auto it = by_first_token_.find(tokens[i]);
    std::size_t advance = 1;
    if (it != by_first_token_.end()) {
      for (const AliasKey &key : it->second) {
        const std::size_t len = key.tokens.size();
        if (i + len > tokens.size()) continue;
        if (std::equal(key.tokens.begin(), key.tokens.end(), tokens.begin() + i)) {
          out.push_back({key.region, key.alias, i});
          advance = len;
          break;
        }
      }
    }
    i += advance;
  }
  return out;
}

Location extract_location(const corpus::Article &article, const Gazetteer &gazetteer) {
  struct Score {
    int title = 0;
    int body = 0;
    std::size_t first = SIZE_MAX;
    int value() const { return 2 * title + body; }
  };
  std::map<std::size_t, Score> scores;  // by region index
  std::map<std::pair<std::size_t, std::size_t>, Evidence> evidence;

  auto title_tokens = match_tokens(article.title);
  auto body_tokens = match_tokens(article.body);
  auto tally = [&](const std::vector<std::string> &tokens, std::size_t offset, bool title) {
    for (const auto &m : gazetteer.mentions(tokens)) {
      Score &s = scores[m.region];
      (title ? s.title : s.body) += 1;
      s.first = std::min(s.first, offset + m.position);
      Evidence &e = evidence[{m.region, m.alias}];
      const Region &r = gazetteer.regions()[m.region];
      e.region_id = r.id;
      e.alias = r.aliases[m.alias];
      (title ? e.title_count : e.body_count) += 1;
    }
  };
  tally(title_tokens, 0, true);
  tally(body_tokens, title_tokens.size(), false);

  const auto &regions = gazetteer.regions();
  auto better = [&](std::size_t a, std::size_t b) {
    const Score &sa = scores[a], &sb = scores[b];
    if (sa.value() != sb.value()) return sa.value() > sb.value();
    if ((sa.title > 0) != (sb.title > 0)) return sa.title > 0;
    return sa.first < sb.first;
  };

  Location loc;
  for (Level level : {Level::District, Level::Division}) {
    std::optional<std::size_t> best;
    for (const auto &[idx, s] : scores) {
      if (regions[idx].level != level || s.value() <= 0) continue;
      if (!best || better(idx, *best)) best = idx;
    }
    if (best) {
      loc.region_id = regions[*best].id;
      break;
    }
  }
  if (loc.region_id.empty()) loc.region_id = gazetteer.country().id;

  std::size_t non_country = 0;
  for (const auto &[idx, s] : scores) non_country += regions[idx].level != Level::Country;
  loc.multi_region = non_country > 1;
  for (auto &[key, e] : evidence) loc.evidence.push_back(std::move(e));
  return loc;
}

IsoWeek extract_week(const corpus::Article &article) {
  return iso_week_of(article.published);
}

std::vector<EventRecord> build_events(const corpus::Corpus &corpus,
                                      const PredictionMap &predictions,
                                      const Gazetteer &gazetteer, unsigned threads) {
  const auto &articles = corpus.articles();
  for (const auto &a : articles) {
    if (!predictions.contains(a.id)) {
      throw DataError("predictions", "no prediction for article '" + a.id + "'");
    }
  }
  std::vector<EventRecord> out(articles.size());
  auto work = [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      const auto &a = articles[i];
      out[i].article_id = a.id;
      out[i].label = predictions.at(a.id);
      out[i].region_id = extract_location(a, gazetteer).region_id;
      out[i].week = extract_week(a);
    }
  };
  threads = std::max(1u, threads);
  if (threads == 1 || articles.size() < 2 * threads) {
    work(0, articles.size());
  } else {
    std::vector<std::jthread> pool;
    std::size_t chunk = (articles.size() + threads - 1) / threads;
    for (std::size_t b = 0; b < articles.size(); b += chunk) {
      pool.emplace_back(work, b, std::min(articles.size(), b + chunk));
    }
  }
  return out;
}

void write_events(std::span<const EventRecord> events, const std::filesystem::path &path) {
  csv::Writer w({"article_id", "label", "region_id", "iso_week"});
  for (const auto &e : events) {
    w.row({e.article_id, std::string(corpus::label_name(e.label)), e.region_id,
           e.week.str()});
  }
  write_file_atomic(path, w.str());
}

std::vector<EventRecord> load_events(const std::filesystem::path &path,
                                     const Gazetteer &gazetteer) {
  csv::Table table = csv::Table::read(path);
  const std::size_t id_col = table.index("article_id");
  const std::size_t label_col = table.index("label");
  const std::size_t region_col = table.index("region_id");
  const std::size_t week_col = table.index("iso_week");
  std::vector<EventRecord> out;
  out.reserve(table.records().size());
  for (const auto &rec : table.records()) {
    EventRecord e;
    e.article_id = rec.fields[id_col];
    auto label = corpus::parse_label(rec.fields[label_col]);
    if (!label) throw DataError(table.where(rec), "invalid label");
    e.label = *label;
    e.region_id = rec.fields[region_col];
    if (!gazetteer.find(e.region_id)) {
      throw DataError(table.where(rec), "unknown region '" + e.region_id + "'");
    }
    auto week = IsoWeek::parse(rec.fields[week_col]);
    if (!week) throw DataError(table.where(rec), "invalid ISO week");
    e.week = *week;
    out.push_back(std::move(e));
  }
  return out;
}

}  // namespace floodlens::geo
