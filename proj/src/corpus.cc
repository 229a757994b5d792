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

#include "floodlens/corpus.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <set>

#include <json.hpp>

#include "floodlens/csv.h"
#include "floodlens/error.h"
#include "floodlens/io.h"
#include "floodlens/unicode.h"

namespace floodlens::corpus {

using json = nlohmann::ordered_json;

std::string_view label_name(Label label) {
  return label == Label::Flood ? "flood" : "not_flood";
}

std::optional<Label> parse_label(std::string_view text) {
  std::string t = to_lower_ascii(trim(text));
  if (t == "flood") return Label::Flood;
  if (t == "not_flood") return Label::NotFlood;
  return std::nullopt;
}

const std::vector<std::string> &default_sources() {
  static const std::vector<std::string> kSources = {
      "The Daily Star", "BD News",        "Daily Observer",
      "Daily Sun",      "Dhaka Tribune",  "New Age",
      "Prothomalo",     "The Independent", "The New Nation",
      "New York Times"};
  return kSources;
}

Corpus::Corpus(std::vector<Article> articles) : articles_(std::move(articles)) {
  index_.reserve(articles_.size());
  for (std::size_t i = 0; i < articles_.size(); ++i) {
    auto [it, inserted] = index_.emplace(articles_[i].id, i);
    if (!inserted) {
      throw DataError("corpus", "duplicate article id '" + articles_[i].id + "'");
    }
  }
}

const Article *Corpus::find(std::string_view id) const {
  auto it = index_.find(std::string(id));
  return it == index_.end() ? nullptr : &articles_[it->second];
}

namespace {

std::string required_string(const json &obj, const char *key) {
  auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) {
    throw DataError(std::string("missing field '") + key + "'");
  }
  if (!it->is_string()) {
    throw DataError(std::string("field '") + key + "' must be a string");
  }
  return it->get<std::string>();
}

std::string normalized(std::string text, const char *key) {
  if (!unicode::valid_utf8(text)) {
    throw DataError(std::string("field '") + key + "' is not valid UTF-8");
  }
  return unicode::nfc(text);
}

}  // namespace

Article parse_article(std::string_view line, const LoadOptions &options) {
  json obj;
  try {
    obj = json::parse(line);
  } catch (const json::parse_error &e) {
    throw DataError(std::string("invalid JSON: ") + e.what());
  }
  if (!obj.is_object()) throw DataError("record is not a JSON object");

  Article a;
  a.id = trim(required_string(obj, "id"));
  if (a.id.empty()) throw DataError("empty id");
  a.source = normalized(required_string(obj, "source"), "source");
  a.title = normalized(required_string(obj, "title"), "title");
  a.body = normalized(required_string(obj, "body"), "body");
  if (trim(a.body).empty()) throw DataError("article '" + a.id + "': empty body");

  std::string published = required_string(obj, "published");
  auto date = parse_date(trim(published));
  if (!date) {
    throw DataError("article '" + a.id + "': unparseable published date '" +
                    published + "'");
  }
  a.published = *date;

  if (auto it = obj.find("url"); it != obj.end() && !it->is_null()) {
    if (!it->is_string()) throw DataError("field 'url' must be a string");
    a.url = it->get<std::string>();
  }

  if (!options.allowed_sources.empty() &&
      std::find(options.allowed_sources.begin(), options.allowed_sources.end(),
                a.source) == options.allowed_sources.end()) {
    throw DataError("article '" + a.id + "': unknown source '" + a.source + "'");
  }
  return a;
}

std::string serialize_article(const Article &a) {
  json obj;
  obj["id"] = a.id;
  obj["source"] = a.source;
  obj["title"] = a.title;
  obj["body"] = a.body;
  obj["published"] = format_date(a.published);
  if (a.url) obj["url"] = *a.url;
  return obj.dump();
}

LoadResult load_corpus(const std::filesystem::path &path,
                       const LoadOptions &options) {
  std::string text = read_file(path);
  LoadResult result;
  std::vector<Article> articles;
  std::unordered_map<std::string, std::size_t> first_line;

  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t eol = text.find('\n', pos);
    if (eol == std::string::npos) eol = text.size();
    std::string_view line(text.data() + pos, eol - pos);
    pos = eol + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (trim(line).empty()) continue;

    Article article;
    try {
      article = parse_article(line, options);
    } catch (const DataError &e) {
      result.errors.push_back({line_no, e.what()});
      continue;
    }
    auto [it, inserted] = first_line.emplace(article.id, line_no);
    if (!inserted) {
      throw DataError(path.string() + ":" + std::to_string(line_no),
                      "duplicate article id '" + article.id +
                          "' (first seen on line " +
                          std::to_string(it->second) + ")");
    }
    articles.push_back(std::move(article));
  }
  result.corpus = Corpus(std::move(articles));
  return result;
}

void write_corpus(std::span<const Article> articles,
                  const std::filesystem::path &path) {
  std::string out;
  for (const auto &a : articles) {
    out += serialize_article(a);
    out.push_back('\n');
  }
  write_file_atomic(path, out);
}

std::vector<Annotation> load_annotations(const std::filesystem::path &path,
                                         const Corpus &corpus) {
  csv::Table table = csv::Table::read(path);
  std::size_t id_col = table.index("article_id");
  std::size_t label_col = table.index("label");

  std::vector<Annotation> out;
  std::unordered_map<std::string, std::size_t> seen;
  for (const auto &rec : table.records()) {
    Annotation a;
    a.article_id = trim(rec.fields[id_col]);
    auto label = parse_label(rec.fields[label_col]);
    if (!label) {
      throw DataError(table.where(rec), "label must be 'flood' or 'not_flood', got '" +
                                            rec.fields[label_col] + "'");
    }
    a.label = *label;
    if (corpus.find(a.article_id) == nullptr) {
      throw DataError(table.where(rec),
                      "annotation for unknown article '" + a.article_id + "'");
    }
    auto [it, inserted] = seen.emplace(a.article_id, rec.line);
    if (!inserted) {
      throw DataError(table.where(rec), "second annotation for article '" +
                                            a.article_id + "' (first on line " +
                                            std::to_string(it->second) + ")");
    }
    out.push_back(std::move(a));
  }
  return out;
}

void write_annotations(std::span<const Annotation> annotations,
                       const std::filesystem::path &path) {
  csv::Writer w({"article_id", "label"});
  for (const auto &a : annotations) {
    w.row({a.article_id, std::string(label_name(a.label))});
  }
  write_file_atomic(path, w.str());
}

namespace {

bool by_id(const Annotation &a, const Annotation &b) {
  return a.article_id < b.article_id;
}

Split explicit_split(std::span<const Annotation> annotations,
                     const SplitSpec &spec) {
  if (!spec.train_ids || !spec.test_ids) {
    throw UsageError("explicit split needs both train and test id lists");
  }
  std::map<std::string, Label> labels;
  for (const auto &a : annotations) labels.emplace(a.article_id, a.label);

  Split out;
  std::set<std::string> used;
  auto take = [&](const std::vector<std::string> &ids,
                  std::vector<Annotation> &into, const char *which) {
    for (const auto &id : ids) {
      auto it = labels.find(id);
      if (it == labels.end()) {
        throw DataError("split", std::string(which) + " id '" + id +
                                     "' is not annotated");
      }
      if (!used.insert(id).second) {
        throw DataError("split", "id '" + id + "' assigned twice");
      }
      into.push_back({id, it->second});
    }
  };
  take(*spec.train_ids, out.train, "train");
  take(*spec.test_ids, out.test, "test");
  if (used.size() != labels.size()) {
    throw DataError("split", std::to_string(labels.size() - used.size()) +
                                 " annotated articles are in neither list");
  }
  std::sort(out.train.begin(), out.train.end(), by_id);
  std::sort(out.test.begin(), out.test.end(), by_id);
  return out;
}

}  // namespace

Split split(std::span<const Annotation> annotations, const SplitSpec &spec) {
  if (spec.train_ids || spec.test_ids) return explicit_split(annotations, spec);
  if (annotations.size() < 2) {
    throw DataError("split", "need at least 2 annotations");
  }
  if (!(spec.test_fraction > 0.0 && spec.test_fraction < 1.0)) {
    throw UsageError("test fraction must lie in (0,1)");
  }

  std::vector<Annotation> by_class[2];
  for (const auto &a : annotations) {
    by_class[static_cast<int>(a.label)].push_back(a);
  }
  if (by_class[0].empty() || by_class[1].empty()) {
    throw DataError("split", "stratified split needs both classes");
  }

  // Largest-remainder apportionment of the test total.
  const auto total = static_cast<double>(annotations.size());
  const auto n_test = static_cast<std::size_t>(std::llround(total * spec.test_fraction));
  std::size_t quota[2];
  double remainder[2];
  std::size_t assigned = 0;
  for (int c = 0; c < 2; ++c) {
    double exact = static_cast<double>(by_class[c].size()) * spec.test_fraction;
    quota[c] = static_cast<std::size_t>(std::floor(exact));
    remainder[c] = exact - std::floor(exact);
    assigned += quota[c];
  }
  while (assigned < n_test) {
    int c = remainder[1] > remainder[0] ? 1 : 0;
    if (quota[c] >= by_class[c].size()) c = 1 - c;
    ++quota[c];
    remainder[c] = -1.0;
    ++assigned;
  }

  std::mt19937_64 rng(spec.seed);
  Split out;
  for (int c = 0; c < 2; ++c) {
    auto &items = by_class[c];
    std::sort(items.begin(), items.end(), by_id);
    std::shuffle(items.begin(), items.end(), rng);
    for (std::size_t i = 0; i < items.size(); ++i) {
      (i < quota[c] ? out.test : out.train).push_back(items[i]);
    }
  }
  std::sort(out.train.begin(), out.train.end(), by_id);
  std::sort(out.test.begin(), out.test.end(), by_id);
  return out;
}

void write_split(const Split &split, const std::filesystem::path &path) {
  std::vector<std::pair<std::string, const char *>> rows;
  for (const auto &a : split.train) rows.emplace_back(a.article_id, "train");
  for (const auto &a : split.test) rows.emplace_back(a.article_id, "test");
  std::sort(rows.begin(), rows.end());
  csv::Writer w({"article_id", "partition"});
  for (const auto &[id, part] : rows) w.row({id, part});
  write_file_atomic(path, w.str());
}

Split load_split(const std::filesystem::path &path,
                 std::span<const Annotation> annotations) {
  csv::Table table = csv::Table::read(path);
  std::size_t id_col = table.index("article_id");
  std::size_t part_col = table.index("partition");
  SplitSpec spec;
  spec.train_ids.emplace();
  spec.test_ids.emplace();
  for (const auto &rec : table.records()) {
    const std::string &part = rec.fields[part_col];
    if (part == "train") {
      spec.train_ids->push_back(rec.fields[id_col]);
    } else if (part == "test") {
      spec.test_ids->push_back(rec.fields[id_col]);
    } else {
      throw DataError(table.where(rec), "partition must be train or test");
    }
  }
  return split(annotations, spec);
}

}  // namespace floodlens::corpus
