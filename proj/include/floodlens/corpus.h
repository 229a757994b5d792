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

#ifndef FLOODLENS_CORPUS_H_
#define FLOODLENS_CORPUS_H_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "floodlens/dates.h"

namespace floodlens::corpus {

enum class Label { NotFlood = 0, Flood = 1 };

// "flood" / "not_flood", the spellings used in every CSV artifact.
std::string_view label_name(Label label);
std::optional<Label> parse_label(std::string_view text);

struct Article {
  std::string id;
  std::string source;
  std::string title;
  std::string body;
  Date published;
  std::optional<std::string> url;

  // Title and body joined by a single space; the text every classifier sees.
  std::string text() const { return title + " " + body; }
};

// The ten outlets the corpus was collected from.
const std::vector<std::string> &default_sources();

struct LoadOptions {
  // Accepted values of Article::source; empty accepts any outlet.
  std::vector<std::string> allowed_sources = default_sources();
};

// An immutable, id-indexed collection of articles in file order.
class Corpus {
 public:
  Corpus() = default;
  // Throws DataError on duplicate ids.
  explicit Corpus(std::vector<Article> articles);

  const std::vector<Article> &articles() const { return articles_; }
  std::size_t size() const { return articles_.size(); }
  const Article *find(std::string_view id) const;

 private:
  std::vector<Article> articles_;
  std::unordered_map<std::string, std::size_t> index_;
};

struct RecordError {
  std::size_t line = 0;
  std::string message;
};

struct LoadResult {
  Corpus corpus;
  std::vector<RecordError> errors;  // malformed lines that were skipped
};

// Parses one JSONL record. Throws DataError (without location) when the
// record is malformed or violates an Article invariant.
Article parse_article(std::string_view line, const LoadOptions &options);
std::string serialize_article(const Article &article);

// Reads a JSONL corpus. Malformed lines are collected in LoadResult::errors
// with their line numbers; a duplicate id is a hard error.
LoadResult load_corpus(const std::filesystem::path &path,
                       const LoadOptions &options = {});
void write_corpus(std::span<const Article> articles,
                  const std::filesystem::path &path);

struct Annotation {
  std::string article_id;
  Label label = Label::NotFlood;
};

// Reads `article_id,label`. Every id must resolve in |corpus| and appear once.
std::vector<Annotation> load_annotations(const std::filesystem::path &path,
                                         const Corpus &corpus);
void write_annotations(std::span<const Annotation> annotations,
                       const std::filesystem::path &path);

struct SplitSpec {
  std::uint64_t seed = 7;
  double test_fraction = 880.0 / 1380.0;
  // When set, overrides the seeded split. Together the lists must partition
  // the annotated set.
  std::optional<std::vector<std::string>> train_ids;
  std::optional<std::vector<std::string>> test_ids;
};

struct Split {
  std::vector<Annotation> train;  // sorted by article id
  std::vector<Annotation> test;   // sorted by article id
};

// Deterministic stratified split. The test set has round(N * fraction)
// items, apportioned across classes by largest remainder, so each class lands
// within one item of its exact share.
Split split(std::span<const Annotation> annotations, const SplitSpec &spec);

// `article_id,partition` with partition in {train,test}.
void write_split(const Split &split, const std::filesystem::path &path);
Split load_split(const std::filesystem::path &path,
                 std::span<const Annotation> annotations);

}  // namespace floodlens::corpus

#endif  // FLOODLENS_CORPUS_H_
