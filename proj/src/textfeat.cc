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

#include "floodlens/textfeat.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <unordered_set>

#include <json.hpp>

#include "floodlens/csv.h"
#include "floodlens/error.h"
#include "floodlens/io.h"
#include "floodlens/unicode.h"

namespace floodlens::textfeat {

std::vector<std::string> tokenize(std::string_view text,
                                  const TokenizeOptions &options) {
  std::vector<std::string> tokens;
  std::string current;
  std::size_t length = 0;
  auto flush = [&] {
    if (length >= options.min_length && length > 0) {
      tokens.push_back(std::move(current));
    }
    current.clear();
    length = 0;
  };
  std::size_t pos = 0;
  while (pos < text.size()) {
    char32_t cp = unicode::next_code_point(text, pos);
    if (unicode::is_alnum(cp)) {
      unicode::append_utf8(current, options.lowercase ? unicode::to_lower(cp) : cp);
      ++length;
    } else {
      flush();
    }
  }
  flush();
  return tokens;
}

std::vector<std::string> ngrams(const std::vector<std::string> &tokens,
                                int ngram_min, int ngram_max) {
  std::vector<std::string> out;
  for (int n = ngram_min; n <= ngram_max; ++n) {
    if (n <= 0 || static_cast<std::size_t>(n) > tokens.size()) continue;
    for (std::size_t i = 0; i + n <= tokens.size(); ++i) {
      std::string term = tokens[i];
      for (int k = 1; k < n; ++k) {
        term.push_back(' ');
        term += tokens[i + k];
      }
      out.push_back(std::move(term));
    }
  }
  return out;
}

double FeatureVector::norm() const {
  double s = 0.0;
  for (const auto &[i, w] : entries) s += w * w;
  return std::sqrt(s);
}

Vocabulary::Vocabulary(VocabConfig config, std::size_t n_docs,
                       std::vector<std::string> terms,
                       std::vector<std::size_t> df)
    : config_(config), n_docs_(n_docs), terms_(std::move(terms)),
      df_(std::move(df)) {
  if (terms_.size() != df_.size()) throw Error("vocabulary: terms/df mismatch");
  idf_.resize(terms_.size());
  index_.reserve(terms_.size());
  for (std::size_t i = 0; i < terms_.size(); ++i) {
    idf_[i] = std::log((1.0 + static_cast<double>(n_docs_)) /
                       (1.0 + static_cast<double>(df_[i]))) +
              1.0;
    if (!index_.emplace(terms_[i], i).second) {
      throw DataError("vocabulary", "duplicate term '" + terms_[i] + "'");
    }
  }
}

long Vocabulary::lookup(std::string_view term) const {
  auto it = index_.find(std::string(term));
  return it == index_.end() ? -1 : static_cast<long>(it->second);
}

std::vector<std::string> Vocabulary::analyze(std::string_view text) const {
  TokenizeOptions opts;
  opts.lowercase = config_.lowercase;
  return ngrams(tokenize(text, opts), config_.ngram_min, config_.ngram_max);
}

namespace {

nlohmann::ordered_json config_json(const VocabConfig &c, std::size_t n_docs) {
  nlohmann::ordered_json j;
  j["lowercase"] = c.lowercase;
  j["min_df"] = c.min_df;
  j["max_features"] = c.max_features;
  j["ngram_min"] = c.ngram_min;
  j["ngram_max"] = c.ngram_max;
  j["n_docs"] = n_docs;
  return j;
}

std::filesystem::path sidecar(const std::filesystem::path &csv_path) {
  std::filesystem::path p = csv_path;
  p.replace_extension(".json");
  return p;
}

}  // namespace

void Vocabulary::save(const std::filesystem::path &csv_path) const {
  csv::Writer w({"term", "index", "df"});
  for (std::size_t i = 0; i < terms_.size(); ++i) {
    w.row({terms_[i], std::to_string(i), std::to_string(df_[i])});
  }
  write_file_atomic(csv_path, w.str());
  write_file_atomic(sidecar(csv_path), config_json(config_, n_docs_).dump(2) + "\n");
}

Vocabulary Vocabulary::load(const std::filesystem::path &csv_path) {
  auto meta_path = sidecar(csv_path);
  nlohmann::json meta;
  try {
    meta = nlohmann::json::parse(read_file(meta_path));
  } catch (const nlohmann::json::exception &e) {
    throw DataError(meta_path.string(), e.what());
  }
  VocabConfig config;
  std::size_t n_docs = 0;
  try {
    config.lowercase = meta.at("lowercase").get<bool>();
    config.min_df = meta.at("min_df").get<std::size_t>();
    config.max_features = meta.at("max_features").get<std::size_t>();
    config.ngram_min = meta.at("ngram_min").get<int>();
    config.ngram_max = meta.at("ngram_max").get<int>();
    n_docs = meta.at("n_docs").get<std::size_t>();
  } catch (const nlohmann::json::exception &e) {
    throw DataError(meta_path.string(), e.what());
  }

  csv::Table table = csv::Table::read(csv_path);
  std::size_t term_col = table.index("term");
  std::size_t index_col = table.index("index");
  std::size_t df_col = table.index("df");
  std::vector<std::string> terms(table.records().size());
  std::vector<std::size_t> df(table.records().size());
  std::vector<bool> filled(terms.size(), false);
  for (const auto &rec : table.records()) {
    long long idx, count;
    if (!parse_int64(rec.fields[index_col], idx) || idx < 0 ||
        static_cast<std::size_t>(idx) >= terms.size() || filled[idx]) {
      throw DataError(table.where(rec), "index must be a dense 0..V-1 permutation");
    }
    if (!parse_int64(rec.fields[df_col], count) || count < 0) {
      throw DataError(table.where(rec), "invalid df");
    }
    terms[idx] = rec.fields[term_col];
    df[idx] = static_cast<std::size_t>(count);
    filled[idx] = true;
  }
  return Vocabulary(config, n_docs, std::move(terms), std::move(df));
}

Vocabulary fit_vocabulary(std::span<const std::string> docs,
                          const VocabConfig &config) {
  if (docs.empty()) throw DataError("fit_vocabulary", "empty corpus");
  if (config.ngram_min < 1 || config.ngram_max < config.ngram_min) {
    throw UsageError("invalid n-gram range");
  }
  TokenizeOptions opts;
  opts.lowercase = config.lowercase;

  std::unordered_map<std::string, std::size_t> df;
  for (const auto &doc : docs) {
    auto terms = ngrams(tokenize(doc, opts), config.ngram_min, config.ngram_max);
    std::sort(terms.begin(), terms.end());
    terms.erase(std::unique(terms.begin(), terms.end()), terms.end());
    for (auto &t : terms) ++df[std::move(t)];
  }

  std::vector<std::pair<std::string, std::size_t>> kept;
  for (auto &[term, count] : df) {
    if (count >= config.min_df) kept.emplace_back(term, count);
  }
  if (kept.size() > config.max_features) {
    std::sort(kept.begin(), kept.end(), [](const auto &a, const auto &b) {
      if (a.second != b.second) return a.second > b.second;
      return a.first < b.first;
    });
    kept.resize(config.max_features);
  }
  if (kept.empty()) throw DataError("fit_vocabulary", "empty vocabulary");
  std::sort(kept.begin(), kept.end());

  std::vector<std::string> terms;
  std::vector<std::size_t> counts;
  terms.reserve(kept.size());
  counts.reserve(kept.size());
  for (auto &[term, count] : kept) {
    terms.push_back(std::move(term));
    counts.push_back(count);
  }
  return Vocabulary(config, docs.size(), std::move(terms), std::move(counts));
}

FeatureVector transform(std::string_view doc, const Vocabulary &vocab) {
  std::map<std::uint32_t, double> tf;
  for (const auto &term : vocab.analyze(doc)) {
    long idx = vocab.lookup(term);
    if (idx >= 0) tf[static_cast<std::uint32_t>(idx)] += 1.0;
  }
  FeatureVector v;
  v.entries.reserve(tf.size());
  double sq = 0.0;
  for (const auto &[idx, count] : tf) {
    double w = count * vocab.idf(idx);
    v.entries.emplace_back(idx, w);
    sq += w * w;
  }
  if (sq > 0.0) {
    double inv = 1.0 / std::sqrt(sq);
    for (auto &e : v.entries) e.second *= inv;
  }
  return v;
}

}  // namespace floodlens::textfeat
