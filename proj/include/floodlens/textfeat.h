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

#ifndef FLOODLENS_TEXTFEAT_H_
#define FLOODLENS_TEXTFEAT_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace floodlens::textfeat {

struct TokenizeOptions {
  bool lowercase = true;
  std::size_t min_length = 2;  // in code points
};

// Maximal runs of alphabetic/numeric code points; everything else separates.
std::vector<std::string> tokenize(std::string_view text,
                                  const TokenizeOptions &options = {});

struct VocabConfig {
  bool lowercase = true;
  std::size_t min_df = 2;
  std::size_t max_features = 50000;
  int ngram_min = 1;
  int ngram_max = 2;
};

// All n-grams of |tokens| for n in [ngram_min, ngram_max], joined by spaces.
std::vector<std::string> ngrams(const std::vector<std::string> &tokens,
                                int ngram_min, int ngram_max);

struct FeatureVector {
  std::vector<std::pair<std::uint32_t, double>> entries;  // ascending index

  double norm() const;
  bool empty() const { return entries.empty(); }
};

class Vocabulary {
 public:
  Vocabulary() = default;
  Vocabulary(VocabConfig config, std::size_t n_docs,
             std::vector<std::string> terms, std::vector<std::size_t> df);

  std::size_t size() const { return terms_.size(); }
  std::size_t n_docs() const { return n_docs_; }
  const VocabConfig &config() const { return config_; }
  const std::vector<std::string> &terms() const { return terms_; }
  std::size_t df(std::size_t index) const { return df_[index]; }

  // ln((1 + N) / (1 + df)) + 1
  double idf(std::size_t index) const { return idf_[index]; }

  // Index of |term| or -1.
  long lookup(std::string_view term) const;

  // Terms of |text| after tokenization and n-gram expansion.
  std::vector<std::string> analyze(std::string_view text) const;

  // term,index,df CSV plus a JSON sidecar (same stem, .json) holding the
  // config and document count.
  void save(const std::filesystem::path &csv_path) const;
  static Vocabulary load(const std::filesystem::path &csv_path);

 private:
  VocabConfig config_;
  std::size_t n_docs_ = 0;
  std::vector<std::string> terms_;
  std::vector<std::size_t> df_;
  std::vector<double> idf_;
  std::unordered_map<std::string, std::size_t> index_;
};

// Keeps terms with df >= min_df; when more than max_features survive, the
// highest-df terms are kept with ties broken by lexicographic term order.
// Retained terms are indexed in lexicographic order.
Vocabulary fit_vocabulary(std::span<const std::string> docs,
                          const VocabConfig &config = {});

// L2-normalized tf-idf over |vocab|; out-of-vocabulary terms are ignored.
FeatureVector transform(std::string_view doc, const Vocabulary &vocab);

}  // namespace floodlens::textfeat

#endif  // FLOODLENS_TEXTFEAT_H_
