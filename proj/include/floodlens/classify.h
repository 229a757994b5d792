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

#ifndef FLOODLENS_CLASSIFY_H_
#define FLOODLENS_CLASSIFY_H_

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "floodlens/corpus.h"
#include "floodlens/embedding.h"
#include "floodlens/sparse.h"

namespace floodlens::classify {

using corpus::Label;

// Flood iff a stem starts some word of the title or body. Stems are
// lowercase; matching is case-insensitive.
struct KeywordRule {
  std::vector<std::string> stems = {"flood", "inundat", "cyclone"};

  void validate() const;
};

bool keyword_match(std::string_view text, const KeywordRule &rule);
Label keyword_predict(const corpus::Article &article, const KeywordRule &rule);

enum class LinearKind { Logistic, HingeSvm };

struct LinearConfig {
  double lambda = 1e-4;
  int epochs = 300;            // logistic default; SVM uses 50 passes
  double learning_rate = 4.0;  // initial full-batch step (logistic only)
  std::uint64_t seed = 7;      // SVM example order
};

struct LinearModel {
  LinearKind kind = LinearKind::Logistic;
  std::vector<double> weights;
  double bias = 0.0;
  LinearConfig config;
  std::vector<double> loss_log;  // objective after each epoch

  double margin(const SparseMatrix::RowView &row) const;
  double margin(std::span<const float> dense) const;
  // Probability for logistic models, raw margin for SVMs.
  double score_from_margin(double m) const;
  static Label label_from_margin(double m) {
    return m > 0.0 ? Label::Flood : Label::NotFlood;
  }
};

// Regularized mean logistic loss  mean(log(1 + exp(-y (w.x + b)))) +
// lambda/2 |w|^2  with y in {-1, +1}; the bias is not regularized.
struct Objective {
  double loss = 0.0;
  std::vector<double> grad_w;
  double grad_b = 0.0;
};
Objective logistic_objective(const SparseMatrix &x, std::span<const Label> y,
                             std::span<const double> w, double b, double lambda);
double logistic_loss(const SparseMatrix &x, std::span<const Label> y,
                     std::span<const double> w, double b, double lambda);

// Full-batch gradient descent from zero. Each epoch tries the current step
// and halves it until the objective does not increase by more than 1e-9.
LinearModel train_logistic(const SparseMatrix &x, std::span<const Label> y,
                           const LinearConfig &config = {});

// Pegasos subgradient descent on lambda/2 |(w, b)|^2 + mean hinge loss with
// step 1/(lambda t), seeded per-epoch example order, and projection onto the
// ball of radius 1/sqrt(lambda).
LinearModel train_svm(const SparseMatrix &x, std::span<const Label> y,
                      const LinearConfig &config);
LinearConfig default_svm_config();

// Mean hinge loss plus regularizer, the quantity train_svm minimizes.
double svm_objective(const SparseMatrix &x, std::span<const Label> y,
                     std::span<const double> w, double b, double lambda);

// Builds the dense design for |labeled| by joining on article id (the row
// order of |table| is irrelevant). Throws DataError naming a missing id.
SparseMatrix embedding_design(const embedding::EmbeddingTable &table,
                              std::span<const std::string> ids);

// Logistic head over frozen document embeddings.
LinearModel train_embedding_head(const embedding::EmbeddingTable &table,
                                 std::span<const corpus::Annotation> labeled,
                                 const LinearConfig &config = {});

struct EvalMetrics {
  std::size_t tp = 0, fp = 0, fn = 0, tn = 0;
  double accuracy = 0.0, precision = 0.0, recall = 0.0, f1 = 0.0;
};

EvalMetrics metrics_from_counts(std::size_t tp, std::size_t fp, std::size_t fn,
                                std::size_t tn);

// Flood is the positive class. The id sets of |predictions| and |gold| must
// be identical.
EvalMetrics evaluate(std::span<const std::pair<std::string, Label>> predictions,
                     std::span<const corpus::Annotation> gold);

}  // namespace floodlens::classify

#endif  // FLOODLENS_CLASSIFY_H_
