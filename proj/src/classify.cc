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

#include "floodlens/classify.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <random>

#include "floodlens/error.h"
#include "floodlens/textfeat.h"

namespace floodlens {

double SparseMatrix::RowView::at(std::uint32_t c) const {
  auto it = std::lower_bound(index.begin(), index.end(), c);
  if (it == index.end() || *it != c) return 0.0;
  return value[static_cast<std::size_t>(it - index.begin())];
}

void SparseMatrix::add_row(const textfeat::FeatureVector &v) {
  for (const auto &[i, w] : v.entries) {
    if (i >= cols_) throw Error("feature index out of range");
    index_.push_back(i);
    value_.push_back(w);
  }
  row_ptr_.push_back(index_.size());
}

void SparseMatrix::add_dense_row(std::span<const float> values) {
  if (values.size() != cols_) throw Error("dense row width mismatch");
  for (std::size_t i = 0; i < values.size(); ++i) {
    index_.push_back(static_cast<std::uint32_t>(i));
    value_.push_back(static_cast<double>(values[i]));
  }
  row_ptr_.push_back(index_.size());
}

namespace classify {

void KeywordRule::validate() const {
  if (stems.empty()) throw UsageError("keyword rule needs at least one stem");
  for (const auto &s : stems) {
    auto tokens = textfeat::tokenize(s, {.lowercase = false, .min_length = 1});
    if (tokens.size() != 1 || tokens[0] != s) {
      throw UsageError("keyword stem '" + s + "' must be a single word");
    }
    if (textfeat::tokenize(s, {.lowercase = true, .min_length = 1})[0] != s) {
      throw UsageError("keyword stem '" + s + "' must be lowercase");
    }
  }
}

bool keyword_match(std::string_view text, const KeywordRule &rule) {
  for (const auto &token : textfeat::tokenize(text, {.lowercase = true, .min_length = 1})) {
    for (const auto &stem : rule.stems) {
      if (token.compare(0, stem.size(), stem) == 0) return true;
    }
  }
  return false;
}

Label keyword_predict(const corpus::Article &article, const KeywordRule &rule) {
  return keyword_match(article.title, rule) || keyword_match(article.body, rule)
             ? Label::Flood
             : Label::NotFlood;
}

namespace {

double sign(Label y) { return y == Label::Flood ? 1.0 : -1.0; }

// log(1 + exp(-m)) without overflow.
double softplus_neg(double m) {
  return m > 0 ? std::log1p(std::exp(-m)) : -m + std::log1p(std::exp(m));
}

// 1 / (1 + exp(m))
double sigmoid_neg(double m) {
  if (m >= 0) {
    double e = std::exp(-m);
    return e / (1.0 + e);
  }
  return 1.0 / (1.0 + std::exp(m));
}

void check_training_input(const SparseMatrix &x, std::span<const Label> y) {
  if (x.rows() != y.size()) throw Error("design rows != label count");
  if (x.cols() == 0) throw DataError("training", "feature dimension is zero");
  bool has[2] = {false, false};
  for (Label l : y) has[static_cast<int>(l)] = true;
  if (!has[0] || !has[1]) {
    throw DataError("training", "training labels contain a single class");
  }
}

double squared_norm(std::span<const double> w) {
  double s = 0.0;
  for (double v : w) s += v * v;
  return s;
}

}  // namespace

double LinearModel::margin(const SparseMatrix::RowView &row) const {
  double s = bias;
  for (std::size_t k = 0; k < row.index.size(); ++k) {
    s += row.value[k] * weights[row.index[k]];
  }
  return s;
}

double LinearModel::margin(std::span<const float> dense) const {
  double s = bias;
  for (std::size_t k = 0; k < dense.size(); ++k) s += dense[k] * weights[k];
  return s;
}

double LinearModel::score_from_margin(double m) const {
  return kind == LinearKind::Logistic ? 1.0 - sigmoid_neg(m) : m;
}

double logistic_loss(const SparseMatrix &x, std::span<const Label> y,
                     std::span<const double> w, double b, double lambda) {
  double total = 0.0;
  for (std::size_t i = 0; i < x.rows(); ++i) {
    total += softplus_neg(sign(y[i]) * (x.dot(i, w) + b));
  }
  return total / static_cast<double>(x.rows()) + 0.5 * lambda * squared_norm(w);
}

Objective logistic_objective(const SparseMatrix &x, std::span<const Label> y,
                             std::span<const double> w, double b,
                             double lambda) {
  Objective obj;
  obj.grad_w.assign(w.size(), 0.0);
  const double inv_n = 1.0 / static_cast<double>(x.rows());
  double total = 0.0;
  for (std::size_t i = 0; i < x.rows(); ++i) {
    double yi = sign(y[i]);
    double m = yi * (x.dot(i, w) + b);
    total += softplus_neg(m);
    // d/dz log(1 + exp(-y z)) = -y / (1 + exp(y z))
    double coef = -yi * sigmoid_neg(m) * inv_n;
    auto row = x.row(i);
    for (std::size_t k = 0; k < row.index.size(); ++k) {
      obj.grad_w[row.index[k]] += coef * row.value[k];
    }
    obj.grad_b += coef;
  }
  for (std::size_t j = 0; j < w.size(); ++j) obj.grad_w[j] += lambda * w[j];
  obj.loss = total * inv_n + 0.5 * lambda * squared_norm(w);
  return obj;
}

LinearModel train_logistic(const SparseMatrix &x, std::span<const Label> y,
                           const LinearConfig &config) {
  check_training_input(x, y);
  if (config.epochs < 0 || !(config.learning_rate > 0)) {
    throw UsageError("logistic: epochs must be >= 0 and learning rate > 0");
  }
  LinearModel model;
  model.kind = LinearKind::Logistic;
  model.config = config;
  model.weights.assign(x.cols(), 0.0);

  double step = config.learning_rate;
  std::vector<double> trial(x.cols());
  Objective current = logistic_objective(x, y, model.weights, model.bias, config.lambda);
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    bool accepted = false;
    double trial_bias = 0.0;
    for (int halvings = 0; halvings < 60; ++halvings) {
      for (std::size_t j = 0; j < trial.size(); ++j) {
        trial[j] = model.weights[j] - step * current.grad_w[j];
      }
      trial_bias = model.bias - step * current.grad_b;
      double loss = logistic_loss(x, y, trial, trial_bias, config.lambda);
      if (loss <= current.loss + 1e-9) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (accepted) {
      model.weights.swap(trial);
      model.bias = trial_bias;
      current = logistic_objective(x, y, model.weights, model.bias, config.lambda);
    }
    // A rejected step means the gradient is numerically zero; the model
    // stays put and the log records a flat objective.
    model.loss_log.push_back(current.loss);
  }
  return model;
}

LinearConfig default_svm_config() {
  LinearConfig c;
  c.epochs = 50;
  return c;
}

double svm_objective(const SparseMatrix &x, std::span<const Label> y,
                     std::span<const double> w, double b, double lambda) {
  double hinge = 0.0;
  for (std::size_t i = 0; i < x.rows(); ++i) {
    hinge += std::max(0.0, 1.0 - sign(y[i]) * (x.dot(i, w) + b));
  }
  return hinge / static_cast<double>(x.rows()) +
         0.5 * lambda * (squared_norm(w) + b * b);
}

LinearModel train_svm(const SparseMatrix &x, std::span<const Label> y,
                      const LinearConfig &config) {
  check_training_input(x, y);
  if (config.epochs < 0 || !(config.lambda > 0)) {
    throw UsageError("svm: epochs must be >= 0 and lambda > 0");
  }
  const std::size_t d = x.cols();
  const double lambda = config.lambda;
  const double radius_sq = 1.0 / lambda;

  // w = scale * v, where v[d] holds the bias coordinate (feature value 1).
  std::vector<double> v(d + 1, 0.0);
  double scale = 1.0;
  double v_sq = 0.0;

  std::vector<std::size_t> order(x.rows());
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(config.seed);

  LinearModel model;
  model.kind = LinearKind::HingeSvm;
  model.config = config;

  std::uint64_t t = 0;
  std::vector<double> w_out(d);
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    for (std::size_t i : order) {
      ++t;
      const double eta = 1.0 / (lambda * static_cast<double>(t));
      const double yi = sign(y[i]);
      const double m = yi * scale * (x.dot(i, v) + v[d]);

      // Shrink: w <- (1 - eta lambda) w.
      const double shrink = 1.0 - eta * lambda;
      if (shrink <= 0.0) {
        std::fill(v.begin(), v.end(), 0.0);
        scale = 1.0;
        v_sq = 0.0;
      } else {
        scale *= shrink;
      }

      if (m < 1.0) {
        const double c = eta * yi / scale;
        auto row = x.row(i);
        for (std::size_t k = 0; k < row.index.size(); ++k) {
          double &vj = v[row.index[k]];
          double updated = vj + c * row.value[k];
          v_sq += updated * updated - vj * vj;
          vj = updated;
        }
        double updated = v[d] + c;
        v_sq += updated * updated - v[d] * v[d];
        v[d] = updated;
      }

      double w_sq = scale * scale * v_sq;
      if (w_sq > radius_sq) scale *= std::sqrt(radius_sq / w_sq);

      if (scale < 1e-100 || scale > 1e100) {
        for (double &vj : v) vj *= scale;
        scale = 1.0;
        v_sq = squared_norm(v);
      }
    }
    // Resynchronize the incrementally tracked norm.
    v_sq = squared_norm(v);
    for (std::size_t j = 0; j < d; ++j) w_out[j] = scale * v[j];
    model.loss_log.push_back(svm_objective(x, y, w_out, scale * v[d], lambda));
  }
  model.weights.resize(d);
  for (std::size_t j = 0; j < d; ++j) model.weights[j] = scale * v[j];
  model.bias = scale * v[d];
  return model;
}

SparseMatrix embedding_design(const embedding::EmbeddingTable &table,
                              std::span<const std::string> ids) {
  SparseMatrix x(table.dim());
  for (const auto &id : ids) {
    long row = table.find(id);
    if (row < 0) {
      throw DataError("embeddings", "no embedding row for article '" + id + "'");
    }
    x.add_dense_row(table.row(static_cast<std::size_t>(row)));
  }
  return x;
}

LinearModel train_embedding_head(const embedding::EmbeddingTable &table,
                                 std::span<const corpus::Annotation> labeled,
                                 const LinearConfig &config) {
  std::vector<std::string> ids;
  std::vector<Label> y;
  ids.reserve(labeled.size());
  for (const auto &a : labeled) {
    ids.push_back(a.article_id);
    y.push_back(a.label);
  }
  return train_logistic(embedding_design(table, ids), y, config);
}

EvalMetrics metrics_from_counts(std::size_t tp, std::size_t fp, std::size_t fn,
                                std::size_t tn) {
  EvalMetrics m{tp, fp, fn, tn};
  const double total = static_cast<double>(tp + fp + fn + tn);
  m.accuracy = total > 0 ? static_cast<double>(tp + tn) / total : 0.0;
  m.precision = tp + fp > 0 ? static_cast<double>(tp) / static_cast<double>(tp + fp) : 0.0;
  m.recall = tp + fn > 0 ? static_cast<double>(tp) / static_cast<double>(tp + fn) : 0.0;
  m.f1 = m.precision + m.recall > 0
             ? 2.0 * m.precision * m.recall / (m.precision + m.recall)
             : 0.0;
  return m;
}

EvalMetrics evaluate(std::span<const std::pair<std::string, Label>> predictions,
                     std::span<const corpus::Annotation> gold) {
  std::map<std::string_view, Label> predicted;
  for (const auto &[id, label] : predictions) {
    if (!predicted.emplace(id, label).second) {
      throw DataError("evaluate", "duplicate prediction for '" + id + "'");
    }
  }
  if (predicted.size() != gold.size()) {
    throw DataError("evaluate", "prediction and gold id sets differ in size (" +
                                    std::to_string(predicted.size()) + " vs " +
                                    std::to_string(gold.size()) + ")");
  }
  std::size_t tp = 0, fp = 0, fn = 0, tn = 0;
  for (const auto &g : gold) {
    auto it = predicted.find(g.article_id);
    if (it == predicted.end()) {
      throw DataError("evaluate", "no prediction for '" + g.article_id + "'");
    }
    bool p = it->second == Label::Flood;
    bool t = g.label == Label::Flood;
    if (p && t) ++tp;
    else if (p) ++fp;
    else if (t) ++fn;
    else ++tn;
  }
  return metrics_from_counts(tp, fp, fn, tn);
}

}  // namespace classify
}  // namespace floodlens
