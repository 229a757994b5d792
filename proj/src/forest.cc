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

#include "floodlens/forest.h"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <random>
#include <thread>

#include "floodlens/error.h"

namespace floodlens::classify {

using corpus::Label;

const TreeNode &DecisionTree::leaf_for(const SparseMatrix::RowView &row) const {
  const TreeNode *node = &nodes.front();
  while (!node->is_leaf()) {
    double v = row.at(static_cast<std::uint32_t>(node->feature));
    node = &nodes[static_cast<std::size_t>(v <= node->threshold ? node->left : node->right)];
  }
  return *node;
}

Label DecisionTree::predict(const SparseMatrix::RowView &row) const {
  const TreeNode &leaf = leaf_for(row);
  return leaf.counts[1] > leaf.counts[0] ? Label::Flood : Label::NotFlood;
}

double ForestModel::flood_vote_fraction(const SparseMatrix::RowView &row) const {
  if (trees.empty()) return 0.0;
  std::size_t votes = 0;
  for (const auto &t : trees) votes += t.predict(row) == Label::Flood;
  return static_cast<double>(votes) / static_cast<double>(trees.size());
}

Label ForestModel::predict(const SparseMatrix::RowView &row) const {
  std::size_t votes = 0;
  for (const auto &t : trees) votes += t.predict(row) == Label::Flood;
  return 2 * votes > trees.size() ? Label::Flood : Label::NotFlood;
}

namespace {

// N * gini(counts) = N - (c0^2 + c1^2) / N
double weighted_gini(double c0, double c1) {
  double n = c0 + c1;
  return n > 0 ? n - (c0 * c0 + c1 * c1) / n : 0.0;
}

struct Candidate {
  double value;
  std::uint32_t row;
};

struct SplitChoice {
  std::int32_t feature = -1;
  double threshold = 0.0;
  double gain = 0.0;
};

class TreeBuilder {
 public:
  TreeBuilder(const SparseMatrix &x, std::span<const Label> y,
              const ForestConfig &config, std::size_t tree_index)
      : x_(x), y_(y), config_(config),
        max_features_(static_cast<std::size_t>(
            std::ceil(std::sqrt(static_cast<double>(x.cols()))))),
        slot_(x.cols(), -1), side_(x.rows(), 0), weight_(x.rows(), 0.0) {
    std::seed_seq seq{static_cast<std::uint32_t>(config.seed),
                      static_cast<std::uint32_t>(config.seed >> 32),
                      static_cast<std::uint32_t>(tree_index)};
    rng_.seed(seq);
  }

  DecisionTree build() {
    const std::size_t n = x_.rows();
    std::uniform_int_distribution<std::size_t> pick(0, n - 1);
    for (std::size_t i = 0; i < n; ++i) weight_[pick(rng_)] += 1.0;

    std::vector<std::uint32_t> root_rows;
    for (std::size_t i = 0; i < n; ++i) {
      if (weight_[i] > 0) root_rows.push_back(static_cast<std::uint32_t>(i));
    }

    struct Pending {
      std::int32_t node;
      std::vector<std::uint32_t> rows;
      int depth;
    };
    tree_.nodes.emplace_back();
    std::vector<Pending> stack;
    stack.push_back({0, std::move(root_rows), 0});
    while (!stack.empty()) {
      Pending p = std::move(stack.back());
      stack.pop_back();
      std::vector<std::uint32_t> left, right;
      if (!split_node(p.node, p.rows, p.depth, left, right)) continue;
      auto l = static_cast<std::int32_t>(tree_.nodes.size());
      tree_.nodes.emplace_back();
      tree_.nodes.emplace_back();
      tree_.nodes[p.node].left = l;
      tree_.nodes[p.node].right = l + 1;
      stack.push_back({l + 1, std::move(right), p.depth + 1});
      stack.push_back({l, std::move(left), p.depth + 1});
    }
    return std::move(tree_);
  }

 private:
  // Fills in node |id|; returns true (with |left|/|right|) when it splits.
  bool split_node(std::int32_t id, const std::vector<std::uint32_t> &rows,
                  int depth, std::vector<std::uint32_t> &left,
                  std::vector<std::uint32_t> &right) {
    double totals[2] = {0.0, 0.0};
    for (auto r : rows) totals[static_cast<int>(y_[r])] += weight_[r];
    TreeNode &node = tree_.nodes[static_cast<std::size_t>(id)];
    node.counts[0] = totals[0];
    node.counts[1] = totals[1];
    if (depth >= config_.max_depth || totals[0] == 0 || totals[1] == 0 ||
        totals[0] + totals[1] < 2) {
      return false;
    }

    // Only features with a non-zero entry in some row of the node can vary.
    std::vector<std::uint32_t> features;
    std::vector<std::vector<Candidate>> buckets;
    for (auto r : rows) {
      auto row = x_.row(r);
      for (std::size_t k = 0; k < row.index.size(); ++k) {
        std::uint32_t f = row.index[k];
        if (slot_[f] < 0) {
          slot_[f] = static_cast<std::int32_t>(features.size());
          features.push_back(f);
          buckets.emplace_back();
        }
        buckets[static_cast<std::size_t>(slot_[f])].push_back({row.value[k], r});
      }
    }
    for (auto f : features) slot_[f] = -1;

    std::vector<std::size_t> order(features.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::shuffle(order.begin(), order.end(), rng_);

    SplitChoice best;
    std::size_t varying = 0;
    const double parent = weighted_gini(totals[0], totals[1]);
    for (std::size_t idx : order) {
      if (varying >= max_features_) break;
      SplitChoice c;
      if (!score_feature(buckets[idx], rows.size(), totals, parent, c)) continue;
      ++varying;
      if (c.gain > best.gain + 1e-12) {
        best = c;
        best.feature = static_cast<std::int32_t>(features[idx]);
        best.threshold = c.threshold;
      }
    }
    if (best.feature < 0) return false;

    // Partition rows; rows absent from the bucket hold value 0.
    std::size_t bucket = 0;
    for (std::size_t i = 0; i < features.size(); ++i) {
      if (static_cast<std::int32_t>(features[i]) == best.feature) bucket = i;
    }
    for (const auto &c : buckets[bucket]) side_[c.row] = c.value <= best.threshold ? 1 : 2;
    const bool zero_left = 0.0 <= best.threshold;
    for (auto r : rows) {
      bool go_left = side_[r] == 0 ? zero_left : side_[r] == 1;
      (go_left ? left : right).push_back(r);
    }
    for (const auto &c : buckets[bucket]) side_[c.row] = 0;

    node.feature = best.feature;
    node.threshold = best.threshold;
    return true;
  }

  // Best threshold for one feature. Returns false when the feature is
  // constant within the node.
  bool score_feature(std::vector<Candidate> &entries, std::size_t node_rows,
                     const double totals[2], double parent, SplitChoice &out) {
    struct Level {
      double value;
      double w[2];
    };
    std::vector<Level> levels;
    levels.reserve(entries.size() + 1);
    double nonzero[2] = {0.0, 0.0};
    for (const auto &e : entries) {
      double w = weight_[e.row];
      int c = static_cast<int>(y_[e.row]);
      nonzero[c] += w;
      Level l{e.value, {0.0, 0.0}};
      l.w[c] = w;
      levels.push_back(l);
    }
    if (entries.size() < node_rows) {
      levels.push_back({0.0, {totals[0] - nonzero[0], totals[1] - nonzero[1]}});
    }
    std::sort(levels.begin(), levels.end(),
              [](const Level &a, const Level &b) { return a.value < b.value; });
    // Merge equal values.
    std::size_t m = 0;
    for (std::size_t i = 0; i < levels.size(); ++i) {
      if (m > 0 && levels[m - 1].value == levels[i].value) {
        levels[m - 1].w[0] += levels[i].w[0];
        levels[m - 1].w[1] += levels[i].w[1];
      } else {
        levels[m++] = levels[i];
      }
    }
    levels.resize(m);
    if (m < 2) return false;

    double left[2] = {0.0, 0.0};
    out.gain = 0.0;
    out.threshold = levels[0].value;
    for (std::size_t i = 0; i + 1 < m; ++i) {
      left[0] += levels[i].w[0];
      left[1] += levels[i].w[1];
      double gain = parent - weighted_gini(left[0], left[1]) -
                    weighted_gini(totals[0] - left[0], totals[1] - left[1]);
      if (gain > out.gain + 1e-12) {
        out.gain = gain;
        double mid = 0.5 * (levels[i].value + levels[i + 1].value);
        out.threshold = mid < levels[i + 1].value ? mid : levels[i].value;
      }
    }
    return true;
  }

  const SparseMatrix &x_;
  std::span<const Label> y_;
  const ForestConfig &config_;
  std::size_t max_features_;
  std::mt19937_64 rng_;
  std::vector<std::int32_t> slot_;
  std::vector<unsigned char> side_;
  std::vector<double> weight_;
  DecisionTree tree_;
};

}  // namespace

ForestModel train_forest(const SparseMatrix &x, std::span<const Label> y,
                         const ForestConfig &config) {
  if (x.rows() != y.size()) throw Error("design rows != label count");
  if (x.cols() == 0) throw DataError("training", "feature dimension is zero");
  bool has[2] = {false, false};
  for (Label l : y) has[static_cast<int>(l)] = true;
  if (!has[0] || !has[1]) {
    throw DataError("training", "training labels contain a single class");
  }
  if (config.n_trees < 1 || config.max_depth < 0) {
    throw UsageError("forest: need n_trees >= 1 and max_depth >= 0");
  }

  ForestModel model;
  model.config = config;
  model.n_features = x.cols();
  model.trees.resize(static_cast<std::size_t>(config.n_trees));

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t t = next++; t < model.trees.size(); t = next++) {
      model.trees[t] = TreeBuilder(x, y, config, t).build();
    }
  };
  unsigned threads = std::clamp<unsigned>(config.threads, 1u,
                                          static_cast<unsigned>(model.trees.size()));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned i = 0; i < threads; ++i) pool.emplace_back(worker);
  }
  return model;
}

}  // namespace floodlens::classify
