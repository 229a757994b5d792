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

#ifndef FLOODLENS_FOREST_H_
#define FLOODLENS_FOREST_H_

#include <cstdint>
#include <span>
#include <vector>

#include "floodlens/corpus.h"
#include "floodlens/sparse.h"

namespace floodlens::classify {

struct ForestConfig {
  int n_trees = 100;
  int max_depth = 32;
  std::uint64_t seed = 7;
  unsigned threads = 1;  // trees are independent given their index
};

struct TreeNode {
  std::int32_t feature = -1;  // -1 marks a leaf
  double threshold = 0.0;     // go left when x[feature] <= threshold
  std::int32_t left = -1;
  std::int32_t right = -1;
  double counts[2] = {0.0, 0.0};  // bootstrap-weighted NotFlood, Flood

  bool is_leaf() const { return feature < 0; }
};

struct DecisionTree {
  std::vector<TreeNode> nodes;  // nodes[0] is the root

  const TreeNode &leaf_for(const SparseMatrix::RowView &row) const;
  // Majority class of the leaf; ties go to NotFlood.
  corpus::Label predict(const SparseMatrix::RowView &row) const;
};

struct ForestModel {
  std::vector<DecisionTree> trees;
  ForestConfig config;
  std::size_t n_features = 0;

  // Fraction of trees voting Flood.
  double flood_vote_fraction(const SparseMatrix::RowView &row) const;
  // Majority vote; ties go to NotFlood.
  corpus::Label predict(const SparseMatrix::RowView &row) const;
};

// Bagged CART trees. Each tree trains on a bootstrap sample drawn from its
// own RNG stream seeded by (seed, tree index). At each node, candidate
// features are drawn in random order until ceil(sqrt(V)) features that vary
// within the node have been scored by Gini impurity decrease. Growth stops
// at max_depth, at a pure node, or when no split reduces impurity.
ForestModel train_forest(const SparseMatrix &x, std::span<const corpus::Label> y,
                         const ForestConfig &config = {});

}  // namespace floodlens::classify

#endif  // FLOODLENS_FOREST_H_
