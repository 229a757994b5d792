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

#include "floodlens/model.h"

#include <json.hpp>

#include "floodlens/error.h"
#include "floodlens/io.h"

namespace floodlens::classify {

using json = nlohmann::ordered_json;

namespace {

constexpr int kFormatVersion = 1;
constexpr const char *kFormatTag = "floodlens-model";

json linear_to_json(const LinearModel &m) {
  json j;
  j["kind"] = m.kind == LinearKind::Logistic ? "logistic" : "hinge_svm";
  j["config"] = {{"lambda", m.config.lambda},
                 {"epochs", m.config.epochs},
                 {"learning_rate", m.config.learning_rate},
                 {"seed", m.config.seed}};
  j["bias"] = m.bias;
  j["weights"] = m.weights;
  j["loss_log"] = m.loss_log;
  return j;
}

LinearModel linear_from_json(const json &j) {
  LinearModel m;
  std::string kind = j.at("kind").get<std::string>();
  if (kind == "logistic") {
    m.kind = LinearKind::Logistic;
  } else if (kind == "hinge_svm") {
    m.kind = LinearKind::HingeSvm;
  } else {
    throw DataError("unknown linear kind '" + kind + "'");
  }
  const json &c = j.at("config");
  m.config.lambda = c.at("lambda").get<double>();
  m.config.epochs = c.at("epochs").get<int>();
  m.config.learning_rate = c.at("learning_rate").get<double>();
  m.config.seed = c.at("seed").get<std::uint64_t>();
  m.bias = j.at("bias").get<double>();
  m.weights = j.at("weights").get<std::vector<double>>();
  m.loss_log = j.at("loss_log").get<std::vector<double>>();
  return m;
}

json forest_to_json(const ForestModel &m) {
  json j;
  j["config"] = {{"n_trees", m.config.n_trees},
                 {"max_depth", m.config.max_depth},
                 {"seed", m.config.seed}};
  j["n_features"] = m.n_features;
  json trees = json::array();
  for (const auto &t : m.trees) {
    std::vector<std::int32_t> feature, left, right;
    std::vector<double> threshold, c0, c1;
    for (const auto &n : t.nodes) {
      feature.push_back(n.feature);
      threshold.push_back(n.threshold);
      left.push_back(n.left);
      right.push_back(n.right);
      c0.push_back(n.counts[0]);
      c1.push_back(n.counts[1]);
    }
    trees.push_back({{"feature", feature}, {"threshold", threshold},
                     {"left", left},       {"right", right},
                     {"count_not_flood", c0}, {"count_flood", c1}});
  }
  j["trees"] = std::move(trees);
  return j;
}

ForestModel forest_from_json(const json &j) {
  ForestModel m;
  const json &c = j.at("config");
  m.config.n_trees = c.at("n_trees").get<int>();
  m.config.max_depth = c.at("max_depth").get<int>();
  m.config.seed = c.at("seed").get<std::uint64_t>();
  m.n_features = j.at("n_features").get<std::size_t>();
  for (const auto &t : j.at("trees")) {
    auto feature = t.at("feature").get<std::vector<std::int32_t>>();
    auto threshold = t.at("threshold").get<std::vector<double>>();
    auto left = t.at("left").get<std::vector<std::int32_t>>();
    auto right = t.at("right").get<std::vector<std::int32_t>>();
    auto c0 = t.at("count_not_flood").get<std::vector<double>>();
    auto c1 = t.at("count_flood").get<std::vector<double>>();
    std::size_t n = feature.size();
    if (n == 0 || threshold.size() != n || left.size() != n ||
        right.size() != n || c0.size() != n || c1.size() != n) {
      throw DataError("malformed tree arrays");
    }
    DecisionTree tree;
    tree.nodes.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      TreeNode &node = tree.nodes[i];
      node.feature = feature[i];
      node.threshold = threshold[i];
      node.left = left[i];
      node.right = right[i];
      node.counts[0] = c0[i];
      node.counts[1] = c1[i];
      if (!node.is_leaf()) {
        auto valid = [&](std::int32_t k) {
          return k > static_cast<std::int32_t>(i) && k < static_cast<std::int32_t>(n);
        };
        if (!valid(node.left) || !valid(node.right) ||
            static_cast<std::size_t>(node.feature) >= m.n_features) {
          throw DataError("tree node " + std::to_string(i) + " has invalid children");
        }
      } else if (node.counts[0] + node.counts[1] <= 0) {
        throw DataError("tree leaf " + std::to_string(i) + " has no samples");
      }
    }
    m.trees.push_back(std::move(tree));
  }
  if (m.trees.empty()) throw DataError("forest has no trees");
  return m;
}

}  // namespace

std::string method_name(Method m) {
  switch (m) {
    case Method::Keywords: return "keywords";
    case Method::Logistic: return "logistic";
    case Method::Svm: return "svm";
    case Method::Forest: return "forest";
    case Method::EmbeddingHead: return "embedding";
  }
  return "?";
}

std::string method_title(Method m) {
  switch (m) {
    case Method::Keywords: return "Keywords";
    case Method::Logistic: return "Logistic Regression";
    case Method::Svm: return "SVM";
    case Method::Forest: return "Random Forest";
    case Method::EmbeddingHead: return "Embedding head";
  }
  return "?";
}

std::optional<Method> parse_method(std::string_view name) {
  for (Method m : kAllMethods) {
    if (method_name(m) == name) return m;
  }
  return std::nullopt;
}

void save_model(const SavedModel &model, const std::filesystem::path &path) {
  json j;
  j["format"] = kFormatTag;
  j["version"] = kFormatVersion;
  j["method"] = method_name(model.method);
  if (!model.vocabulary.empty()) j["vocabulary"] = model.vocabulary;
  if (const auto *rule = std::get_if<KeywordRule>(&model.params)) {
    j["params"] = {{"stems", rule->stems}};
  } else if (const auto *lin = std::get_if<LinearModel>(&model.params)) {
    j["params"] = linear_to_json(*lin);
  } else {
    j["params"] = forest_to_json(std::get<ForestModel>(model.params));
  }
  write_file_atomic(path, j.dump() + "\n");
}

SavedModel load_model(const std::filesystem::path &path) {
  SavedModel out;
  try {
    json j = json::parse(read_file(path));
    if (j.at("format").get<std::string>() != kFormatTag) {
      throw DataError("not a floodlens model file");
    }
    if (j.at("version").get<int>() != kFormatVersion) {
      throw DataError("unsupported model version " +
                      std::to_string(j.at("version").get<int>()));
    }
    auto method = parse_method(j.at("method").get<std::string>());
    if (!method) throw DataError("unknown method");
    out.method = *method;
    if (j.contains("vocabulary")) out.vocabulary = j["vocabulary"].get<std::string>();
    const json &p = j.at("params");
    switch (out.method) {
      case Method::Keywords: {
        KeywordRule rule;
        rule.stems = p.at("stems").get<std::vector<std::string>>();
        rule.validate();
        out.params = rule;
        break;
      }
      case Method::Forest:
        out.params = forest_from_json(p);
        break;
      default:
        out.params = linear_from_json(p);
    }
  } catch (const nlohmann::json::exception &e) {
    throw DataError(path.string(), e.what());
  } catch (const UsageError &e) {
    throw DataError(path.string(), e.what());
  } catch (const DataError &e) {
    throw DataError(path.string(), e.what());
  }
  return out;
}

}  // namespace floodlens::classify
