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

#ifndef FLOODLENS_MODEL_H_
#define FLOODLENS_MODEL_H_

#include <filesystem>
#include <string>
#include <variant>

#include "floodlens/classify.h"
#include "floodlens/forest.h"

namespace floodlens::classify {

// Classifiers in evaluation-table row order.
enum class Method { Keywords, Logistic, Svm, Forest, EmbeddingHead };

inline constexpr Method kAllMethods[] = {Method::Keywords, Method::Logistic,
                                         Method::Svm, Method::Forest,
                                         Method::EmbeddingHead};

// Short names used on the command line and in file names.
std::string method_name(Method m);
// Display names used in evaluation tables.
std::string method_title(Method m);
std::optional<Method> parse_method(std::string_view name);

struct SavedModel {
  Method method = Method::Keywords;
  std::variant<KeywordRule, LinearModel, ForestModel> params;
  // tf-idf vocabulary CSV, relative to the model file (bag-of-words only).
  std::string vocabulary;
};

// Versioned JSON with the method tag, config and parameters.
void save_model(const SavedModel &model, const std::filesystem::path &path);
SavedModel load_model(const std::filesystem::path &path);

}  // namespace floodlens::classify

#endif  // FLOODLENS_MODEL_H_
