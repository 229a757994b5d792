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

#ifndef FLOODLENS_EMBEDDING_H_
#define FLOODLENS_EMBEDDING_H_

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace floodlens::embedding {

// Binary document-embedding file:
//   "FLEMB1"                        6 bytes
//   dimension d                     u32 little-endian
//   row count n                     u64 little-endian
//   n ids, each u32 LE byte length followed by UTF-8 bytes, in row order
//   n rows of d f32 little-endian
inline constexpr std::string_view kMagic = "FLEMB1";

class EmbeddingTable {
 public:
  EmbeddingTable() = default;
  EmbeddingTable(std::uint32_t dim, std::vector<std::string> ids,
                 std::vector<float> data);

  std::uint32_t dim() const { return dim_; }
  std::size_t size() const { return ids_.size(); }
  const std::vector<std::string> &ids() const { return ids_; }
  const std::vector<float> &data() const { return data_; }

  std::span<const float> row(std::size_t i) const {
    return std::span<const float>(data_).subspan(i * dim_, dim_);
  }
  // Row index of |id| or -1.
  long find(std::string_view id) const;

 private:
  std::uint32_t dim_ = 0;
  std::vector<std::string> ids_;
  std::vector<float> data_;
  std::unordered_map<std::string, std::size_t> index_;
};

// Throws DataError("bad magic", "payload shorter than n×d×4", ...).
EmbeddingTable parse(std::string_view bytes, const std::string &source);
EmbeddingTable read(const std::filesystem::path &path);

std::string serialize(const EmbeddingTable &table);
void write(const EmbeddingTable &table, const std::filesystem::path &path);

}  // namespace floodlens::embedding

#endif  // FLOODLENS_EMBEDDING_H_
