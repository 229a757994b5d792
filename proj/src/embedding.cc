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

#include "floodlens/embedding.h"

#include <bit>
#include <cmath>
#include <cstring>

#include "floodlens/error.h"
#include "floodlens/io.h"
#include "floodlens/unicode.h"

namespace floodlens::embedding {

namespace {

template <typename T>
T read_le(const unsigned char *p) {
  T v = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) {
    v |= static_cast<T>(p[i]) << (8 * i);
  }
  return v;
}

template <typename T>
void append_le(std::string &out, T v) {
  for (std::size_t i = 0; i < sizeof(T); ++i) {
    out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
  }
}

}  // namespace

EmbeddingTable::EmbeddingTable(std::uint32_t dim, std::vector<std::string> ids,
                               std::vector<float> data)
    : dim_(dim), ids_(std::move(ids)), data_(std::move(data)) {
  if (dim_ == 0) throw DataError("embeddings", "dimension must be positive");
  if (data_.size() != ids_.size() * dim_) {
    throw DataError("embeddings", "payload size does not match n×d");
  }
  for (float f : data_) {
    if (!std::isfinite(f)) throw DataError("embeddings", "non-finite value");
  }
  index_.reserve(ids_.size());
  for (std::size_t i = 0; i < ids_.size(); ++i) {
    if (!index_.emplace(ids_[i], i).second) {
      throw DataError("embeddings", "duplicate id '" + ids_[i] + "'");
    }
  }
}

long EmbeddingTable::find(std::string_view id) const {
  auto it = index_.find(std::string(id));
  return it == index_.end() ? -1 : static_cast<long>(it->second);
}

EmbeddingTable parse(std::string_view bytes, const std::string &source) {
  const auto *p = reinterpret_cast<const unsigned char *>(bytes.data());
  const std::size_t size = bytes.size();
  const std::size_t header = kMagic.size() + 4 + 8;
  if (size < kMagic.size() || bytes.substr(0, kMagic.size()) != kMagic) {
    throw DataError(source, "bad magic");
  }
  if (size < header) throw DataError(source, "truncated header");
  auto dim = read_le<std::uint32_t>(p + 6);
  auto n = read_le<std::uint64_t>(p + 10);
  if (dim == 0) throw DataError(source, "dimension must be positive");

  std::size_t pos = header;
  std::vector<std::string> ids;
  ids.reserve(static_cast<std::size_t>(std::min<std::uint64_t>(n, 1u << 20)));
  for (std::uint64_t i = 0; i < n; ++i) {
    if (pos + 4 > size) throw DataError(source, "truncated id index");
    auto len = read_le<std::uint32_t>(p + pos);
    pos += 4;
    if (pos + len > size) throw DataError(source, "truncated id index");
    std::string id(bytes.substr(pos, len));
    if (!unicode::valid_utf8(id)) {
      throw DataError(source, "id " + std::to_string(i) + " is not valid UTF-8");
    }
    ids.push_back(std::move(id));
    pos += len;
  }
  const std::uint64_t payload = n * dim * 4ull;
  if (size - pos < payload) throw DataError(source, "payload shorter than n×d×4");
  if (size - pos > payload) throw DataError(source, "trailing bytes after payload");

  std::vector<float> data(static_cast<std::size_t>(n) * dim);
  for (std::size_t k = 0; k < data.size(); ++k) {
    data[k] = std::bit_cast<float>(read_le<std::uint32_t>(p + pos + 4 * k));
    if (!std::isfinite(data[k])) {
      throw DataError(source, "non-finite value in row " + std::to_string(k / dim));
    }
  }
  try {
    return EmbeddingTable(dim, std::move(ids), std::move(data));
  } catch (const DataError &e) {
    throw DataError(source, e.what());
  }
}

EmbeddingTable read(const std::filesystem::path &path) {
  return parse(read_file(path), path.string());
}

std::string serialize(const EmbeddingTable &table) {
  std::string out(kMagic);
  append_le<std::uint32_t>(out, table.dim());
  append_le<std::uint64_t>(out, table.size());
  for (const auto &id : table.ids()) {
    append_le<std::uint32_t>(out, static_cast<std::uint32_t>(id.size()));
    out += id;
  }
  for (float f : table.data()) append_le<std::uint32_t>(out, std::bit_cast<std::uint32_t>(f));
  return out;
}

void write(const EmbeddingTable &table, const std::filesystem::path &path) {
  write_file_atomic(path, serialize(table));
}

}  // namespace floodlens::embedding
