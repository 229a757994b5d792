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

#ifndef FLOODLENS_UNICODE_H_
#define FLOODLENS_UNICODE_H_

#include <string>
#include <string_view>

namespace floodlens::unicode {

bool valid_utf8(std::string_view text);

// NFC normalization. Input must be valid UTF-8.
std::string nfc(std::string_view text);

// Decodes one code point at |pos| and advances it. Invalid sequences decode
// to U+FFFD.
char32_t next_code_point(std::string_view text, std::size_t &pos);

void append_utf8(std::string &out, char32_t cp);

bool is_alnum(char32_t cp);
char32_t to_lower(char32_t cp);

}  // namespace floodlens::unicode

#endif  // FLOODLENS_UNICODE_H_
