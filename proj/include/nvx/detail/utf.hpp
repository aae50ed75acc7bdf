// Copyright 2026 The nvextract Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef NVX_DETAIL_UTF_HPP_
#define NVX_DETAIL_UTF_HPP_

#include <unicode/utf8.h>

#include <cstdint>
#include <string>
#include <string_view>

namespace nvx::detail {

// Malformed input becomes U+FFFD.
inline std::u32string to_u32(std::string_view s) {
  std::u32string out;
  out.reserve(s.size());
  const auto* p = reinterpret_cast<const uint8_t*>(s.data());
  const auto n = static_cast<int32_t>(s.size());
  for (int32_t k = 0; k < n;) {
    UChar32 c;
    U8_NEXT(p, k, n, c);
    out.push_back(c < 0 ? U'�' : static_cast<char32_t>(c));
  }
  return out;
}

inline std::string to_utf8(std::u32string_view s) {
  std::string out;
  out.reserve(s.size());
  for (char32_t c : s) {
    uint8_t buf[4];
    int32_t len = 0;
    UBool err = false;
    U8_APPEND(buf, len, 4, static_cast<UChar32>(c), err);
    if (err) {
      out += "\xEF\xBF\xBD";
    } else {
      out.append(reinterpret_cast<const char*>(buf), static_cast<std::size_t>(len));
    }
  }
  return out;
}

}  // namespace nvx::detail

#endif  // NVX_DETAIL_UTF_HPP_
