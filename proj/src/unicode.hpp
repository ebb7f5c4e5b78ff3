// Copyright 2026 The Elicit Authors
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


#pragma once

#include <string>
#include <string_view>

namespace elicit::detail {

std::u32string to_utf32(std::string_view utf8);
std::string to_utf8(std::u32string_view text);
void append_utf8(std::string& out, char32_t c);

std::string nfc(std::string_view utf8);
std::string nfd(std::string_view utf8);
/// NFC(fold(NFC(text))).
std::string folded_nfc(std::string_view utf8);

bool is_letter(char32_t c);
bool is_mark(char32_t c);
bool is_white_space(char32_t c);
char32_t to_lower(char32_t c);

}  // namespace elicit::detail
