// Copyright 2026 The malcomm Authors.
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

#ifndef MALCOMM_TEXT_FORMAT_HPP_
#define MALCOMM_TEXT_FORMAT_HPP_

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace malcomm {

// "%.10g" rendering used by every numeric text output.
std::string format_sig10(double value);

// Quotes and escapes `s` as a JSON string literal.
std::string json_quote(std::string_view s);

std::vector<std::string> split(std::string_view line, char sep);

// Reads a whole file; throws std::runtime_error when it cannot be opened.
std::string read_file(const std::filesystem::path& path);

// Writes `contents` to `path`, creating parent directories.
void write_file(const std::filesystem::path& path, std::string_view contents);

}  // namespace malcomm

#endif  // MALCOMM_TEXT_FORMAT_HPP_
