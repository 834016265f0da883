/* Copyright 2026 The camforge Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/
#ifndef CAMFORGE_TEXT_HPP_
#define CAMFORGE_TEXT_HPP_

// Small text and file helpers shared by the readers and writers.

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace camforge::text {

/// Shortest decimal form that parses back to the identical double.
std::string format_double(double value);

/// Fixed-point rendering with `digits` decimals.
std::string format_fixed(double value, int digits);

/// Strict parsers: the whole (trimmed) field must be consumed.
bool parse_double(std::string_view field, double& out);
bool parse_int(std::string_view field, long long& out);
bool parse_u64(std::string_view field, std::uint64_t& out);

std::string_view trim(std::string_view s);
std::vector<std::string> split(std::string_view s, char sep);
std::string join(const std::vector<std::string>& parts, std::string_view sep);
bool starts_with(std::string_view s, std::string_view prefix);

std::string read_file(const std::filesystem::path& path);

/// Writes through a temporary sibling and renames it into place, so readers
/// never observe a partial file and a failed write leaves nothing behind.
void write_file_atomic(const std::filesystem::path& path,
                       std::string_view contents);

}  // namespace camforge::text

#endif  // CAMFORGE_TEXT_HPP_
