/*
 * Copyright 2026 The NETL Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

// Small helpers shared by the tab-separated file formats.
namespace netl {

std::vector<std::string> split_tabs(std::string_view line);

// Fixed-point with `digits` decimals, locale independent.
std::string format_fixed(double value, int digits = 6);
// Shortest representation that parses back to the same double.
std::string format_exact(double value);

// Throws kMalformedRecord naming `what`.
double parse_double(std::string_view text, std::string_view what);
long long parse_int(std::string_view text, std::string_view what);

// Writes through a sibling temporary file and renames it into place.
void write_file_atomic(const std::filesystem::path& path,
                       const std::function<void(std::ostream&)>& writer);

// FNV-1a over the file bytes, rendered as 16 hex digits.
std::string file_checksum(const std::filesystem::path& path);

}  // namespace netl
