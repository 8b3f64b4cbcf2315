// Copyright 2026 The pdomd Authors
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

#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace pdomd {

std::string trim(std::string_view s);
std::vector<std::string> split(std::string_view s, char delimiter);
std::optional<long long> parse_integer(std::string_view s);
// Accepts anything std::from_chars accepts plus "inf"/"nan" spellings.
std::optional<double> parse_double(std::string_view s);
// Shortest representation that parses back to the identical double.
std::string format_double(double value);

}  // namespace pdomd
