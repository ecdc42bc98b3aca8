// Copyright 2026 The reigate Authors
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

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace reigate {

/// Minimal sectioned key/value text format used by ion config files:
///
///   # comment
///   [section]
///   key = 1.5
///   key = "text"
///   key = [1.0, 2.0, 3.0]
///   key = ["a", "b"]
///
/// Keys keep file order within a section. Values are kept as raw text and
/// converted on access.
class IniDocument {
 public:
  struct Entry {
    std::string key;
    std::string value;
    int line = 0;
  };

  static IniDocument parse(std::string_view text);

  bool has_section(std::string_view section) const;
  const std::vector<Entry>& section(std::string_view section) const;
  const Entry* find(std::string_view section, std::string_view key) const;

  double get_number(std::string_view section, std::string_view key) const;
  std::string get_string(std::string_view section, std::string_view key) const;
  std::vector<double> get_numbers(std::string_view section, std::string_view key) const;
  std::vector<std::string> get_strings(std::string_view section, std::string_view key) const;

  static double to_number(const Entry& entry);
  static std::string to_string(const Entry& entry);
  static std::vector<double> to_numbers(const Entry& entry);
  static std::vector<std::string> to_strings(const Entry& entry);

 private:
  std::map<std::string, std::vector<Entry>, std::less<>> sections_;
};

/// 64-bit FNV-1a hash of a byte string, hex encoded (16 chars).
std::string fnv1a_hex(std::string_view bytes);
std::uint64_t fnv1a(std::string_view bytes);

}  // namespace reigate
