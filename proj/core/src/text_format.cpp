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

#include "reigate/text_format.hpp"

#include <cctype>
#include <charconv>
#include <cstdio>
#include <sstream>

#include "reigate/common.hpp"

namespace reigate {
namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

// Drops a trailing '#' comment that is not inside a quoted string.
std::string_view strip_comment(std::string_view s) {
  bool quoted = false;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '"') quoted = !quoted;
    if (s[i] == '#' && !quoted) return s.substr(0, i);
  }
  return s;
}

[[noreturn]] void fail(const IniDocument::Entry& e, const std::string& what) {
  throw ValidationError("line " + std::to_string(e.line) + ": key '" + e.key + "': " + what);
}

double parse_double(std::string_view s, const IniDocument::Entry& e) {
  s = trim(s);
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc{} || ptr != s.data() + s.size()) {
    fail(e, "expected a number, got '" + std::string(s) + "'");
  }
  return value;
}

std::string parse_quoted(std::string_view s, const IniDocument::Entry& e) {
  s = trim(s);
  if (s.size() < 2 || s.front() != '"' || s.back() != '"') {
    fail(e, "expected a quoted string, got '" + std::string(s) + "'");
  }
  return std::string(s.substr(1, s.size() - 2));
}

std::vector<std::string_view> split_list(std::string_view s, const IniDocument::Entry& e) {
  s = trim(s);
  if (s.size() < 2 || s.front() != '[' || s.back() != ']') fail(e, "expected a [list]");
  s = trim(s.substr(1, s.size() - 2));
  std::vector<std::string_view> items;
  if (s.empty()) return items;
  bool quoted = false;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= s.size(); ++i) {
    if (i < s.size() && s[i] == '"') quoted = !quoted;
    if (i == s.size() || (s[i] == ',' && !quoted)) {
      items.push_back(trim(s.substr(start, i - start)));
      start = i + 1;
    }
  }
  return items;
}

}  // namespace

IniDocument IniDocument::parse(std::string_view text) {
  IniDocument doc;
  std::string current;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = trim(strip_comment(text.substr(pos, end - pos)));
    ++line_no;
    pos = end + 1;
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') {
        throw ValidationError("line " + std::to_string(line_no) + ": malformed section header");
      }
      current = std::string(trim(line.substr(1, line.size() - 2)));
      if (current.empty()) {
        throw ValidationError("line " + std::to_string(line_no) + ": empty section name");
      }
      doc.sections_[current];
      continue;
    }
    auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ValidationError("line " + std::to_string(line_no) + ": expected 'key = value'");
    }
    if (current.empty()) {
      throw ValidationError("line " + std::to_string(line_no) + ": key outside of any section");
    }
    Entry entry{std::string(trim(line.substr(0, eq))), std::string(trim(line.substr(eq + 1))),
                line_no};
    if (entry.key.empty()) {
      throw ValidationError("line " + std::to_string(line_no) + ": empty key");
    }
    auto& entries = doc.sections_[current];
    for (const auto& existing : entries) {
      if (existing.key == entry.key) fail(entry, "duplicate key in [" + current + "]");
    }
    entries.push_back(std::move(entry));
  }
  return doc;
}

bool IniDocument::has_section(std::string_view section) const {
  return sections_.find(section) != sections_.end();
}

const std::vector<IniDocument::Entry>& IniDocument::section(std::string_view section) const {
  auto it = sections_.find(section);
  if (it == sections_.end()) {
    throw ValidationError("missing section [" + std::string(section) + "]");
  }
  return it->second;
}

const IniDocument::Entry* IniDocument::find(std::string_view section, std::string_view key) const {
  auto it = sections_.find(section);
  if (it == sections_.end()) return nullptr;
  for (const auto& e : it->second) {
    if (e.key == key) return &e;
  }
  return nullptr;
}

namespace {
const IniDocument::Entry& require(const IniDocument& doc, std::string_view section,
                                  std::string_view key) {
  doc.section(section);
  const auto* e = doc.find(section, key);
  if (e == nullptr) {
    throw ValidationError("missing key '" + std::string(key) + "' in [" + std::string(section) +
                          "]");
  }
  return *e;
}
}  // namespace

double IniDocument::get_number(std::string_view s, std::string_view k) const {
  return to_number(require(*this, s, k));
}
std::string IniDocument::get_string(std::string_view s, std::string_view k) const {
  return to_string(require(*this, s, k));
}
std::vector<double> IniDocument::get_numbers(std::string_view s, std::string_view k) const {
  return to_numbers(require(*this, s, k));
}
std::vector<std::string> IniDocument::get_strings(std::string_view s, std::string_view k) const {
  return to_strings(require(*this, s, k));
}

double IniDocument::to_number(const Entry& e) { return parse_double(e.value, e); }

std::string IniDocument::to_string(const Entry& e) { return parse_quoted(e.value, e); }

std::vector<double> IniDocument::to_numbers(const Entry& e) {
  std::vector<double> out;
  for (auto item : split_list(e.value, e)) out.push_back(parse_double(item, e));
  return out;
}

std::vector<std::string> IniDocument::to_strings(const Entry& e) {
  std::vector<std::string> out;
  for (auto item : split_list(e.value, e)) out.push_back(parse_quoted(item, e));
  return out;
}

std::uint64_t fnv1a(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string fnv1a_hex(std::string_view bytes) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(fnv1a(bytes)));
  return buf;
}

}  // namespace reigate
