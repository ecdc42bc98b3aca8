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
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace reigate::runner {

/// One output file, held in memory until the whole run succeeded.
struct Artifact {
  std::string name;
  std::string content;
};

struct RunOptions {
  /// Kind requested on the command line; must match the spec's kind if both are set.
  std::string kind;
  std::optional<std::uint64_t> seed;
  std::optional<int> workers;
  /// Base for relative paths inside the spec (ion_config).
  std::filesystem::path spec_dir = ".";
  /// Stamp written into the metadata "created" field; empty means now (UTC).
  std::string created;
};

/// Experiment kinds understood by `run`.
const std::vector<std::string>& experiment_kinds();

/// Runs one experiment spec. Throws ValidationError for bad specs and
/// reigate::Error subclasses for runtime failures; nothing is written.
std::vector<Artifact> run(const nlohmann::json& spec, const RunOptions& options);

/// Writes artifacts into `dir` via temporary files renamed at the end; on
/// failure the temporaries are removed and no artifact is left behind.
void write_artifacts(const std::filesystem::path& dir, const std::vector<Artifact>& artifacts);

/// Parses a spec file (JSON). Throws ValidationError with the parse position.
nlohmann::json load_spec(const std::filesystem::path& path);

/// Structured error report printed by the CLI.
nlohmann::json error_report(const std::string& type, const std::string& message);

}  // namespace reigate::runner
