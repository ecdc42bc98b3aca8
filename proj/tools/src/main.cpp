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
// reigate command line: runs one experiment spec and writes its artifacts.
#include <cstdlib>
#include <iostream>

#include <CLI11.hpp>

#include "reigate/common.hpp"
#include "reigate/runner.hpp"

namespace {

int fail(const std::string& type, const std::string& message, int code) {
  std::cerr << reigate::runner::error_report(type, message).dump() << "\n";
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Rare-earth ion gate simulator", "reigate"};
  app.set_version_flag("--version", std::string(REIGATE_VERSION));

  std::string kind;
  std::string spec_path;
  std::string out_dir = ".";
  std::optional<std::uint64_t> seed;
  std::optional<int> workers;
  std::string created;

  app.add_option("kind", kind, "Experiment kind")
      ->required()
      ->check(CLI::IsMember(reigate::runner::experiment_kinds()));
  app.add_option("--spec", spec_path, "Experiment spec (JSON)")->required();
  app.add_option("--seed", seed, "Seed; overrides the spec");
  app.add_option("--workers", workers, "Worker threads; default from REIGATE_WORKERS or hardware")
      ->check(CLI::PositiveNumber);
  app.add_option("--out", out_dir, "Output directory");
  app.add_option("--created", created, "Fixed value for the metadata 'created' field");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return fail("usage", e.what(), 64);
  }

  try {
    reigate::runner::RunOptions opts;
    opts.kind = kind;
    opts.seed = seed;
    opts.workers = workers;
    opts.created = created;
    opts.spec_dir = std::filesystem::absolute(spec_path).parent_path();
    const auto spec = reigate::runner::load_spec(spec_path);
    const auto artifacts = reigate::runner::run(spec, opts);
    reigate::runner::write_artifacts(out_dir, artifacts);
    nlohmann::json done{{"status", "ok"}, {"kind", kind}, {"artifacts", nlohmann::json::array()}};
    for (const auto& a : artifacts) done["artifacts"].push_back((std::filesystem::path(out_dir) / a.name).string());
    std::cout << done.dump() << "\n";
    return 0;
  } catch (const reigate::ValidationError& e) {
    return fail("validation", e.what(), 2);
  } catch (const reigate::IntegrationError& e) {
    return fail("integration", e.what(), 3);
  } catch (const std::exception& e) {
    return fail("runtime", e.what(), 1);
  }
}
