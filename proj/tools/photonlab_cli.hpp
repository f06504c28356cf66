/*
 * Copyright 2026 The photonlab authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
#ifndef PHOTONLAB_CLI_HPP
#define PHOTONLAB_CLI_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "photonlab/analysis.hpp"
#include "photonlab/engines.hpp"
#include "photonlab/scaling.hpp"

namespace photonlab::cli {

/// Raised for malformed configs and command arguments (exit code 2).
class ConfigError : public Error {
public:
    explicit ConfigError(const std::string& what) : Error(what) {}
};

struct RunConfig {
    std::optional<SourcePair> sources;
    std::optional<DetectorArray> detectors;
    EngineKind engine = EngineKind::Auto;
    EngineOptions opts;
    std::vector<int> grid_max;  // optional per-detector overrides, -1 keeps the rule
    std::optional<double> delta;  // fixed relative phase for the mean-field engine
    std::uint64_t seed = 0;
};

/// Parses and validates the JSON config; unknown keys are rejected.
RunConfig parse_config(const nlohmann::ordered_json& doc);
RunConfig load_config(const std::string& path);

/// Command-line state shared by all subcommands.
struct RunContext {
    std::string out_dir = ".";
    std::uint64_t seed = 0;
    bool seed_overridden = false;
    std::string engine_override;  // empty: keep the config engine
    bool allow_expensive = false;
};

int run_joint(const RunConfig& cfg, const RunContext& ctx, const std::vector<int>& axes,
              const std::string& csv_name = "joint");
int run_conditional(const RunConfig& cfg, const RunContext& ctx,
                    const std::vector<std::pair<int, int>>& fixed);
int run_trajectory(const RunConfig& cfg, const RunContext& ctx, int grid_size);
int run_sample(const RunConfig& cfg, const RunContext& ctx, int count);
int run_scaling_check(const RunConfig& cfg, const RunContext& ctx, const std::string& q_text);
int run_figure(int id, const RunContext& ctx);

/// "n1,n2" -> {0, 1}
std::vector<int> parse_axes(const std::string& text, int detector_count);
/// "n1=106,n2=174" -> {(0,106), (1,174)}
std::vector<std::pair<int, int>> parse_fixed(const std::string& text, int detector_count);

/// The detector values used throughout the reference experiments.
DetectorArray reference_detectors(int count);

/// Top-level entry used by main(); returns the process exit code.
int dispatch(int argc, char** argv);

} // namespace photonlab::cli

#endif
