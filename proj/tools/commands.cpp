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
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "photonlab/numeric.hpp"
#include "photonlab/rng.hpp"
#include "photonlab_cli.hpp"

namespace photonlab::cli {

using nlohmann::ordered_json;

namespace {

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

class CsvWriter {
public:
    CsvWriter(const std::string& dir, const std::string& stem) {
        std::filesystem::create_directories(dir);
        path_ = (std::filesystem::path(dir) / (stem + ".csv")).string();
        out_.open(path_, std::ios::binary);
        if (!out_) throw ConfigError("cannot write " + path_);
    }
    void header(const std::vector<std::string>& cols) {
        for (std::size_t i = 0; i < cols.size(); ++i) out_ << (i ? "," : "") << cols[i];
        out_ << '\n';
    }
    void row(const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) out_ << (i ? "," : "") << cells[i];
        out_ << '\n';
    }
    const std::string& path() const { return path_; }

private:
    std::string path_;
    std::ofstream out_;
};

struct Timer {
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    }
};

void write_sidecar(const std::string& dir, const std::string& stem, ordered_json doc) {
    const auto path = std::filesystem::path(dir) / (stem + ".json");
    std::ofstream out(path, std::ios::binary);
    out << doc.dump(2) << '\n';
}

ordered_json quad_json(const QuadratureInfo& q) {
    return ordered_json{{"delta_nodes", q.delta_nodes},
                        {"delta_change", q.delta_change},
                        {"radial_nodes", q.radial_nodes},
                        {"radial_change", q.radial_change}};
}

ordered_json sidecar_base(const std::string& command, const RunConfig& cfg, const RunContext& ctx,
                          EngineKind engine) {
    return ordered_json{{"command", command},
                        {"engine", engine_name(engine)},
                        {"seed", ctx.seed_overridden ? ctx.seed : cfg.seed},
                        {"allow_expensive", ctx.allow_expensive},
                        {"tolerances",
                         ordered_json{{"delta_tol", cfg.opts.delta_tol},
                                      {"delta_nodes_max", cfg.opts.delta_nodes_max},
                                      {"radial_nodes", cfg.opts.radial_nodes},
                                      {"mixture_weight_floor", cfg.opts.mixture_weight_floor}}}};
}

void finish_sidecar(ordered_json& doc, const JointDistribution& dist, const Timer& timer) {
    doc["engine_tag"] = dist.engine_tag;
    doc["tail_mass"] = dist.tail_bound;
    doc["degraded"] = dist.tail_bound > 1e-9;
    if (dist.tail_bound > 1e-9)
        std::fprintf(stderr, "warning: tail mass %.3e exceeds 1e-9; run marked degraded\n",
                     dist.tail_bound);
    doc["quadrature"] = quad_json(dist.quad);
    doc["wall_time_s"] = timer.seconds();
}

} // namespace

DetectorArray subset(const DetectorArray& array, const std::vector<int>& axes) {
    std::vector<DetectorSpec> specs;
    specs.reserve(axes.size());
    for (int ax : axes) specs.push_back(array[ax]);
    return DetectorArray(std::move(specs));
}

OutcomeGrid build_grid(const RunConfig& cfg, const DetectorArray& sub, const std::vector<int>& axes) {
    OutcomeGrid grid = default_grid(sub, *cfg.sources);
    if (!cfg.grid_max.empty()) {
        for (std::size_t i = 0; i < axes.size(); ++i) {
            const int cap = cfg.grid_max[static_cast<std::size_t>(axes[i])];
            if (cap >= 0) grid.axes[i].hi = cap;
        }
    }
    return grid;
}

EngineKind resolve_engine(const RunConfig& cfg, const RunContext& ctx) {
    return ctx.engine_override.empty() ? cfg.engine : engine_from_name(ctx.engine_override);
}

int run_joint(const RunConfig& cfg, const RunContext& ctx, const std::vector<int>& axes,
              const std::string& csv_name) {
    Timer timer;
    const DetectorArray sub = subset(*cfg.detectors, axes);
    const OutcomeGrid grid = build_grid(cfg, sub, axes);
    EngineOptions opts = cfg.opts;
    opts.allow_expensive = ctx.allow_expensive;
    const EngineKind engine = resolve_engine(cfg, ctx);

    JointDistribution dist = [&] {
        if (engine == EngineKind::MeanField) {
            if (!cfg.delta) throw ConfigError("meanfield engine requires 'delta' in the config");
            const auto [ma, mb] = cfg.sources->mode_means();
            return meanfield_joint(sub, ma, mb, *cfg.delta, grid);
        }
        return auto_joint(sub, *cfg.sources, grid, opts, engine);
    }();

    CsvWriter csv(ctx.out_dir, csv_name);
    std::vector<std::string> cols;
    for (int ax : axes) cols.push_back("n" + std::to_string(ax + 1));
    cols.push_back("probability");
    csv.header(cols);
    std::vector<std::string> cells(cols.size());
    for (std::size_t flat = 0; flat < dist.log_probs.size(); ++flat) {
        const OutcomeVector n = dist.grid.unflatten(flat);
        for (std::size_t i = 0; i < n.size(); ++i) cells[i] = std::to_string(n[i]);
        cells.back() = fmt(std::exp(dist.log_probs[flat]));
        csv.row(cells);
    }

    ordered_json side = sidecar_base(csv_name, cfg, ctx, engine);
    finish_sidecar(side, dist, timer);
    side["outputs"] = {csv.path()};
    write_sidecar(ctx.out_dir, csv_name, side);
    return 0;
}

int run_conditional(const RunConfig& cfg, const RunContext& ctx,
                    const std::vector<std::pair<int, int>>& fixed) {
    Timer timer;
    const int m_total = cfg.detectors->size();
    std::vector<int> fixed_axes;
    for (const auto& [ax, value] : fixed) {
        (void)value;
        fixed_axes.push_back(ax);
    }
    int target = -1;
    for (int m = 0; m < m_total; ++m) {
        bool is_fixed = false;
        for (int f : fixed_axes) is_fixed = is_fixed || f == m;
        if (!is_fixed) {
            target = m;
            break;
        }
    }
    if (target < 0) throw ConfigError("conditional: all detectors are fixed");

    // Detectors beyond {fixed} + target marginalize away exactly, so the run
    // only carries the axes that matter.
    std::vector<int> axes = fixed_axes;
    axes.push_back(target);
    std::sort(axes.begin(), axes.end());
    const DetectorArray sub = subset(*cfg.detectors, axes);

    OutcomeGrid grid = build_grid(cfg, sub, axes);
    std::vector<std::pair<int, int>> local_fixed;
    for (const auto& [ax, value] : fixed) {
        const auto pos = std::find(axes.begin(), axes.end(), ax) - axes.begin();
        if (!grid.axes[static_cast<std::size_t>(pos)].contains(value))
            throw ConfigError("conditional: fixed count outside the grid bounds");
        grid.axes[static_cast<std::size_t>(pos)] = {value, value};
        local_fixed.emplace_back(static_cast<int>(pos), value);
    }

    EngineOptions opts = cfg.opts;
    opts.allow_expensive = ctx.allow_expensive;
    const EngineKind engine = resolve_engine(cfg, ctx);
    const JointDistribution joint = auto_joint(sub, *cfg.sources, grid, opts, engine);
    const JointDistribution cond = conditional(joint, local_fixed);

    CsvWriter csv(ctx.out_dir, "conditional");
    csv.header({"n" + std::to_string(target + 1), "probability"});
    const auto& ax = cond.grid.axes.front();
    for (int n = ax.lo; n <= ax.hi; ++n)
        csv.row({std::to_string(n), fmt(std::exp(cond.log_probs[static_cast<std::size_t>(n - ax.lo)]))});

    ordered_json side = sidecar_base("conditional", cfg, ctx, engine);
    finish_sidecar(side, joint, timer);
    ordered_json fixed_json = ordered_json::object();
    for (const auto& [axis, value] : fixed) fixed_json["n" + std::to_string(axis + 1)] = value;
    side["fixed"] = fixed_json;
    side["outputs"] = {csv.path()};
    write_sidecar(ctx.out_dir, "conditional", side);
    return 0;
}

int run_trajectory(const RunConfig& cfg, const RunContext& ctx, int grid_size) {
    Timer timer;
    const MeanFieldTrajectory traj = trajectory(*cfg.detectors, *cfg.sources, grid_size);
    CsvWriter csv(ctx.out_dir, "trajectory");
    std::vector<std::string> cols = {"delta"};
    for (int m = 0; m < cfg.detectors->size(); ++m) cols.push_back("n" + std::to_string(m + 1));
    csv.header(cols);
    std::vector<std::string> cells(cols.size());
    for (std::size_t i = 0; i < traj.deltas.size(); ++i) {
        cells[0] = fmt(traj.deltas[i]);
        for (std::size_t m = 0; m < traj.points[i].size(); ++m) cells[m + 1] = fmt(traj.points[i][m]);
        csv.row(cells);
    }
    ordered_json side = sidecar_base("trajectory", cfg, ctx, EngineKind::MeanField);
    side["grid_size"] = grid_size;
    side["wall_time_s"] = timer.seconds();
    side["outputs"] = {csv.path()};
    write_sidecar(ctx.out_dir, "trajectory", side);
    return 0;
}

int run_sample(const RunConfig& cfg, const RunContext& ctx, int count) {
    Timer timer;
    const std::uint64_t seed = ctx.seed_overridden ? ctx.seed : cfg.seed;
    const EngineKind engine = resolve_engine(cfg, ctx);
    EngineOptions opts = cfg.opts;
    opts.allow_expensive = ctx.allow_expensive;

    std::vector<OutcomeVector> samples;
    std::string method;
    const auto [ma, mb] = cfg.sources->mode_means();
    if (engine == EngineKind::MeanField) {
        if (!cfg.delta) throw ConfigError("meanfield sampling requires 'delta' in the config");
        method = "meanfield-fixed-delta";
        Rng rng(seed);
        samples.reserve(static_cast<std::size_t>(count));
        for (int i = 0; i < count; ++i) {
            OutcomeVector n(static_cast<std::size_t>(cfg.detectors->size()));
            for (int m = 0; m < cfg.detectors->size(); ++m) {
                const auto& spec = (*cfg.detectors)[m];
                const double nbar =
                    mean_count(spec, {spec.r_aa() * ma, spec.r_bb() * mb}, *cfg.delta);
                n[static_cast<std::size_t>(m)] = poisson_draw(nbar, rng);
            }
            samples.push_back(std::move(n));
        }
    } else if ((engine == EngineKind::Auto || engine == EngineKind::PhaseAverage) &&
               select_engine(*cfg.sources) == EngineKind::PhaseAverage) {
        // The generative mean-field path draws delta uniformly and is
        // distribution-identical to the phase average for Poissonian sources.
        method = "meanfield-generative";
        samples = sample_meanfield(*cfg.detectors, ma, mb, count, seed);
    } else {
        method = "inverse-cdf";
        std::vector<int> axes(static_cast<std::size_t>(cfg.detectors->size()));
        for (int m = 0; m < cfg.detectors->size(); ++m) axes[static_cast<std::size_t>(m)] = m;
        const OutcomeGrid grid = build_grid(cfg, *cfg.detectors, axes);
        const JointDistribution dist = auto_joint(*cfg.detectors, *cfg.sources, grid, opts, engine);
        samples = sample_outcomes(dist, count, seed);
    }

    CsvWriter csv(ctx.out_dir, "samples");
    std::vector<std::string> cols;
    for (int m = 0; m < cfg.detectors->size(); ++m) cols.push_back("n" + std::to_string(m + 1));
    csv.header(cols);
    std::vector<std::string> cells(cols.size());
    for (const auto& s : samples) {
        for (std::size_t m = 0; m < s.size(); ++m) cells[m] = std::to_string(s[m]);
        csv.row(cells);
    }
    ordered_json side = sidecar_base("sample", cfg, ctx, engine);
    side["count"] = count;
    side["method"] = method;
    side["wall_time_s"] = timer.seconds();
    side["outputs"] = {csv.path()};
    write_sidecar(ctx.out_dir, "samples", side);
    return 0;
}

int run_scaling_check(const RunConfig& cfg, const RunContext& ctx, const std::string& q_text) {
    Timer timer;
    const Rational q = Rational::parse(q_text);
    EngineOptions opts = cfg.opts;
    opts.allow_expensive = ctx.allow_expensive;
    const EngineKind engine = resolve_engine(cfg, ctx);
    const EquivalenceReport report = equivalence_check(*cfg.detectors, *cfg.sources, q.value(), engine, opts);

    CsvWriter csv(ctx.out_dir, "scaling_check");
    csv.header({"q", "sup_norm", "mass_thinned", "mass_rescaled"});
    csv.row({q_text, fmt(report.sup_norm), fmt(report.mass_thinned), fmt(report.mass_rescaled)});

    ordered_json side = sidecar_base("scaling-check", cfg, ctx, engine);
    side["q"] = q_text;
    side["engine_tag"] = report.engine_tag;
    side["sup_norm"] = report.sup_norm;
    side["wall_time_s"] = timer.seconds();
    side["outputs"] = {csv.path()};
    write_sidecar(ctx.out_dir, "scaling_check", side);
    return 0;
}

} // namespace photonlab::cli
