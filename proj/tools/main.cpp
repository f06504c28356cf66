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
#include <cstdio>

#include <CLI11.hpp>

#include "photonlab_cli.hpp"

namespace {

using namespace photonlab;
using namespace photonlab::cli;

struct CommonArgs {
    std::string config_path;
    RunContext ctx;
    bool seed_given = false;
};

void add_common(CLI::App* cmd, CommonArgs& args, bool config_required) {
    auto* opt = cmd->add_option("--config", args.config_path, "JSON run configuration");
    if (config_required) opt->required();
    cmd->add_option("--out", args.ctx.out_dir, "output directory (default: .)");
    cmd->add_option("--seed", args.ctx.seed, "seed overriding the config value")
        ->each([&args](const std::string&) { args.ctx.seed_overridden = true; });
    cmd->add_option("--engine", args.ctx.engine_override,
                    "engine override: meanfield|phase|radial|fock|auto")
        ->check(CLI::IsMember({"meanfield", "phase", "radial", "fock", "auto"}));
    cmd->add_flag("--allow-expensive", args.ctx.allow_expensive,
                  "permit full-scale grids that exceed the desk-scale budget");
}

int guarded(const std::function<int()>& body) {
    try {
        return body();
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const NonConvergenceError& e) {
        std::fprintf(stderr, "numerical non-convergence: %s (achieved %.3e)\n", e.what(),
                     e.achieved_tolerance);
        return 3;
    } catch (const PhysicalityError& e) {
        std::fprintf(stderr, "physicality violation: %s (eigenvalue %.6g)\n", e.what(),
                     e.offending_eigenvalue);
        return 4;
    } catch (const Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"photon-count statistics of two-source optical interference"};
    app.require_subcommand(1);

    CommonArgs joint_args, marginal_args, cond_args, traj_args, sample_args, scaling_args, figure_args;
    std::string joint_axes = "", marginal_axes = "", fix_spec = "", q_text = "1/2";
    int traj_grid = 512, sample_count = 1000, figure_id = 0;

    auto* joint = app.add_subcommand("joint", "joint distribution over selected detector axes");
    add_common(joint, joint_args, true);
    joint->add_option("--axes", joint_axes, "detector axes, e.g. n1,n2 (default: all)");

    auto* marg = app.add_subcommand("marginal", "marginal distribution over selected axes");
    add_common(marg, marginal_args, true);
    marg->add_option("--axes", marginal_axes, "detector axes, e.g. n1 (default: n1)");

    auto* cond = app.add_subcommand("conditional", "conditional of the next free detector");
    add_common(cond, cond_args, true);
    cond->add_option("--fix", fix_spec, "fixed counts, e.g. n1=106 or n1=106,n2=174")->required();

    auto* traj = app.add_subcommand("trajectory", "mean-field trajectory over the relative phase");
    add_common(traj, traj_args, true);
    traj->add_option("--grid-size", traj_grid, "number of delta nodes (default 512)");

    auto* sample = app.add_subcommand("sample", "draw reproducible outcome samples");
    add_common(sample, sample_args, true);
    sample->add_option("--count", sample_count, "number of samples")->required();

    auto* scaling = app.add_subcommand("scaling-check", "q-scaling equivalence report");
    add_common(scaling, scaling_args, true);
    scaling->add_option("--q", q_text, "thinning parameter, rational like 1/2")->required();

    auto* figure = app.add_subcommand("figure", "reproduce a reference-figure dataset (1..7)");
    add_common(figure, figure_args, false);
    figure->add_option("id", figure_id, "figure number 1..7")->required();

    CLI11_PARSE(app, argc, argv);

    if (joint->parsed())
        return guarded([&] {
            const RunConfig cfg = load_config(joint_args.config_path);
            std::vector<int> axes;
            if (joint_axes.empty())
                for (int m = 0; m < cfg.detectors->size(); ++m) axes.push_back(m);
            else
                axes = parse_axes(joint_axes, cfg.detectors->size());
            return run_joint(cfg, joint_args.ctx, axes, "joint");
        });
    if (marg->parsed())
        return guarded([&] {
            const RunConfig cfg = load_config(marginal_args.config_path);
            const std::vector<int> axes =
                marginal_axes.empty() ? std::vector<int>{0} : parse_axes(marginal_axes, cfg.detectors->size());
            return run_joint(cfg, marginal_args.ctx, axes, "marginal");
        });
    if (cond->parsed())
        return guarded([&] {
            const RunConfig cfg = load_config(cond_args.config_path);
            return run_conditional(cfg, cond_args.ctx, parse_fixed(fix_spec, cfg.detectors->size()));
        });
    if (traj->parsed())
        return guarded([&] {
            const RunConfig cfg = load_config(traj_args.config_path);
            return run_trajectory(cfg, traj_args.ctx, traj_grid);
        });
    if (sample->parsed())
        return guarded([&] {
            const RunConfig cfg = load_config(sample_args.config_path);
            return run_sample(cfg, sample_args.ctx, sample_count);
        });
    if (scaling->parsed())
        return guarded([&] {
            const RunConfig cfg = load_config(scaling_args.config_path);
            return run_scaling_check(cfg, scaling_args.ctx, q_text);
        });
    if (figure->parsed())
        return guarded([&] { return run_figure(figure_id, figure_args.ctx); });
    return 2;
}
