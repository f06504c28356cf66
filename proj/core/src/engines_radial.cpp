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
#include <algorithm>
#include <cmath>

#include "photonlab/engines.hpp"
#include "photonlab/quadrature.hpp"
#include "quadrature_internal.hpp"

namespace photonlab {

namespace {

struct RadialConfig {
    RadialRule rule_a, rule_b;
    double fixed_delta = 0.0;
    bool has_fixed_delta = false;  // ReferencedPhase skips the delta integral
};

double cfg_delta_estimate(const EngineOptions& opts) {
    if (opts.fixed_delta_nodes > 0) return static_cast<double>(opts.fixed_delta_nodes);
    return static_cast<double>(std::min(512, opts.delta_nodes_max));
}

RadialRule rule_for(const SourceSpec& s, int nodes) {
    if (s.has_radial()) return s.radial().rule(nodes);
    if (s.has_diagonal() && s.mean() == 0.0) {
        RadialRule vac;
        vac.nodes_u = {0.0};
        vac.weights = {1.0};
        vac.singular = true;
        return vac;
    }
    throw DomainError("radial engine: source is not P-representable");
}

RadialConfig radial_config(const SourcePair& sources, int nodes) {
    RadialConfig cfg;
    if (const auto* p = sources.independent_pair()) {
        cfg.rule_a = rule_for(p->a, nodes);
        cfg.rule_b = rule_for(p->b, nodes);
        return cfg;
    }
    if (const auto* p = sources.referenced_phase_pair()) {
        cfg.rule_a = rule_for(p->a, nodes);
        cfg.rule_b = rule_for(p->b, nodes);
        cfg.fixed_delta = p->delta;
        cfg.has_fixed_delta = true;
        return cfg;
    }
    throw DomainError("radial engine: requires independent or referenced-phase sources");
}

// One full evaluation at fixed radial rules: sums the weighted phase averages
// over all (u, v) source-amplitude pairs.
void eval_radial(const DetectorArray& array, const RadialConfig& cfg, const OutcomeGrid& grid,
                 const EngineOptions& opts, std::vector<double>& plane, QuadratureInfo& info) {
    using namespace detail_phase;
    plane.assign(grid.size(), 0.0);
    std::vector<double> shifted;

    const auto eval_level = [&](const std::vector<double>& nodes, std::vector<double>& target) {
        std::fill(target.begin(), target.end(), 0.0);
        for (std::size_t i = 0; i < cfg.rule_a.nodes_u.size(); ++i) {
            for (std::size_t j = 0; j < cfg.rule_b.nodes_u.size(); ++j) {
                const double w = cfg.rule_a.weights[i] * cfg.rule_b.weights[j];
                if (w == 0.0) continue;
                const auto means = detector_means(array, cfg.rule_a.nodes_u[i], cfg.rule_b.nodes_u[j]);
                accumulate_nodes(means, grid, nodes, opts.threads, w, target);
            }
        }
    };

    if (cfg.has_fixed_delta) {
        eval_level({cfg.fixed_delta}, plane);
        info.delta_nodes = 1;
        info.delta_change = 0.0;
        return;
    }

    int k = opts.fixed_delta_nodes > 0 ? opts.fixed_delta_nodes : opts.delta_nodes_init;
    eval_level(periodic_nodes(k), plane);
    double change = 0.0;
    bool converged = opts.fixed_delta_nodes > 0;
    shifted.assign(grid.size(), 0.0);
    while (!converged) {
        eval_level(periodic_nodes(k, 0.5), shifted);
        change = 0.0;
        for (std::size_t p = 0; p < plane.size(); ++p) {
            const double merged = 0.5 * (plane[p] + shifted[p]);
            change = std::max(change, std::abs(merged - plane[p]));
            plane[p] = merged;
        }
        k *= 2;
        if (change < opts.delta_tol) {
            converged = true;
        } else if (k >= opts.delta_nodes_max) {
            throw NonConvergenceError("radial engine: delta quadrature did not reach tolerance", change);
        }
    }
    info.delta_nodes = std::max(info.delta_nodes, k);
    info.delta_change = std::max(info.delta_change, change);
}

} // namespace

JointDistribution radial_phase_average_joint(const DetectorArray& array, const SourcePair& sources,
                                             const OutcomeGrid& grid, const EngineOptions& opts) {
    if (grid.dims() != static_cast<std::size_t>(array.size()))
        throw ShapeError("radial engine: grid axis count must match detector count");
    if (grid.size() > (1u << 26))
        throw DomainError("radial engine: grid too large to materialize");

    RadialConfig coarse = radial_config(sources, opts.radial_nodes);
    const bool both_singular = coarse.rule_a.singular && coarse.rule_b.singular;

    // Rough work estimate: radial pairs (both levels) x expected delta nodes
    // x grid size. Full multi-axis grids at production scale go through the
    // expensive gate.
    {
        const double pairs = static_cast<double>(coarse.rule_a.nodes_u.size()) *
                             static_cast<double>(coarse.rule_b.nodes_u.size());
        const double refine_factor = (opts.radial_refine && !both_singular) ? 5.0 : 1.0;
        const double delta_nodes = cfg_delta_estimate(opts);
        const double est = pairs * refine_factor * delta_nodes * static_cast<double>(grid.size());
        if (est > 2e10 && !opts.allow_expensive)
            throw DomainError("radial engine: estimated cost too high; rerun with allow_expensive "
                              "or reduce the grid/radial nodes");
    }

    JointDistribution out;
    out.grid = grid;
    out.engine_tag = "radial";
    out.quad.radial_nodes = static_cast<int>(std::max(coarse.rule_a.nodes_u.size(), coarse.rule_b.nodes_u.size()));

    std::vector<double> plane;
    eval_radial(array, coarse, grid, opts, plane, out.quad);

    if (opts.radial_refine && !both_singular) {
        RadialConfig fine = radial_config(sources, 2 * opts.radial_nodes);
        std::vector<double> plane_fine;
        QuadratureInfo fine_info;
        eval_radial(array, fine, grid, opts, plane_fine, fine_info);
        double diff = 0.0;
        for (std::size_t i = 0; i < plane.size(); ++i)
            diff = std::max(diff, std::abs(plane_fine[i] - plane[i]));
        out.quad.radial_change = diff;
        out.quad.radial_nodes = static_cast<int>(std::max(fine.rule_a.nodes_u.size(), fine.rule_b.nodes_u.size()));
        out.quad.delta_nodes = std::max(out.quad.delta_nodes, fine_info.delta_nodes);
        out.quad.delta_change = std::max(out.quad.delta_change, fine_info.delta_change);
        plane.swap(plane_fine);
    }

    out.log_probs.resize(plane.size());
    for (std::size_t i = 0; i < plane.size(); ++i)
        out.log_probs[i] = plane[i] > 0.0 ? std::log(plane[i]) : kNegInf;
    out.tail_bound = std::max(0.0, 1.0 - out.total_mass()) + 2.0 * out.quad.delta_change + out.quad.radial_change;
    return out;
}

} // namespace photonlab
