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
#include "photonlab/parallel.hpp"
#include "photonlab/quadrature.hpp"
#include "quadrature_internal.hpp"

namespace photonlab {

namespace detail_phase {

std::vector<DetectorMeans> detector_means(const DetectorArray& array, double ia, double ib) {
    std::vector<DetectorMeans> out;
    out.reserve(static_cast<std::size_t>(array.size()));
    for (const auto& spec : array.specs()) {
        const double a = spec.r_aa() * ia;
        const double b = spec.r_bb() * ib;
        out.push_back({a + b, 2.0 * spec.xi() * std::sqrt(a * b), spec.theta()});
    }
    return out;
}

void accumulate_nodes(const std::vector<DetectorMeans>& means, const OutcomeGrid& grid,
                      const std::vector<double>& nodes, int threads, double scale,
                      std::vector<double>& plane) {
    const std::size_t dims = grid.dims();
    if (dims > 8) throw DomainError("phase_average: more than 8 detectors unsupported");
    const std::size_t last = dims - 1;
    const auto& last_ax = grid.axes[last];
    const std::size_t last_size = static_cast<std::size_t>(last_ax.size());
    const std::size_t n_rows = grid.size() / last_size;
    const double w = scale / static_cast<double>(nodes.size());

    constexpr std::size_t kNodeBlock = 256;
    std::vector<std::vector<double>> tables(dims);
    std::vector<double> row_buf;

    for (std::size_t start = 0; start < nodes.size(); start += kNodeBlock) {
        const std::size_t count = std::min(kNodeBlock, nodes.size() - start);
        for (std::size_t m = 0; m < dims; ++m) {
            const auto& ax = grid.axes[m];
            tables[m].assign(count * static_cast<std::size_t>(ax.size()), 0.0);
            row_buf.assign(static_cast<std::size_t>(ax.hi) + 1, 0.0);
            for (std::size_t i = 0; i < count; ++i) {
                const double delta = nodes[start + i];
                const double nbar = means[m].base + means[m].osc * std::cos(delta + means[m].theta);
                poisson_pmf_row(nbar, ax.hi, row_buf.data());
                std::copy(row_buf.begin() + ax.lo, row_buf.end(),
                          tables[m].begin() + static_cast<std::ptrdiff_t>(i * static_cast<std::size_t>(ax.size())));
            }
        }

        auto row_range = [&](std::size_t r, std::size_t seg_lo, std::size_t seg_hi) {
            std::size_t rem = r;
            std::size_t offs[8] = {};
            for (std::size_t m = last; m-- > 0;) {
                const std::size_t size_m = static_cast<std::size_t>(grid.axes[m].size());
                offs[m] = rem % size_m;
                rem /= size_m;
            }
            double* out = plane.data() + r * last_size;
            for (std::size_t i = 0; i < count; ++i) {
                double c = w;
                for (std::size_t m = 0; m < last; ++m)
                    c *= tables[m][i * static_cast<std::size_t>(grid.axes[m].size()) + offs[m]];
                if (c == 0.0) continue;
                const double* e = tables[last].data() + i * last_size;
                for (std::size_t n = seg_lo; n < seg_hi; ++n) out[n] += c * e[n];
            }
        };

        if (n_rows > 1) {
            parallel_for(static_cast<std::int64_t>(n_rows), threads,
                         [&](std::int64_t r) { row_range(static_cast<std::size_t>(r), 0, last_size); });
        } else {
            const std::size_t seg = 2048;
            const std::int64_t n_segs = static_cast<std::int64_t>((last_size + seg - 1) / seg);
            parallel_for(n_segs, threads, [&](std::int64_t si) {
                const std::size_t lo = static_cast<std::size_t>(si) * seg;
                row_range(0, lo, std::min(last_size, lo + seg));
            });
        }
    }
}

void adaptive_average(const std::vector<DetectorMeans>& means, const OutcomeGrid& grid,
                      const EngineOptions& opts, std::vector<double>& plane, QuadratureInfo& info) {
    plane.assign(grid.size(), 0.0);
    std::vector<double> shifted(grid.size());

    int k = opts.fixed_delta_nodes > 0 ? opts.fixed_delta_nodes : opts.delta_nodes_init;
    accumulate_nodes(means, grid, periodic_nodes(k), opts.threads, 1.0, plane);
    double change = 0.0;
    bool converged = opts.fixed_delta_nodes > 0;
    while (!converged) {
        std::fill(shifted.begin(), shifted.end(), 0.0);
        accumulate_nodes(means, grid, periodic_nodes(k, 0.5), opts.threads, 1.0, shifted);
        change = 0.0;
        for (std::size_t i = 0; i < plane.size(); ++i) {
            const double merged = 0.5 * (plane[i] + shifted[i]);
            change = std::max(change, std::abs(merged - plane[i]));
            plane[i] = merged;
        }
        k *= 2;
        if (change < opts.delta_tol) {
            converged = true;
        } else if (k >= opts.delta_nodes_max) {
            throw NonConvergenceError("phase_average: delta quadrature did not reach tolerance", change);
        }
    }
    info.delta_nodes = std::max(info.delta_nodes, k);
    info.delta_change = std::max(info.delta_change, change);
    info.delta_converged = true;
}

} // namespace detail_phase

namespace {

std::pair<double, double> delta_node_intensities(const SourcePair& sources) {
    const auto* p = sources.independent_pair();
    if (p == nullptr)
        throw DomainError("phase_average_joint: requires independent sources");
    for (const SourceSpec* s : {&p->a, &p->b}) {
        const bool vacuum = s->has_diagonal() && s->mean() == 0.0;
        if (!vacuum && (!s->has_radial() || !s->radial().singular()))
            throw DomainError("phase_average_joint: sources must be Poissonian "
                              "(or explicit radial delta nodes)");
    }
    return sources.mode_means();
}

} // namespace

void phase_average_stream(const DetectorArray& array, const SourcePair& sources,
                          const OutcomeGrid& grid, const EngineOptions& opts,
                          const std::function<void(int, std::span<const double>)>& sink,
                          QuadratureInfo* info) {
    using namespace detail_phase;
    if (grid.dims() != static_cast<std::size_t>(array.size()))
        throw ShapeError("phase_average: grid axis count must match detector count");
    const auto [ia, ib] = delta_node_intensities(sources);
    const auto means = detector_means(array, ia, ib);
    QuadratureInfo agg;

    if (grid.dims() == 1) {
        std::vector<double> plane;
        adaptive_average(means, grid, opts, plane, agg);
        for (int n0 = grid.axes[0].lo; n0 <= grid.axes[0].hi; ++n0)
            sink(n0, {plane.data() + (n0 - grid.axes[0].lo), 1});
    } else {
        std::vector<double> plane;
        for (int n0 = grid.axes[0].lo; n0 <= grid.axes[0].hi; ++n0) {
            OutcomeGrid slab = grid;
            slab.axes[0] = {n0, n0};
            adaptive_average(means, slab, opts, plane, agg);
            sink(n0, plane);
        }
    }
    if (info != nullptr) *info = agg;
}

JointDistribution phase_average_joint(const DetectorArray& array, const SourcePair& sources,
                                      const OutcomeGrid& grid, const EngineOptions& opts) {
    using namespace detail_phase;
    if (grid.dims() != static_cast<std::size_t>(array.size()))
        throw ShapeError("phase_average: grid axis count must match detector count");
    if (grid.size() > (1u << 26))
        throw DomainError("phase_average_joint: grid too large to materialize; "
                          "use phase_average_stream or scan_point_cloud");
    const auto [ia, ib] = delta_node_intensities(sources);
    const auto means = detector_means(array, ia, ib);

    JointDistribution out;
    out.grid = grid;
    out.engine_tag = "phase";

    std::vector<double> plane;
    adaptive_average(means, grid, opts, plane, out.quad);
    out.log_probs.resize(plane.size());
    for (std::size_t i = 0; i < plane.size(); ++i)
        out.log_probs[i] = plane[i] > 0.0 ? std::log(plane[i]) : kNegInf;
    out.tail_bound = std::max(0.0, 1.0 - out.total_mass()) + 2.0 * out.quad.delta_change;
    return out;
}

} // namespace photonlab
