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
#include <cmath>
#include <cstring>

#include "photonlab/engines.hpp"

namespace photonlab {

const char* engine_name(EngineKind kind) {
    switch (kind) {
    case EngineKind::MeanField: return "meanfield";
    case EngineKind::PhaseAverage: return "phase";
    case EngineKind::Radial: return "radial";
    case EngineKind::Fock: return "fock";
    case EngineKind::Auto: return "auto";
    }
    return "unknown";
}

EngineKind engine_from_name(const std::string& name) {
    if (name == "meanfield") return EngineKind::MeanField;
    if (name == "phase") return EngineKind::PhaseAverage;
    if (name == "radial") return EngineKind::Radial;
    if (name == "fock") return EngineKind::Fock;
    if (name == "auto") return EngineKind::Auto;
    throw DomainError("unknown engine: " + name);
}

double JointDistribution::total_mass() const {
    std::vector<double> linear(log_probs.size());
    for (std::size_t i = 0; i < log_probs.size(); ++i) linear[i] = std::exp(log_probs[i]);
    return pairwise_sum(linear);
}

double JointDistribution::moment(int axis) const {
    std::vector<double> contrib(log_probs.size());
    const std::size_t n_axes = grid.dims();
    std::size_t inner = 1;
    for (std::size_t j = static_cast<std::size_t>(axis) + 1; j < n_axes; ++j)
        inner *= static_cast<std::size_t>(grid.axes[j].size());
    const std::size_t width = static_cast<std::size_t>(grid.axes[static_cast<std::size_t>(axis)].size());
    for (std::size_t i = 0; i < log_probs.size(); ++i) {
        const int n = grid.axes[static_cast<std::size_t>(axis)].lo +
                      static_cast<int>((i / inner) % width);
        contrib[i] = static_cast<double>(n) * std::exp(log_probs[i]);
    }
    return pairwise_sum(contrib);
}

OutcomeGrid default_grid(const DetectorArray& array, const SourcePair& sources) {
    const auto [na, nb] = sources.mode_means();

    // Finite total photon number caps the grid exactly for Fock inputs.
    long long total_cap = -1;
    if (const auto* p = sources.common_number_pair()) {
        total_cap = p->n;
    } else if (const auto* p = sources.common_diagonal_pair()) {
        total_cap = p->p.max_n();
    } else if (const auto* p = sources.independent_pair()) {
        if (p->a.has_diagonal() && p->b.has_diagonal() && !p->a.has_radial() && !p->b.has_radial())
            total_cap = p->a.number_distribution().max_n() + p->b.number_distribution().max_n();
    }

    OutcomeGrid grid;
    grid.axes.reserve(static_cast<std::size_t>(array.size()));
    for (int m = 0; m < array.size(); ++m) {
        const double peak = max_mean_count(array[m], {array[m].r_aa() * na, array[m].r_bb() * nb});
        long long hi = static_cast<long long>(std::ceil(peak + 10.0 * std::sqrt(peak) + 10.0));
        if (total_cap >= 0) hi = std::min(hi, total_cap);
        grid.axes.push_back({0, static_cast<int>(hi)});
    }
    return grid;
}

JointDistribution meanfield_joint(const DetectorArray& array, double mean_a, double mean_b,
                                  double delta, const OutcomeGrid& grid) {
    if (grid.dims() != static_cast<std::size_t>(array.size()))
        throw ShapeError("meanfield_joint: grid axis count must match detector count");

    // Per-axis log pmf tables, added across axes.
    std::vector<std::vector<double>> tables(grid.dims());
    for (int m = 0; m < array.size(); ++m) {
        const double nbar = mean_count(array[m], {array[m].r_aa() * mean_a, array[m].r_bb() * mean_b}, delta);
        const auto& ax = grid.axes[static_cast<std::size_t>(m)];
        auto& t = tables[static_cast<std::size_t>(m)];
        t.resize(static_cast<std::size_t>(ax.size()));
        for (int n = ax.lo; n <= ax.hi; ++n)
            t[static_cast<std::size_t>(n - ax.lo)] = log_poisson_pmf(n, nbar);
    }

    JointDistribution out;
    out.grid = grid;
    out.engine_tag = "meanfield";
    out.log_probs.assign(grid.size(), 0.0);
    std::vector<int> idx(grid.dims(), 0);
    for (std::size_t flat = 0; flat < out.log_probs.size(); ++flat) {
        double lp = 0.0;
        for (std::size_t m = 0; m < grid.dims(); ++m)
            lp += tables[m][static_cast<std::size_t>(idx[m])];
        out.log_probs[flat] = lp;
        for (std::size_t m = grid.dims(); m-- > 0;) {
            if (++idx[m] < grid.axes[m].size()) break;
            idx[m] = 0;
        }
    }
    out.tail_bound = std::max(0.0, 1.0 - out.total_mass());
    return out;
}

EngineKind select_engine(const SourcePair& sources) {
    if (sources.common_number_pair() != nullptr || sources.common_diagonal_pair() != nullptr)
        return EngineKind::Fock;
    if (sources.referenced_phase_pair() != nullptr) return EngineKind::Radial;
    const auto* p = sources.independent_pair();
    const bool a_delta = p->a.has_radial() && p->a.radial().singular();
    const bool b_delta = p->b.has_radial() && p->b.radial().singular();
    if (a_delta && b_delta) return EngineKind::PhaseAverage;
    if (p->a.has_radial() && p->b.has_radial()) return EngineKind::Radial;
    if (p->a.has_diagonal() && p->b.has_diagonal()) return EngineKind::Fock;
    throw DomainError("select_engine: no engine supports this source pair "
                      "(mixed radial-only and diagonal-only sources)");
}

JointDistribution auto_joint(const DetectorArray& array, const SourcePair& sources,
                             const OutcomeGrid& grid, const EngineOptions& opts, EngineKind kind) {
    if (kind == EngineKind::Auto) kind = select_engine(sources);
    switch (kind) {
    case EngineKind::PhaseAverage:
        return phase_average_joint(array, sources, grid, opts);
    case EngineKind::Radial:
        return radial_phase_average_joint(array, sources, grid, opts);
    case EngineKind::Fock:
        return fock_joint(array, sources, grid, opts);
    case EngineKind::MeanField:
        throw DomainError("auto_joint: the mean-field engine needs an explicit relative phase; "
                          "call meanfield_joint directly");
    case EngineKind::Auto:
        break;
    }
    throw DomainError("auto_joint: unresolved engine kind");
}

} // namespace photonlab
