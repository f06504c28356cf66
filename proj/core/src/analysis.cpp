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
#include "photonlab/analysis.hpp"

#include <algorithm>
#include <cmath>

#include "photonlab/numeric.hpp"

namespace photonlab {

JointDistribution marginal(const JointDistribution& dist, std::span<const int> keep_axes) {
    const std::size_t dims = dist.grid.dims();
    std::vector<bool> keep(dims, false);
    for (std::size_t i = 0; i < keep_axes.size(); ++i) {
        const int ax = keep_axes[i];
        if (ax < 0 || ax >= static_cast<int>(dims)) throw ShapeError("marginal: axis out of range");
        if (keep[static_cast<std::size_t>(ax)]) throw ShapeError("marginal: duplicate axis");
        if (i > 0 && keep_axes[i] <= keep_axes[i - 1])
            throw ShapeError("marginal: axes must be strictly increasing");
        keep[static_cast<std::size_t>(ax)] = true;
    }
    if (keep_axes.empty()) throw ShapeError("marginal: need at least one axis");

    JointDistribution out;
    out.engine_tag = dist.engine_tag;
    out.tail_bound = dist.tail_bound;
    out.quad = dist.quad;
    for (int ax : keep_axes) out.grid.axes.push_back(dist.grid.axes[static_cast<std::size_t>(ax)]);

    // Two-pass log-sum-exp per output cell: max first, then scaled sums.
    const std::size_t out_size = out.grid.size();
    std::vector<double> max_log(out_size, kNegInf), sums(out_size, 0.0);

    std::vector<int> idx(dims, 0);
    std::vector<int> out_idx(keep_axes.size(), 0);
    const auto out_flat = [&](const std::vector<int>& full) {
        std::size_t flat = 0;
        for (std::size_t i = 0; i < keep_axes.size(); ++i) {
            const auto& ax = out.grid.axes[i];
            flat = flat * static_cast<std::size_t>(ax.size()) +
                   static_cast<std::size_t>(full[static_cast<std::size_t>(keep_axes[i])] - ax.lo);
        }
        return flat;
    };

    for (int pass = 0; pass < 2; ++pass) {
        std::fill(idx.begin(), idx.end(), 0);
        for (std::size_t m = 0; m < dims; ++m) idx[m] = dist.grid.axes[m].lo;
        for (std::size_t flat = 0; flat < dist.log_probs.size(); ++flat) {
            const std::size_t of = out_flat(idx);
            const double l = dist.log_probs[flat];
            if (pass == 0) {
                max_log[of] = std::max(max_log[of], l);
            } else if (l != kNegInf) {
                sums[of] += std::exp(l - max_log[of]);
            }
            for (std::size_t m = dims; m-- > 0;) {
                if (++idx[m] <= dist.grid.axes[m].hi) break;
                idx[m] = dist.grid.axes[m].lo;
            }
        }
    }
    out.log_probs.resize(out_size);
    for (std::size_t i = 0; i < out_size; ++i)
        out.log_probs[i] = max_log[i] == kNegInf ? kNegInf : max_log[i] + std::log(sums[i]);
    (void)out_idx;
    return out;
}

JointDistribution conditional(const JointDistribution& dist,
                              const std::vector<std::pair<int, int>>& fixed) {
    const std::size_t dims = dist.grid.dims();
    std::vector<int> fixed_value(dims, -1);
    for (const auto& [ax, value] : fixed) {
        if (ax < 0 || ax >= static_cast<int>(dims)) throw ShapeError("conditional: axis out of range");
        if (!dist.grid.axes[static_cast<std::size_t>(ax)].contains(value))
            throw DomainError("conditional: fixed count outside the grid");
        fixed_value[static_cast<std::size_t>(ax)] = value;
    }
    int target = -1;
    for (std::size_t m = 0; m < dims; ++m) {
        if (fixed_value[m] < 0) {
            target = static_cast<int>(m);
            break;
        }
    }
    if (target < 0) throw ShapeError("conditional: no free axis remains");

    // Marginalize onto {fixed axes} + target, then slice.
    std::vector<int> keep;
    for (std::size_t m = 0; m < dims; ++m)
        if (fixed_value[m] >= 0 || static_cast<int>(m) == target) keep.push_back(static_cast<int>(m));
    const JointDistribution reduced = marginal(dist, keep);

    JointDistribution out;
    out.engine_tag = dist.engine_tag;
    out.quad = dist.quad;
    out.grid.axes.push_back(dist.grid.axes[static_cast<std::size_t>(target)]);
    const auto& ax = out.grid.axes.front();
    out.log_probs.assign(static_cast<std::size_t>(ax.size()), kNegInf);

    std::vector<int> probe(keep.size());
    LogAccumulator norm;
    for (int n = ax.lo; n <= ax.hi; ++n) {
        for (std::size_t i = 0; i < keep.size(); ++i)
            probe[i] = keep[i] == target ? n : fixed_value[static_cast<std::size_t>(keep[i])];
        const double l = reduced.log_at(probe);
        out.log_probs[static_cast<std::size_t>(n - ax.lo)] = l;
        norm.add_log(l);
    }
    const double log_z = norm.log_total();
    if (log_z < std::log(1e-300))
        throw DomainError("conditional: conditioning outcome has probability below 1e-300");
    for (auto& l : out.log_probs) l -= log_z;
    out.tail_bound = 0.0;
    return out;
}

PhaseEstimate estimate_phase(const DetectorSpec& spec, MeanPair means, double n) {
    if (spec.xi() <= 0.0) throw DomainError("estimate_phase: zero-visibility detector");
    if (!(means.a > 0.0) || !(means.b > 0.0))
        throw DomainError("estimate_phase: both source means must be positive");
    const double osc = 2.0 * spec.xi() * std::sqrt(means.a * means.b);
    double u = (n - means.a - means.b) / osc;
    if (std::abs(u) > 1.0 + 1e-12)
        throw DomainError("estimate_phase: count outside the mean-field range");
    u = std::clamp(u, -1.0, 1.0);
    const bool degenerate = std::abs(u) >= 1.0 - 1e-12;
    const double base = degenerate ? (u > 0.0 ? 0.0 : kPi) : std::acos(u);
    const auto wrap = [](double d) {
        double w = std::remainder(d, 2.0 * kPi);
        if (w >= kPi) w -= 2.0 * kPi;
        return w;
    };
    PhaseEstimate est;
    est.delta_plus = wrap(base - spec.theta());
    est.delta_minus = wrap(-base - spec.theta());
    est.degenerate = degenerate;
    return est;
}

PredictedCounts predict_counts(const DetectorArray& array, const std::vector<MeanPair>& means,
                               const PhaseEstimate& estimate) {
    if (static_cast<int>(means.size()) != array.size())
        throw ShapeError("predict_counts: one mean pair per detector required");
    PredictedCounts out;
    out.plus.reserve(means.size());
    out.minus.reserve(means.size());
    for (int m = 0; m < array.size(); ++m) {
        out.plus.push_back(mean_count(array[m], means[static_cast<std::size_t>(m)], estimate.delta_plus));
        out.minus.push_back(mean_count(array[m], means[static_cast<std::size_t>(m)], estimate.delta_minus));
    }
    return out;
}

namespace {

double trajectory_deviation(std::span<const int> outcome, const MeanFieldTrajectory& traj,
                            double delta) {
    double sum = 0.0;
    for (std::size_t m = 0; m < outcome.size(); ++m) {
        const double nbar = traj.base[m] + traj.osc[m] * std::cos(delta + traj.theta[m]);
        const double d = (static_cast<double>(outcome[m]) - nbar) / std::sqrt(std::max(nbar, 1.0));
        sum += d * d;
    }
    return sum;
}

double grid_deviation(std::span<const int> outcome, const MeanFieldTrajectory& traj, std::size_t i) {
    const auto& pt = traj.points[i];
    double sum = 0.0;
    for (std::size_t m = 0; m < outcome.size(); ++m) {
        const double d = (static_cast<double>(outcome[m]) - pt[m]) / std::sqrt(std::max(pt[m], 1.0));
        sum += d * d;
    }
    return sum;
}

} // namespace

double distance_to_trajectory(std::span<const int> outcome, const MeanFieldTrajectory& traj) {
    if (traj.points.empty() || static_cast<int>(outcome.size()) != traj.detector_count())
        throw ShapeError("distance_to_trajectory: outcome does not match the trajectory");
    std::size_t best = 0;
    double best_dev = grid_deviation(outcome, traj, 0);
    for (std::size_t i = 1; i < traj.points.size(); ++i) {
        const double dev = grid_deviation(outcome, traj, i);
        if (dev < best_dev) {
            best_dev = dev;
            best = i;
        }
    }
    if (traj.base.empty()) return std::sqrt(best_dev);

    // Golden-section refinement in the bracket around the best grid node.
    const double step = 2.0 * kPi / static_cast<double>(traj.deltas.size());
    const double center = traj.deltas[best];
    const double refined = golden_section_min(center - step, center + step, 40, [&](double d) {
        return trajectory_deviation(outcome, traj, d);
    });
    return std::sqrt(std::min(best_dev, trajectory_deviation(outcome, traj, refined)));
}

namespace {

double mean_count_scale(const MeanFieldTrajectory& traj) {
    // Detector-averaged <n_m>: the uniform delta average kills the cosine.
    double acc = 0.0;
    for (const auto& pt : traj.points)
        for (double v : pt) acc += v;
    return acc / (static_cast<double>(traj.points.size()) * traj.detector_count());
}

} // namespace

PeakManifold peak_manifold(const JointDistribution& dist, const MeanFieldTrajectory& traj,
                           double p_min) {
    PeakManifold out;
    const double nbar = mean_count_scale(traj);
    out.p_min = p_min > 0.0 ? p_min : 0.01 / (nbar * nbar);

    const double total = dist.total_mass();
    const double log_min = std::log(out.p_min);
    double covered = 0.0;
    for (std::size_t flat = 0; flat < dist.log_probs.size(); ++flat) {
        if (dist.log_probs[flat] < log_min) continue;
        OutcomeVector n = dist.grid.unflatten(flat);
        const double p = std::exp(dist.log_probs[flat]);
        covered += p;
        out.max_distance = std::max(out.max_distance, distance_to_trajectory(n, traj));
        out.points.push_back(std::move(n));
        out.probs.push_back(p);
    }
    out.coverage = total > 0.0 ? covered / total : 0.0;
    return out;
}

StreamedManifoldScan scan_point_cloud(
    const DetectorArray& array, const SourcePair& sources, const OutcomeGrid& grid,
    const EngineOptions& opts, const MeanFieldTrajectory& traj, double p_min,
    const std::function<void(const OutcomeVector&, double)>& sink) {
    StreamedManifoldScan scan;
    const double nbar = mean_count_scale(traj);
    scan.p_min = p_min > 0.0 ? p_min : 0.01 / (nbar * nbar);

    double covered = 0.0, total = 0.0;
    OutcomeVector n(grid.dims());
    phase_average_stream(array, sources, grid, opts, [&](int n0, std::span<const double> slab) {
        n[0] = n0;
        std::size_t i = 0;
        // Slab layout: row-major over axes 1..M-1.
        std::vector<int> rest(grid.dims() > 1 ? grid.dims() - 1 : 0);
        for (std::size_t m = 1; m < grid.dims(); ++m) rest[m - 1] = grid.axes[m].lo;
        for (;;) {
            const double p = slab[i];
            total += p;
            if (p >= scan.p_min) {
                for (std::size_t m = 1; m < grid.dims(); ++m) n[m] = rest[m - 1];
                covered += p;
                ++scan.n_points;
                scan.max_distance = std::max(scan.max_distance, distance_to_trajectory(n, traj));
                if (sink) sink(n, p);
            }
            if (++i >= slab.size()) break;
            for (std::size_t m = grid.dims() - 1; m >= 1; --m) {
                if (++rest[m - 1] <= grid.axes[m].hi) break;
                rest[m - 1] = grid.axes[m].lo;
            }
        }
    });
    scan.total_mass = total;
    scan.coverage = total > 0.0 ? covered / total : 0.0;
    return scan;
}

double tube_coverage(const JointDistribution& dist, const MeanFieldTrajectory& traj, double radius) {
    double covered = 0.0, total = 0.0;
    for (std::size_t flat = 0; flat < dist.log_probs.size(); ++flat) {
        const double p = std::exp(dist.log_probs[flat]);
        if (p == 0.0) continue;
        total += p;
        const OutcomeVector n = dist.grid.unflatten(flat);
        // Cheap reject on the grid-node distance before refining.
        double best = grid_deviation(n, traj, 0);
        for (std::size_t i = 1; i < traj.points.size(); ++i)
            best = std::min(best, grid_deviation(n, traj, i));
        if (best > (radius + 1.0) * (radius + 1.0)) continue;
        if (distance_to_trajectory(n, traj) <= radius) covered += p;
    }
    return total > 0.0 ? covered / total : 0.0;
}

std::vector<Mode> find_modes(const JointDistribution& slice) {
    if (slice.grid.dims() != 1) throw ShapeError("find_modes: expects a one-dimensional slice");
    const auto& ax = slice.grid.axes.front();
    const int n = ax.size();
    std::vector<double> p(static_cast<std::size_t>(n));
    double peak = 0.0;
    for (int i = 0; i < n; ++i) {
        p[static_cast<std::size_t>(i)] = std::exp(slice.log_probs[static_cast<std::size_t>(i)]);
        peak = std::max(peak, p[static_cast<std::size_t>(i)]);
    }
    const double floor = 1e-12 * peak;

    // Plateau-merged strict local maxima.
    std::vector<int> maxima;
    int i = 0;
    while (i < n) {
        int j = i;
        while (j + 1 < n && p[static_cast<std::size_t>(j + 1)] == p[static_cast<std::size_t>(i)]) ++j;
        const bool left_ok = (i == 0) || p[static_cast<std::size_t>(i - 1)] < p[static_cast<std::size_t>(i)];
        const bool right_ok = (j == n - 1) || p[static_cast<std::size_t>(j + 1)] < p[static_cast<std::size_t>(i)];
        if (left_ok && right_ok && p[static_cast<std::size_t>(i)] > floor) maxima.push_back((i + j) / 2);
        i = j + 1;
    }

    // Merge modes closer than the local shot noise.
    bool merged = true;
    while (merged && maxima.size() > 1) {
        merged = false;
        for (std::size_t k = 0; k + 1 < maxima.size(); ++k) {
            const double pos1 = ax.lo + maxima[k];
            const double pos2 = ax.lo + maxima[k + 1];
            if (pos2 - pos1 < std::sqrt(0.5 * (pos1 + pos2))) {
                const std::size_t drop =
                    p[static_cast<std::size_t>(maxima[k])] >= p[static_cast<std::size_t>(maxima[k + 1])]
                        ? k + 1
                        : k;
                maxima.erase(maxima.begin() + static_cast<std::ptrdiff_t>(drop));
                merged = true;
                break;
            }
        }
    }

    // Watershed boundaries at the minima between surviving modes.
    std::vector<Mode> modes;
    for (std::size_t k = 0; k < maxima.size(); ++k) {
        Mode mode;
        mode.position = ax.lo + maxima[k];
        mode.height = p[static_cast<std::size_t>(maxima[k])];
        int lo = 0, hi = n - 1;
        if (k > 0) {
            int arg = maxima[k - 1];
            for (int t = maxima[k - 1]; t <= maxima[k]; ++t)
                if (p[static_cast<std::size_t>(t)] < p[static_cast<std::size_t>(arg)]) arg = t;
            lo = arg + 1;
        }
        if (k + 1 < maxima.size()) {
            int arg = maxima[k];
            for (int t = maxima[k]; t <= maxima[k + 1]; ++t)
                if (p[static_cast<std::size_t>(t)] < p[static_cast<std::size_t>(arg)]) arg = t;
            hi = arg;
        }
        mode.basin_lo = ax.lo + lo;
        mode.basin_hi = ax.lo + hi;
        double mass = 0.0, mean = 0.0;
        for (int t = lo; t <= hi; ++t) {
            mass += p[static_cast<std::size_t>(t)];
            mean += p[static_cast<std::size_t>(t)] * static_cast<double>(ax.lo + t);
        }
        mode.weight = mass;
        mode.basin_mean = mass > 0.0 ? mean / mass : static_cast<double>(mode.position);
        double var = 0.0;
        for (int t = lo; t <= hi; ++t) {
            const double d = static_cast<double>(ax.lo + t) - mode.basin_mean;
            var += p[static_cast<std::size_t>(t)] * d * d;
        }
        mode.basin_sd = mass > 0.0 ? std::sqrt(var / mass) : 0.0;
        modes.push_back(mode);
    }
    return modes;
}

std::vector<Mode> significant_modes(const JointDistribution& slice, double depth_fraction) {
    std::vector<Mode> modes = find_modes(slice);
    if (modes.size() <= 1) return modes;
    const auto& ax = slice.grid.axes.front();
    std::vector<double> p(static_cast<std::size_t>(ax.size()));
    for (int i = 0; i < ax.size(); ++i)
        p[static_cast<std::size_t>(i)] = std::exp(slice.log_probs[static_cast<std::size_t>(i)]);

    // Adjacent modes stay separate only when the valley dips below the smaller
    // peak by more than depth_fraction of the larger one.
    bool changed = true;
    while (changed && modes.size() > 1) {
        changed = false;
        for (std::size_t k = 0; k + 1 < modes.size(); ++k) {
            double valley = modes[k].height;
            for (int t = modes[k].position; t <= modes[k + 1].position; ++t)
                valley = std::min(valley, p[static_cast<std::size_t>(t - ax.lo)]);
            const double small = std::min(modes[k].height, modes[k + 1].height);
            const double large = std::max(modes[k].height, modes[k + 1].height);
            if (small - valley <= depth_fraction * large) {
                const std::size_t drop = modes[k].height >= modes[k + 1].height ? k + 1 : k;
                const std::size_t keep = drop == k ? k + 1 : k;
                modes[keep].weight += modes[drop].weight;
                modes[keep].basin_lo = std::min(modes[keep].basin_lo, modes[drop].basin_lo);
                modes[keep].basin_hi = std::max(modes[keep].basin_hi, modes[drop].basin_hi);
                modes.erase(modes.begin() + static_cast<std::ptrdiff_t>(drop));
                changed = true;
                break;
            }
        }
    }
    return modes;
}

JointDistribution restrict_range(const JointDistribution& slice, int lo, int hi) {
    if (slice.grid.dims() != 1) throw ShapeError("restrict_range: expects a one-dimensional slice");
    const auto& ax = slice.grid.axes.front();
    lo = std::max(lo, ax.lo);
    hi = std::min(hi, ax.hi);
    if (lo > hi) throw DomainError("restrict_range: empty range");
    JointDistribution out;
    out.engine_tag = slice.engine_tag;
    out.quad = slice.quad;
    out.grid.axes.push_back({lo, hi});
    LogAccumulator norm;
    for (int t = lo; t <= hi; ++t) {
        const double l = slice.log_probs[static_cast<std::size_t>(t - ax.lo)];
        out.log_probs.push_back(l);
        norm.add_log(l);
    }
    const double z = norm.log_total();
    if (z == kNegInf) throw DomainError("restrict_range: zero mass in range");
    for (auto& l : out.log_probs) l -= z;
    return out;
}

ShotNoiseReport shot_noise(const JointDistribution& slice, double source_mean, double source_dn) {
    const auto modes = significant_modes(slice, 0.1);
    if (modes.empty()) throw DomainError("shot_noise: slice has no mode");
    if (modes.size() > 1)
        throw DomainError("shot_noise: slice is multimodal; condition or restrict to one basin first");
    const Mode& mode = modes.front();
    ShotNoiseReport report;
    report.mode_mean = mode.basin_mean;
    report.width = mode.basin_sd;
    report.gamma = mode.basin_sd / std::sqrt(std::max(mode.basin_mean, 1.0));
    const double gamma_model =
        source_mean > 0.0 ? std::max(0.0, 1.0 - std::sqrt(mode.basin_mean / source_mean)) : 1.0;
    report.predicted = gamma_model * std::sqrt(std::max(mode.basin_mean, 0.0)) +
                       (source_mean > 0.0 ? mode.basin_mean / source_mean * source_dn : 0.0);
    return report;
}

} // namespace photonlab
