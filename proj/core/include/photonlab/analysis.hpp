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
#ifndef PHOTONLAB_ANALYSIS_HPP
#define PHOTONLAB_ANALYSIS_HPP

#include <cstdint>
#include <functional>
#include <utility>
#include <vector>

#include "photonlab/detectors.hpp"
#include "photonlab/engines.hpp"

namespace photonlab {

/// Exact log-domain axis summation; `keep_axes` lists the surviving axes in
/// their original order.
JointDistribution marginal(const JointDistribution& dist, std::span<const int> keep_axes);

/// Normalized distribution of the first unfixed axis given the fixed counts;
/// any further unfixed axes are summed out first. Throws DomainError when the
/// conditioning outcome has probability below 1e-300.
JointDistribution conditional(const JointDistribution& dist,
                              const std::vector<std::pair<int, int>>& fixed);

/// Relative-phase solutions of n = n_bar(delta), both mapped into [-pi, pi).
struct PhaseEstimate {
    double delta_plus = 0.0;
    double delta_minus = 0.0;
    bool degenerate = false;  // |u| = 1: single solution
};

/// Inverts the mean-field cosine; throws DomainError when the count lies
/// outside the mean-field range (|u| > 1 + 1e-12).
PhaseEstimate estimate_phase(const DetectorSpec& spec, MeanPair means, double n);

/// n_bar_m(delta_plus) and n_bar_m(delta_minus) for every detector.
struct PredictedCounts {
    std::vector<double> plus;
    std::vector<double> minus;
};
PredictedCounts predict_counts(const DetectorArray& array, const std::vector<MeanPair>& means,
                               const PhaseEstimate& estimate);

/// Distance from an outcome to the mean-field trajectory: per-axis deviations
/// in units of sqrt(n_bar_m(delta)), minimized over delta (grid search plus
/// golden-section refinement), reported as the Euclidean norm.
double distance_to_trajectory(std::span<const int> outcome, const MeanFieldTrajectory& traj);

/// Region of outcome space carrying significant probability.
struct PeakManifold {
    std::vector<OutcomeVector> points;
    std::vector<double> probs;
    double p_min = 0.0;
    double coverage = 0.0;      // probability mass of the retained set
    double max_distance = 0.0;  // largest shot-noise distance to the trajectory
};

/// Threshold rule P_min = 0.01 / n_bar^2 with n_bar the detector-averaged
/// mean count (pass p_min > 0 to override).
PeakManifold peak_manifold(const JointDistribution& dist, const MeanFieldTrajectory& traj,
                           double p_min = 0.0);

/// Same reduction over a streamed distribution: the caller supplies slabs via
/// phase_average_stream or equivalent. Points are optionally forwarded to
/// `sink` instead of being stored (for very large clouds).
struct StreamedManifoldScan {
    double p_min = 0.0;
    double coverage = 0.0;
    double max_distance = 0.0;
    double total_mass = 0.0;
    std::uint64_t n_points = 0;
};
StreamedManifoldScan scan_point_cloud(
    const DetectorArray& array, const SourcePair& sources, const OutcomeGrid& grid,
    const EngineOptions& opts, const MeanFieldTrajectory& traj, double p_min,
    const std::function<void(const OutcomeVector&, double)>& sink = nullptr);

/// Probability mass within `radius` shot-noise units of the trajectory.
double tube_coverage(const JointDistribution& dist, const MeanFieldTrajectory& traj, double radius);

/// A local maximum of a one-dimensional slice with its watershed basin.
struct Mode {
    int position = 0;      // count value at the maximum
    double height = 0.0;   // probability at the maximum
    double weight = 0.0;   // basin mass
    int basin_lo = 0, basin_hi = 0;
    double basin_mean = 0.0;
    double basin_sd = 0.0;
};

/// Strict local maxima after plateau merging; modes closer than sqrt(n_bar)
/// are merged; weights are assigned by the watershed minima between modes.
std::vector<Mode> find_modes(const JointDistribution& slice);

/// Renormalized restriction of a one-dimensional slice to [lo, hi]
/// (clamped to the slice bounds), e.g. one watershed basin.
JointDistribution restrict_range(const JointDistribution& slice, int lo, int hi);

/// Modes that survive a watershed-depth cut: the valley between two retained
/// modes must dip below the larger peak by more than `depth_fraction` of it.
std::vector<Mode> significant_modes(const JointDistribution& slice, double depth_fraction = 0.1);

/// Width of a unimodal slice about its mode.
struct ShotNoiseReport {
    double mode_mean = 0.0;
    double width = 0.0;      // standard deviation about the mode's basin mean
    double gamma = 0.0;      // width / sqrt(mode_mean)
    double predicted = 0.0;  // gamma-model width + (n_bar / Nbar) * dN
};

/// Throws DomainError when the slice is multimodal (condition first).
/// `source_mean` and `source_dn` feed the predicted-width estimate.
ShotNoiseReport shot_noise(const JointDistribution& slice, double source_mean, double source_dn);

/// Sequential inverse-CDF sampling from a materialized distribution.
/// Reproducible: outcomes are a pure function of (dist, count, seed).
std::vector<OutcomeVector> sample_outcomes(const JointDistribution& dist, int count, std::uint64_t seed);

/// Generative mean-field sampling: delta uniform on [-pi, pi), then
/// independent Poisson counts at n_bar_m(delta). Distribution-identical to
/// the phase-averaged joint for Poissonian sources.
std::vector<OutcomeVector> sample_meanfield(const DetectorArray& array, double mean_a, double mean_b,
                                            int count, std::uint64_t seed);

} // namespace photonlab

#endif
