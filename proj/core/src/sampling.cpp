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

#include "photonlab/analysis.hpp"
#include "photonlab/numeric.hpp"
#include "photonlab/rng.hpp"

namespace photonlab {

int poisson_draw(double mean, Rng& rng) {
    if (mean <= 0.0) return 0;
    const double u = rng.next_double();
    const int mode = static_cast<int>(mean);
    double cum = std::exp(log_poisson_pmf(mode, mean));
    if (u < cum) return mode;
    // Expand outward from the mode, alternating sides, with the pmf extended
    // by its two-sided recurrence.
    double below = cum, above = cum;
    int lo = mode, hi = mode;
    while (true) {
        bool advanced = false;
        if (lo > 0) {
            below *= static_cast<double>(lo) / mean;
            --lo;
            cum += below;
            if (u < cum) return lo;
            advanced = advanced || below > 0.0;
        }
        ++hi;
        above *= mean / static_cast<double>(hi);
        cum += above;
        if (u < cum) return hi;
        advanced = advanced || above > 0.0;
        if (!advanced && lo == 0) return hi;  // exhausted mass (u within roundoff of 1)
    }
}

std::vector<OutcomeVector> sample_meanfield(const DetectorArray& array, double mean_a, double mean_b,
                                            int count, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<OutcomeVector> out;
    out.reserve(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) {
        const double delta = -kPi + 2.0 * kPi * rng.next_double();
        OutcomeVector n(static_cast<std::size_t>(array.size()));
        for (int m = 0; m < array.size(); ++m) {
            const double nbar =
                mean_count(array[m], {array[m].r_aa() * mean_a, array[m].r_bb() * mean_b}, delta);
            n[static_cast<std::size_t>(m)] = poisson_draw(nbar, rng);
        }
        out.push_back(std::move(n));
    }
    return out;
}

std::vector<OutcomeVector> sample_outcomes(const JointDistribution& dist, int count, std::uint64_t seed) {
    const std::size_t dims = dist.grid.dims();
    if (dist.log_probs.size() > (1u << 26))
        throw DomainError("sample_outcomes: grid too large; use a generative sampler");

    // Suffix-marginal tables: table[k] holds sums over axes > k, indexed by
    // the first k+1 axes. table[dims-1] is the full linear distribution.
    std::vector<std::vector<double>> table(dims);
    table[dims - 1].resize(dist.log_probs.size());
    for (std::size_t i = 0; i < dist.log_probs.size(); ++i)
        table[dims - 1][i] = std::exp(dist.log_probs[i]);
    for (std::size_t k = dims - 1; k-- > 0;) {
        const std::size_t width = static_cast<std::size_t>(dist.grid.axes[k + 1].size());
        const std::size_t size = table[k + 1].size() / width;
        table[k].assign(size, 0.0);
        for (std::size_t i = 0; i < size; ++i) {
            double s = 0.0;
            for (std::size_t j = 0; j < width; ++j) s += table[k + 1][i * width + j];
            table[k][i] = s;
        }
    }
    const double z = pairwise_sum(table[0]);
    if (z <= 0.0) throw DomainError("sample_outcomes: distribution has no mass");

    Rng rng(seed);
    std::vector<OutcomeVector> out;
    out.reserve(static_cast<std::size_t>(count));
    for (int s = 0; s < count; ++s) {
        OutcomeVector n(dims);
        std::size_t prefix = 0;
        double norm = z;
        for (std::size_t k = 0; k < dims; ++k) {
            const std::size_t width = static_cast<std::size_t>(dist.grid.axes[k].size());
            const double u = rng.next_double() * norm;
            double cum = 0.0;
            std::size_t pick = width - 1;
            for (std::size_t j = 0; j < width; ++j) {
                cum += table[k][prefix * width + j];
                if (u < cum) {
                    pick = j;
                    break;
                }
            }
            n[k] = dist.grid.axes[k].lo + static_cast<int>(pick);
            norm = table[k][prefix * width + pick];
            prefix = prefix * width + pick;
            if (norm <= 0.0) {
                // Roundoff pushed u past the last positive branch; pin the
                // remaining axes to their lower bounds.
                for (std::size_t rest = k + 1; rest < dims; ++rest) n[rest] = dist.grid.axes[rest].lo;
                break;
            }
        }
        out.push_back(std::move(n));
    }
    return out;
}

} // namespace photonlab
