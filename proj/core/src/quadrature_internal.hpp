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
#ifndef PHOTONLAB_QUADRATURE_INTERNAL_HPP
#define PHOTONLAB_QUADRATURE_INTERNAL_HPP

#include <vector>

#include "photonlab/engines.hpp"

namespace photonlab {
namespace detail_phase {

struct DetectorMeans {
    double base;   // <n>_a + <n>_b
    double osc;    // 2 xi sqrt(<n>_a <n>_b)
    double theta;
};

std::vector<DetectorMeans> detector_means(const DetectorArray& array, double ia, double ib);

/// Adds scale * avg_nodes prod_m Poisson(n_m; n_bar_m(delta)) into `plane`.
/// Deterministic under threading: rows (or segments) own disjoint outputs and
/// sum nodes in a fixed order.
void accumulate_nodes(const std::vector<DetectorMeans>& means, const OutcomeGrid& grid,
                      const std::vector<double>& nodes, int threads, double scale,
                      std::vector<double>& plane);

/// Adaptive periodic trapezoid over delta; fills `plane` with the accepted
/// average and widens `info` with the achieved level.
void adaptive_average(const std::vector<DetectorMeans>& means, const OutcomeGrid& grid,
                      const EngineOptions& opts, std::vector<double>& plane, QuadratureInfo& info);

} // namespace detail_phase
} // namespace photonlab

#endif
