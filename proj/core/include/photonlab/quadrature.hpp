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
#ifndef PHOTONLAB_QUADRATURE_HPP
#define PHOTONLAB_QUADRATURE_HPP

#include <vector>

namespace photonlab {

/// Discretization of a radial density in the variable u = r^2, normalized so
/// the weights sum to one. A singular rule is a single exact delta node.
struct RadialRule {
    std::vector<double> nodes_u;
    std::vector<double> weights;
    bool singular = false;
};

/// Generalized Gauss quadrature against the Gamma(shape, scale) density in u.
/// Nodes are the eigenvalues of the generalized Laguerre Jacobi matrix
/// (Golub-Welsch); weights are the squared first eigenvector components, which
/// already carry the density normalization.
RadialRule gauss_gamma_rule(double shape, double scale, int n);

/// Uniform periodic nodes on [-pi, pi): delta_i = -pi + 2 pi (i + offset) / n.
/// offset = 0.5 gives the midpoints used when doubling a trapezoid level.
std::vector<double> periodic_nodes(int n, double offset = 0.0);

} // namespace photonlab

#endif
