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
#include "photonlab/quadrature.hpp"

#include <Eigen/Dense>
#include <cmath>

#include "photonlab/errors.hpp"
#include "photonlab/numeric.hpp"

namespace photonlab {

RadialRule gauss_gamma_rule(double shape, double scale, int n) {
    if (shape <= 0.0 || scale <= 0.0 || n < 1)
        throw DomainError("gauss_gamma_rule: shape, scale and node count must be positive");

    // Jacobi matrix of the monic generalized Laguerre polynomials with
    // alpha = shape - 1: diag a_i = 2i + alpha + 1, offdiag b_i = i (i + alpha).
    const double alpha = shape - 1.0;
    Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i) {
        jacobi(i, i) = 2.0 * i + alpha + 1.0;
        if (i > 0) {
            const double off = std::sqrt(static_cast<double>(i) * (static_cast<double>(i) + alpha));
            jacobi(i, i - 1) = off;
            jacobi(i - 1, i) = off;
        }
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(jacobi);
    if (solver.info() != Eigen::Success)
        throw NonConvergenceError("gauss_gamma_rule: Jacobi eigen-solve failed", 0.0);

    RadialRule rule;
    rule.nodes_u.resize(static_cast<std::size_t>(n));
    rule.weights.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        rule.nodes_u[static_cast<std::size_t>(i)] = scale * solver.eigenvalues()(i);
        const double q0 = solver.eigenvectors()(0, i);
        // Squared first components sum to one, which is exactly the Gamma
        // density normalization: mu_0 / Gamma(shape) = 1.
        rule.weights[static_cast<std::size_t>(i)] = q0 * q0;
    }
    return rule;
}

std::vector<double> periodic_nodes(int n, double offset) {
    std::vector<double> nodes(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i)
        nodes[static_cast<std::size_t>(i)] = -kPi + 2.0 * kPi * (static_cast<double>(i) + offset) / static_cast<double>(n);
    return nodes;
}

} // namespace photonlab
