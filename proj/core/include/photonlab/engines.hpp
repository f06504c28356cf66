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
#ifndef PHOTONLAB_ENGINES_HPP
#define PHOTONLAB_ENGINES_HPP

#include <complex>
#include <functional>
#include <map>
#include <memory>
#include <span>
#include <string>

#include "photonlab/detectors.hpp"
#include "photonlab/grid.hpp"
#include "photonlab/numeric.hpp"
#include "photonlab/sources.hpp"

namespace photonlab {

enum class EngineKind { MeanField, PhaseAverage, Radial, Fock, Auto };

const char* engine_name(EngineKind kind);
EngineKind engine_from_name(const std::string& name);

struct QuadratureInfo {
    int delta_nodes = 0;        // nodes at the accepted level
    double delta_change = 0.0;  // sup-norm change at the last doubling
    bool delta_converged = true;
    int radial_nodes = 0;           // per source, accepted level
    double radial_change = 0.0;     // sup-norm change between 64- and 128-node runs
};

enum class FockPath { Auto, Dense, Slice };

struct EngineOptions {
    int delta_nodes_init = 64;
    int delta_nodes_max = 4096;
    double delta_tol = 1e-10;
    int fixed_delta_nodes = 0;  // > 0 disables adaptivity (testing hook)
    int radial_nodes = 64;
    bool radial_refine = true;  // evaluate once more at 2x nodes, keep the finer
    bool allow_expensive = false;
    int threads = 0;  // 0: PHOTONLAB_THREADS or hardware
    /// Mixture components with joint weight below this are dropped; the
    /// omitted weight is added to the tail bound.
    double mixture_weight_floor = 1e-18;
    /// Overrides the Fock engine's cost-based route choice (testing hook).
    FockPath fock_path = FockPath::Auto;
};

/// Joint photon-count probabilities over a dense outcome grid, log domain.
struct JointDistribution {
    OutcomeGrid grid;
    std::vector<double> log_probs;
    std::string engine_tag;
    double tail_bound = 0.0;
    QuadratureInfo quad;

    double log_at(std::span<const int> n) const { return log_probs[grid.flat_index(n)]; }
    double at(std::span<const int> n) const { return std::exp(log_at(n)); }
    /// exp-sum over the whole grid (fixed-order pairwise).
    double total_mass() const;
    /// sum_n n_axis P(n) over the grid.
    double moment(int axis) const;
};

/// Grid rule: n_max_m = ceil(max_delta n_bar_m + 10 sqrt(max_delta n_bar_m) + 10),
/// clamped to the total photon number when the pair has finite support.
OutcomeGrid default_grid(const DetectorArray& array, const SourcePair& sources);

/// P(n; delta) = prod_m Poisson(n_m; n_bar_m(delta)) for fixed relative phase.
JointDistribution meanfield_joint(const DetectorArray& array, double mean_a, double mean_b,
                                  double delta, const OutcomeGrid& grid);

/// Phase average (1/2pi) int d delta P(n; delta) for independent Poissonian
/// sources (or explicit radial delta nodes), by adaptive periodic trapezoid.
JointDistribution phase_average_joint(const DetectorArray& array, const SourcePair& sources,
                                      const OutcomeGrid& grid, const EngineOptions& opts = {});

/// Streaming variant: emits linear-domain probability slabs per axis-0 count
/// without materializing the full grid. Slabs arrive in axis-0 order.
void phase_average_stream(const DetectorArray& array, const SourcePair& sources,
                          const OutcomeGrid& grid, const EngineOptions& opts,
                          const std::function<void(int n0, std::span<const double> slab)>& sink,
                          QuadratureInfo* info = nullptr);

/// Triple quadrature over (r_a, r_b, delta) for P-representable sources;
/// a ReferencedPhase pair skips the delta integral.
JointDistribution radial_phase_average_joint(const DetectorArray& array, const SourcePair& sources,
                                             const OutcomeGrid& grid, const EngineOptions& opts = {});

/// Exact Fock-space evaluation through the isometric dilation, for diagonal
/// independent sources, CommonNumber, or CommonDiagonal pairs.
JointDistribution fock_joint(const DetectorArray& array, const SourcePair& sources,
                             const OutcomeGrid& grid, const EngineOptions& opts = {});

/// M-dimensional convolution of two joint distributions (sources measured in
/// separate runs); the result grid spans the sums of the input bounds.
JointDistribution incoherent_joint(const JointDistribution& a, const JointDistribution& b);

/// Engine dispatch by source-pair representation.
JointDistribution auto_joint(const DetectorArray& array, const SourcePair& sources,
                             const OutcomeGrid& grid, const EngineOptions& opts = {},
                             EngineKind kind = EngineKind::Auto);
EngineKind select_engine(const SourcePair& sources);

/// Appendix-style generating function F(z) = <: prod_m e^{z_m I_m} :> for
/// |N_a, N_b>, evaluated from the closed form with M = I + sum_m z_m R^(m).
std::complex<double> generating_function_fock(const DetectorArray& array, long long n_a, long long n_b,
                                              std::span<const std::complex<double>> z);

/// Dense two-mode state on the truncated Fock lattice n_a + n_b <= max_total.
class TwoModeState {
public:
    static TwoModeState product_number(int n_a, int n_b);
    static TwoModeState pure(int max_total, const std::map<std::pair<int, int>, cd>& amplitudes);
    static TwoModeState diagonal_product(const NumberDistribution& a, const NumberDistribution& b, int max_total);
    static TwoModeState common_number(const CommonNumberPair& pair);

    int max_total() const { return max_total_; }
    int dim() const { return static_cast<int>(basis_.size()); }
    const std::vector<std::pair<int, int>>& basis() const { return basis_; }
    cd rho(int i, int j) const { return rho_[static_cast<std::size_t>(i) * basis_.size() + static_cast<std::size_t>(j)]; }

private:
    explicit TwoModeState(int max_total);
    int index(int n_a, int n_b) const;
    int max_total_;
    std::vector<std::pair<int, int>> basis_;
    std::vector<cd> rho_;
};

/// Independent verifier: evaluates the normal-ordered counting POVM by series
/// expansion with exact normal-ordering bookkeeping. No dilation involved.
/// Dense operator algebra; requires max_total <= 12.
double brute_force_oracle(const DetectorArray& array, const TwoModeState& state,
                          std::span<const int> outcome);

/// Same computation with the normal-ordered expectations memoized across
/// outcomes of one (array, state) pair.
class OracleContext {
public:
    OracleContext(const DetectorArray& array, const TwoModeState& state);
    ~OracleContext();
    OracleContext(const OracleContext&) = delete;
    OracleContext& operator=(const OracleContext&) = delete;
    double probability(std::span<const int> outcome) const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

} // namespace photonlab

#endif
