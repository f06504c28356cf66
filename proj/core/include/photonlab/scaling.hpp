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
#ifndef PHOTONLAB_SCALING_HPP
#define PHOTONLAB_SCALING_HPP

#include <string>

#include "photonlab/detectors.hpp"
#include "photonlab/engines.hpp"
#include "photonlab/sources.hpp"

namespace photonlab {

/// Exact rational q for binomial-family bookkeeping (the support cap
/// mean / q must come out an exact integer).
struct Rational {
    long long num = 1;
    long long den = 1;
    static Rational parse(const std::string& text);  // "3", "1/20", "0.5"
    double value() const { return static_cast<double>(num) / static_cast<double>(den); }
};

struct ScalingTransform {
    explicit ScalingTransform(double q_in);
    double q;
};

/// Thinning kernel B^N_{N'}(q) = C(N, N') q^{N'} (1-q)^{N-N'}; zero outside
/// the support 0 <= N' <= N.
double binomial_weight(long long n, long long n_prime, double q);

/// p~(N) = sum_{N' >= N} p(N') B^{N'}_N(q), renormalized against the input's
/// truncation so the output sums to one within kTailTolerance.
NumberDistribution effective_distribution(const NumberDistribution& p, double q);

/// (q Nbar, q^2 V + (1-q) q Nbar).
std::pair<double, double> effective_moments(double mean, double variance, double q);

/// Every R^(m) multiplied by 1/q; xi and theta untouched.
DetectorArray scale_detectors(const DetectorArray& array, double q);

struct EquivalenceReport {
    double sup_norm = 0.0;
    double mass_thinned = 0.0;
    double mass_rescaled = 0.0;
    std::string engine_tag;
};

/// Compares P(array, thinned-by-q sources) against P(q * array, sources):
/// for number-state inputs this is P_{B(q)}(.; R) versus P_{N}(.; qR).
EquivalenceReport equivalence_check(const DetectorArray& array, const SourcePair& sources, double q,
                                    EngineKind engine = EngineKind::Auto, const EngineOptions& opts = {});

} // namespace photonlab

#endif
