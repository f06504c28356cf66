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
#include "photonlab/scaling.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "photonlab/numeric.hpp"

namespace photonlab {

Rational Rational::parse(const std::string& text) {
    const auto slash = text.find('/');
    Rational r;
    if (slash != std::string::npos) {
        r.num = std::stoll(text.substr(0, slash));
        r.den = std::stoll(text.substr(slash + 1));
    } else if (text.find('.') != std::string::npos) {
        std::string digits = text;
        const auto dot = digits.find('.');
        const auto frac_len = digits.size() - dot - 1;
        digits.erase(dot, 1);
        r.num = std::stoll(digits);
        r.den = 1;
        for (std::size_t i = 0; i < frac_len; ++i) r.den *= 10;
    } else {
        r.num = std::stoll(text);
        r.den = 1;
    }
    if (r.den <= 0) throw DomainError("Rational::parse: denominator must be positive");
    const long long g = std::gcd(std::abs(r.num), r.den);
    if (g > 1) {
        r.num /= g;
        r.den /= g;
    }
    return r;
}

ScalingTransform::ScalingTransform(double q_in) : q(q_in) {
    if (!(q > 0.0) || q > 1.0) throw DomainError("ScalingTransform: q must lie in (0, 1]");
}

double binomial_weight(long long n, long long n_prime, double q) {
    if (!(q > 0.0) || q > 1.0) throw DomainError("binomial_weight: q must lie in (0, 1]");
    if (n_prime < 0 || n_prime > n) return 0.0;
    if (q == 1.0) return n_prime == n ? 1.0 : 0.0;
    return std::exp(log_choose(n, n_prime) + static_cast<double>(n_prime) * std::log(q) +
                    static_cast<double>(n - n_prime) * std::log1p(-q));
}

NumberDistribution effective_distribution(const NumberDistribution& p, double q) {
    ScalingTransform check(q);
    (void)check;
    const int max_in = p.max_n();
    std::vector<double> out(static_cast<std::size_t>(max_in) + 1, 0.0);
    for (int np = p.offset(); np <= max_in; ++np) {
        const double w = p.pmf(np);
        if (w == 0.0) continue;
        // B^{np}_n(q) is concentrated at q*np with width sqrt(np q (1-q)).
        const double center = q * static_cast<double>(np);
        const double span = 12.0 * std::sqrt(center * (1.0 - q) + 1.0) + 12.0;
        const int lo = std::max(0, static_cast<int>(center - span));
        const int hi = std::min(np, static_cast<int>(center + span));
        for (int n = lo; n <= hi; ++n)
            out[static_cast<std::size_t>(n)] += w * binomial_weight(np, n, q);
    }
    const auto [mean, variance] = effective_moments(p.mean(), p.variance(), q);
    // Trim trailing zeros; the retained range stays contiguous from zero.
    int hi = max_in;
    while (hi > 0 && out[static_cast<std::size_t>(hi)] == 0.0) --hi;
    out.resize(static_cast<std::size_t>(hi) + 1);
    const double total = pairwise_sum(out);
    return NumberDistribution(0, std::move(out), mean, variance, std::max(0.0, 1.0 - total));
}

std::pair<double, double> effective_moments(double mean, double variance, double q) {
    ScalingTransform check(q);
    (void)check;
    return {q * mean, q * q * variance + (1.0 - q) * q * mean};
}

DetectorArray scale_detectors(const DetectorArray& array, double q) {
    ScalingTransform check(q);
    (void)check;
    std::vector<DetectorSpec> specs;
    specs.reserve(static_cast<std::size_t>(array.size()));
    for (const auto& s : array.specs())
        specs.emplace_back(s.r_aa() / q, s.r_bb() / q, s.xi(), s.theta());
    return DetectorArray(std::move(specs));
}

namespace {

// Binomial thinning by q, staying in closed families where thinning is exact.
SourceSpec thinned_spec(const SourceSpec& s, double q) {
    switch (s.family()) {
    case SourceSpec::Family::Poissonian:
        return SourceSpec::poissonian(q * s.mean());
    case SourceSpec::Family::SuperPoissonian:
        return SourceSpec::super_poissonian(s.param_big_q(), q * s.mean());
    case SourceSpec::Family::Thermal:
        return SourceSpec::thermal(q * s.mean());
    case SourceSpec::Family::NumberState:
        // Thinned |N> is exactly the binomial state with cap N and mean qN.
        return SourceSpec::binomial(q, q * s.mean());
    case SourceSpec::Family::Binomial: {
        // Thinning composes inside the family: q_total = q0 q, same support cap.
        return SourceSpec::binomial(s.param_q() * q, q * s.mean());
    }
    case SourceSpec::Family::TwoNumberMixture:
    case SourceSpec::Family::CustomDiagonal:
        return SourceSpec::custom_diagonal(effective_distribution(s.number_distribution(), q));
    case SourceSpec::Family::CustomRadial:
        throw DomainError("equivalence_check: thinning a tabulated radial source is unsupported");
    }
    throw DomainError("thinned_spec: unknown family");
}

DetectorArray multiply_detectors(const DetectorArray& array, double factor) {
    std::vector<DetectorSpec> specs;
    specs.reserve(static_cast<std::size_t>(array.size()));
    for (const auto& s : array.specs())
        specs.emplace_back(s.r_aa() * factor, s.r_bb() * factor, s.xi(), s.theta());
    return DetectorArray(std::move(specs));
}

} // namespace

EquivalenceReport equivalence_check(const DetectorArray& array, const SourcePair& sources, double q,
                                    EngineKind engine, const EngineOptions& opts) {
    ScalingTransform check(q);
    (void)check;
    const auto* pair = sources.independent_pair();
    if (pair == nullptr)
        throw DomainError("equivalence_check: requires independent sources");

    const SourcePair thinned =
        SourcePair::independent(thinned_spec(pair->a, q), thinned_spec(pair->b, q));
    const DetectorArray rescaled = multiply_detectors(array, q);

    // Same grid for both runs: per-axis max of the two default rules.
    OutcomeGrid grid = default_grid(array, thinned);
    {
        const OutcomeGrid other = default_grid(rescaled, sources);
        for (std::size_t m = 0; m < grid.axes.size(); ++m)
            grid.axes[m].hi = std::max(grid.axes[m].hi, other.axes[m].hi);
    }

    const JointDistribution left = auto_joint(array, thinned, grid, opts, engine);
    const JointDistribution right = auto_joint(rescaled, sources, grid, opts, engine);

    EquivalenceReport report;
    report.engine_tag = left.engine_tag + "/" + right.engine_tag;
    report.mass_thinned = left.total_mass();
    report.mass_rescaled = right.total_mass();
    for (std::size_t i = 0; i < left.log_probs.size(); ++i)
        report.sup_norm = std::max(report.sup_norm,
                                   std::abs(std::exp(left.log_probs[i]) - std::exp(right.log_probs[i])));
    return report;
}

} // namespace photonlab
