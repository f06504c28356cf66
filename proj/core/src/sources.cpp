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
#include "photonlab/sources.hpp"

#include <algorithm>
#include <cmath>

#include "photonlab/numeric.hpp"

namespace photonlab {

namespace {

double wrap_phase(double delta) {
    double d = std::remainder(delta, 2.0 * kPi);
    if (d >= kPi) d -= 2.0 * kPi;  // remainder lands in [-pi, pi]; fold the endpoint
    return d;
}

long long checked_integer(double x, const char* what) {
    const double r = std::round(x);
    if (std::abs(x - r) > 1e-6 || r < 0)
        throw DomainError(std::string(what) + " must be a non-negative integer");
    return static_cast<long long>(r);
}

} // namespace

// ---------------------------------------------------------------------------
// NumberDistribution

NumberDistribution::NumberDistribution(int offset, std::vector<double> probs,
                                       double declared_mean, double declared_variance,
                                       double tail_mass)
    : offset_(offset), probs_(std::move(probs)), mean_(declared_mean),
      variance_(declared_variance), tail_mass_(tail_mass) {
    if (offset_ < 0 || probs_.empty())
        throw DomainError("NumberDistribution: empty support or negative photon number");
    double sum = 0.0;
    for (double p : probs_) {
        if (!(p >= 0.0)) throw DomainError("NumberDistribution: negative probability");
        sum += p;
    }
    if (std::abs(sum + tail_mass_ - 1.0) > 1e-12)
        throw DomainError("NumberDistribution: probabilities do not sum to one");
    const double m = summed_mean();
    const double v = summed_variance();
    if (std::abs(m - mean_) > 1e-9 * std::max(1.0, std::abs(mean_)) ||
        std::abs(v - variance_) > 1e-9 * std::max(1.0, std::abs(variance_)))
        throw DomainError("NumberDistribution: declared moments disagree with entries");
}

double NumberDistribution::summed_mean() const {
    double m = 0.0;
    for (std::size_t i = 0; i < probs_.size(); ++i)
        m += probs_[i] * static_cast<double>(offset_ + static_cast<int>(i));
    return m;
}

double NumberDistribution::summed_variance() const {
    const double m = summed_mean();
    double v = 0.0;
    for (std::size_t i = 0; i < probs_.size(); ++i) {
        const double d = static_cast<double>(offset_ + static_cast<int>(i)) - m;
        v += probs_[i] * d * d;
    }
    return v;
}

// ---------------------------------------------------------------------------
// RadialDensity

RadialDensity RadialDensity::gamma(double shape, double scale) {
    if (shape <= 0.0 || scale <= 0.0) throw DomainError("RadialDensity::gamma: parameters must be positive");
    RadialDensity d;
    d.kind_ = Kind::Gamma;
    d.shape_ = shape;
    d.scale_ = scale;
    return d;
}

RadialDensity RadialDensity::delta(double u_node) {
    if (u_node < 0.0) throw DomainError("RadialDensity::delta: node must be non-negative");
    RadialDensity d;
    d.kind_ = Kind::Delta;
    d.u_node_ = u_node;
    return d;
}

RadialDensity RadialDensity::tabulated(std::vector<double> nodes_u, std::vector<double> weights) {
    if (nodes_u.size() != weights.size() || nodes_u.empty())
        throw DomainError("RadialDensity::tabulated: nodes and weights must match and be non-empty");
    double sum = 0.0;
    for (double w : weights) {
        if (!(w >= 0.0)) throw DomainError("RadialDensity::tabulated: negative weight");
        sum += w;
    }
    if (std::abs(sum - 1.0) > 1e-9)
        throw DomainError("RadialDensity::tabulated: weights must sum to one");
    RadialDensity d;
    d.kind_ = Kind::Tabulated;
    d.nodes_u_ = std::move(nodes_u);
    d.weights_ = std::move(weights);
    return d;
}

double RadialDensity::density(double r) const {
    if (kind_ != Kind::Gamma)
        throw DomainError("RadialDensity: no regular density for singular or tabulated kinds");
    if (r < 0.0) return 0.0;
    const double u = r * r;
    // P(r) = 2 * Gamma-density(u): the u-density is u^{k-1} e^{-u/theta} / (Gamma(k) theta^k).
    if (u == 0.0 && shape_ != 1.0)
        return shape_ > 1.0 ? 0.0 : std::numeric_limits<double>::infinity();
    const double power = shape_ == 1.0 ? 0.0 : (shape_ - 1.0) * std::log(u);
    const double logd = power - u / scale_ - std::lgamma(shape_) - shape_ * std::log(scale_);
    return 2.0 * std::exp(logd);
}

RadialRule RadialDensity::rule(int n) const {
    switch (kind_) {
    case Kind::Gamma:
        return gauss_gamma_rule(shape_, scale_, n);
    case Kind::Delta: {
        RadialRule r;
        r.nodes_u = {u_node_};
        r.weights = {1.0};
        r.singular = true;
        return r;
    }
    case Kind::Tabulated: {
        RadialRule r;
        r.nodes_u = nodes_u_;
        r.weights = weights_;
        return r;
    }
    }
    throw DomainError("RadialDensity: unknown kind");
}

std::pair<double, double> RadialDensity::number_moments() const {
    switch (kind_) {
    case Kind::Gamma: {
        const double mean = shape_ * scale_;
        return {mean, mean * scale_ + mean};
    }
    case Kind::Delta:
        return {u_node_, u_node_};
    case Kind::Tabulated: {
        double m1 = 0.0, m2 = 0.0;
        for (std::size_t i = 0; i < nodes_u_.size(); ++i) {
            m1 += weights_[i] * nodes_u_[i];
            m2 += weights_[i] * nodes_u_[i] * nodes_u_[i];
        }
        return {m1, m2 - m1 * m1 + m1};
    }
    }
    throw DomainError("RadialDensity: unknown kind");
}

// ---------------------------------------------------------------------------
// SourceSpec

SourceSpec SourceSpec::number_state(long long n) {
    if (n < 0) throw DomainError("number_state: n must be non-negative");
    SourceSpec s;
    s.family_ = Family::NumberState;
    s.cap_ = n;
    s.mean_ = static_cast<double>(n);
    s.variance_ = 0.0;
    return s;
}

SourceSpec SourceSpec::binomial(double q, double mean) {
    if (q <= 0.0 || q > 1.0) throw DomainError("binomial: q must lie in (0, 1]");
    SourceSpec s;
    s.family_ = Family::Binomial;
    s.q_ = q;
    s.cap_ = checked_integer(mean / q, "binomial: mean/q");
    s.mean_ = mean;
    s.variance_ = mean * (1.0 - q);
    return s;
}

SourceSpec SourceSpec::poissonian(double mean) {
    if (mean < 0.0) throw DomainError("poissonian: mean must be non-negative");
    SourceSpec s;
    s.family_ = Family::Poissonian;
    s.mean_ = mean;
    s.variance_ = mean;
    s.radial_ = RadialDensity::delta(mean);
    return s;
}

SourceSpec SourceSpec::super_poissonian(double big_q, double mean) {
    if (big_q < 0.0) throw DomainError("super_poissonian: Q must be non-negative");
    if (mean < 0.0) throw DomainError("super_poissonian: mean must be non-negative");
    if (big_q == 0.0) {
        // Explicit Q -> 0 limit: the Poissonian delta node.
        SourceSpec s = poissonian(mean);
        s.family_ = Family::SuperPoissonian;
        s.big_q_ = 0.0;
        return s;
    }
    SourceSpec s;
    s.family_ = Family::SuperPoissonian;
    s.big_q_ = big_q;
    s.mean_ = mean;
    s.variance_ = mean + big_q * mean * mean;
    s.radial_ = RadialDensity::gamma(1.0 / big_q, big_q * mean);
    return s;
}

SourceSpec SourceSpec::thermal(double mean) {
    if (mean <= 0.0) throw DomainError("thermal: mean must be positive");
    SourceSpec s;
    s.family_ = Family::Thermal;
    s.mean_ = mean;
    s.variance_ = mean + mean * mean;
    s.radial_ = RadialDensity::gamma(1.0, mean);
    return s;
}

SourceSpec SourceSpec::two_number_mixture(double mean, double dn) {
    const long long lo = checked_integer(mean - dn, "two_number_mixture: mean - dn");
    const long long hi = checked_integer(mean + dn, "two_number_mixture: mean + dn");
    SourceSpec s;
    s.family_ = Family::TwoNumberMixture;
    s.mean_ = mean;
    s.dn_ = dn;
    s.variance_ = dn * dn;
    s.cap_ = hi;
    std::vector<double> probs(static_cast<std::size_t>(hi - lo + 1), 0.0);
    probs.front() = 0.5;
    probs.back() += 0.5;
    s.custom_diagonal_ = NumberDistribution(static_cast<int>(lo), std::move(probs), mean, dn * dn);
    return s;
}

SourceSpec SourceSpec::custom_diagonal(NumberDistribution dist) {
    SourceSpec s;
    s.family_ = Family::CustomDiagonal;
    s.mean_ = dist.mean();
    s.variance_ = dist.variance();
    s.cap_ = dist.max_n();
    s.custom_diagonal_ = std::move(dist);
    return s;
}

SourceSpec SourceSpec::custom_radial(RadialDensity density) {
    SourceSpec s;
    s.family_ = Family::CustomRadial;
    auto [m, v] = density.number_moments();
    s.mean_ = m;
    s.variance_ = v;
    s.radial_ = std::move(density);
    return s;
}

bool SourceSpec::has_diagonal() const { return family_ != Family::CustomRadial; }

bool SourceSpec::has_radial() const {
    switch (family_) {
    case Family::Poissonian:
    case Family::SuperPoissonian:
    case Family::Thermal:
    case Family::CustomRadial:
        return true;
    default:
        return false;
    }
}

double SourceSpec::log_pmf(long long n) const {
    if (n < 0) return kNegInf;
    switch (family_) {
    case Family::NumberState:
        return n == cap_ ? 0.0 : kNegInf;
    case Family::Binomial:
        if (n > cap_) return kNegInf;
        if (q_ == 1.0) return n == cap_ ? 0.0 : kNegInf;
        return log_choose(cap_, n) + static_cast<double>(n) * std::log(q_) +
               static_cast<double>(cap_ - n) * std::log1p(-q_);
    case Family::Poissonian:
        return log_poisson_pmf(n, mean_);
    case Family::SuperPoissonian: {
        if (big_q_ == 0.0) return log_poisson_pmf(n, mean_);
        // Gamma-Poisson mixture: negative binomial with shape k = 1/Q.
        const double k = 1.0 / big_q_;
        const double theta = big_q_ * mean_;
        return std::lgamma(static_cast<double>(n) + k) - std::lgamma(k) - log_factorial(n) -
               k * std::log1p(theta) + static_cast<double>(n) * std::log(theta / (1.0 + theta));
    }
    case Family::Thermal:
        return static_cast<double>(n) * std::log(mean_ / (1.0 + mean_)) - std::log1p(mean_);
    case Family::TwoNumberMixture:
    case Family::CustomDiagonal: {
        const double p = custom_diagonal_->pmf(static_cast<int>(std::min<long long>(n, 1LL << 30)));
        return p > 0.0 ? std::log(p) : kNegInf;
    }
    case Family::CustomRadial:
        throw DomainError("pmf: source has no diagonal representation");
    }
    throw DomainError("pmf: unknown family");
}

double SourceSpec::pmf(long long n) const { return std::exp(log_pmf(n)); }

double SourceSpec::radial_density(double r) const { return radial().density(r); }

const RadialDensity& SourceSpec::radial() const {
    if (!has_radial())
        throw DomainError("radial: sub-Poissonian source has no regular radial density");
    return *radial_;
}

NumberDistribution SourceSpec::number_distribution() const {
    if (!has_diagonal())
        throw DomainError("number_distribution: source has no diagonal representation");
    if (custom_diagonal_) return *custom_diagonal_;
    if (family_ == Family::NumberState || (family_ == Family::Binomial && q_ == 1.0))
        return NumberDistribution(static_cast<int>(cap_), {1.0}, mean_, 0.0);

    // Smallest contiguous range from the mode whose omitted tail is below
    // kTailTolerance. All remaining families are unimodal.
    long long mode = static_cast<long long>(mean_);
    if (family_ == Family::Binomial) mode = std::min(mode, cap_);
    double best = log_pmf(mode);
    for (long long n : {mode - 1, mode + 1}) {
        if (n >= 0 && log_pmf(n) > best) {
            best = log_pmf(n);
            mode = n;
        }
    }
    long long lo = mode, hi = mode;
    const long long max_n = (family_ == Family::Binomial) ? cap_ : (1LL << 40);
    double sum = pmf(mode);
    double p_lo = lo > 0 ? pmf(lo - 1) : 0.0;
    double p_hi = hi < max_n ? pmf(hi + 1) : 0.0;
    while (sum < 1.0 - kTailTolerance && (p_lo > 0.0 || p_hi > 0.0)) {
        if (p_lo >= p_hi) {
            sum += p_lo;
            --lo;
            p_lo = lo > 0 ? pmf(lo - 1) : 0.0;
        } else {
            sum += p_hi;
            ++hi;
            p_hi = hi < max_n ? pmf(hi + 1) : 0.0;
        }
    }
    std::vector<double> probs(static_cast<std::size_t>(hi - lo + 1));
    for (long long n = lo; n <= hi; ++n)
        probs[static_cast<std::size_t>(n - lo)] = pmf(n);
    const double tail = std::max(0.0, 1.0 - sum);
    return NumberDistribution(static_cast<int>(lo), std::move(probs), mean_, variance_, tail);
}

// ---------------------------------------------------------------------------
// SourcePair

namespace {
void check_coupler(double c, double s) {
    if (c < 0.0 || s < 0.0 || std::abs(c * c + s * s - 1.0) > 1e-12)
        throw DomainError("common source: requires c, s >= 0 with c^2 + s^2 = 1");
}
} // namespace

SourcePair SourcePair::independent(SourceSpec a, SourceSpec b) {
    return SourcePair(Variant(IndependentPair{std::move(a), std::move(b)}));
}

SourcePair SourcePair::common_number(long long n, double c, double s, double delta) {
    if (n < 0) throw DomainError("common_number: n must be non-negative");
    check_coupler(c, s);
    return SourcePair(Variant(CommonNumberPair{n, c, s, wrap_phase(delta)}));
}

SourcePair SourcePair::common_diagonal(NumberDistribution p, double c, double s, double delta) {
    check_coupler(c, s);
    return SourcePair(Variant(CommonDiagonalPair{std::move(p), c, s, wrap_phase(delta)}));
}

SourcePair SourcePair::referenced_phase(SourceSpec a, SourceSpec b, double delta) {
    if (!a.has_radial() || !b.has_radial())
        throw DomainError("referenced_phase: both sources need a radial representation");
    return SourcePair(Variant(ReferencedPhasePair{std::move(a), std::move(b), wrap_phase(delta)}));
}

std::pair<double, double> SourcePair::mode_means() const {
    if (const auto* p = independent_pair()) return {p->a.mean(), p->b.mean()};
    if (const auto* p = common_number_pair())
        return {p->c * p->c * static_cast<double>(p->n), p->s * p->s * static_cast<double>(p->n)};
    if (const auto* p = common_diagonal_pair())
        return {p->c * p->c * p->p.mean(), p->s * p->s * p->p.mean()};
    const auto* p = referenced_phase_pair();
    return {p->a.mean(), p->b.mean()};
}

std::vector<std::complex<double>> common_source_amplitudes(const CommonNumberPair& pair) {
    const long long n = pair.n;
    std::vector<std::complex<double>> amps(static_cast<std::size_t>(n) + 1);
    for (long long k = 0; k <= n; ++k) {
        double logmag;
        if ((pair.c == 0.0 && k > 0) || (pair.s == 0.0 && k < n)) {
            amps[static_cast<std::size_t>(k)] = 0.0;
            continue;
        }
        logmag = 0.5 * log_choose(n, k);
        if (k > 0) logmag += static_cast<double>(k) * std::log(pair.c);
        if (k < n) logmag += static_cast<double>(n - k) * std::log(pair.s);
        const double phase = static_cast<double>(n - k) * pair.delta;
        amps[static_cast<std::size_t>(k)] =
            std::exp(logmag) * std::complex<double>(std::cos(phase), std::sin(phase));
    }
    return amps;
}

} // namespace photonlab
