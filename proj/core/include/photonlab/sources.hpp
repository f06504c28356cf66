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
#ifndef PHOTONLAB_SOURCES_HPP
#define PHOTONLAB_SOURCES_HPP

#include <complex>
#include <optional>
#include <utility>
#include <variant>
#include <vector>

#include "photonlab/errors.hpp"
#include "photonlab/quadrature.hpp"

namespace photonlab {

/// Tail mass dropped when truncating an infinite photon-number support.
/// Every downstream normalization error is bounded by this.
inline constexpr double kTailTolerance = 1e-12;

/// Diagonal photon-number distribution on a contiguous range
/// [offset, offset + probs.size()). `tail_mass` is the mass dropped by
/// truncation; the retained entries sum to 1 - tail_mass.
class NumberDistribution {
public:
    NumberDistribution(int offset, std::vector<double> probs,
                       double declared_mean, double declared_variance,
                       double tail_mass = 0.0);

    int offset() const { return offset_; }
    int max_n() const { return offset_ + static_cast<int>(probs_.size()) - 1; }
    const std::vector<double>& probs() const { return probs_; }
    double pmf(int n) const {
        const int i = n - offset_;
        return (i >= 0 && i < static_cast<int>(probs_.size())) ? probs_[static_cast<std::size_t>(i)] : 0.0;
    }
    double mean() const { return mean_; }
    double variance() const { return variance_; }
    double tail_mass() const { return tail_mass_; }

    double summed_mean() const;
    double summed_variance() const;

private:
    int offset_;
    std::vector<double> probs_;
    double mean_;
    double variance_;
    double tail_mass_;
};

/// Phase-invariant coherent-amplitude density P(r), normalized as
/// int_0^inf r dr P(r) = 1. Gamma densities in u = r^2 cover the named
/// families; a delta node represents the Poissonian exactly.
class RadialDensity {
public:
    enum class Kind { Gamma, Delta, Tabulated };

    static RadialDensity gamma(double shape, double scale);
    static RadialDensity delta(double u_node);
    static RadialDensity tabulated(std::vector<double> nodes_u, std::vector<double> weights);

    Kind kind() const { return kind_; }
    bool singular() const { return kind_ == Kind::Delta; }

    /// P(r) for regular densities; throws DomainError on a delta node.
    double density(double r) const;

    /// Quadrature rule with n nodes (ignored for delta/tabulated kinds).
    RadialRule rule(int n) const;

    /// Moments of the photon-number distribution this density generates:
    /// mean = <u>, variance = <u^2> - <u>^2 + <u>.
    std::pair<double, double> number_moments() const;

private:
    RadialDensity() = default;
    Kind kind_ = Kind::Delta;
    double shape_ = 0.0, scale_ = 0.0;
    double u_node_ = 0.0;
    std::vector<double> nodes_u_, weights_;
};

/// One U(1)-invariant single-mode source.
class SourceSpec {
public:
    enum class Family {
        NumberState,
        Binomial,
        Poissonian,
        SuperPoissonian,
        Thermal,
        TwoNumberMixture,
        CustomDiagonal,
        CustomRadial,
    };

    static SourceSpec number_state(long long n);
    /// Binomial state B(q; mean): requires mean/q to be an integer.
    static SourceSpec binomial(double q, double mean);
    static SourceSpec poissonian(double mean);
    /// Q > 0 selects the Gamma radial family with V = mean + Q mean^2;
    /// Q == 0 is the explicit Poissonian limit (delta radial node).
    static SourceSpec super_poissonian(double big_q, double mean);
    static SourceSpec thermal(double mean);
    /// Equal mixture of |mean - dn> and |mean + dn>; both must be integers >= 0.
    static SourceSpec two_number_mixture(double mean, double dn);
    static SourceSpec custom_diagonal(NumberDistribution dist);
    static SourceSpec custom_radial(RadialDensity density);

    Family family() const { return family_; }
    double mean() const { return mean_; }
    double variance() const { return variance_; }
    std::pair<double, double> moments() const { return {mean_, variance_}; }

    bool has_diagonal() const;
    bool has_radial() const;

    /// Closed-form p(N); throws DomainError for radial-only sources.
    double pmf(long long n) const;
    double log_pmf(long long n) const;

    /// P(r); throws DomainError for sub-Poissonian variants and on the
    /// singular (delta node) representations.
    double radial_density(double r) const;

    /// Radial representation; throws DomainError for sub-Poissonian variants.
    const RadialDensity& radial() const;

    /// Truncated diagonal distribution (smallest contiguous range whose
    /// omitted tail is below kTailTolerance).
    NumberDistribution number_distribution() const;

    /// Family parameters, when meaningful.
    double param_q() const { return q_; }
    double param_big_q() const { return big_q_; }
    double param_dn() const { return dn_; }

private:
    SourceSpec() = default;

    Family family_ = Family::NumberState;
    double mean_ = 0.0;
    double variance_ = 0.0;
    double q_ = 0.0;       // Binomial thinning parameter
    double big_q_ = 0.0;   // super-Poissonian Q
    double dn_ = 0.0;      // two-number mixture half-gap
    long long cap_ = 0;    // Binomial support cap mean/q, NumberState n
    std::optional<NumberDistribution> custom_diagonal_;
    std::optional<RadialDensity> radial_;
};

/// Two independent sources with uncorrelated random phases.
struct IndependentPair {
    SourceSpec a, b;
};

/// Both fields split off one number state |N> through an (c, s, delta) coupler.
struct CommonNumberPair {
    long long n = 0;
    double c = 0.0, s = 0.0;
    double delta = 0.0;
};

/// Diagonal-mixture common source: weights p(N) over CommonNumberPair states.
struct CommonDiagonalPair {
    NumberDistribution p;
    double c = 0.0, s = 0.0;
    double delta = 0.0;
};

/// Two radial sources sharing a frame that fixes their relative phase.
struct ReferencedPhasePair {
    SourceSpec a, b;
    double delta = 0.0;
};

/// The two-mode input state.
class SourcePair {
public:
    using Variant = std::variant<IndependentPair, CommonNumberPair, CommonDiagonalPair, ReferencedPhasePair>;

    static SourcePair independent(SourceSpec a, SourceSpec b);
    static SourcePair common_number(long long n, double c, double s, double delta);
    static SourcePair common_diagonal(NumberDistribution p, double c, double s, double delta);
    static SourcePair referenced_phase(SourceSpec a, SourceSpec b, double delta);

    const Variant& value() const { return v_; }

    bool is_independent() const { return std::holds_alternative<IndependentPair>(v_); }
    const IndependentPair* independent_pair() const { return std::get_if<IndependentPair>(&v_); }
    const CommonNumberPair* common_number_pair() const { return std::get_if<CommonNumberPair>(&v_); }
    const CommonDiagonalPair* common_diagonal_pair() const { return std::get_if<CommonDiagonalPair>(&v_); }
    const ReferencedPhasePair* referenced_phase_pair() const { return std::get_if<ReferencedPhasePair>(&v_); }

    /// Mode intensities (|alpha|^2, |beta|^2) entering the mean-field formulas.
    std::pair<double, double> mode_means() const;

private:
    explicit SourcePair(Variant v) : v_(std::move(v)) {}
    Variant v_;
};

/// Fock amplitudes c_K of the common-number expansion over |K, N-K>,
/// normalized to sum |c_K|^2 = 1.
std::vector<std::complex<double>> common_source_amplitudes(const CommonNumberPair& pair);

} // namespace photonlab

#endif
