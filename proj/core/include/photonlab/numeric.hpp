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
#ifndef PHOTONLAB_NUMERIC_HPP
#define PHOTONLAB_NUMERIC_HPP

#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <span>
#include <vector>

namespace photonlab {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

/// log(exp(a) + exp(b)) without over/underflow; -inf is the additive identity.
inline double log_sum_exp(double a, double b) {
    if (a == kNegInf) return b;
    if (b == kNegInf) return a;
    const double hi = a > b ? a : b;
    const double lo = a > b ? b : a;
    return hi + std::log1p(std::exp(lo - hi));
}

/// Streaming log-domain accumulator: collects sum_i exp(l_i) with a running
/// maximum so the result keeps full relative precision at any magnitude.
class LogAccumulator {
public:
    void add_log(double l) {
        if (l == kNegInf) return;
        if (l > max_) {
            if (max_ == kNegInf) {
                max_ = l;
                sum_ = 1.0;
                return;
            }
            sum_ = sum_ * std::exp(max_ - l) + 1.0;
            max_ = l;
        } else {
            sum_ += std::exp(l - max_);
        }
    }
    double log_total() const {
        return max_ == kNegInf ? kNegInf : max_ + std::log(sum_);
    }

private:
    double max_ = kNegInf;
    double sum_ = 0.0;
};

/// Fixed-order pairwise (cascade) summation. Deterministic for a given input
/// order regardless of threading, and with O(log n) error growth.
double pairwise_sum(std::span<const double> values);

/// log n!
inline double log_factorial(long long n) { return std::lgamma(static_cast<double>(n) + 1.0); }

/// log C(n, k); -inf outside the support 0 <= k <= n.
inline double log_choose(long long n, long long k) {
    if (k < 0 || k > n) return kNegInf;
    return log_factorial(n) - log_factorial(k) - log_factorial(n - k);
}

/// log Poisson pmf; mean == 0 is the point mass at n = 0.
inline double log_poisson_pmf(long long n, double mean) {
    if (n < 0) return kNegInf;
    if (mean <= 0.0) return n == 0 ? 0.0 : kNegInf;
    return static_cast<double>(n) * std::log(mean) - mean - log_factorial(n);
}

/// Fills out[0..n_max] with Poisson pmf values in the linear domain, anchored
/// at the mode and extended by the two-term recurrence. Entries that underflow
/// double precision are exactly zero.
void poisson_pmf_row(double mean, int n_max, double* out);

/// Golden-section refinement of a scalar minimum inside [lo, hi].
double golden_section_min(double lo, double hi, int iters, const std::function<double(double)>& f);

} // namespace photonlab

#endif
