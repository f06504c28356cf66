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
#include <cmath>
#include <complex>
#include <map>

#include "photonlab/engines.hpp"

namespace photonlab {

// ---------------------------------------------------------------------------
// TwoModeState

TwoModeState::TwoModeState(int max_total) : max_total_(max_total) {
    if (max_total_ < 0 || max_total_ > 12)
        throw DomainError("TwoModeState: dense operator algebra supports totals up to 12");
    for (int t = 0; t <= max_total_; ++t)
        for (int na = 0; na <= t; ++na) basis_.emplace_back(na, t - na);
    rho_.assign(basis_.size() * basis_.size(), cd(0.0));
}

int TwoModeState::index(int n_a, int n_b) const {
    const int t = n_a + n_b;
    if (n_a < 0 || n_b < 0 || t > max_total_) return -1;
    return t * (t + 1) / 2 + n_a;
}

TwoModeState TwoModeState::product_number(int n_a, int n_b) {
    TwoModeState s(n_a + n_b);
    const int i = s.index(n_a, n_b);
    s.rho_[static_cast<std::size_t>(i) * s.basis_.size() + static_cast<std::size_t>(i)] = cd(1.0);
    return s;
}

TwoModeState TwoModeState::pure(int max_total, const std::map<std::pair<int, int>, cd>& amplitudes) {
    TwoModeState s(max_total);
    std::vector<cd> psi(s.basis_.size(), cd(0.0));
    for (const auto& [nm, amp] : amplitudes) {
        const int i = s.index(nm.first, nm.second);
        if (i < 0) throw DomainError("TwoModeState::pure: amplitude outside the truncated basis");
        psi[static_cast<std::size_t>(i)] = amp;
    }
    for (std::size_t i = 0; i < psi.size(); ++i)
        for (std::size_t j = 0; j < psi.size(); ++j)
            s.rho_[i * psi.size() + j] = psi[i] * std::conj(psi[j]);
    return s;
}

TwoModeState TwoModeState::diagonal_product(const NumberDistribution& a, const NumberDistribution& b,
                                            int max_total) {
    TwoModeState s(max_total);
    double included = 0.0;
    for (int na = a.offset(); na <= a.max_n(); ++na) {
        for (int nb = b.offset(); nb <= b.max_n(); ++nb) {
            const int i = s.index(na, nb);
            if (i < 0) continue;
            const double w = a.pmf(na) * b.pmf(nb);
            s.rho_[static_cast<std::size_t>(i) * s.basis_.size() + static_cast<std::size_t>(i)] += w;
            included += w;
        }
    }
    if (included < 1.0 - 1e-9)
        throw DomainError("TwoModeState::diagonal_product: truncation too small for the given weights");
    return s;
}

TwoModeState TwoModeState::common_number(const CommonNumberPair& pair) {
    const auto amps = common_source_amplitudes(pair);
    std::map<std::pair<int, int>, cd> m;
    for (long long k = 0; k <= pair.n; ++k)
        m[{static_cast<int>(k), static_cast<int>(pair.n - k)}] = amps[static_cast<std::size_t>(k)];
    return pure(static_cast<int>(pair.n), m);
}

// ---------------------------------------------------------------------------
// Normal-ordered POVM series. Everything is carried in long double: the
// alternating sum over the e^{-I} expansion cancels strongly, and the extra
// mantissa keeps the oracle comfortably below the 1e-10 comparison budget.

namespace {

using cld = std::complex<long double>;

long double falling(int n, int k) {
    long double f = 1.0L;
    for (int i = 0; i < k; ++i) f *= static_cast<long double>(n - i);
    return f;
}

// Nonzero density-matrix entries, extracted once so moment sums only touch
// the occupied part of the truncated basis.
struct SparseRho {
    struct Entry {
        int na, nb, ma, mb;
        cld value;
    };
    std::vector<Entry> entries;
    int max_total;

    explicit SparseRho(const TwoModeState& state) : max_total(state.max_total()) {
        const auto& basis = state.basis();
        for (int i = 0; i < state.dim(); ++i)
            for (int j = 0; j < state.dim(); ++j) {
                const cd r = state.rho(i, j);
                if (r == cd(0.0)) continue;
                entries.push_back({basis[static_cast<std::size_t>(i)].first,
                                   basis[static_cast<std::size_t>(i)].second,
                                   basis[static_cast<std::size_t>(j)].first,
                                   basis[static_cast<std::size_t>(j)].second,
                                   cld(r.real(), r.imag())});
            }
    }

    cld moment(int pa, int pb, int qa, int qb) const {
        cld total(0.0L);
        for (const auto& e : entries) {
            if (e.na < qa || e.nb < qb) continue;
            if (e.ma != e.na - qa + pa || e.mb != e.nb - qb + pb) continue;
            total += e.value * std::sqrt(falling(e.na, qa) * falling(e.nb, qb) *
                                         falling(e.ma, pa) * falling(e.mb, pb));
        }
        return total;
    }
};

// Monomial exponents (pa, pb, qa, qb); totals stay <= 12 so a 6-bit field per
// exponent is roomy.
using Poly = std::map<int, cld>;

int pack(int pa, int pb, int qa, int qb) { return ((pa * 64 + pb) * 64 + qa) * 64 + qb; }

void mul_flux(Poly& poly, const Mat2c& r) {
    Poly next;
    const cld terms[4] = {cld(r.aa.real(), r.aa.imag()), cld(r.bb.real(), r.bb.imag()),
                          cld(r.ab.real(), r.ab.imag()), cld(r.ba.real(), r.ba.imag())};
    static constexpr int shift[4][4] = {
        {1, 0, 1, 0},  // a^dag a
        {0, 1, 0, 1},  // b^dag b
        {1, 0, 0, 1},  // a^dag b
        {0, 1, 1, 0},  // b^dag a
    };
    for (const auto& [key, coef] : poly) {
        const int qb = key % 64, qa = (key / 64) % 64, pb = (key / 4096) % 64, pa = key / 262144;
        for (int t = 0; t < 4; ++t) {
            if (terms[t] == cld(0.0L)) continue;
            next[pack(pa + shift[t][0], pb + shift[t][1], qa + shift[t][2], qb + shift[t][3])] +=
                coef * terms[t];
        }
    }
    poly.swap(next);
}

long double normal_ordered_expectation(const SparseRho& rho, const std::vector<Mat2c>& rs,
                                       const std::vector<int>& powers) {
    Poly poly;
    poly[pack(0, 0, 0, 0)] = cld(1.0L);
    for (std::size_t m = 0; m < rs.size(); ++m)
        for (int i = 0; i < powers[m]; ++i) mul_flux(poly, rs[m]);
    cld total(0.0L);
    for (const auto& [key, coef] : poly) {
        const int qb = key % 64, qa = (key / 64) % 64, pb = (key / 4096) % 64, pa = key / 262144;
        if (qa + qb > rho.max_total) continue;
        total += coef * rho.moment(pa, pb, qa, qb);
    }
    return total.real();
}

} // namespace

struct OracleContext::Impl {
    std::vector<Mat2c> rs;
    SparseRho rho;
    int max_total;
    // <: prod I_m^{k_m} :> memoized by the packed power vector.
    mutable std::map<std::vector<int>, long double> cache;

    Impl(const DetectorArray& array, const TwoModeState& state)
        : rho(state), max_total(state.max_total()) {
        rs.reserve(static_cast<std::size_t>(array.size()));
        for (const auto& spec : array.specs()) rs.push_back(spec.matrix());
    }

    long double expectation(const std::vector<int>& k) const {
        const auto it = cache.find(k);
        if (it != cache.end()) return it->second;
        const long double value = normal_ordered_expectation(rho, rs, k);
        cache.emplace(k, value);
        return value;
    }
};

OracleContext::OracleContext(const DetectorArray& array, const TwoModeState& state)
    : impl_(std::make_unique<Impl>(array, state)) {}

OracleContext::~OracleContext() = default;

double OracleContext::probability(std::span<const int> outcome) const {
    if (outcome.size() != impl_->rs.size())
        throw ShapeError("oracle: outcome length must match detector count");
    int n_sum = 0;
    for (int n : outcome) {
        if (n < 0) throw DomainError("oracle: negative count");
        n_sum += n;
    }
    if (n_sum > impl_->max_total) return 0.0;

    // P(n) = sum_j prod_m [(-1)^{j_m} / (n_m! j_m!)] <: prod_m I_m^{n_m + j_m} :>,
    // truncated exactly: moments vanish once the total power exceeds the
    // photon content of the state.
    const int budget = impl_->max_total - n_sum;
    const std::size_t m_count = outcome.size();
    std::vector<int> j(m_count, 0), k(m_count);
    long double prob = 0.0L;
    while (true) {
        int j_sum = 0;
        for (std::size_t m = 0; m < m_count; ++m) j_sum += j[m];
        if (j_sum <= budget) {
            long double w = (j_sum % 2 == 0) ? 1.0L : -1.0L;
            for (std::size_t m = 0; m < m_count; ++m) {
                w /= falling(outcome[m], outcome[m]);  // n_m!
                w /= falling(j[m], j[m]);              // j_m!
                k[m] = outcome[m] + j[m];
            }
            prob += w * impl_->expectation(k);
        }
        // Odometer over j with per-digit bound `budget`.
        std::size_t pos = 0;
        while (pos < m_count) {
            if (++j[pos] <= budget) break;
            j[pos] = 0;
            ++pos;
        }
        if (pos == m_count) break;
    }
    return static_cast<double>(prob);
}

double brute_force_oracle(const DetectorArray& array, const TwoModeState& state,
                          std::span<const int> outcome) {
    return OracleContext(array, state).probability(outcome);
}

// ---------------------------------------------------------------------------
// Closed-form generating function for |N_a, N_b>.

namespace {
cd int_pow(cd z, long long n) {
    cd acc(1.0);
    while (n > 0) {
        if (n & 1) acc *= z;
        z *= z;
        n >>= 1;
    }
    return acc;
}
} // namespace

std::complex<double> generating_function_fock(const DetectorArray& array, long long n_a, long long n_b,
                                              std::span<const std::complex<double>> z) {
    if (static_cast<int>(z.size()) != array.size())
        throw ShapeError("generating_function_fock: one z per detector required");
    if (n_a < 0 || n_b < 0 || n_a + n_b > 300)
        throw DomainError("generating_function_fock: supported for small photon numbers");

    Mat2c m{cd(1.0), cd(0.0), cd(0.0), cd(1.0)};
    for (int i = 0; i < array.size(); ++i) {
        const Mat2c r = array[i].matrix();
        m.aa += z[static_cast<std::size_t>(i)] * r.aa;
        m.ab += z[static_cast<std::size_t>(i)] * r.ab;
        m.ba += z[static_cast<std::size_t>(i)] * r.ba;
        m.bb += z[static_cast<std::size_t>(i)] * r.bb;
    }

    cd total(0.0);
    const long long k_max = std::min(n_a, n_b);
    for (long long k = 0; k <= k_max; ++k) {
        const double logc = log_choose(n_a, k) + log_choose(n_b, k);
        total += std::exp(logc) * int_pow(m.aa, n_a - k) * int_pow(m.bb, n_b - k) *
                 int_pow(m.ab * m.ba, k);
    }
    return total;
}

} // namespace photonlab
