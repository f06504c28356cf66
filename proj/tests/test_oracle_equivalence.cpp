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
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "photonlab/engines.hpp"
#include "photonlab/numeric.hpp"
#include "photonlab/rng.hpp"

using namespace photonlab;

namespace {

DetectorArray random_array(Rng& rng) {
    const int m_count = 1 + static_cast<int>(rng.next_u64() % 3);
    while (true) {
        std::vector<DetectorSpec> specs;
        for (int m = 0; m < m_count; ++m) {
            const double scale = 0.85 / m_count;
            double xi = rng.next_double();
            if (rng.next_u64() % 3 == 0) xi = 1.0;  // exercise the rank-1 branch often
            if (rng.next_u64() % 7 == 0) xi = 0.0;
            specs.push_back({0.05 + scale * rng.next_double(), 0.05 + scale * rng.next_double(), xi,
                             2.0 * kPi * rng.next_double() - kPi});
        }
        DetectorArray arr(std::move(specs));
        double eig[2];
        cd vecs[2][2];
        detail::hermitian_eig2(arr.sum_matrix(), eig, vecs);
        if (eig[0] <= 0.999) return arr;
    }
}

} // namespace

TEST_CASE("oracle reproduces the single-photon identity") {
    const DetectorArray one({{0.3, 0.2, 1.0, 0.0}});
    const auto state = TwoModeState::product_number(1, 0);
    const int n1[] = {1};
    CHECK(brute_force_oracle(one, state, n1) == doctest::Approx(0.3).epsilon(1e-12));
    const int n0[] = {0};
    CHECK(brute_force_oracle(one, state, n0) == doctest::Approx(0.7).epsilon(1e-12));

    const auto vac = TwoModeState::product_number(0, 0);
    CHECK(brute_force_oracle(one, vac, n0) == doctest::Approx(1.0));
}

TEST_CASE("fock engine matches the oracle on random configurations") {
    Rng rng(2026);
    for (int trial = 0; trial < 6; ++trial) {
        const DetectorArray arr = random_array(rng);
        for (const auto [na, nb] : {std::pair{1, 1}, std::pair{2, 1}, std::pair{2, 2}}) {
            const auto pair = SourcePair::independent(SourceSpec::number_state(na),
                                                      SourceSpec::number_state(nb));
            const auto grid = default_grid(arr, pair);
            const auto dist = fock_joint(arr, pair, grid);
            const auto state = TwoModeState::product_number(na, nb);
            for (std::size_t flat = 0; flat < dist.log_probs.size(); ++flat) {
                const OutcomeVector n = dist.grid.unflatten(flat);
                const double expect = brute_force_oracle(arr, state, n);
                CHECK(std::abs(std::exp(dist.log_probs[flat]) - expect) < 1e-10);
            }
        }
    }
}

TEST_CASE("fock engine matches the oracle on entangled common sources") {
    Rng rng(515);
    for (int trial = 0; trial < 4; ++trial) {
        const DetectorArray arr = random_array(rng);
        const double c2 = 0.2 + 0.6 * rng.next_double();
        const double delta = 2.0 * kPi * rng.next_double() - kPi;
        const long long n = 1 + static_cast<long long>(rng.next_u64() % 4);
        const auto pair = SourcePair::common_number(n, std::sqrt(c2), std::sqrt(1.0 - c2), delta);
        const auto grid = default_grid(arr, pair);
        const auto dist = fock_joint(arr, pair, grid);
        const auto state = TwoModeState::common_number(*pair.common_number_pair());
        for (std::size_t flat = 0; flat < dist.log_probs.size(); ++flat) {
            const OutcomeVector outc = dist.grid.unflatten(flat);
            const double expect = brute_force_oracle(arr, state, outc);
            CHECK(std::abs(std::exp(dist.log_probs[flat]) - expect) < 1e-10);
        }
    }
}

TEST_CASE("oracle handles mixed diagonal inputs") {
    const DetectorArray arr({{0.3, 0.2, 1.0, 0.0}, {0.2, 0.3, 1.0, 0.7 * kPi}});
    const auto da = SourceSpec::binomial(0.5, 1.0).number_distribution();
    const auto db = SourceSpec::number_state(2).number_distribution();
    const auto state = TwoModeState::diagonal_product(da, db, 4);
    const auto pair = SourcePair::independent(SourceSpec::binomial(0.5, 1.0), SourceSpec::number_state(2));
    const auto grid = default_grid(arr, pair);
    const auto dist = fock_joint(arr, pair, grid);
    for (std::size_t flat = 0; flat < dist.log_probs.size(); ++flat) {
        const OutcomeVector n = dist.grid.unflatten(flat);
        CHECK(std::abs(std::exp(dist.log_probs[flat]) - brute_force_oracle(arr, state, n)) < 1e-10);
    }
}

TEST_CASE("oracle rejects oversized problems") {
    CHECK_THROWS_AS(TwoModeState::product_number(10, 10), DomainError);
}
