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

#include "photonlab/analysis.hpp"
#include "photonlab/engines.hpp"
#include "photonlab/numeric.hpp"

using namespace photonlab;

namespace {

DetectorArray paper_two() {
    return DetectorArray({{0.3, 0.2, 1.0, 0.0}, {0.2, 0.3, 1.0, 0.7 * kPi}});
}

} // namespace

TEST_CASE("vacuum and single-photon basics") {
    const DetectorArray one({{0.3, 0.2, 1.0, 0.0}});

    const auto vac = SourcePair::independent(SourceSpec::number_state(0), SourceSpec::number_state(0));
    OutcomeGrid g0{{AxisRange{0, 0}}};
    CHECK(fock_joint(one, vac, g0).at(std::vector<int>{0}) == doctest::Approx(1.0).epsilon(1e-14));

    const auto single = SourcePair::independent(SourceSpec::number_state(1), SourceSpec::number_state(0));
    OutcomeGrid g1{{AxisRange{0, 1}}};
    const auto dist = fock_joint(one, single, g1);
    CHECK(dist.at(std::vector<int>{1}) == doctest::Approx(0.3).epsilon(1e-13));
    CHECK(dist.at(std::vector<int>{0}) == doctest::Approx(0.7).epsilon(1e-13));
}

TEST_CASE("dense and slice paths agree") {
    const DetectorArray arrs[] = {
        paper_two(),
        DetectorArray({{0.3, 0.2, 0.6, 0.3}, {0.25, 0.35, 0.9, -1.1}}),
        DetectorArray({{0.5, 0.5, 0.0, 0.0}}),
    };
    for (const auto& arr : arrs) {
        for (const auto [na, nb] : {std::pair{6, 5}, std::pair{4, 0}, std::pair{0, 3}}) {
            const auto pair = SourcePair::independent(SourceSpec::number_state(na),
                                                      SourceSpec::number_state(nb));
            const auto grid = default_grid(arr, pair);
            EngineOptions dense_opts;
            dense_opts.fock_path = FockPath::Dense;
            EngineOptions slice_opts;
            slice_opts.fock_path = FockPath::Slice;
            const auto d = fock_joint(arr, pair, grid, dense_opts);
            const auto s = fock_joint(arr, pair, grid, slice_opts);
            for (std::size_t i = 0; i < d.log_probs.size(); ++i)
                CHECK(std::abs(std::exp(d.log_probs[i]) - std::exp(s.log_probs[i])) < 1e-12);
        }
    }
}

TEST_CASE("common-source paths agree and match the closed-form mean") {
    const auto arr = paper_two();
    const long long n = 14;
    const double c = std::sqrt(0.4), s = std::sqrt(0.6), delta = 1.234;
    const auto pair = SourcePair::common_number(n, c, s, delta);
    const auto grid = default_grid(arr, pair);

    EngineOptions dense_opts;
    dense_opts.fock_path = FockPath::Dense;
    EngineOptions slice_opts;
    slice_opts.fock_path = FockPath::Slice;
    const auto d = fock_joint(arr, pair, grid, dense_opts);
    const auto sl = fock_joint(arr, pair, grid, slice_opts);
    for (std::size_t i = 0; i < d.log_probs.size(); ++i)
        CHECK(std::abs(std::exp(d.log_probs[i]) - std::exp(sl.log_probs[i])) < 1e-12);

    // E[n_m] = n_bar_m(delta) with alpha = c sqrt(N), beta = e^{i delta} s sqrt(N).
    for (int m = 0; m < arr.size(); ++m) {
        const MeanPair means{arr[m].r_aa() * c * c * n, arr[m].r_bb() * s * s * n};
        const double expect = mean_count(arr[m], means, delta);
        CHECK(d.moment(m) == doctest::Approx(expect).epsilon(1e-9).scale(std::max(1.0, expect)));
    }

    // Variance: (Delta n)^2 = n_bar^2 (dN / N)^2 + n_bar (1 - n_bar / N) with dN = 0.
    {
        const int m = 0;
        const MeanPair means{arr[m].r_aa() * c * c * n, arr[m].r_bb() * s * s * n};
        const double nbar = mean_count(arr[m], means, delta);
        const double expect_var = nbar * (1.0 - nbar / static_cast<double>(n));
        std::vector<double> contrib(d.log_probs.size());
        // Second moment along axis m = 0 of the 2-D grid.
        const std::size_t w1 = static_cast<std::size_t>(grid.axes[1].size());
        for (std::size_t i = 0; i < d.log_probs.size(); ++i) {
            const double count = static_cast<double>(grid.axes[0].lo + static_cast<int>(i / w1));
            contrib[i] = count * count * std::exp(d.log_probs[i]);
        }
        const double second = pairwise_sum(contrib);
        const double var = second - d.moment(0) * d.moment(0);
        CHECK(var == doctest::Approx(expect_var).epsilon(1e-9).scale(std::max(1.0, expect_var)));
    }
}

TEST_CASE("photon-number conservation at production scale") {
    const auto arr = paper_two();
    const auto pair = SourcePair::independent(SourceSpec::number_state(30), SourceSpec::number_state(20));
    const auto grid = default_grid(arr, pair);
    const auto dist = fock_joint(arr, pair, grid);
    for (int m = 0; m < arr.size(); ++m) {
        const double expect = arr[m].r_aa() * 30.0 + arr[m].r_bb() * 20.0;
        CHECK(std::abs(dist.moment(m) - expect) < 1e-9);
    }
    CHECK(std::abs(1.0 - dist.total_mass()) <= dist.tail_bound + 1e-12);
}

TEST_CASE("source-swap symmetry") {
    const DetectorArray arr({{0.3, 0.2, 0.8, 0.5}, {0.15, 0.35, 1.0, -0.9}});
    DetectorArray swapped({{0.2, 0.3, 0.8, -0.5}, {0.35, 0.15, 1.0, 0.9}});
    const auto pair = SourcePair::independent(SourceSpec::binomial(0.5, 4.0), SourceSpec::number_state(5));
    const auto pair_swapped = SourcePair::independent(SourceSpec::number_state(5), SourceSpec::binomial(0.5, 4.0));
    const auto grid = default_grid(arr, pair);
    const auto d1 = fock_joint(arr, pair, grid);
    const auto d2 = fock_joint(swapped, pair_swapped, grid);
    for (std::size_t i = 0; i < d1.log_probs.size(); ++i)
        CHECK(std::abs(std::exp(d1.log_probs[i]) - std::exp(d2.log_probs[i])) < 1e-12);
}

TEST_CASE("phase average equals the Fock mixture for Poissonian sources") {
    const auto arr = paper_two();
    const double nbar = 8.0;
    const auto pois = SourcePair::independent(SourceSpec::poissonian(nbar), SourceSpec::poissonian(nbar));
    const auto grid = default_grid(arr, pois);
    const auto via_phase = phase_average_joint(arr, pois, grid);

    // The same state as an explicit truncated diagonal mixture.
    const auto mixture = SourcePair::independent(
        SourceSpec::custom_diagonal(SourceSpec::poissonian(nbar).number_distribution()),
        SourceSpec::custom_diagonal(SourceSpec::poissonian(nbar).number_distribution()));
    const auto via_fock = fock_joint(arr, mixture, grid);

    double sup = 0.0;
    for (std::size_t i = 0; i < via_phase.log_probs.size(); ++i)
        sup = std::max(sup, std::abs(std::exp(via_phase.log_probs[i]) - std::exp(via_fock.log_probs[i])));
    CHECK(sup < 1e-6);
}

TEST_CASE("slice path handles pinned axes") {
    const auto arr = paper_two();
    const auto pair = SourcePair::independent(SourceSpec::number_state(24), SourceSpec::number_state(24));
    const auto full_grid = default_grid(arr, pair);

    EngineOptions slice_opts;
    slice_opts.fock_path = FockPath::Slice;
    OutcomeGrid pinned = full_grid;
    pinned.axes[0] = {5, 5};
    const auto slice = fock_joint(arr, pair, pinned, slice_opts);
    const auto full = fock_joint(arr, pair, full_grid);
    for (int n2 = 0; n2 <= pinned.axes[1].hi; ++n2) {
        const double a = slice.at(std::vector<int>{5, n2});
        const double b = full.at(std::vector<int>{5, n2});
        CHECK(std::abs(a - b) < 1e-12);
    }
}

TEST_CASE("expensive gate") {
    const auto arr = paper_two();
    const auto pair = SourcePair::independent(SourceSpec::number_state(2000), SourceSpec::number_state(2000));
    const auto grid = default_grid(arr, pair);
    CHECK_THROWS_AS(fock_joint(arr, pair, grid), DomainError);

    // A pinned window of the same configuration stays under the gate.
    OutcomeGrid pinned = grid;
    pinned.axes[0] = {40, 40};
    pinned.axes[1] = {0, 120};
    CHECK_NOTHROW(fock_joint(arr, pair, pinned));
}
