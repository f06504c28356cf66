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

// e^{-250} 250^250 / 250!, evaluated with 40-digit arithmetic beforehand.
static constexpr double kPoisson250At250 = 0.025222916184530141;

namespace {

DetectorArray paper_two() {
    return DetectorArray({{0.3, 0.2, 1.0, 0.0}, {0.2, 0.3, 1.0, 0.7 * kPi}});
}

SourcePair poisson_pair(double na, double nb) {
    return SourcePair::independent(SourceSpec::poissonian(na), SourceSpec::poissonian(nb));
}

} // namespace

TEST_CASE("meanfield joint") {
    const DetectorArray one({{0.5, 0.5, 1.0, 0.0}});
    OutcomeGrid grid{{AxisRange{0, 0}}};
    const auto vac = meanfield_joint(one, 0.0, 0.0, 0.3, grid);
    CHECK(vac.at(std::vector<int>{0}) == 1.0);

    // Single detector at its mean: the Poisson pmf evaluated in the log domain
    // matches the arbitrary-precision value.
    const DetectorArray d1({{0.3, 0.2, 1.0, 0.0}});
    OutcomeGrid g2{{AxisRange{250, 250}}};
    // delta chosen so n_bar = 250: cos(delta) = 0 -> delta = pi/2.
    const auto mf = meanfield_joint(d1, 500.0, 500.0, kPi / 2.0, g2);
    CHECK(mf.at(std::vector<int>{250}) == doctest::Approx(kPoisson250At250).epsilon(1e-12));
}

TEST_CASE("default grid rule") {
    const auto grid = default_grid(paper_two(), poisson_pair(500.0, 500.0));
    // max n_bar = 250 + 2 sqrt(150*100) = 494.949; + 10 sqrt + 10 -> ceil = 728.
    CHECK(grid.axes[0].hi == 728);
    CHECK(grid.axes[0].lo == 0);

    // Finite-support inputs clamp to the total photon number.
    const auto fock_pair = SourcePair::independent(SourceSpec::number_state(3),
                                                   SourceSpec::number_state(2));
    const auto fg = default_grid(paper_two(), fock_pair);
    CHECK(fg.axes[0].hi == 5);
}

TEST_CASE("phase average with zero visibility is the product of Poissons") {
    const DetectorArray arr({{0.25, 0.15, 0.0, 0.4}, {0.2, 0.3, 0.0, -1.0}});
    const auto pair = poisson_pair(30.0, 20.0);
    const auto grid = default_grid(arr, pair);
    const auto dist = phase_average_joint(arr, pair, grid);

    for (int n1 : {0, 3, 10, 17}) {
        for (int n2 : {0, 5, 12}) {
            const double expect = std::exp(log_poisson_pmf(n1, 0.25 * 30 + 0.15 * 20) +
                                           log_poisson_pmf(n2, 0.2 * 30 + 0.3 * 20));
            CHECK(dist.at(std::vector<int>{n1, n2}) == doctest::Approx(expect).epsilon(1e-12));
        }
    }
}

TEST_CASE("phase average marginal of the reference configuration") {
    const DetectorArray d1({{0.3, 0.2, 1.0, 0.0}});
    const auto pair = poisson_pair(500.0, 500.0);
    const auto grid = default_grid(d1, pair);
    const auto dist = phase_average_joint(d1, pair, grid);

    CHECK(dist.moment(0) == doctest::Approx(250.0).epsilon(1e-6 / 250.0));
    CHECK(dist.at(std::vector<int>{650}) < 1e-6);
    CHECK(std::abs(1.0 - dist.total_mass()) < 1e-9);

    // Roughly flat across the mean-field range.
    for (int n : {30, 100, 250, 400, 460})
        CHECK(dist.at(std::vector<int>{n}) > 0.5e-3);
}

TEST_CASE("reduction relation at fixed quadrature order") {
    const auto pair = poisson_pair(40.0, 30.0);
    EngineOptions opts;
    opts.fixed_delta_nodes = 256;

    const auto grid2 = default_grid(paper_two(), pair);
    const auto joint2 = phase_average_joint(paper_two(), pair, grid2, opts);

    const DetectorArray first({paper_two()[0]});
    OutcomeGrid grid1{{grid2.axes[0]}};
    const auto joint1 = phase_average_joint(first, pair, grid1, opts);

    const int keep[] = {0};
    const auto reduced = marginal(joint2, keep);
    for (int n = 0; n <= grid1.axes[0].hi; ++n) {
        const double a = reduced.at(std::vector<int>{n});
        const double b = joint1.at(std::vector<int>{n});
        CHECK(std::abs(a - b) < 1e-12);
    }
}

TEST_CASE("phase average quadrature reports and non-convergence") {
    const auto pair = poisson_pair(200.0, 200.0);
    const DetectorArray d1({{0.3, 0.2, 1.0, 0.0}});
    const auto grid = default_grid(d1, pair);

    const auto dist = phase_average_joint(d1, pair, grid);
    CHECK(dist.quad.delta_converged);
    CHECK(dist.quad.delta_nodes >= 128);
    CHECK(dist.quad.delta_change < 1e-10);

    EngineOptions strangled;
    strangled.delta_nodes_max = 128;
    strangled.delta_tol = 1e-16;
    CHECK_THROWS_AS(phase_average_joint(d1, pair, grid, strangled), NonConvergenceError);
}

TEST_CASE("radial engine: thermal against the Bose-Einstein closed form") {
    const DetectorArray one({{0.3, 0.2, 1.0, 0.0}});
    const auto pair = SourcePair::independent(SourceSpec::thermal(40.0), SourceSpec::poissonian(0.0));
    OutcomeGrid grid{{AxisRange{0, 120}}};
    const auto dist = radial_phase_average_joint(one, pair, grid);

    const double nu = 0.3 * 40.0;  // R_aa Nbar
    // Frozen reference values from 40-digit arithmetic.
    CHECK(dist.at(std::vector<int>{0}) == doctest::Approx(0.076923076923076927).epsilon(1e-10));
    CHECK(dist.at(std::vector<int>{5}) == doctest::Approx(0.051552070943764296).epsilon(1e-10));
    CHECK(dist.at(std::vector<int>{12}) == doctest::Approx(0.029438208205930047).epsilon(1e-10));
    CHECK(dist.at(std::vector<int>{30}) == doctest::Approx(0.0069693690103615309).epsilon(1e-10));
    for (int n : {1, 7, 20, 60}) {
        const double expect = std::exp(static_cast<double>(n) * std::log(nu / (1.0 + nu)) - std::log1p(nu));
        CHECK(dist.at(std::vector<int>{n}) == doctest::Approx(expect).epsilon(1e-8));
    }
}

TEST_CASE("radial engine limits") {
    const auto arr = paper_two();
    // Q -> 0 delta nodes reproduce the Poissonian phase average.
    const auto limit_pair = SourcePair::independent(SourceSpec::super_poissonian(0.0, 60.0),
                                                    SourceSpec::super_poissonian(0.0, 60.0));
    const auto pois_pair = poisson_pair(60.0, 60.0);
    const auto grid = default_grid(arr, pois_pair);
    const auto radial = radial_phase_average_joint(arr, limit_pair, grid);
    const auto phase = phase_average_joint(arr, pois_pair, grid);
    double sup = 0.0;
    for (std::size_t i = 0; i < radial.log_probs.size(); ++i)
        sup = std::max(sup, std::abs(std::exp(radial.log_probs[i]) - std::exp(phase.log_probs[i])));
    CHECK(sup < 1e-8);

    // Q = 1 is the thermal state, pointwise.
    const auto q1 = SourcePair::independent(SourceSpec::super_poissonian(1.0, 25.0),
                                            SourceSpec::poissonian(0.0));
    const auto th = SourcePair::independent(SourceSpec::thermal(25.0), SourceSpec::poissonian(0.0));
    const DetectorArray one({{0.3, 0.2, 1.0, 0.0}});
    OutcomeGrid g1{{AxisRange{0, 60}}};
    const auto dq = radial_phase_average_joint(one, q1, g1);
    const auto dt = radial_phase_average_joint(one, th, g1);
    for (std::size_t i = 0; i < dq.log_probs.size(); ++i)
        CHECK(std::exp(dq.log_probs[i]) == doctest::Approx(std::exp(dt.log_probs[i])).epsilon(1e-12));
}

TEST_CASE("incoherent combination") {
    // Convolving with a point mass at zero is the identity.
    const DetectorArray one({{0.3, 0.2, 1.0, 0.0}});
    const auto pa = poisson_pair(10.0, 0.0);
    OutcomeGrid g{{AxisRange{0, 40}}};
    const auto da = phase_average_joint(one, pa, g);
    JointDistribution point;
    point.grid = OutcomeGrid{{AxisRange{0, 0}}};
    point.log_probs = {0.0};
    point.engine_tag = "point";
    const auto same = incoherent_joint(da, point);
    for (int n = 0; n <= 40; ++n)
        CHECK(same.at(std::vector<int>{n}) == doctest::Approx(da.at(std::vector<int>{n})).epsilon(1e-12));

    // Poisson(3) (x) Poisson(5) = Poisson(8).
    const auto d3 = phase_average_joint(one, poisson_pair(10.0, 0.0), g);   // mean 3
    const auto d5 = phase_average_joint(one, poisson_pair(0.0, 25.0), g);   // mean 5
    const auto d8 = incoherent_joint(d3, d5);
    for (int n = 0; n <= 60; ++n)
        CHECK(std::abs(d8.at(std::vector<int>{n}) - std::exp(log_poisson_pmf(n, 8.0))) < 1e-10);

    CHECK_THROWS_AS(incoherent_joint(da, phase_average_joint(paper_two(), poisson_pair(5.0, 5.0),
                                                             default_grid(paper_two(), poisson_pair(5.0, 5.0)))),
                    ShapeError);
}

TEST_CASE("generating function") {
    const auto arr = paper_two();
    std::vector<cd> z0 = {cd(0.0), cd(0.0)};
    CHECK(std::abs(generating_function_fock(arr, 4, 3, z0) - cd(1.0)) < 1e-12);

    // Single photon, single detector: F(z) = 1 + z R_aa.
    const DetectorArray one({{0.3, 0.2, 1.0, 0.0}});
    std::vector<cd> zm1 = {cd(-1.0)};
    std::vector<cd> z2 = {cd(0.7)};
    CHECK(std::abs(generating_function_fock(one, 1, 0, zm1) - cd(0.7)) < 1e-12);
    CHECK(std::abs(generating_function_fock(one, 1, 0, z2) - cd(1.21)) < 1e-12);
    // Derivative at z = -1 recovers P(1) = R_aa; F is linear here.
    const cd deriv = generating_function_fock(one, 1, 0, z2) - generating_function_fock(one, 1, 0, zm1);
    CHECK(std::abs(deriv / (z2[0] - zm1[0]) - cd(0.3)) < 1e-12);

    // F(-1, ..., -1) equals the zero-count probability from the Fock engine.
    const auto pair = SourcePair::independent(SourceSpec::number_state(2), SourceSpec::number_state(2));
    const auto grid = default_grid(arr, pair);
    const auto dist = fock_joint(arr, pair, grid);
    std::vector<cd> zm = {cd(-1.0), cd(-1.0)};
    const cd f = generating_function_fock(arr, 2, 2, zm);
    CHECK(std::abs(f.real() - dist.at(std::vector<int>{0, 0})) < 1e-10);
    CHECK(std::abs(f.imag()) < 1e-12);
}

TEST_CASE("additivity over mixtures") {
    const auto arr = paper_two();
    // Two-component diagonal mixture versus the weighted component sum.
    std::vector<double> probs = {0.3, 0.0, 0.7};
    const NumberDistribution mix(2, std::move(probs), 2 * 0.3 + 4 * 0.7, 0.84, 0.0);
    const auto mixture = SourcePair::independent(SourceSpec::custom_diagonal(mix),
                                                 SourceSpec::number_state(1));
    const auto grid = default_grid(arr, mixture);
    const auto full = fock_joint(arr, mixture, grid);

    const auto c1 = fock_joint(arr, SourcePair::independent(SourceSpec::number_state(2),
                                                            SourceSpec::number_state(1)), grid);
    const auto c2 = fock_joint(arr, SourcePair::independent(SourceSpec::number_state(4),
                                                            SourceSpec::number_state(1)), grid);
    for (std::size_t i = 0; i < full.log_probs.size(); ++i) {
        const double expect = 0.3 * std::exp(c1.log_probs[i]) + 0.7 * std::exp(c2.log_probs[i]);
        CHECK(std::exp(full.log_probs[i]) == doctest::Approx(expect).epsilon(1e-12).scale(1.0));
    }
}

TEST_CASE("engine selection") {
    CHECK(select_engine(poisson_pair(5.0, 5.0)) == EngineKind::PhaseAverage);
    CHECK(select_engine(SourcePair::independent(SourceSpec::thermal(5.0), SourceSpec::poissonian(5.0))) ==
          EngineKind::Radial);
    CHECK(select_engine(SourcePair::independent(SourceSpec::number_state(5), SourceSpec::binomial(0.5, 2.0))) ==
          EngineKind::Fock);
    CHECK(select_engine(SourcePair::common_number(4, 0.6, 0.8, 0.0)) == EngineKind::Fock);
    CHECK(select_engine(SourcePair::referenced_phase(SourceSpec::thermal(2.0), SourceSpec::poissonian(1.0), 0.4)) ==
          EngineKind::Radial);
    CHECK_THROWS_AS(select_engine(SourcePair::independent(
                        SourceSpec::custom_radial(RadialDensity::tabulated({1.0}, {1.0})),
                        SourceSpec::number_state(2))),
                    DomainError);
}
