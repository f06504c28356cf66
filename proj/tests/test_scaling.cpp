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

#include "photonlab/numeric.hpp"
#include "photonlab/scaling.hpp"

using namespace photonlab;

// C(400, 200) / 2^400, evaluated with 60-digit arithmetic beforehand.
static constexpr double kBinom400_200Half = 0.039869301963792928;

TEST_CASE("binomial weight") {
    CHECK(binomial_weight(2, 1, 0.5) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(binomial_weight(4, 4, 1.0) == 1.0);
    CHECK(binomial_weight(4, 2, 1.0) == 0.0);
    CHECK(binomial_weight(3, 4, 0.5) == 0.0);
    CHECK(binomial_weight(3, -1, 0.5) == 0.0);
    CHECK(binomial_weight(400, 200, 0.5) == doctest::Approx(kBinom400_200Half).epsilon(1e-12));
}

TEST_CASE("effective distribution of a number state is binomial") {
    const auto in = SourceSpec::number_state(30).number_distribution();
    const auto out = effective_distribution(in, 0.35);
    for (int n = 0; n <= 30; ++n)
        CHECK(out.pmf(n) == doctest::Approx(binomial_weight(30, n, 0.35)).epsilon(1e-12));
}

TEST_CASE("Poissonian form is preserved under thinning") {
    const auto in = SourceSpec::poissonian(10.0).number_distribution();
    const auto out = effective_distribution(in, 0.5);
    const SourceSpec expect = SourceSpec::poissonian(5.0);
    for (int n = 0; n <= out.max_n(); ++n)
        CHECK(out.pmf(n) == doctest::Approx(expect.pmf(n)).epsilon(1e-12).scale(1.0));
}

TEST_CASE("two-number mixture thins to a mixture of binomials") {
    const auto in = SourceSpec::two_number_mixture(100.0, 50.0).number_distribution();
    const auto out = effective_distribution(in, 0.9);
    for (int n = 40; n <= 150; n += 7) {
        const double expect = 0.5 * binomial_weight(50, n, 0.9) + 0.5 * binomial_weight(150, n, 0.9);
        CHECK(out.pmf(n) == doctest::Approx(expect).epsilon(1e-12).scale(1.0));
    }
    CHECK(out.mean() == doctest::Approx(90.0));
}

TEST_CASE("effective moments") {
    CHECK(effective_moments(500.0, 500.0, 0.3) == std::pair{150.0, 150.0});
    CHECK(effective_moments(200.0, 0.0, 0.5) == std::pair{100.0, 50.0});
    CHECK(effective_moments(123.0, 456.0, 1.0) == std::pair{123.0, 456.0});

    const auto thinned = effective_distribution(SourceSpec::number_state(200).number_distribution(), 0.5);
    CHECK(thinned.summed_mean() == doctest::Approx(100.0).epsilon(1e-9));
    CHECK(thinned.summed_variance() == doctest::Approx(50.0).epsilon(1e-9));
}

TEST_CASE("moments commute with thinning") {
    for (const auto& s : {SourceSpec::poissonian(25.0), SourceSpec::thermal(8.0),
                          SourceSpec::binomial(0.4, 20.0)}) {
        const double q = 0.37;
        const auto out = effective_distribution(s.number_distribution(), q);
        const auto [m, v] = effective_moments(s.mean(), s.variance(), q);
        CHECK(out.summed_mean() == doctest::Approx(m).epsilon(1e-9));
        CHECK(out.summed_variance() == doctest::Approx(v).epsilon(1e-9).scale(std::max(1.0, v)));
    }
}

TEST_CASE("thinning composes as a semigroup") {
    const auto base = SourceSpec::poissonian(30.0).number_distribution();
    const double q1 = 0.6, q2 = 0.45;
    const auto once = effective_distribution(base, q1 * q2);
    const auto twice = effective_distribution(effective_distribution(base, q1), q2);
    for (int n = 0; n <= once.max_n(); ++n)
        CHECK(twice.pmf(n) == doctest::Approx(once.pmf(n)).epsilon(1e-10).scale(1e-2));

    const auto nbase = SourceSpec::number_state(40).number_distribution();
    const auto n_once = effective_distribution(nbase, q1 * q2);
    const auto n_twice = effective_distribution(effective_distribution(nbase, q1), q2);
    for (int n = 0; n <= 40; ++n)
        CHECK(n_twice.pmf(n) == doctest::Approx(n_once.pmf(n)).epsilon(1e-10).scale(1e-2));
}

TEST_CASE("sub-Poissonian closure") {
    for (double ratio : {0.0, 0.2, 0.5, 0.8, 0.999}) {
        for (double q : {0.05, 0.3, 0.7, 1.0}) {
            const auto [m, v] = effective_moments(100.0, 100.0 * ratio, q);
            CHECK(v / m == doctest::Approx(q * ratio + 1.0 - q).epsilon(1e-12));
            CHECK(v < m + 1e-12);
        }
    }
}

TEST_CASE("scale detectors") {
    const DetectorArray arr({{0.3, 0.2, 1.0, 0.0}, {0.2, 0.3, 1.0, 0.7 * kPi}});
    const DetectorArray same = scale_detectors(arr, 1.0);
    CHECK(same[0].r_aa() == 0.3);
    const DetectorArray scaled = scale_detectors(arr, 0.5);
    CHECK(scaled[0].r_aa() == doctest::Approx(0.6));
    CHECK(scaled[1].r_bb() == doctest::Approx(0.6));
    CHECK(scaled[1].xi() == 1.0);
    CHECK(scaled[1].theta() == arr[1].theta());
    CHECK(scale_detectors(arr, 0.4)[0].r_aa() == doctest::Approx(0.75));
    CHECK_THROWS_AS(scale_detectors(arr, 1.5), DomainError);
    CHECK_THROWS_AS(ScalingTransform(0.0), DomainError);
}

TEST_CASE("equivalence check at small scale") {
    const DetectorArray arr({{0.3, 0.2, 1.0, 0.0}, {0.2, 0.3, 1.0, 0.7 * kPi}});
    const auto sources = SourcePair::independent(SourceSpec::number_state(8),
                                                 SourceSpec::number_state(8));
    const auto report = equivalence_check(arr, sources, 0.5, EngineKind::Fock);
    CHECK(report.sup_norm < 1e-10);

    // q = 1 compares a configuration against itself.
    const auto identity = equivalence_check(arr, sources, 1.0, EngineKind::Fock);
    CHECK(identity.sup_norm == 0.0);
}

TEST_CASE("rational parsing") {
    CHECK(Rational::parse("1/20").value() == doctest::Approx(0.05));
    CHECK(Rational::parse("3").value() == 3.0);
    CHECK(Rational::parse("0.5").num == 1);
    CHECK(Rational::parse("0.5").den == 2);
    CHECK_THROWS(Rational::parse("1/0"));
}
