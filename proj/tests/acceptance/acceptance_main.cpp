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

// End-to-end acceptance suite. Each criterion prints one PASS/FAIL line; the
// process exits nonzero when any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "photonlab/analysis.hpp"
#include "photonlab/engines.hpp"
#include "photonlab/numeric.hpp"
#include "photonlab/rng.hpp"
#include "photonlab/scaling.hpp"

using namespace photonlab;

namespace {

int g_failures = 0;

struct Criterion {
    std::string name;
    std::vector<std::string> notes;
    bool ok = true;

    explicit Criterion(std::string n) : name(std::move(n)) {}

    void expect(bool cond, const std::string& detail) {
        if (!cond) {
            ok = false;
            notes.push_back(detail);
        }
    }

    void run(const std::function<void(Criterion&)>& body) {
        const auto start = std::chrono::steady_clock::now();
        try {
            body(*this);
        } catch (const std::exception& e) {
            ok = false;
            notes.push_back(std::string("exception: ") + e.what());
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        std::printf("%-4s %s (%.1f s)\n", ok ? "PASS" : "FAIL", name.c_str(), secs);
        for (const auto& note : notes) std::printf("     - %s\n", note.c_str());
        std::fflush(stdout);
        if (!ok) ++g_failures;
    }
};

DetectorArray reference(int count) {
    std::vector<DetectorSpec> specs = {
        {0.3, 0.2, 1.0, 0.0},
        {0.2, 0.3, 1.0, 0.7 * kPi},
        {0.2, 0.3, 1.0, -0.5 * kPi},
    };
    specs.resize(static_cast<std::size_t>(count), specs[0]);
    return DetectorArray(std::move(specs));
}

SourcePair poisson_pair(double nbar) {
    return SourcePair::independent(SourceSpec::poissonian(nbar), SourceSpec::poissonian(nbar));
}

std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

// Conditional P^c(n2 | n1) for a two-detector run of the given engine.
JointDistribution conditional_n2(const DetectorArray& arr, const SourcePair& pair, int n1,
                                 EngineKind kind, const EngineOptions& opts, int n2_hi = -1) {
    OutcomeGrid grid = default_grid(arr, pair);
    grid.axes[0] = {n1, n1};
    if (n2_hi > 0) grid.axes[1].hi = n2_hi;
    const JointDistribution joint = auto_joint(arr, pair, grid, opts, kind);
    return conditional(joint, {{0, n1}});
}

void criterion1(Criterion& c) {
    const DetectorArray arr = reference(3);
    const auto means = expected_counts(arr, poisson_pair(500.0));
    const PhaseEstimate est = estimate_phase(arr[0], means[0], 106.0);
    c.expect(std::abs(est.delta_plus - 0.7 * kPi) < 1e-3,
             "delta+ = " + num(est.delta_plus) + ", want 0.7 pi +- 1e-3");
    c.expect(std::abs(est.delta_minus + 0.7 * kPi) < 1e-3,
             "delta- = " + num(est.delta_minus) + ", want -0.7 pi +- 1e-3");
    const PredictedCounts pred = predict_counts(arr, means, est);
    c.expect(std::abs(pred.plus[1] - 174.0) <= 1.0, "n2+ = " + num(pred.plus[1]) + ", want 174 +- 1");
    c.expect(std::abs(pred.minus[1] - 495.0) <= 1.0, "n2- = " + num(pred.minus[1]) + ", want 495 +- 1");
    c.expect(std::abs(pred.plus[2] - 448.0) <= 1.0, "n3+ = " + num(pred.plus[2]) + ", want 448 +- 1");
    c.expect(std::abs(pred.minus[2] - 52.0) <= 1.0, "n3- = " + num(pred.minus[2]) + ", want 52 +- 1");
}

void criterion2(Criterion& c) {
    const DetectorArray arr = reference(2);
    const auto cond = conditional_n2(arr, poisson_pair(500.0), 106, EngineKind::PhaseAverage, {});
    const auto modes = significant_modes(cond, 0.1);
    c.expect(modes.size() == 2, "expected exactly two modes, found " + std::to_string(modes.size()));
    if (modes.size() == 2) {
        c.expect(std::abs(modes[0].position - 174.0) <= std::sqrt(174.0),
                 "first mode at " + std::to_string(modes[0].position) + ", want 174 +- sqrt(174)");
        c.expect(std::abs(modes[1].position - 495.0) <= std::sqrt(495.0),
                 "second mode at " + std::to_string(modes[1].position) + ", want 495 +- sqrt(495)");
        for (const auto& m : modes)
            c.expect(m.weight >= 0.4 && m.weight <= 0.6,
                     "watershed weight " + num(m.weight) + " outside [0.4, 0.6]");
    }
}

void criterion3(Criterion& c) {
    const DetectorArray arr = reference(3);
    const auto pair = poisson_pair(500.0);
    const struct {
        int n2;
        double want;
    } cases[] = {{174, 448.0}, {495, 52.0}};
    for (const auto& [n2, want] : cases) {
        OutcomeGrid grid = default_grid(arr, pair);
        grid.axes[0] = {106, 106};
        grid.axes[1] = {n2, n2};
        const JointDistribution joint = phase_average_joint(arr, pair, grid);
        const JointDistribution cond = conditional(joint, {{0, 106}, {1, n2}});
        const auto modes = significant_modes(cond, 0.1);
        c.expect(modes.size() == 1, "P(n3 | 106, " + std::to_string(n2) + "): want one mode, found " +
                                        std::to_string(modes.size()));
        if (!modes.empty())
            c.expect(std::abs(modes[0].position - want) <= std::sqrt(want),
                     "mode at " + std::to_string(modes[0].position) + ", want " + num(want) +
                         " +- sqrt(" + num(want) + ")");
    }
}

void criterion4(Criterion& c) {
    const DetectorArray arr = reference(3);
    const auto pair = poisson_pair(500.0);
    const OutcomeGrid grid = default_grid(arr, pair);
    const MeanFieldTrajectory traj = trajectory(arr, pair, 2048);
    EngineOptions opts;
    opts.allow_expensive = true;
    const StreamedManifoldScan scan = scan_point_cloud(arr, pair, grid, opts, traj, 0.0);
    c.expect(std::abs(scan.p_min / 1.6e-7 - 1.0) < 1e-9,
             "P_min = " + num(scan.p_min) + ", want 1.6e-7 from the threshold rule");
    c.expect(scan.max_distance <= 5.0,
             "max shot-noise distance " + num(scan.max_distance) + " exceeds 5");
    c.expect(scan.n_points > 0, "empty point cloud");
    c.notes.push_back("points=" + std::to_string(scan.n_points) + " coverage=" + num(scan.coverage) +
                      " max_distance=" + num(scan.max_distance));
}

void criterion5(Criterion& c) {
    const DetectorArray arr = reference(2);
    const auto pair = SourcePair::independent(SourceSpec::number_state(200), SourceSpec::number_state(200));
    EngineOptions opts;
    const auto cond = conditional_n2(arr, pair, 42, EngineKind::Fock, opts);
    const auto modes = significant_modes(cond, 0.1);
    c.expect(modes.size() == 2, "expected two modes, found " + std::to_string(modes.size()));
    if (modes.size() == 2) {
        c.expect(std::abs(modes[0].position - 70.0) <= std::sqrt(70.0),
                 "first mode at " + std::to_string(modes[0].position) + ", want 70 +- sqrt(70)");
        c.expect(std::abs(modes[1].position - 198.0) <= std::sqrt(198.0),
                 "second mode at " + std::to_string(modes[1].position) + ", want 198 +- sqrt(198)");
        const auto basin = restrict_range(cond, modes[1].basin_lo, modes[1].basin_hi);
        const auto report = shot_noise(basin, 200.0, 0.0);
        c.expect(report.gamma < 1.0, "gamma at the 198 peak = " + num(report.gamma) + ", want < 1");
        c.notes.push_back("gamma(198 peak) = " + num(report.gamma));
    }
}

void criterion6(Criterion& c) {
    const DetectorArray arr = reference(2);
    // Binomial thinning versus rescaled detectors for number-state inputs.
    const auto number = SourcePair::independent(SourceSpec::number_state(40), SourceSpec::number_state(40));
    const auto fock_report = equivalence_check(arr, number, 0.5, EngineKind::Fock);
    c.expect(fock_report.sup_norm < 1e-8,
             "P_B(q) vs P_N(qR) sup-norm = " + num(fock_report.sup_norm) + ", want < 1e-8");

    // Poissonian sources are invariant under the same transform.
    const auto pois_report = equivalence_check(arr, poisson_pair(500.0), 0.5, EngineKind::PhaseAverage);
    c.expect(pois_report.sup_norm < 1e-8,
             "Poissonian invariance sup-norm = " + num(pois_report.sup_norm) + ", want < 1e-8");
}

void criterion7(Criterion& c) {
    Rng rng(20260810);
    int checked = 0;
    double worst = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
        // Random physical array; xi < 1 and xi = 1 both appear.
        const int m_count = 1 + static_cast<int>(rng.next_u64() % 3);
        DetectorArray arr({{0.1, 0.1, 1.0, 0.0}});
        while (true) {
            std::vector<DetectorSpec> specs;
            for (int m = 0; m < m_count; ++m) {
                const double scale = 0.85 / m_count;
                double xi = rng.next_double();
                if (rng.next_u64() % 3 == 0) xi = 1.0;
                specs.push_back({0.05 + scale * rng.next_double(), 0.05 + scale * rng.next_double(),
                                 xi, 2.0 * kPi * rng.next_double() - kPi});
            }
            DetectorArray candidate(std::move(specs));
            double eig[2];
            cd vecs[2][2];
            detail::hermitian_eig2(candidate.sum_matrix(), eig, vecs);
            if (eig[0] <= 0.999) {
                arr = candidate;
                break;
            }
        }

        // All product number states with N_a + N_b <= 6.
        for (int na = 0; na + 0 <= 6; ++na) {
            for (int nb = 0; na + nb <= 6; ++nb) {
                const auto pair = SourcePair::independent(SourceSpec::number_state(na),
                                                          SourceSpec::number_state(nb));
                const auto grid = default_grid(arr, pair);
                const auto dist = fock_joint(arr, pair, grid);
                const OracleContext oracle(arr, TwoModeState::product_number(na, nb));
                for (std::size_t flat = 0; flat < dist.log_probs.size(); ++flat) {
                    const OutcomeVector n = dist.grid.unflatten(flat);
                    const double diff = std::abs(std::exp(dist.log_probs[flat]) - oracle.probability(n));
                    worst = std::max(worst, diff);
                    ++checked;
                }
            }
        }

        // One entangled common-number input per array.
        {
            const long long n = 1 + static_cast<long long>(rng.next_u64() % 6);
            const double c2 = 0.15 + 0.7 * rng.next_double();
            const double delta = 2.0 * kPi * rng.next_double() - kPi;
            const auto pair = SourcePair::common_number(n, std::sqrt(c2), std::sqrt(1.0 - c2), delta);
            const auto grid = default_grid(arr, pair);
            const auto dist = fock_joint(arr, pair, grid);
            const OracleContext oracle(arr, TwoModeState::common_number(*pair.common_number_pair()));
            for (std::size_t flat = 0; flat < dist.log_probs.size(); ++flat) {
                const OutcomeVector outcome = dist.grid.unflatten(flat);
                const double diff =
                    std::abs(std::exp(dist.log_probs[flat]) - oracle.probability(outcome));
                worst = std::max(worst, diff);
                ++checked;
            }
        }
    }
    c.expect(worst < 1e-10, "worst |fock - oracle| = " + num(worst) + ", want < 1e-10");
    c.notes.push_back("compared " + std::to_string(checked) + " outcomes, worst diff " + num(worst));
}

void criterion8(Criterion& c) {
    // Normalization within the reported tail bound for every engine.
    {
        const DetectorArray arr = reference(3);
        OutcomeGrid grid = default_grid(arr, poisson_pair(40.0));
        const auto mf = meanfield_joint(arr, 40.0, 40.0, 0.9, grid);
        c.expect(std::abs(1.0 - mf.total_mass()) <= std::max(mf.tail_bound, 1e-15) + 1e-12 &&
                     mf.tail_bound <= 1e-9,
                 "meanfield: |1 - mass| = " + num(std::abs(1.0 - mf.total_mass())) + ", tail bound " +
                     num(mf.tail_bound));
    }
    {
        const DetectorArray arr = reference(2);
        const auto pair = poisson_pair(500.0);
        const auto dist = phase_average_joint(arr, pair, default_grid(arr, pair));
        c.expect(std::abs(1.0 - dist.total_mass()) <= dist.tail_bound && dist.tail_bound <= 1e-9,
                 "phase: |1 - mass| = " + num(std::abs(1.0 - dist.total_mass())) + ", tail bound " +
                     num(dist.tail_bound));
    }
    {
        const DetectorArray one({{0.3, 0.2, 1.0, 0.0}});
        const auto pair = SourcePair::independent(SourceSpec::thermal(25.0), SourceSpec::poissonian(0.0));
        OutcomeGrid grid{{AxisRange{0, 400}}};  // far past the heavy tail
        const auto dist = radial_phase_average_joint(one, pair, grid);
        c.expect(std::abs(1.0 - dist.total_mass()) <= dist.tail_bound + 1e-12 && dist.tail_bound <= 1e-9,
                 "radial: |1 - mass| = " + num(std::abs(1.0 - dist.total_mass())) + ", tail bound " +
                     num(dist.tail_bound));
    }

    // Fock-path first moments: small mixed-visibility array and the full
    // production-scale number-state grid.
    {
        const DetectorArray arr({{0.3, 0.2, 0.7, 0.4}, {0.2, 0.3, 1.0, -0.9}});
        const auto pair = SourcePair::independent(SourceSpec::number_state(30), SourceSpec::number_state(20));
        const auto dist = fock_joint(arr, pair, default_grid(arr, pair));
        c.expect(std::abs(1.0 - dist.total_mass()) <= std::max(dist.tail_bound, 1e-12) + 1e-12,
                 "fock(30,20): mass outside bound");
        for (int m = 0; m < arr.size(); ++m) {
            const double want = arr[m].r_aa() * 30.0 + arr[m].r_bb() * 20.0;
            const double got = dist.moment(m);
            c.expect(std::abs(got - want) < 1e-9,
                     "fock(30,20) detector " + std::to_string(m + 1) + ": moment " + num(got) +
                         ", want " + num(want));
        }
    }
    {
        const DetectorArray arr = reference(2);
        const auto pair = SourcePair::independent(SourceSpec::number_state(200), SourceSpec::number_state(200));
        EngineOptions opts;
        opts.allow_expensive = true;
        const auto dist = fock_joint(arr, pair, default_grid(arr, pair), opts);
        for (int m = 0; m < arr.size(); ++m) {
            const double want = arr[m].r_aa() * 200.0 + arr[m].r_bb() * 200.0;
            const double got = dist.moment(m);
            c.expect(std::abs(got - want) < 1e-9,
                     "fock(200,200) detector " + std::to_string(m + 1) + ": moment " + num(got) +
                         ", want " + num(want) + " +- 1e-9");
        }
    }
}

void criterion9(Criterion& c) {
    const DetectorArray arr = reference(2);
    EngineOptions opts;
    opts.allow_expensive = true;
    double prev_sd = -1.0;
    bool increasing = true;
    std::string sds;
    std::size_t modes_at_q1 = 0;
    for (const double big_q : {0.01, 0.1, 0.5, 1.0}) {
        const auto pair = SourcePair::independent(SourceSpec::super_poissonian(big_q, 500.0),
                                                  SourceSpec::super_poissonian(big_q, 500.0));
        const int n2_hi = 728 + static_cast<int>(std::ceil(2000.0 * std::sqrt(big_q)));
        const auto cond = conditional_n2(arr, pair, 106, EngineKind::Radial, opts, n2_hi);
        // Standard deviation of the conditional.
        double mean = 0.0, second = 0.0;
        const auto& ax = cond.grid.axes.front();
        for (int n = ax.lo; n <= ax.hi; ++n) {
            const double p = std::exp(cond.log_probs[static_cast<std::size_t>(n - ax.lo)]);
            mean += p * n;
            second += p * static_cast<double>(n) * n;
        }
        const double sd = std::sqrt(std::max(0.0, second - mean * mean));
        sds += (sds.empty() ? "" : ", ") + num(sd);
        if (sd <= prev_sd) increasing = false;
        prev_sd = sd;
        if (big_q == 1.0) modes_at_q1 = significant_modes(cond, 0.1).size();
    }
    c.expect(increasing, "conditional widths not strictly increasing: " + sds);
    c.expect(modes_at_q1 < 2, "Q = 1 still shows a separated bimodal structure");
    c.notes.push_back("sd over Q in {0.01, 0.1, 0.5, 1}: " + sds);
}

void criterion10(Criterion& c) {
    const DetectorArray arr = reference(2);
    const auto only_a = SourcePair::independent(SourceSpec::poissonian(500.0), SourceSpec::poissonian(0.0));
    const auto only_b = SourcePair::independent(SourceSpec::poissonian(0.0), SourceSpec::poissonian(500.0));
    const auto da = phase_average_joint(arr, only_a, default_grid(arr, only_a));
    const auto db = phase_average_joint(arr, only_b, default_grid(arr, only_b));
    const auto combined = incoherent_joint(da, db);

    // Equal to the product of Poissons with summed means, to 1e-10.
    double worst = 0.0;
    for (std::size_t flat = 0; flat < combined.log_probs.size(); ++flat) {
        const OutcomeVector n = combined.grid.unflatten(flat);
        double expect_log = 0.0;
        for (int m = 0; m < arr.size(); ++m)
            expect_log += log_poisson_pmf(n[static_cast<std::size_t>(m)],
                                          arr[m].r_aa() * 500.0 + arr[m].r_bb() * 500.0);
        worst = std::max(worst, std::abs(std::exp(combined.log_probs[flat]) - std::exp(expect_log)));
    }
    c.expect(worst < 1e-10, "|incoherent - product Poisson| = " + num(worst) + ", want < 1e-10");

    const MeanFieldTrajectory traj = trajectory(arr, poisson_pair(500.0), 1024);
    const double coverage = tube_coverage(combined, traj, 3.0);
    c.expect(coverage < 0.5, "tube coverage " + num(coverage) + ", want < 0.5");
    c.notes.push_back("tube coverage of the incoherent control: " + num(coverage));
}

} // namespace

int main() {
    std::printf("acceptance criteria\n");
    Criterion("C1  mean-field anchors (phase estimate and predicted counts)").run(criterion1);
    Criterion("C2  conditional bimodality of P(n2 | n1 = 106)").run(criterion2);
    Criterion("C3  conditional unimodality of P(n3 | n1, n2)").run(criterion3);
    Criterion("C4  point-cloud threshold and trajectory proximity").run(criterion4);
    Criterion("C5  sub-Poissonian anchors at N = 200").run(criterion5);
    Criterion("C6  q-scaling equivalence at Nbar = 20 and Poissonian invariance").run(criterion6);
    Criterion("C7  Fock engine equals the brute-force oracle").run(criterion7);
    Criterion("C8  conservation and normalization").run(criterion8);
    Criterion("C9  super-Poissonian broadening washes out the fringes").run(criterion9);
    Criterion("C10 incoherent control shows no interference structure").run(criterion10);
    if (g_failures > 0) {
        std::printf("%d criterion(s) failed\n", g_failures);
        return 1;
    }
    std::printf("all criteria passed\n");
    return 0;
}
