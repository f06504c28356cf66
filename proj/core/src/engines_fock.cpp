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
#include <algorithm>
#include <cmath>
#include <numeric>

#include "photonlab/engines.hpp"
#include "photonlab/parallel.hpp"

namespace photonlab {

namespace {

constexpr double kAliveTol = 1e-30;  // squared row norm below which a row is dead
constexpr std::size_t kMaxRows = 10;

// Amplitude rows are the conjugated dilation rows: with v v^dag = R^(m), the
// output modes d_j = conj(v_j)_a a + conj(v_j)_b b carry the detector POVM,
// and transition amplitudes use these conjugated components directly.
struct AmpRow {
    cd a, b;
    int detector;  // -1 for loss
};

struct FockSetup {
    std::vector<AmpRow> rows;
    std::vector<std::vector<int>> det_rows;
    std::vector<int> loss_rows;  // alive loss rows only
    int count() const { return static_cast<int>(rows.size()); }
};

FockSetup make_setup(const DetectorArray& array) {
    const Dilation dil = dilation(array);
    FockSetup s;
    s.det_rows.resize(static_cast<std::size_t>(array.size()));
    for (const auto& r : dil.rows) {
        const double norm2 = std::norm(r.a) + std::norm(r.b);
        if (r.detector < 0 && norm2 < kAliveTol) continue;
        const int idx = s.count();
        s.rows.push_back({std::conj(r.a), std::conj(r.b), r.detector});
        if (r.detector >= 0)
            s.det_rows[static_cast<std::size_t>(r.detector)].push_back(idx);
        else
            s.loss_rows.push_back(idx);
    }
    if (s.rows.size() > kMaxRows) throw DomainError("fock engine: too many dilation rows");
    return s;
}

// ---------------------------------------------------------------------------
// Dense path: evolve the output-mode amplitude tensor one created photon at a
// time. Compositions of k photons over J rows are ranked lexicographically.

struct CompIndexer {
    int parts = 0;
    std::vector<std::array<double, kMaxRows + 1>> choose;  // exact binomials

    void init(int max_total, int j) {
        parts = j;
        const int n_max = max_total + j + 1;
        choose.assign(static_cast<std::size_t>(n_max) + 1, {});
        for (int n = 0; n <= n_max; ++n) {
            choose[static_cast<std::size_t>(n)][0] = 1.0;
            for (int p = 1; p <= std::min<int>(n, static_cast<int>(kMaxRows)); ++p)
                choose[static_cast<std::size_t>(n)][static_cast<std::size_t>(p)] =
                    choose[static_cast<std::size_t>(n - 1)][static_cast<std::size_t>(p)] +
                    choose[static_cast<std::size_t>(n - 1)][static_cast<std::size_t>(p - 1)];
        }
    }

    double c(int n, int p) const {
        if (p < 0 || n < 0 || p > n) return 0.0;
        return choose[static_cast<std::size_t>(n)][static_cast<std::size_t>(p)];
    }

    std::size_t lattice_size(int total) const {
        return static_cast<std::size_t>(c(total + parts - 1, parts - 1));
    }

    std::size_t rank(const int* comp, int total) const {
        std::size_t r = 0;
        int rem = total;
        for (int i = 0; i < parts - 1; ++i) {
            const int p = parts - 1 - i;
            r += static_cast<std::size_t>(c(rem + p, p) - c(rem - comp[i] + p, p));
            rem -= comp[i];
        }
        return r;
    }
};

template <class F>
void for_each_composition(int parts, int total, int* comp, int depth, F&& f) {
    if (depth == parts - 1) {
        comp[depth] = total;
        f();
        return;
    }
    for (int v = 0; v <= total; ++v) {
        comp[depth] = v;
        for_each_composition(parts, total - v, comp, depth + 1, f);
    }
}

void apply_creation(int parts, const std::vector<cd>& w, int k, const std::vector<cd>& src,
                    std::vector<cd>& dst, const CompIndexer& ix, double inv_step) {
    int comp[kMaxRows];
    std::size_t r = 0;
    for_each_composition(parts, k, comp, 0, [&] {
        const cd amp = src[r++];
        if (amp == cd(0.0)) return;
        for (int j = 0; j < parts; ++j) {
            if (w[static_cast<std::size_t>(j)] == cd(0.0)) continue;
            comp[j] += 1;
            dst[ix.rank(comp, k + 1)] +=
                w[static_cast<std::size_t>(j)] * (std::sqrt(static_cast<double>(comp[j])) * inv_step) * amp;
            comp[j] -= 1;
        }
    });
}

// Evolves prod_modes (sum_j w_j d_j^dag)^{N_mode} |0> / sqrt(prod N_mode!) and
// folds |amplitude|^2 into the grid, summing loss occupations away.
void fock_dense_accumulate(const FockSetup& s, const std::vector<std::vector<cd>>& mode_w,
                           const std::vector<int>& mode_n, const OutcomeGrid& grid, double weight,
                           std::vector<double>& out_linear) {
    const int parts = s.count();
    const int total = std::accumulate(mode_n.begin(), mode_n.end(), 0);
    CompIndexer ix;
    ix.init(total, parts);

    std::vector<cd> cur(1, cd(1.0)), next;
    int k = 0;
    for (std::size_t mode = 0; mode < mode_w.size(); ++mode) {
        for (int step = 1; step <= mode_n[mode]; ++step) {
            next.assign(ix.lattice_size(k + 1), cd(0.0));
            apply_creation(parts, mode_w[mode], k, cur, next, ix, 1.0 / std::sqrt(static_cast<double>(step)));
            cur.swap(next);
            ++k;
        }
    }

    std::vector<std::size_t> strides(grid.dims());
    std::size_t stride = 1;
    for (std::size_t m = grid.dims(); m-- > 0;) {
        strides[m] = stride;
        stride *= static_cast<std::size_t>(grid.axes[m].size());
    }
    int comp[kMaxRows];
    std::size_t r = 0;
    for_each_composition(parts, total, comp, 0, [&] {
        const cd amp = cur[r++];
        if (amp == cd(0.0)) return;
        std::size_t flat = 0;
        for (std::size_t m = 0; m < grid.dims(); ++m) {
            int n_m = 0;
            for (int row : s.det_rows[m]) n_m += comp[row];
            if (!grid.axes[m].contains(n_m)) return;
            flat += static_cast<std::size_t>(n_m - grid.axes[m].lo) * strides[m];
        }
        out_linear[flat] += weight * std::norm(amp);
    });
}

// ---------------------------------------------------------------------------
// Slice path: per-outcome amplitude polynomials with a windowed march over
// the loss split. Coefficients are complex doubles under a shared log scale;
// window entries more than ~300 orders below the running maximum underflow,
// far beneath anything that survives the factorial weights.

bool scale_out_of_range(double max_abs2) {
    return max_abs2 > 1e200 || (max_abs2 > 0.0 && max_abs2 < 1e-200);
}

struct Prefix {
    std::vector<cd> c{cd(1.0)};
    double logscale = 0.0;

    int degree() const { return static_cast<int>(c.size()) - 1; }

    void mul_linear(cd va, cd vb) {
        c.push_back(cd(0.0));
        double mx = 0.0;
        for (std::size_t k = c.size(); k-- > 0;) {
            const cd below = k > 0 ? c[k - 1] : cd(0.0);
            c[k] = vb * c[k] + va * below;
            mx = std::max(mx, std::norm(c[k]));
        }
        if (scale_out_of_range(mx)) {
            const double scale = std::sqrt(mx);
            for (auto& v : c) v /= scale;
            logscale += std::log(scale);
        }
    }
};

// Coefficients of (a x + b)^n at exponents p in [plo, phi] (clamped to
// [0, n]), anchored at the magnitude peak; out[p - plo_clamped].
void linear_power_window(cd a, cd b, int n, int plo, int phi, std::vector<cd>& out, double& logscale,
                         int* plo_clamped) {
    plo = std::max(plo, 0);
    phi = std::min(phi, n);
    *plo_clamped = plo;
    out.assign(static_cast<std::size_t>(std::max(0, phi - plo + 1)), cd(0.0));
    logscale = 0.0;
    if (plo > phi) return;
    const double ma = std::abs(a), mb = std::abs(b);
    if (ma == 0.0 && mb == 0.0) {
        if (n == 0 && plo == 0) out[0] = cd(1.0);
        return;
    }
    if (ma == 0.0) {
        if (plo == 0) {
            logscale = static_cast<double>(n) * std::log(mb);
            out[0] = std::pow(b / mb, n);
        }
        return;
    }
    if (mb == 0.0) {
        if (phi == n) {
            logscale = static_cast<double>(n) * std::log(ma);
            out[static_cast<std::size_t>(n - plo)] = std::pow(a / ma, n);
        }
        return;
    }
    // Magnitudes follow Binomial(n, ma/(ma+mb)) up to the overall factor.
    int anchor = static_cast<int>(static_cast<double>(n + 1) * ma / (ma + mb));
    anchor = std::clamp(anchor, plo, phi);
    logscale = log_choose(n, anchor) + anchor * std::log(ma) + (n - anchor) * std::log(mb);
    out[static_cast<std::size_t>(anchor - plo)] = std::pow(a / ma, anchor) * std::pow(b / mb, n - anchor);
    const cd up_ratio = a / b;
    for (int p = anchor + 1; p <= phi; ++p) {
        const double f = static_cast<double>(n - p + 1) / static_cast<double>(p);
        out[static_cast<std::size_t>(p - plo)] = out[static_cast<std::size_t>(p - 1 - plo)] * up_ratio * f;
    }
    const cd down_ratio = b / a;
    for (int p = anchor - 1; p >= plo; --p) {
        const double f = static_cast<double>(p + 1) / static_cast<double>(n - p);
        out[static_cast<std::size_t>(p - plo)] = out[static_cast<std::size_t>(p + 1 - plo)] * down_ratio * f;
    }
}

// Sums |amplitude|^2 over the loss split for one detector-row assignment of a
// product state |Na, Nb>. log_det_pref carries
// 0.5 [lgamma(Na+1) + lgamma(Nb+1) - sum_det lgamma(count+1)].
void loss_sum_product(const FockSetup& s, const Prefix& prefix, long long n_tot, long long n_total,
                      long long d_exp, double log_det_pref, LogAccumulator& acc) {
    const long long loss = n_total - n_tot;
    if (loss < 0) return;
    const int d = static_cast<int>(d_exp);
    const int n_loss_rows = static_cast<int>(s.loss_rows.size());

    if (n_loss_rows == 0) {
        if (loss != 0 || d > prefix.degree()) return;
        const cd g = prefix.c[static_cast<std::size_t>(d)];
        if (g == cd(0.0)) return;
        acc.add_log(2.0 * (log_det_pref + prefix.logscale + std::log(std::abs(g))));
        return;
    }

    std::vector<cd> tbuf;
    double tlog = 0.0;
    int tlo = 0;

    if (n_loss_rows == 1) {
        const AmpRow& u = s.rows[static_cast<std::size_t>(s.loss_rows[0])];
        const int klo = static_cast<int>(std::max<long long>(0, d_exp - loss));
        const int khi = std::min(d, prefix.degree());
        if (klo > khi) return;
        linear_power_window(u.a, u.b, static_cast<int>(loss), d - khi, d - klo, tbuf, tlog, &tlo);
        cd g(0.0);
        for (int k = klo; k <= khi; ++k) {
            const int p = d - k;
            if (p < tlo || p - tlo >= static_cast<int>(tbuf.size())) continue;
            g += prefix.c[static_cast<std::size_t>(k)] * tbuf[static_cast<std::size_t>(p - tlo)];
        }
        if (g == cd(0.0)) return;
        const double lp = log_det_pref - 0.5 * log_factorial(loss);
        acc.add_log(2.0 * (lp + prefix.logscale + tlog + std::log(std::abs(g))));
        return;
    }

    // Two alive loss rows: march F = prefix * U^{l1} over l1, pairing the
    // x^d coefficient against the closed-form coefficients of T^{l2}.
    const AmpRow& u = s.rows[static_cast<std::size_t>(s.loss_rows[0])];
    const AmpRow& t = s.rows[static_cast<std::size_t>(s.loss_rows[1])];

    std::vector<cd> f(static_cast<std::size_t>(d) + 1, cd(0.0));
    double flog = prefix.logscale;
    const auto wlo = [&](long long l1) { return static_cast<int>(std::max<long long>(0, d_exp - (loss - l1))); };
    const auto whi = [&](long long l1) { return static_cast<int>(std::min<long long>(d_exp, n_tot + l1)); };

    for (int k = wlo(0); k <= whi(0); ++k)
        if (k <= prefix.degree()) f[static_cast<std::size_t>(k)] = prefix.c[static_cast<std::size_t>(k)];

    for (long long l1 = 0; l1 <= loss; ++l1) {
        const long long l2 = loss - l1;
        const int lo = wlo(l1), hi = whi(l1);
        if (lo <= hi) {
            linear_power_window(t.a, t.b, static_cast<int>(l2), d - hi, d - lo, tbuf, tlog, &tlo);
            cd g(0.0);
            for (int k = lo; k <= hi; ++k) {
                const int p = d - k;
                if (p < tlo || p - tlo >= static_cast<int>(tbuf.size())) continue;
                g += f[static_cast<std::size_t>(k)] * tbuf[static_cast<std::size_t>(p - tlo)];
            }
            if (g != cd(0.0)) {
                const double lp = log_det_pref - 0.5 * (log_factorial(l1) + log_factorial(l2));
                acc.add_log(2.0 * (lp + flog + tlog + std::log(std::abs(g))));
            }
        }
        if (l1 == loss) break;

        const int nlo = wlo(l1 + 1), nhi = whi(l1 + 1);
        double mx = 0.0;
        for (int k = nhi; k >= nlo; --k) {
            const cd cur = (k >= lo && k <= hi) ? f[static_cast<std::size_t>(k)] : cd(0.0);
            const cd below = (k - 1 >= lo && k - 1 <= hi) ? f[static_cast<std::size_t>(k - 1)] : cd(0.0);
            f[static_cast<std::size_t>(k)] = u.b * cur + u.a * below;
            mx = std::max(mx, std::norm(f[static_cast<std::size_t>(k)]));
        }
        if (scale_out_of_range(mx)) {
            const double scale = std::sqrt(mx);
            for (int k = nlo; k <= nhi; ++k) f[static_cast<std::size_t>(k)] /= scale;
            flog += std::log(scale);
        }
    }
}

// ---------------------------------------------------------------------------
// Outcome recursion shared by the product-polynomial and common-source paths.

struct SliceJob {
    const FockSetup* setup = nullptr;
    const OutcomeGrid* grid = nullptr;
    std::vector<std::size_t> strides;
    std::vector<int> axis_order;  // widest axis first

    long long n_a = 0, n_b = 0, n_total = 0, d_exp = 0;
    bool common = false;
    std::vector<cd> common_w;  // per-row coefficient for the common mode
    double loss_norm = 0.0;    // common path: sum over alive loss rows of |w|^2

    double weight = 1.0;
    std::vector<double>* out = nullptr;
};

void slice_emit(const SliceJob& job, const Prefix& prefix, double common_logw, long long n_tot,
                double lg_counts, std::size_t flat) {
    if (job.common) {
        const long long loss = job.n_total - n_tot;
        if (loss < 0) return;
        double lp = log_factorial(job.n_total) - lg_counts - log_factorial(loss) + 2.0 * common_logw;
        if (loss > 0) {
            if (job.loss_norm <= 0.0) return;
            lp += static_cast<double>(loss) * std::log(job.loss_norm);
        }
        (*job.out)[flat] += job.weight * std::exp(lp);
        return;
    }
    LogAccumulator acc;
    const double log_det_pref =
        0.5 * (log_factorial(job.n_a) + log_factorial(job.n_b) - lg_counts);
    loss_sum_product(*job.setup, prefix, n_tot, job.n_total, job.d_exp, log_det_pref, acc);
    const double lt = acc.log_total();
    if (lt != kNegInf) (*job.out)[flat] += job.weight * std::exp(lt);
}

void slice_recurse(const SliceJob& job, std::size_t depth, const Prefix& prefix, double common_logw,
                   long long n_tot, double lg_counts, std::size_t flat) {
    if (depth == job.axis_order.size()) {
        slice_emit(job, prefix, common_logw, n_tot, lg_counts, flat);
        return;
    }
    const int m = job.axis_order[depth];
    const auto& ax = job.grid->axes[static_cast<std::size_t>(m)];
    const auto& rows = job.setup->det_rows[static_cast<std::size_t>(m)];

    if (rows.size() == 1) {
        const AmpRow& row = job.setup->rows[static_cast<std::size_t>(rows[0])];
        const double logw_row =
            job.common ? std::log(std::abs(job.common_w[static_cast<std::size_t>(rows[0])])) : 0.0;
        Prefix q = prefix;
        if (!job.common)
            for (int i = 0; i < ax.lo; ++i) q.mul_linear(row.a, row.b);
        for (int n = ax.lo; n <= ax.hi; ++n) {
            if (n_tot + n > job.n_total) break;
            const bool dead_common =
                job.common && n > 0 && job.common_w[static_cast<std::size_t>(rows[0])] == cd(0.0);
            if (!dead_common) {
                slice_recurse(job, depth + 1, q, common_logw + n * logw_row, n_tot + n,
                              lg_counts + log_factorial(n),
                              flat + static_cast<std::size_t>(n - ax.lo) * job.strides[static_cast<std::size_t>(m)]);
            }
            if (!job.common && n < ax.hi) q.mul_linear(row.a, row.b);
        }
        return;
    }

    // Two virtual sub-rows (xi < 1): the observed count splits as n = j + (n - j)
    // and the split probabilities add.
    const AmpRow& r0 = job.setup->rows[static_cast<std::size_t>(rows[0])];
    const AmpRow& r1 = job.setup->rows[static_cast<std::size_t>(rows[1])];
    const cd w0 = job.common ? job.common_w[static_cast<std::size_t>(rows[0])] : cd(0.0);
    const cd w1 = job.common ? job.common_w[static_cast<std::size_t>(rows[1])] : cd(0.0);
    for (int n = ax.lo; n <= ax.hi; ++n) {
        if (n_tot + n > job.n_total) break;
        const std::size_t base =
            flat + static_cast<std::size_t>(n - ax.lo) * job.strides[static_cast<std::size_t>(m)];
        for (int j = 0; j <= n; ++j) {
            const double lg = lg_counts + log_factorial(j) + log_factorial(n - j);
            if (job.common) {
                if ((j > 0 && w0 == cd(0.0)) || (n - j > 0 && w1 == cd(0.0))) continue;
                double lw = common_logw;
                if (j > 0) lw += j * std::log(std::abs(w0));
                if (n - j > 0) lw += (n - j) * std::log(std::abs(w1));
                slice_recurse(job, depth + 1, prefix, lw, n_tot + n, lg, base);
            } else {
                Prefix q = prefix;
                for (int i = 0; i < j; ++i) q.mul_linear(r0.a, r0.b);
                for (int i = 0; i < n - j; ++i) q.mul_linear(r1.a, r1.b);
                slice_recurse(job, depth + 1, q, 0.0, n_tot + n, lg, base);
            }
        }
    }
}

void slice_run(const SliceJob& job, const EngineOptions& opts) {
    // Parallel chunks over the widest axis when it is a single-row detector;
    // outcomes own disjoint output slots, so threading cannot change results.
    const int m0 = job.axis_order[0];
    const auto& ax = job.grid->axes[static_cast<std::size_t>(m0)];
    const auto& rows = job.setup->det_rows[static_cast<std::size_t>(m0)];
    const int threads = thread_budget(opts.threads);

    if (rows.size() != 1 || ax.size() < 32 || threads <= 1 || job.common) {
        Prefix unit;
        slice_recurse(job, 0, unit, 0.0, 0, 0.0, 0);
        return;
    }

    const AmpRow& row = job.setup->rows[static_cast<std::size_t>(rows[0])];
    const int n_chunks = std::min(ax.size(), 4 * threads);
    const int chunk = (ax.size() + n_chunks - 1) / n_chunks;
    parallel_for(n_chunks, threads, [&](std::int64_t ci) {
        const int lo = ax.lo + static_cast<int>(ci) * chunk;
        const int hi = std::min(ax.hi, lo + chunk - 1);
        if (lo > hi) return;
        Prefix q;
        for (int i = 0; i < lo; ++i) q.mul_linear(row.a, row.b);
        for (int n = lo; n <= hi; ++n) {
            if (n > job.n_total) break;
            slice_recurse(job, 1, q, 0.0, n, log_factorial(n),
                          static_cast<std::size_t>(n - ax.lo) * job.strides[static_cast<std::size_t>(m0)]);
            if (n < hi) q.mul_linear(row.a, row.b);
        }
    });
}

// ---------------------------------------------------------------------------
// Cost model and dispatch.

struct Component {
    int n_a = 0, n_b = 0;  // product path; common path uses n_a with n_b = -1
    double weight = 1.0;
};

double dense_cost(const CompIndexer& ix, int total, int parts) {
    double sum = 0.0;
    for (int k = 0; k <= total; ++k) sum += ix.c(k + parts - 1, parts - 1);
    return sum * parts * (parts + 2);
}

double slice_cost(const FockSetup& s, const OutcomeGrid& grid, long long n_a, long long n_b) {
    const long long n_total = n_a + n_b;
    long long n_mid = 0;
    double outcomes = 1.0, split_factor = 1.0;
    for (std::size_t m = 0; m < grid.dims(); ++m) {
        outcomes *= grid.axes[m].size();
        n_mid += (grid.axes[m].lo + grid.axes[m].hi) / 2;
        if (s.det_rows[m].size() > 1) split_factor *= 0.5 * (grid.axes[m].lo + grid.axes[m].hi) + 1.0;
    }
    n_mid = std::min(n_mid, n_total);
    const long long loss = n_total - n_mid;
    const long long d = n_a;
    double march = 0.0;
    for (long long l1 = 0; l1 <= loss; ++l1) {
        const long long lo = std::max<long long>(0, d - (loss - l1));
        const long long hi = std::min(d, n_mid + l1);
        if (hi >= lo) march += static_cast<double>(hi - lo + 1);
    }
    return outcomes * split_factor * (2.0 * march + static_cast<double>(n_mid) + 64.0);
}

JointDistribution assemble(const OutcomeGrid& grid, std::vector<double> plane) {
    JointDistribution out;
    out.grid = grid;
    out.engine_tag = "fock";
    out.log_probs.resize(plane.size());
    for (std::size_t i = 0; i < plane.size(); ++i)
        out.log_probs[i] = plane[i] > 0.0 ? std::log(plane[i]) : kNegInf;
    out.tail_bound = std::max(0.0, 1.0 - pairwise_sum(plane));
    return out;
}

std::vector<int> widest_first_order(const OutcomeGrid& grid) {
    std::vector<int> order(grid.dims());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return grid.axes[static_cast<std::size_t>(a)].size() >
                                                grid.axes[static_cast<std::size_t>(b)].size(); });
    return order;
}

} // namespace

JointDistribution fock_joint(const DetectorArray& array, const SourcePair& sources,
                             const OutcomeGrid& grid, const EngineOptions& opts) {
    if (grid.dims() != static_cast<std::size_t>(array.size()))
        throw ShapeError("fock_joint: grid axis count must match detector count");
    if (grid.size() > (1u << 26)) throw DomainError("fock_joint: grid too large to materialize");

    const FockSetup setup = make_setup(array);
    const int parts = setup.count();

    // Assemble mixture components.
    std::vector<Component> components;
    bool common = false;
    double coupler_c = 0.0, coupler_s = 0.0, coupler_delta = 0.0;
    double omitted = 0.0;

    if (const auto* p = sources.common_number_pair()) {
        common = true;
        coupler_c = p->c;
        coupler_s = p->s;
        coupler_delta = p->delta;
        components.push_back({static_cast<int>(p->n), -1, 1.0});
    } else if (const auto* p = sources.common_diagonal_pair()) {
        common = true;
        coupler_c = p->c;
        coupler_s = p->s;
        coupler_delta = p->delta;
        for (int n = p->p.offset(); n <= p->p.max_n(); ++n) {
            const double w = p->p.pmf(n);
            if (w >= opts.mixture_weight_floor)
                components.push_back({n, -1, w});
            else
                omitted += w;
        }
    } else if (const auto* p = sources.independent_pair()) {
        if (!p->a.has_diagonal() || !p->b.has_diagonal())
            throw DomainError("fock_joint: both sources need a diagonal representation");
        const NumberDistribution da = p->a.number_distribution();
        const NumberDistribution db = p->b.number_distribution();
        for (int na = da.offset(); na <= da.max_n(); ++na) {
            const double wa = da.pmf(na);
            if (wa == 0.0) continue;
            for (int nb = db.offset(); nb <= db.max_n(); ++nb) {
                const double w = wa * db.pmf(nb);
                if (w >= opts.mixture_weight_floor)
                    components.push_back({na, nb, w});
                else
                    omitted += w;
            }
        }
    } else {
        throw DomainError("fock_joint: referenced-phase sources need the radial engine");
    }

    // Per-row coefficients.
    std::vector<cd> wa(static_cast<std::size_t>(parts)), wb(static_cast<std::size_t>(parts)),
        wc(static_cast<std::size_t>(parts));
    for (int j = 0; j < parts; ++j) {
        wa[static_cast<std::size_t>(j)] = setup.rows[static_cast<std::size_t>(j)].a;
        wb[static_cast<std::size_t>(j)] = setup.rows[static_cast<std::size_t>(j)].b;
        if (common)
            wc[static_cast<std::size_t>(j)] =
                coupler_c * wa[static_cast<std::size_t>(j)] +
                coupler_s * cd(std::cos(coupler_delta), std::sin(coupler_delta)) * wb[static_cast<std::size_t>(j)];
    }

    // Path choice and the expensive gate.
    constexpr double kDenseLatticeCap = 4e6;
    constexpr double kDenseOpsCap = 4e8;
    constexpr double kGate = 4e10;

    double total_est = 0.0;
    std::vector<char> use_dense(components.size());
    {
        CompIndexer probe;
        int max_total = 0;
        for (const auto& comp : components)
            max_total = std::max(max_total, comp.n_a + std::max(comp.n_b, 0));
        probe.init(max_total, parts);
        for (std::size_t i = 0; i < components.size(); ++i) {
            const auto& comp = components[i];
            const int total = comp.n_a + std::max(comp.n_b, 0);
            const double lattice = probe.c(total + parts - 1, parts - 1);
            const double dc = dense_cost(probe, total, parts);
            const double sc = common ? static_cast<double>(grid.size()) * (parts + 2)
                                     : slice_cost(setup, grid, comp.n_a, std::max(comp.n_b, 0));
            const bool dense_ok = lattice <= kDenseLatticeCap && dc <= kDenseOpsCap;
            bool pick_dense = dense_ok && dc <= 4.0 * sc;
            if (opts.fock_path == FockPath::Dense) {
                if (!dense_ok) throw DomainError("fock_joint: dense path infeasible at this size");
                pick_dense = true;
            } else if (opts.fock_path == FockPath::Slice) {
                pick_dense = false;
            }
            if (pick_dense) {
                use_dense[i] = 1;
                total_est += dc;
            } else {
                use_dense[i] = 0;
                total_est += sc;
            }
        }
    }
    if (total_est > kGate && !opts.allow_expensive)
        throw DomainError("fock_joint: estimated cost exceeds the desk-scale budget; "
                          "rerun with allow_expensive or restrict the grid to a slice");

    std::vector<double> plane(grid.size(), 0.0);
    const auto axis_order = widest_first_order(grid);
    std::vector<std::size_t> strides(grid.dims());
    {
        std::size_t stride = 1;
        for (std::size_t m = grid.dims(); m-- > 0;) {
            strides[m] = stride;
            stride *= static_cast<std::size_t>(grid.axes[m].size());
        }
    }

    const int threads = thread_budget(opts.threads);
    bool all_dense = true;
    for (char d : use_dense) all_dense = all_dense && (d != 0);

    // The chunk count is fixed so the combine order (and hence the bits of the
    // result) cannot depend on the thread budget.
    constexpr int kMixtureChunks = 64;
    if (all_dense && components.size() > 1 &&
        static_cast<double>(grid.size()) * kMixtureChunks <= 5e7) {
        const int n_chunks = static_cast<int>(std::min<std::size_t>(
            components.size(), static_cast<std::size_t>(kMixtureChunks)));
        std::vector<std::vector<double>> partial(static_cast<std::size_t>(n_chunks));
        parallel_for(n_chunks, threads, [&](std::int64_t ci) {
            auto& mine = partial[static_cast<std::size_t>(ci)];
            mine.assign(grid.size(), 0.0);
            for (std::size_t i = static_cast<std::size_t>(ci); i < components.size();
                 i += static_cast<std::size_t>(n_chunks)) {
                const auto& comp = components[i];
                if (common) {
                    fock_dense_accumulate(setup, {wc}, {comp.n_a}, grid, comp.weight, mine);
                } else {
                    fock_dense_accumulate(setup, {wa, wb}, {comp.n_a, comp.n_b}, grid, comp.weight, mine);
                }
            }
        });
        for (const auto& part : partial)
            for (std::size_t i = 0; i < plane.size(); ++i) plane[i] += part[i];
    } else {
        for (std::size_t i = 0; i < components.size(); ++i) {
            const auto& comp = components[i];
            if (use_dense[i] != 0) {
                if (common)
                    fock_dense_accumulate(setup, {wc}, {comp.n_a}, grid, comp.weight, plane);
                else
                    fock_dense_accumulate(setup, {wa, wb}, {comp.n_a, comp.n_b}, grid, comp.weight, plane);
            } else {
                SliceJob job;
                job.setup = &setup;
                job.grid = &grid;
                job.strides = strides;
                job.axis_order = axis_order;
                job.weight = comp.weight;
                job.out = &plane;
                if (common) {
                    job.common = true;
                    job.common_w = wc;
                    job.n_total = comp.n_a;
                    for (int lr : setup.loss_rows)
                        job.loss_norm += std::norm(wc[static_cast<std::size_t>(lr)]);
                } else {
                    job.n_a = comp.n_a;
                    job.n_b = comp.n_b;
                    job.n_total = comp.n_a + comp.n_b;
                    job.d_exp = comp.n_a;
                }
                slice_run(job, opts);
            }
        }
    }

    JointDistribution out = assemble(grid, std::move(plane));
    out.tail_bound += omitted;
    return out;
}

} // namespace photonlab
