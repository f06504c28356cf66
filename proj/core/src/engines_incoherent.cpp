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

#include <fftw3.h>

#include "photonlab/engines.hpp"

namespace photonlab {

namespace {

int next_pow2(int n) {
    int p = 1;
    while (p < n) p *= 2;
    return p;
}

} // namespace

JointDistribution incoherent_joint(const JointDistribution& a, const JointDistribution& b) {
    if (a.grid.dims() != b.grid.dims())
        throw ShapeError("incoherent_joint: distributions have different dimensionality");
    const std::size_t dims = a.grid.dims();

    OutcomeGrid out_grid;
    std::vector<int> fft_n(dims), out_n(dims);
    std::size_t fft_total = 1;
    for (std::size_t m = 0; m < dims; ++m) {
        const auto& ax_a = a.grid.axes[m];
        const auto& ax_b = b.grid.axes[m];
        out_grid.axes.push_back({ax_a.lo + ax_b.lo, ax_a.hi + ax_b.hi});
        out_n[m] = ax_a.size() + ax_b.size() - 1;
        fft_n[m] = next_pow2(out_n[m]);
        fft_total *= static_cast<std::size_t>(fft_n[m]);
    }
    if (fft_total > (1u << 27)) throw DomainError("incoherent_joint: padded grid too large");

    // Zero-padded linear-domain copies; the origin offsets add up and are
    // carried entirely by the output axis lows.
    std::size_t complex_total = 1;
    for (std::size_t m = 0; m + 1 < dims; ++m) complex_total *= static_cast<std::size_t>(fft_n[m]);
    complex_total *= static_cast<std::size_t>(fft_n[dims - 1] / 2 + 1);

    std::vector<double> pa(fft_total, 0.0), pb(fft_total, 0.0);
    const auto scatter = [&](const JointDistribution& src, std::vector<double>& dst) {
        std::vector<int> idx(dims, 0);
        for (std::size_t flat = 0; flat < src.log_probs.size(); ++flat) {
            std::size_t padded = 0;
            for (std::size_t m = 0; m < dims; ++m)
                padded = padded * static_cast<std::size_t>(fft_n[m]) + static_cast<std::size_t>(idx[m]);
            dst[padded] = std::exp(src.log_probs[flat]);
            for (std::size_t m = dims; m-- > 0;) {
                if (++idx[m] < src.grid.axes[m].size()) break;
                idx[m] = 0;
            }
        }
    };
    scatter(a, pa);
    scatter(b, pb);

    std::vector<fftw_complex> fa(complex_total), fb(complex_total);
    fftw_plan plan_a = fftw_plan_dft_r2c(static_cast<int>(dims), fft_n.data(), pa.data(), fa.data(),
                                         FFTW_ESTIMATE);
    fftw_execute(plan_a);
    fftw_destroy_plan(plan_a);
    fftw_plan plan_b = fftw_plan_dft_r2c(static_cast<int>(dims), fft_n.data(), pb.data(), fb.data(),
                                         FFTW_ESTIMATE);
    fftw_execute(plan_b);
    fftw_destroy_plan(plan_b);

    const double scale = 1.0 / static_cast<double>(fft_total);
    for (std::size_t i = 0; i < complex_total; ++i) {
        const double re = fa[i][0] * fb[i][0] - fa[i][1] * fb[i][1];
        const double im = fa[i][0] * fb[i][1] + fa[i][1] * fb[i][0];
        fa[i][0] = re * scale;
        fa[i][1] = im * scale;
    }
    fftw_plan plan_inv = fftw_plan_dft_c2r(static_cast<int>(dims), fft_n.data(), fa.data(), pa.data(),
                                           FFTW_ESTIMATE);
    fftw_execute(plan_inv);
    fftw_destroy_plan(plan_inv);

    JointDistribution out;
    out.grid = out_grid;
    out.engine_tag = "incoherent";
    out.log_probs.assign(out_grid.size(), kNegInf);
    std::vector<int> idx(dims, 0);
    for (std::size_t flat = 0; flat < out.log_probs.size(); ++flat) {
        std::size_t padded = 0;
        for (std::size_t m = 0; m < dims; ++m)
            padded = padded * static_cast<std::size_t>(fft_n[m]) + static_cast<std::size_t>(idx[m]);
        const double v = pa[padded];
        // Roundoff from the transform pair can leave tiny negatives.
        out.log_probs[flat] = v > 0.0 ? std::log(v) : kNegInf;
        for (std::size_t m = dims; m-- > 0;) {
            if (++idx[m] < out_grid.axes[m].size()) break;
            idx[m] = 0;
        }
    }
    out.tail_bound = a.tail_bound + b.tail_bound + 1e-12;
    out.quad = a.quad;
    return out;
}

} // namespace photonlab
