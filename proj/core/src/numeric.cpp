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
#include "photonlab/numeric.hpp"

#include <algorithm>
#include <cmath>

namespace photonlab {

double pairwise_sum(std::span<const double> values) {
    const std::size_t n = values.size();
    if (n <= 32) {
        double s = 0.0;
        for (double v : values) s += v;
        return s;
    }
    const std::size_t half = n / 2;
    return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

void poisson_pmf_row(double mean, int n_max, double* out) {
    if (mean <= 0.0) {
        std::fill(out, out + n_max + 1, 0.0);
        out[0] = 1.0;
        return;
    }
    int mode = static_cast<int>(mean);
    mode = std::clamp(mode, 0, n_max);
    out[mode] = std::exp(log_poisson_pmf(mode, mean));
    for (int n = mode; n < n_max; ++n)
        out[n + 1] = out[n] * mean / static_cast<double>(n + 1);
    for (int n = mode; n > 0; --n)
        out[n - 1] = out[n] * static_cast<double>(n) / mean;
}

double golden_section_min(double lo, double hi, int iters, const std::function<double(double)>& f) {
    constexpr double invphi = 0.6180339887498949;
    double a = lo, b = hi;
    double c = b - (b - a) * invphi;
    double d = a + (b - a) * invphi;
    double fc = f(c), fd = f(d);
    for (int i = 0; i < iters; ++i) {
        if (fc < fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - (b - a) * invphi;
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + (b - a) * invphi;
            fd = f(d);
        }
    }
    return 0.5 * (a + b);
}

} // namespace photonlab
