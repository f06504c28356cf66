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
#include "photonlab/detectors.hpp"

#include <cmath>

#include "photonlab/numeric.hpp"

namespace photonlab {

DetectorSpec::DetectorSpec(double r_aa, double r_bb, double xi, double theta)
    : r_aa_(r_aa), r_bb_(r_bb), xi_(xi), theta_(theta) {
    if (!(r_aa_ > 0.0) || !(r_bb_ > 0.0))
        throw DomainError("DetectorSpec: R_aa and R_bb must be positive");
    if (xi_ < 0.0 || xi_ > 1.0)
        throw DomainError("DetectorSpec: visibility xi must lie in [0, 1]");
}

DetectorSpec DetectorSpec::from_matrix(const Mat2c& r) {
    if (std::abs(r.aa.imag()) > 1e-12 || std::abs(r.bb.imag()) > 1e-12 ||
        std::abs(r.ab - std::conj(r.ba)) > 1e-12)
        throw DomainError("DetectorSpec::from_matrix: matrix is not Hermitian");
    const double aa = r.aa.real();
    const double bb = r.bb.real();
    if (!(aa > 0.0) || !(bb > 0.0))
        throw DomainError("DetectorSpec::from_matrix: diagonal entries must be positive");
    const double bound = std::sqrt(aa * bb);
    const double mag = std::abs(r.ab);
    if (mag > bound * (1.0 + 1e-12))
        throw DomainError("DetectorSpec::from_matrix: |R_ab| exceeds sqrt(R_aa R_bb)");
    const double xi = std::min(mag / bound, 1.0);
    const double theta = xi > 0.0 ? std::arg(r.ab) : 0.0;
    return DetectorSpec(aa, bb, xi, theta);
}

Mat2c DetectorSpec::matrix() const {
    const double mag = xi_ * std::sqrt(r_aa_ * r_bb_);
    const cd ab = mag * cd(std::cos(theta_), std::sin(theta_));
    return Mat2c{cd(r_aa_), ab, std::conj(ab), cd(r_bb_)};
}

DetectorArray::DetectorArray(std::vector<DetectorSpec> specs) : specs_(std::move(specs)) {
    if (specs_.empty()) throw DomainError("DetectorArray: at least one detector required");
}

Mat2c DetectorArray::sum_matrix() const {
    Mat2c sum;
    for (const auto& spec : specs_) {
        const Mat2c r = spec.matrix();
        sum.aa += r.aa;
        sum.ab += r.ab;
        sum.ba += r.ba;
        sum.bb += r.bb;
    }
    return sum;
}

std::vector<MeanPair> expected_counts(const DetectorArray& array, const SourcePair& sources) {
    const auto* pair = sources.independent_pair();
    if (pair == nullptr)
        throw DomainError("expected_counts: defined for independent sources");
    const auto [na, nb] = sources.mode_means();
    std::vector<MeanPair> out;
    out.reserve(static_cast<std::size_t>(array.size()));
    for (const auto& spec : array.specs())
        out.push_back({spec.r_aa() * na, spec.r_bb() * nb});
    return out;
}

double mean_count(const DetectorSpec& spec, MeanPair means, double delta) {
    if (means.a < 0.0 || means.b < 0.0)
        throw DomainError("mean_count: negative mean intensity");
    return means.a + means.b +
           2.0 * spec.xi() * std::sqrt(means.a * means.b) * std::cos(delta + spec.theta());
}

double max_mean_count(const DetectorSpec& spec, MeanPair means) {
    return means.a + means.b + 2.0 * spec.xi() * std::sqrt(means.a * means.b);
}

MeanFieldTrajectory trajectory(const DetectorArray& array, const SourcePair& sources, int grid_size) {
    if (grid_size < 4) throw DomainError("trajectory: grid_size must be at least 4");
    const auto [na, nb] = sources.mode_means();
    MeanFieldTrajectory traj;
    traj.deltas.resize(static_cast<std::size_t>(grid_size));
    traj.points.resize(static_cast<std::size_t>(grid_size));
    for (int m = 0; m < array.size(); ++m) {
        const double a = array[m].r_aa() * na;
        const double b = array[m].r_bb() * nb;
        traj.base.push_back(a + b);
        traj.osc.push_back(2.0 * array[m].xi() * std::sqrt(a * b));
        traj.theta.push_back(array[m].theta());
    }
    for (int i = 0; i < grid_size; ++i) {
        const double delta = -kPi + 2.0 * kPi * static_cast<double>(i) / static_cast<double>(grid_size);
        traj.deltas[static_cast<std::size_t>(i)] = delta;
        auto& pt = traj.points[static_cast<std::size_t>(i)];
        pt.resize(static_cast<std::size_t>(array.size()));
        for (int m = 0; m < array.size(); ++m)
            pt[static_cast<std::size_t>(m)] = mean_count(array[m], {array[m].r_aa() * na, array[m].r_bb() * nb}, delta);
    }
    return traj;
}

namespace detail {

void hermitian_eig2(const Mat2c& r, double eigenvalues[2], cd eigenvectors[2][2]) {
    const double p = r.aa.real();
    const double q = r.bb.real();
    const cd off = r.ab;
    const double mag = std::abs(off);
    const double tr = p + q;
    const double d = std::hypot(p - q, 2.0 * mag);
    eigenvalues[0] = 0.5 * (tr + d);
    eigenvalues[1] = 0.5 * (tr - d);

    const double scale = std::max({std::abs(p), std::abs(q), mag, 1e-300});
    if (d <= 1e-14 * scale || mag <= 1e-15 * scale) {
        // Degenerate or diagonal: the standard basis, ordered so the vector of
        // the larger diagonal entry comes first.
        const bool swap = (d > 1e-14 * scale) && (q > p);
        eigenvectors[0][0] = swap ? cd(0.0) : cd(1.0);
        eigenvectors[0][1] = swap ? cd(1.0) : cd(0.0);
        eigenvectors[1][0] = swap ? cd(1.0) : cd(0.0);
        eigenvectors[1][1] = swap ? cd(0.0) : cd(1.0);
        return;
    }

    for (int k = 0; k < 2; ++k) {
        const double lambda = eigenvalues[k];
        // Pick the candidate with the larger residual component.
        cd v0, v1;
        if (std::abs(lambda - p) >= std::abs(lambda - q)) {
            v0 = off;
            v1 = cd(lambda - p);
        } else {
            v0 = cd(lambda - q);
            v1 = std::conj(off);
        }
        const double norm = std::sqrt(std::norm(v0) + std::norm(v1));
        v0 /= norm;
        v1 /= norm;
        // Phase convention: first nonzero component real positive.
        cd anchor = std::abs(v0) > 1e-14 ? v0 : v1;
        const cd phase = std::conj(anchor) / std::abs(anchor);
        eigenvectors[k][0] = v0 * phase;
        eigenvectors[k][1] = v1 * phase;
    }
}

Mat2c principal_sqrt_psd(const Mat2c& r, double tol, double* min_eigenvalue) {
    double lam[2];
    cd vec[2][2];
    hermitian_eig2(r, lam, vec);
    if (min_eigenvalue != nullptr) *min_eigenvalue = lam[1];
    if (lam[1] < -tol)
        throw PhysicalityError("principal_sqrt_psd: matrix has a negative eigenvalue", lam[1]);
    Mat2c s;
    for (int k = 0; k < 2; ++k) {
        const double root = std::sqrt(std::max(lam[k], 0.0));
        s.aa += root * vec[k][0] * std::conj(vec[k][0]);
        s.ab += root * vec[k][0] * std::conj(vec[k][1]);
        s.ba += root * vec[k][1] * std::conj(vec[k][0]);
        s.bb += root * vec[k][1] * std::conj(vec[k][1]);
    }
    return s;
}

} // namespace detail

Dilation dilation(const DetectorArray& array) {
    Dilation dil;
    dil.detector_rows.resize(static_cast<std::size_t>(array.size()));

    for (int m = 0; m < array.size(); ++m) {
        const auto& spec = array[m];
        const Mat2c r = spec.matrix();
        if (spec.xi() == 1.0) {
            // Rank one: R = v v^dag with v = (sqrt(R_aa), e^{-i theta} sqrt(R_bb)).
            const cd vb = std::sqrt(spec.r_bb()) * cd(std::cos(spec.theta()), -std::sin(spec.theta()));
            dil.detector_rows[static_cast<std::size_t>(m)].push_back(static_cast<int>(dil.rows.size()));
            dil.rows.push_back({cd(std::sqrt(spec.r_aa())), vb, m});
        } else {
            double lam[2];
            cd vec[2][2];
            detail::hermitian_eig2(r, lam, vec);
            for (int k = 0; k < 2; ++k) {
                const double root = std::sqrt(std::max(lam[k], 0.0));
                dil.detector_rows[static_cast<std::size_t>(m)].push_back(static_cast<int>(dil.rows.size()));
                dil.rows.push_back({root * vec[k][0], root * vec[k][1], m});
            }
        }
    }

    // Loss completion: columns of the principal square root of I - sum R.
    const Mat2c sum = array.sum_matrix();
    const Mat2c residue{cd(1.0) - sum.aa, -sum.ab, -sum.ba, cd(1.0) - sum.bb};
    double min_eig = 0.0;
    Mat2c s;
    try {
        s = detail::principal_sqrt_psd(residue, 1e-12, &min_eig);
    } catch (const PhysicalityError&) {
        throw PhysicalityError("dilation: sum of detector matrices exceeds identity", min_eig);
    }
    dil.loss_rows.push_back(static_cast<int>(dil.rows.size()));
    dil.rows.push_back({s.aa, s.ba, -1});
    dil.loss_rows.push_back(static_cast<int>(dil.rows.size()));
    dil.rows.push_back({s.ab, s.bb, -1});
    return dil;
}

} // namespace photonlab
