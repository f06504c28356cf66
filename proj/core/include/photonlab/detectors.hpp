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
#ifndef PHOTONLAB_DETECTORS_HPP
#define PHOTONLAB_DETECTORS_HPP

#include <complex>
#include <vector>

#include "photonlab/sources.hpp"

namespace photonlab {

using cd = std::complex<double>;

/// 2x2 complex matrix on the (a, b) mode basis.
struct Mat2c {
    cd aa{}, ab{}, ba{}, bb{};
};

/// Expected counts (<n>_a, <n>_b) a detector receives from each source.
struct MeanPair {
    double a = 0.0;
    double b = 0.0;
};

/// One detector: R_ab = xi e^{i theta} sqrt(R_aa R_bb). The parametrized form
/// is canonical; raw Hermitian matrices are accepted and converted.
class DetectorSpec {
public:
    DetectorSpec(double r_aa, double r_bb, double xi, double theta);
    static DetectorSpec from_matrix(const Mat2c& r);

    double r_aa() const { return r_aa_; }
    double r_bb() const { return r_bb_; }
    double xi() const { return xi_; }
    double theta() const { return theta_; }

    Mat2c matrix() const;

private:
    double r_aa_, r_bb_, xi_, theta_;
};

class DetectorArray {
public:
    explicit DetectorArray(std::vector<DetectorSpec> specs);

    int size() const { return static_cast<int>(specs_.size()); }
    const DetectorSpec& operator[](int m) const { return specs_[static_cast<std::size_t>(m)]; }
    const std::vector<DetectorSpec>& specs() const { return specs_; }

    Mat2c sum_matrix() const;

private:
    std::vector<DetectorSpec> specs_;
};

/// Per-detector (<n>_a, <n>_b) = (R_aa Nbar_a, R_bb Nbar_b) for independent
/// sources with finite means.
std::vector<MeanPair> expected_counts(const DetectorArray& array, const SourcePair& sources);

/// Mean-field count n_bar(delta) = <n>_a + <n>_b + 2 xi sqrt(<n>_a <n>_b) cos(delta + theta).
double mean_count(const DetectorSpec& spec, MeanPair means, double delta);

/// max over delta of mean_count (the cosine at its maximum).
double max_mean_count(const DetectorSpec& spec, MeanPair means);

/// The closed curve {n_bar_m(delta)} swept by the relative phase. The
/// analytic parameters (base, osc, theta per detector) ride along so that
/// distance queries can refine between grid nodes.
struct MeanFieldTrajectory {
    std::vector<double> deltas;               // uniform on [-pi, pi)
    std::vector<std::vector<double>> points;  // points[i][m]
    std::vector<double> base, osc, theta;     // n_bar_m = base + osc cos(delta + theta)
    int detector_count() const { return points.empty() ? 0 : static_cast<int>(points.front().size()); }
};

MeanFieldTrajectory trajectory(const DetectorArray& array, const SourcePair& sources, int grid_size);

/// One isometry row. `detector` is the owning detector index, or -1 for a
/// loss row.
struct DilationRow {
    cd a{}, b{};
    int detector = -1;
};

/// Isometric dilation of the detector array: detector rows satisfy
/// sum_{rows of m} v v^dag = R^(m); the two loss rows are the columns of the
/// principal square root of I - sum_m R^(m); all rows together satisfy
/// sum v v^dag = I.
struct Dilation {
    std::vector<DilationRow> rows;
    std::vector<std::vector<int>> detector_rows;  // row indices per detector
    std::vector<int> loss_rows;
};

/// Throws PhysicalityError (with the offending eigenvalue) if
/// I - sum_m R^(m) is not positive semidefinite.
Dilation dilation(const DetectorArray& array);

namespace detail {
/// Hermitian 2x2 eigen-decomposition with deterministic conventions:
/// eigenvalues descending, ties resolved to the standard basis, first nonzero
/// eigenvector component real positive.
void hermitian_eig2(const Mat2c& r, double eigenvalues[2], cd eigenvectors[2][2]);
Mat2c principal_sqrt_psd(const Mat2c& r, double tol, double* min_eigenvalue);
} // namespace detail

} // namespace photonlab

#endif
