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
#ifndef PHOTONLAB_GRID_HPP
#define PHOTONLAB_GRID_HPP

#include <cstddef>
#include <span>
#include <vector>

#include "photonlab/errors.hpp"

namespace photonlab {

/// Photon counts, one entry per detector.
using OutcomeVector = std::vector<int>;

/// Inclusive count range for one detector axis. A pinned axis has lo == hi.
struct AxisRange {
    int lo = 0;
    int hi = 0;
    int size() const { return hi - lo + 1; }
    bool contains(int n) const { return n >= lo && n <= hi; }
};

/// Dense row-major outcome box: axis 0 slowest, last axis fastest.
struct OutcomeGrid {
    std::vector<AxisRange> axes;

    OutcomeGrid() = default;
    explicit OutcomeGrid(std::vector<AxisRange> a) : axes(std::move(a)) {}

    std::size_t dims() const { return axes.size(); }

    std::size_t size() const {
        std::size_t n = 1;
        for (const auto& ax : axes) n *= static_cast<std::size_t>(ax.size());
        return n;
    }

    bool contains(std::span<const int> n) const {
        if (n.size() != axes.size()) return false;
        for (std::size_t i = 0; i < axes.size(); ++i)
            if (!axes[i].contains(n[i])) return false;
        return true;
    }

    std::size_t flat_index(std::span<const int> n) const {
        if (!contains(n)) throw ShapeError("outcome outside grid bounds");
        std::size_t idx = 0;
        for (std::size_t i = 0; i < axes.size(); ++i)
            idx = idx * static_cast<std::size_t>(axes[i].size()) +
                  static_cast<std::size_t>(n[i] - axes[i].lo);
        return idx;
    }

    OutcomeVector unflatten(std::size_t idx) const {
        OutcomeVector n(axes.size());
        for (std::size_t i = axes.size(); i-- > 0;) {
            const auto w = static_cast<std::size_t>(axes[i].size());
            n[i] = axes[i].lo + static_cast<int>(idx % w);
            idx /= w;
        }
        return n;
    }
};

} // namespace photonlab

#endif
