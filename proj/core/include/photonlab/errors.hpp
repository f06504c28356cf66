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
#ifndef PHOTONLAB_ERRORS_HPP
#define PHOTONLAB_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace photonlab {

/// Base class for all photonlab errors.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Invalid argument or unsupported representation for the requested operation.
class DomainError : public Error {
public:
    explicit DomainError(const std::string& what) : Error(what) {}
};

/// Total detection exceeds unity: I - sum_m R^(m) has a negative eigenvalue.
class PhysicalityError : public Error {
public:
    PhysicalityError(const std::string& what, double eigenvalue)
        : Error(what), offending_eigenvalue(eigenvalue) {}
    double offending_eigenvalue;
};

/// A quadrature failed to reach its tolerance within the node budget.
class NonConvergenceError : public Error {
public:
    NonConvergenceError(const std::string& what, double achieved)
        : Error(what), achieved_tolerance(achieved) {}
    double achieved_tolerance;
};

/// Mismatched grids or outcome shapes.
class ShapeError : public Error {
public:
    explicit ShapeError(const std::string& what) : Error(what) {}
};

} // namespace photonlab

#endif
