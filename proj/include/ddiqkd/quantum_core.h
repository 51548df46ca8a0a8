// Copyright 2026 The ddiqkd Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef DDIQKD_QUANTUM_CORE_H
#define DDIQKD_QUANTUM_CORE_H

#include <Eigen/Dense>

#include <array>
#include <complex>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>

namespace ddiqkd {

using Complex = std::complex<double>;
using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;

/// Absolute tolerance used when validating states and unitaries.
inline constexpr double kStateTolerance = 1e-12;
/// Eigenvalues of a density matrix may dip this far below zero from roundoff.
inline constexpr double kPsdTolerance = 1e-10;
/// Largest Hilbert space dimension the dense kernels accept.
inline constexpr std::size_t kMaxDim = 256;

/// Thrown when a requested dimension exceeds a configured maximum.
struct CapacityError : std::length_error {
    using std::length_error::length_error;
};

/// Thrown when operand shapes are inconsistent.
struct ShapeError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// A pure state. Immutable after construction.
class StateVector {
   public:
    /// Wraps `amplitudes` as-is. Use `normalized()` to also check the norm.
    explicit StateVector(CVector amplitudes);
    StateVector(std::initializer_list<Complex> amplitudes);

    /// Throws std::invalid_argument unless |amplitudes| = 1 within kStateTolerance.
    static StateVector normalized(CVector amplitudes);
    static StateVector basis(std::size_t dim, std::size_t index);

    std::size_t dim() const {
        return static_cast<std::size_t>(amps_.size());
    }
    const CVector &amplitudes() const {
        return amps_;
    }
    Complex operator[](std::size_t k) const {
        return amps_(static_cast<Eigen::Index>(k));
    }
    double norm() const {
        return amps_.norm();
    }
    bool is_normalized(double tol = kStateTolerance) const;

    /// <this|other>
    Complex inner(const StateVector &other) const;

   private:
    CVector amps_;
};

/// Hermitian, unit trace, positive semidefinite. Validated on construction.
class DensityMatrix {
   public:
    explicit DensityMatrix(CMatrix entries);

    static DensityMatrix pure(const StateVector &psi);
    static DensityMatrix maximally_mixed(std::size_t dim);

    /// Skips validation. For intermediate results whose validity is implied by
    /// construction (e.g. convex combinations of valid states).
    static DensityMatrix unchecked(CMatrix entries);

    std::size_t dim() const {
        return static_cast<std::size_t>(m_.rows());
    }
    const CMatrix &matrix() const {
        return m_;
    }
    Complex operator()(std::size_t r, std::size_t c) const {
        return m_(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
    }
    double trace() const {
        return m_.trace().real();
    }
    double purity() const;

    /// Empty string when valid, otherwise a description of the first violation.
    static std::string validate(const CMatrix &m, double tol = kStateTolerance, double psd_tol = kPsdTolerance);

   private:
    struct NoCheck {};
    DensityMatrix(CMatrix entries, NoCheck) : m_(std::move(entries)) {
    }
    CMatrix m_;
};

class UnitaryMatrix {
   public:
    /// Throws std::invalid_argument unless U^dagger U = I within kStateTolerance.
    explicit UnitaryMatrix(CMatrix entries);

    static UnitaryMatrix identity(std::size_t dim);

    std::size_t dim() const {
        return static_cast<std::size_t>(m_.rows());
    }
    const CMatrix &matrix() const {
        return m_;
    }

    UnitaryMatrix adjoint() const;
    StateVector apply(const StateVector &psi) const;
    DensityMatrix apply(const DensityMatrix &rho) const;
    UnitaryMatrix operator*(const UnitaryMatrix &rhs) const;

   private:
    CMatrix m_;
};

/// Deviation of U^dagger U from the identity, in max-abs norm.
double unitarity_error(const CMatrix &u);

enum class Basis { X, Y };

/// The four BB84 polarization states.
enum class Bb84Label { Plus = 0, Minus = 1, PlusI = 2, MinusI = 3 };

struct Bb84State {
    Bb84Label label;

    constexpr Basis basis() const {
        return (label == Bb84Label::Plus || label == Bb84Label::Minus) ? Basis::X : Basis::Y;
    }
    constexpr int bit() const {
        return (label == Bb84Label::Plus || label == Bb84Label::PlusI) ? 0 : 1;
    }
    constexpr int index() const {
        return static_cast<int>(label);
    }
    constexpr bool operator==(const Bb84State &) const = default;

    static constexpr Bb84State from_index(int k) {
        return Bb84State{static_cast<Bb84Label>(k & 3)};
    }
    static constexpr Bb84State from(Basis b, int bit) {
        if (b == Basis::X) {
            return Bb84State{bit == 0 ? Bb84Label::Plus : Bb84Label::Minus};
        }
        return Bb84State{bit == 0 ? Bb84Label::PlusI : Bb84Label::MinusI};
    }
};

inline constexpr std::array<Bb84State, 4> kAllBb84States{
    Bb84State{Bb84Label::Plus},
    Bb84State{Bb84Label::Minus},
    Bb84State{Bb84Label::PlusI},
    Bb84State{Bb84Label::MinusI},
};

/// "Plus", "Minus", "PlusI", "MinusI".
std::string_view to_string(Bb84Label label);
/// Accepts the names above as well as "+", "-", "+i", "-i".
Bb84State parse_bb84(std::string_view text);
std::string_view to_string(Basis b);

enum class Polarization { H = 0, V = 1 };

/// Spatial mode. Index 0 is the upper arm (or first port), 1 the lower arm.
enum class Path { Upper = 0, Lower = 1 };

/// Index into the two-qubit basis |Hu>, |Hl>, |Vu>, |Vl>.
constexpr std::size_t two_qubit_index(Polarization p, Path s) {
    return 2 * static_cast<std::size_t>(p) + static_cast<std::size_t>(s);
}

/// Two-dimensional vector in the {|H>, |V>} basis.
StateVector bb84_vector(Bb84State s);

/// Kronecker product; the left operand is the slower-varying index.
StateVector tensor(const StateVector &a, const StateVector &b, std::size_t max_dim = kMaxDim);
DensityMatrix tensor(const DensityMatrix &a, const DensityMatrix &b, std::size_t max_dim = kMaxDim);

/// Traces out every subsystem not listed in `keep`. Subsystems are ordered
/// slowest-varying first, matching `tensor`.
DensityMatrix partial_trace(
    const DensityMatrix &rho, std::span<const std::size_t> subsystem_dims, std::span<const std::size_t> keep);

/// Half the trace norm of (a - b).
double trace_distance(const DensityMatrix &a, const DensityMatrix &b);

/// |<a|b>| == 1 within tol.
bool equal_up_to_phase(const StateVector &a, const StateVector &b, double tol = 1e-10);

}  // namespace ddiqkd

#endif
