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

#include "ddiqkd/quantum_core.h"

#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/KroneckerProduct>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <vector>

namespace ddiqkd {

namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440;

std::size_t checked_product(std::size_t a, std::size_t b, std::size_t max_dim) {
    if (a != 0 && b > max_dim / a) {
        throw CapacityError("tensor: dimension " + std::to_string(a) + "x" + std::to_string(b) + " exceeds maximum " +
                            std::to_string(max_dim));
    }
    std::size_t d = a * b;
    if (d > max_dim) {
        throw CapacityError("tensor: dimension " + std::to_string(d) + " exceeds maximum " + std::to_string(max_dim));
    }
    return d;
}

}  // namespace

StateVector::StateVector(CVector amplitudes) : amps_(std::move(amplitudes)) {
    if (amps_.size() == 0) {
        throw ShapeError("StateVector: dimension must be positive");
    }
}

StateVector::StateVector(std::initializer_list<Complex> amplitudes) : amps_(amplitudes.size()) {
    if (amplitudes.size() == 0) {
        throw ShapeError("StateVector: dimension must be positive");
    }
    Eigen::Index k = 0;
    for (const auto &a : amplitudes) {
        amps_(k++) = a;
    }
}

StateVector StateVector::normalized(CVector amplitudes) {
    StateVector s(std::move(amplitudes));
    if (!s.is_normalized()) {
        std::ostringstream msg;
        msg << "StateVector: norm " << s.norm() << " differs from 1";
        throw std::invalid_argument(msg.str());
    }
    return s;
}

StateVector StateVector::basis(std::size_t dim, std::size_t index) {
    if (index >= dim) {
        throw ShapeError("StateVector::basis: index out of range");
    }
    CVector v = CVector::Zero(static_cast<Eigen::Index>(dim));
    v(static_cast<Eigen::Index>(index)) = 1.0;
    return StateVector(std::move(v));
}

bool StateVector::is_normalized(double tol) const {
    return std::abs(amps_.squaredNorm() - 1.0) <= tol;
}

Complex StateVector::inner(const StateVector &other) const {
    if (dim() != other.dim()) {
        throw ShapeError("inner: dimension mismatch");
    }
    return amps_.dot(other.amps_);
}

DensityMatrix::DensityMatrix(CMatrix entries) : m_(std::move(entries)) {
    std::string err = validate(m_);
    if (!err.empty()) {
        throw std::invalid_argument("DensityMatrix: " + err);
    }
}

DensityMatrix DensityMatrix::pure(const StateVector &psi) {
    const CVector &a = psi.amplitudes();
    return DensityMatrix(a * a.adjoint(), NoCheck{});
}

DensityMatrix DensityMatrix::maximally_mixed(std::size_t dim) {
    auto n = static_cast<Eigen::Index>(dim);
    return DensityMatrix(CMatrix::Identity(n, n) / static_cast<double>(dim), NoCheck{});
}

DensityMatrix DensityMatrix::unchecked(CMatrix entries) {
    return DensityMatrix(std::move(entries), NoCheck{});
}

double DensityMatrix::purity() const {
    return (m_ * m_).trace().real();
}

std::string DensityMatrix::validate(const CMatrix &m, double tol, double psd_tol) {
    if (m.rows() != m.cols() || m.rows() == 0) {
        return "matrix must be square and non-empty";
    }
    double herm = (m - m.adjoint()).cwiseAbs().maxCoeff();
    if (herm > tol) {
        return "not Hermitian (deviation " + std::to_string(herm) + ")";
    }
    Complex tr = m.trace();
    if (std::abs(tr - 1.0) > tol) {
        return "trace " + std::to_string(tr.real()) + " differs from 1";
    }
    Eigen::SelfAdjointEigenSolver<CMatrix> eig(m, Eigen::EigenvaluesOnly);
    double min_eig = eig.eigenvalues().minCoeff();
    if (min_eig < -psd_tol) {
        return "negative eigenvalue " + std::to_string(min_eig);
    }
    return {};
}

double unitarity_error(const CMatrix &u) {
    if (u.rows() != u.cols()) {
        return INFINITY;
    }
    CMatrix d = u.adjoint() * u - CMatrix::Identity(u.rows(), u.cols());
    return d.cwiseAbs().maxCoeff();
}

UnitaryMatrix::UnitaryMatrix(CMatrix entries) : m_(std::move(entries)) {
    if (m_.rows() == 0 || m_.rows() != m_.cols()) {
        throw ShapeError("UnitaryMatrix: matrix must be square and non-empty");
    }
    double err = unitarity_error(m_);
    if (err > kStateTolerance) {
        throw std::invalid_argument("UnitaryMatrix: U^dagger U deviates from identity by " + std::to_string(err));
    }
}

UnitaryMatrix UnitaryMatrix::identity(std::size_t dim) {
    auto n = static_cast<Eigen::Index>(dim);
    return UnitaryMatrix(CMatrix::Identity(n, n));
}

UnitaryMatrix UnitaryMatrix::adjoint() const {
    return UnitaryMatrix(m_.adjoint());
}

StateVector UnitaryMatrix::apply(const StateVector &psi) const {
    if (psi.dim() != dim()) {
        throw ShapeError("UnitaryMatrix::apply: dimension mismatch");
    }
    return StateVector(m_ * psi.amplitudes());
}

DensityMatrix UnitaryMatrix::apply(const DensityMatrix &rho) const {
    if (rho.dim() != dim()) {
        throw ShapeError("UnitaryMatrix::apply: dimension mismatch");
    }
    return DensityMatrix::unchecked(m_ * rho.matrix() * m_.adjoint());
}

UnitaryMatrix UnitaryMatrix::operator*(const UnitaryMatrix &rhs) const {
    if (rhs.dim() != dim()) {
        throw ShapeError("UnitaryMatrix: dimension mismatch in product");
    }
    return UnitaryMatrix(m_ * rhs.m_);
}

std::string_view to_string(Bb84Label label) {
    switch (label) {
        case Bb84Label::Plus:
            return "Plus";
        case Bb84Label::Minus:
            return "Minus";
        case Bb84Label::PlusI:
            return "PlusI";
        case Bb84Label::MinusI:
            return "MinusI";
    }
    return "?";
}

std::string_view to_string(Basis b) {
    return b == Basis::X ? "X" : "Y";
}

Bb84State parse_bb84(std::string_view text) {
    for (auto s : kAllBb84States) {
        if (text == to_string(s.label)) {
            return s;
        }
    }
    if (text == "+") return Bb84State{Bb84Label::Plus};
    if (text == "-") return Bb84State{Bb84Label::Minus};
    if (text == "+i") return Bb84State{Bb84Label::PlusI};
    if (text == "-i") return Bb84State{Bb84Label::MinusI};
    throw std::invalid_argument("unknown BB84 state '" + std::string(text) + "'");
}

StateVector bb84_vector(Bb84State s) {
    const Complex r{kInvSqrt2, 0.0};
    switch (s.label) {
        case Bb84Label::Plus:
            return StateVector{r, r};
        case Bb84Label::Minus:
            return StateVector{r, -r};
        case Bb84Label::PlusI:
            return StateVector{r, Complex{0.0, kInvSqrt2}};
        case Bb84Label::MinusI:
            return StateVector{r, Complex{0.0, -kInvSqrt2}};
    }
    throw std::invalid_argument("bb84_vector: bad label");
}

StateVector tensor(const StateVector &a, const StateVector &b, std::size_t max_dim) {
    checked_product(a.dim(), b.dim(), max_dim);
    CVector out = Eigen::kroneckerProduct(a.amplitudes(), b.amplitudes()).eval();
    return StateVector(std::move(out));
}

DensityMatrix tensor(const DensityMatrix &a, const DensityMatrix &b, std::size_t max_dim) {
    checked_product(a.dim(), b.dim(), max_dim);
    CMatrix out = Eigen::kroneckerProduct(a.matrix(), b.matrix()).eval();
    return DensityMatrix::unchecked(std::move(out));
}

DensityMatrix partial_trace(
    const DensityMatrix &rho, std::span<const std::size_t> subsystem_dims, std::span<const std::size_t> keep) {
    const std::size_t n_sub = subsystem_dims.size();
    if (n_sub == 0) {
        throw ShapeError("partial_trace: no subsystems given");
    }
    std::size_t total = 1;
    for (auto d : subsystem_dims) {
        if (d == 0) {
            throw ShapeError("partial_trace: zero subsystem dimension");
        }
        total *= d;
    }
    if (total != rho.dim()) {
        throw ShapeError("partial_trace: subsystem dimensions multiply to " + std::to_string(total) +
                         " but matrix has dimension " + std::to_string(rho.dim()));
    }
    std::vector<bool> kept(n_sub, false);
    for (auto k : keep) {
        if (k >= n_sub) {
            throw ShapeError("partial_trace: keep index out of range");
        }
        kept[k] = true;
    }

    // Row-major strides: subsystem 0 is slowest.
    std::vector<std::size_t> stride(n_sub);
    std::size_t acc = 1;
    for (std::size_t k = n_sub; k-- > 0;) {
        stride[k] = acc;
        acc *= subsystem_dims[k];
    }

    std::vector<std::size_t> kept_ids, traced_ids;
    for (std::size_t k = 0; k < n_sub; k++) {
        (kept[k] ? kept_ids : traced_ids).push_back(k);
    }
    std::size_t kept_dim = 1, traced_dim = 1;
    for (auto k : kept_ids) kept_dim *= subsystem_dims[k];
    for (auto k : traced_ids) traced_dim *= subsystem_dims[k];

    // Full index offset contributed by a composite index over a subset of subsystems.
    auto offset = [&](const std::vector<std::size_t> &ids, std::size_t composite) {
        std::size_t off = 0;
        for (std::size_t j = ids.size(); j-- > 0;) {
            std::size_t d = subsystem_dims[ids[j]];
            off += (composite % d) * stride[ids[j]];
            composite /= d;
        }
        return off;
    };
    std::vector<std::size_t> kept_off(kept_dim), traced_off(traced_dim);
    for (std::size_t i = 0; i < kept_dim; i++) kept_off[i] = offset(kept_ids, i);
    for (std::size_t i = 0; i < traced_dim; i++) traced_off[i] = offset(traced_ids, i);

    const CMatrix &m = rho.matrix();
    CMatrix out = CMatrix::Zero(static_cast<Eigen::Index>(kept_dim), static_cast<Eigen::Index>(kept_dim));
    for (std::size_t r = 0; r < kept_dim; r++) {
        for (std::size_t c = 0; c < kept_dim; c++) {
            Complex s = 0;
            for (std::size_t t = 0; t < traced_dim; t++) {
                s += m(static_cast<Eigen::Index>(kept_off[r] + traced_off[t]),
                       static_cast<Eigen::Index>(kept_off[c] + traced_off[t]));
            }
            out(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = s;
        }
    }
    return DensityMatrix::unchecked(std::move(out));
}

double trace_distance(const DensityMatrix &a, const DensityMatrix &b) {
    if (a.dim() != b.dim()) {
        throw ShapeError("trace_distance: dimension mismatch");
    }
    CMatrix d = a.matrix() - b.matrix();
    // Symmetrize so roundoff cannot push the solver off the Hermitian path.
    d = (0.5 * (d + d.adjoint())).eval();
    Eigen::SelfAdjointEigenSolver<CMatrix> eig(d, Eigen::EigenvaluesOnly);
    double s = eig.eigenvalues().cwiseAbs().sum();
    return std::clamp(0.5 * s, 0.0, 1.0);
}

bool equal_up_to_phase(const StateVector &a, const StateVector &b, double tol) {
    if (a.dim() != b.dim()) {
        return false;
    }
    return std::abs(std::abs(a.inner(b)) - 1.0) <= tol;
}

}  // namespace ddiqkd
