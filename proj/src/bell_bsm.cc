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

#include "ddiqkd/bell_bsm.h"

#include <cmath>
#include <stdexcept>
#include <string>

namespace ddiqkd {

namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440;

constexpr std::size_t kHu = two_qubit_index(Polarization::H, Path::Upper);
constexpr std::size_t kHl = two_qubit_index(Polarization::H, Path::Lower);
constexpr std::size_t kVu = two_qubit_index(Polarization::V, Path::Upper);
constexpr std::size_t kVl = two_qubit_index(Polarization::V, Path::Lower);

UnitaryMatrix build_bsm_unitary() {
    // Half-wave plate on the upper arm: |Hu> <-> |Vu>.
    CMatrix hwp = CMatrix::Zero(4, 4);
    hwp(kVu, kHu) = 1.0;
    hwp(kHu, kVu) = 1.0;
    hwp(kHl, kHl) = 1.0;
    hwp(kVl, kVl) = 1.0;

    // Recombining beam splitter acts on the path index of each polarization.
    CMatrix bs2(2, 2);
    bs2 << kInvSqrt2, kInvSqrt2, kInvSqrt2, -kInvSqrt2;
    CMatrix bs = CMatrix::Zero(4, 4);
    bs.block(0, 0, 2, 2) = bs2;
    bs.block(2, 2, 2, 2) = bs2;

    return UnitaryMatrix(bs * hwp);
}

}  // namespace

std::string_view to_string(BellLabel b) {
    switch (b) {
        case BellLabel::PhiPlus:
            return "PhiPlus";
        case BellLabel::PhiMinus:
            return "PhiMinus";
        case BellLabel::PsiPlus:
            return "PsiPlus";
        case BellLabel::PsiMinus:
            return "PsiMinus";
    }
    return "?";
}

BellLabel parse_bell(std::string_view text) {
    for (auto b : kAllBellLabels) {
        if (text == to_string(b)) {
            return b;
        }
    }
    throw std::invalid_argument("unknown Bell state '" + std::string(text) + "'");
}

std::string_view to_string(BsmOutcome o) {
    if (auto b = as_bell(o)) {
        return to_string(*b);
    }
    return o == BsmOutcome::DoubleClick ? "DoubleClick" : "NoClick";
}

BsmOutcome parse_outcome(std::string_view text) {
    for (auto o : kAllOutcomes) {
        if (text == to_string(o)) {
            return o;
        }
    }
    throw std::invalid_argument("unknown BSM outcome '" + std::string(text) + "'");
}

StateVector bell_vector(BellLabel b) {
    CVector v = CVector::Zero(4);
    switch (b) {
        case BellLabel::PhiPlus:
            v(kHu) = kInvSqrt2;
            v(kVl) = kInvSqrt2;
            break;
        case BellLabel::PhiMinus:
            v(kHu) = kInvSqrt2;
            v(kVl) = -kInvSqrt2;
            break;
        case BellLabel::PsiPlus:
            v(kHl) = kInvSqrt2;
            v(kVu) = kInvSqrt2;
            break;
        case BellLabel::PsiMinus:
            v(kHl) = kInvSqrt2;
            v(kVu) = -kInvSqrt2;
            break;
    }
    return StateVector(std::move(v));
}

BellLabel port_to_bell(DetectorPort port) {
    if (port.output_arm != 1 && port.output_arm != 2) {
        throw std::invalid_argument("port_to_bell: output arm must be 1 or 2");
    }
    if (port.polarization == Polarization::V) {
        return port.output_arm == 1 ? BellLabel::PhiPlus : BellLabel::PhiMinus;
    }
    return port.output_arm == 1 ? BellLabel::PsiPlus : BellLabel::PsiMinus;
}

DetectorPort bell_to_port(BellLabel b) {
    switch (b) {
        case BellLabel::PhiPlus:
            return {1, Polarization::V};
        case BellLabel::PhiMinus:
            return {2, Polarization::V};
        case BellLabel::PsiPlus:
            return {1, Polarization::H};
        case BellLabel::PsiMinus:
            return {2, Polarization::H};
    }
    throw std::invalid_argument("bell_to_port: bad label");
}

StateVector bob_spatial_state(double phi) {
    return StateVector{Complex{kInvSqrt2, 0.0}, std::polar(kInvSqrt2, phi)};
}

double bob_phase(Bb84State s) {
    switch (s.label) {
        case Bb84Label::Plus:
            return 0.0;
        case Bb84Label::PlusI:
            return std::numbers::pi / 2;
        case Bb84Label::Minus:
            return std::numbers::pi;
        case Bb84Label::MinusI:
            return 3 * std::numbers::pi / 2;
    }
    return 0.0;
}

const UnitaryMatrix &bsm_unitary() {
    static const UnitaryMatrix u = build_bsm_unitary();
    return u;
}

BellProbabilities bell_probabilities(Bb84State alice, double phi) {
    return bell_probabilities(bb84_vector(alice), phi);
}

BellProbabilities bell_probabilities(const StateVector &alice_polarization, double phi) {
    StateVector psi = tensor(alice_polarization, bob_spatial_state(phi));
    BellProbabilities p{};
    for (auto b : kAllBellLabels) {
        p[static_cast<std::size_t>(b)] = std::norm(bell_vector(b).inner(psi));
    }
    return p;
}

BellProbabilities bell_probabilities(const DensityMatrix &alice_polarization, double phi) {
    DensityMatrix rho = tensor(alice_polarization, DensityMatrix::pure(bob_spatial_state(phi)));
    BellProbabilities p{};
    for (auto b : kAllBellLabels) {
        const CVector v = bell_vector(b).amplitudes();
        p[static_cast<std::size_t>(b)] = std::real(v.dot(rho.matrix() * v));
    }
    return p;
}

std::array<double, kNumPorts> port_probabilities(const DensityMatrix &alice_polarization, double phi) {
    DensityMatrix rho = tensor(alice_polarization, DensityMatrix::pure(bob_spatial_state(phi)));
    DensityMatrix out = bsm_unitary().apply(rho);
    std::array<double, kNumPorts> p{};
    for (std::size_t k = 0; k < kNumPorts; k++) {
        p[k] = out(k, k).real();
    }
    return p;
}

DecodedBit decode_bit(Bb84State bob, BsmOutcome outcome) {
    if (outcome == BsmOutcome::NoClick) {
        throw std::logic_error("decode_bit: NoClick rounds must be discarded before decoding");
    }
    if (outcome == BsmOutcome::DoubleClick) {
        return DecodedBit::Random;
    }
    BellLabel k = *as_bell(outcome);
    bool zero = false;
    switch (bob.label) {
        case Bb84Label::Plus:
            zero = k == BellLabel::PhiPlus || k == BellLabel::PsiPlus;
            break;
        case Bb84Label::Minus:
            zero = k == BellLabel::PhiMinus || k == BellLabel::PsiMinus;
            break;
        case Bb84Label::PlusI:
            zero = k == BellLabel::PsiPlus || k == BellLabel::PhiMinus;
            break;
        case Bb84Label::MinusI:
            zero = k == BellLabel::PhiPlus || k == BellLabel::PsiMinus;
            break;
    }
    return zero ? DecodedBit::Zero : DecodedBit::One;
}

}  // namespace ddiqkd
