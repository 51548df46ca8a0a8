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

// Bell states over polarization (x) path of one photon, and the linear-optical
// circuit that measures them deterministically.
//
// Conventions (fixed project-wide):
//   two-qubit basis   |Hu>, |Hl>, |Vu>, |Vl>   (polarization is the slow index)
//   recombining BS    out1 = (u + l)/sqrt2,  out2 = (u - l)/sqrt2
//   detector ports    index = 2*pol + (arm - 1), i.e. (1,H), (2,H), (1,V), (2,V)
// With these, the circuit maps
//   Phi+ -> (1,V)   Phi- -> (2,V)   Psi+ -> (1,H)   Psi- -> -(2,H)

#ifndef DDIQKD_BELL_BSM_H
#define DDIQKD_BELL_BSM_H

#include <array>
#include <numbers>
#include <optional>
#include <string_view>

#include "ddiqkd/quantum_core.h"

namespace ddiqkd {

enum class BellLabel { PhiPlus = 0, PhiMinus = 1, PsiPlus = 2, PsiMinus = 3 };

inline constexpr std::array<BellLabel, 4> kAllBellLabels{
    BellLabel::PhiPlus, BellLabel::PhiMinus, BellLabel::PsiPlus, BellLabel::PsiMinus};

std::string_view to_string(BellLabel b);
BellLabel parse_bell(std::string_view text);

/// The normalized Bell vector in the global two-qubit basis.
StateVector bell_vector(BellLabel b);

enum class BsmOutcome { PhiPlus = 0, PhiMinus = 1, PsiPlus = 2, PsiMinus = 3, DoubleClick = 4, NoClick = 5 };

inline constexpr std::size_t kNumOutcomes = 6;
inline constexpr std::array<BsmOutcome, kNumOutcomes> kAllOutcomes{
    BsmOutcome::PhiPlus,
    BsmOutcome::PhiMinus,
    BsmOutcome::PsiPlus,
    BsmOutcome::PsiMinus,
    BsmOutcome::DoubleClick,
    BsmOutcome::NoClick,
};

std::string_view to_string(BsmOutcome o);
BsmOutcome parse_outcome(std::string_view text);

constexpr BsmOutcome to_outcome(BellLabel b) {
    return static_cast<BsmOutcome>(static_cast<int>(b));
}
constexpr std::optional<BellLabel> as_bell(BsmOutcome o) {
    if (static_cast<int>(o) < 4) {
        return static_cast<BellLabel>(static_cast<int>(o));
    }
    return std::nullopt;
}

struct DetectorPort {
    int output_arm;  // 1 or 2
    Polarization polarization;

    constexpr std::size_t index() const {
        return 2 * static_cast<std::size_t>(polarization) + static_cast<std::size_t>(output_arm - 1);
    }
    static constexpr DetectorPort from_index(std::size_t k) {
        return DetectorPort{static_cast<int>(k % 2) + 1, k < 2 ? Polarization::H : Polarization::V};
    }
    constexpr bool operator==(const DetectorPort &) const = default;
};

inline constexpr std::size_t kNumPorts = 4;

BellLabel port_to_bell(DetectorPort port);
DetectorPort bell_to_port(BellLabel b);

/// Bob's spatial qubit (|u> + e^{i phi} |l>)/sqrt2. Any real phi is accepted;
/// the protocol uses the grid {0, pi/2, pi, 3pi/2}.
StateVector bob_spatial_state(double phi);

/// Encoding phase for a BB84 label: Plus 0, PlusI pi/2, Minus pi, MinusI 3pi/2.
double bob_phase(Bb84State s);

/// HWP on the upper arm followed by the recombining 50/50 beam splitter.
const UnitaryMatrix &bsm_unitary();

using BellProbabilities = std::array<double, 4>;

/// |<Bell_k| psi_A (x) psi_B(phi)>|^2 for each k.
BellProbabilities bell_probabilities(Bb84State alice, double phi);
BellProbabilities bell_probabilities(const StateVector &alice_polarization, double phi);
/// <Bell_k| rho_A (x) |psi_B><psi_B| |Bell_k> for a mixed polarization input.
BellProbabilities bell_probabilities(const DensityMatrix &alice_polarization, double phi);

/// Same quantity computed through the optical circuit: port intensities of
/// bsm_unitary() applied to the product state, indexed by DetectorPort::index().
std::array<double, kNumPorts> port_probabilities(const DensityMatrix &alice_polarization, double phi);

/// Result of decoding: a definite bit or a coin flip (double click).
enum class DecodedBit { Zero = 0, One = 1, Random = 2 };

/// Bob's estimate of Alice's bit given his own BB84 state and the announced
/// outcome. Throws std::logic_error for NoClick.
DecodedBit decode_bit(Bb84State bob, BsmOutcome outcome);

}  // namespace ddiqkd

#endif
