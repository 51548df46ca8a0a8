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

#include <numbers>

#include "gtest/gtest.h"

#include "test_util.test.h"

using namespace ddiqkd;
using ddiqkd::testing::independent_test_rng;
using ddiqkd::testing::kTablePattern;
using ddiqkd::testing::random_density;
using ddiqkd::testing::random_state;

namespace {

/// |<Bell_k| a (x) (|u> + e^{i phi}|l>)/sqrt2>|^2 written out from the Bell
/// state definitions, with no shared code.
std::array<double, 4> oracle_probabilities(Complex a_h, Complex a_v, double phi) {
    const Complex bu = M_SQRT1_2, bl = std::polar(M_SQRT1_2, phi);
    const Complex phi_p = (a_h * bu + a_v * bl) * M_SQRT1_2;
    const Complex phi_m = (a_h * bu - a_v * bl) * M_SQRT1_2;
    const Complex psi_p = (a_h * bl + a_v * bu) * M_SQRT1_2;
    const Complex psi_m = (a_h * bl - a_v * bu) * M_SQRT1_2;
    return {std::norm(phi_p), std::norm(phi_m), std::norm(psi_p), std::norm(psi_m)};
}

}  // namespace

TEST(bell_bsm, bell_vectors_are_orthonormal) {
    for (auto a : kAllBellLabels) {
        for (auto b : kAllBellLabels) {
            ASSERT_NEAR(std::abs(bell_vector(a).inner(bell_vector(b))), a == b ? 1.0 : 0.0, 1e-15);
        }
    }
}

TEST(bell_bsm, labels_round_trip) {
    for (auto k : kAllBellLabels) {
        ASSERT_EQ(parse_bell(to_string(k)), k);
        ASSERT_EQ(as_bell(to_outcome(k)), k);
        ASSERT_EQ(port_to_bell(bell_to_port(k)), k);
    }
    for (auto o : kAllOutcomes) {
        ASSERT_EQ(parse_outcome(to_string(o)), o);
    }
    ASSERT_FALSE(as_bell(BsmOutcome::DoubleClick).has_value());
    ASSERT_FALSE(as_bell(BsmOutcome::NoClick).has_value());
    ASSERT_THROW(parse_outcome("Triple"), std::invalid_argument);
    for (std::size_t p = 0; p < kNumPorts; p++) {
        ASSERT_EQ(DetectorPort::from_index(p).index(), p);
    }
}

TEST(bell_bsm, bob_phases) {
    ASSERT_EQ(bob_phase({Bb84Label::Plus}), 0.0);
    ASSERT_NEAR(bob_phase({Bb84Label::PlusI}), std::numbers::pi / 2, 1e-15);
    ASSERT_NEAR(bob_phase({Bb84Label::Minus}), std::numbers::pi, 1e-15);
    ASSERT_NEAR(bob_phase({Bb84Label::MinusI}), 3 * std::numbers::pi / 2, 1e-15);
    // Bob's spatial qubit reproduces the BB84 vectors on (u, l).
    for (auto s : kAllBb84States) {
        ASSERT_TRUE(equal_up_to_phase(bob_spatial_state(bob_phase(s)), bb84_vector(s)));
    }
}

TEST(bell_bsm, table_pattern_exact) {
    for (auto a : kAllBb84States) {
        for (auto b : kAllBb84States) {
            BellProbabilities p = bell_probabilities(a, bob_phase(b));
            for (auto k : kAllBellLabels) {
                double expected = kTablePattern[static_cast<int>(k)][a.index()][b.index()] / 4.0;
                ASSERT_NEAR(p[static_cast<std::size_t>(k)], expected, 1e-12)
                    << to_string(k) << " alice " << to_string(a.label) << " bob " << to_string(b.label);
            }
        }
    }
}

TEST(bell_bsm, projection_matches_oracle_property) {
    auto rng = independent_test_rng(10);
    std::uniform_real_distribution<double> phase(0.0, 2 * std::numbers::pi);
    for (int trial = 0; trial < 200; trial++) {
        StateVector a = random_state(2, rng);
        double phi = phase(rng);
        auto expected = oracle_probabilities(a[0], a[1], phi);
        BellProbabilities got = bell_probabilities(a, phi);
        double sum = 0.0;
        for (std::size_t k = 0; k < 4; k++) {
            ASSERT_NEAR(got[k], expected[k], 1e-13);
            sum += got[k];
        }
        ASSERT_NEAR(sum, 1.0, 1e-13);
    }
}

TEST(bell_bsm, circuit_route_matches_projection_property) {
    auto rng = independent_test_rng(11);
    std::uniform_real_distribution<double> phase(-10.0, 10.0);
    for (int trial = 0; trial < 200; trial++) {
        DensityMatrix rho = random_density(2, 1 + trial % 2, rng);
        double phi = phase(rng);
        BellProbabilities projected = bell_probabilities(rho, phi);
        auto ports = port_probabilities(rho, phi);
        for (std::size_t p = 0; p < kNumPorts; p++) {
            auto k = static_cast<std::size_t>(port_to_bell(DetectorPort::from_index(p)));
            ASSERT_NEAR(ports[p], projected[k], 1e-13);
        }
    }
}

TEST(bell_bsm, analyzer_maps_each_bell_state_to_one_port) {
    const UnitaryMatrix &u = bsm_unitary();
    ASSERT_LT(unitarity_error(u.matrix()), 1e-14);
    for (auto k : kAllBellLabels) {
        StateVector out = u.apply(bell_vector(k));
        std::size_t port = bell_to_port(k).index();
        ASSERT_NEAR(std::abs(out[port]), 1.0, 1e-14) << to_string(k);
    }
}

TEST(bell_bsm, decoding_is_correct_on_matched_bases) {
    for (auto alice : kAllBb84States) {
        for (auto bob : kAllBb84States) {
            if (alice.basis() != bob.basis()) {
                continue;
            }
            BellProbabilities p = bell_probabilities(alice, bob_phase(bob));
            for (auto k : kAllBellLabels) {
                if (p[static_cast<std::size_t>(k)] < 1e-12) {
                    continue;
                }
                DecodedBit d = decode_bit(bob, to_outcome(k));
                ASSERT_EQ(static_cast<int>(d), alice.bit()) << to_string(alice.label) << to_string(bob.label);
            }
        }
    }
}

TEST(bell_bsm, decode_special_outcomes) {
    for (auto bob : kAllBb84States) {
        ASSERT_EQ(decode_bit(bob, BsmOutcome::DoubleClick), DecodedBit::Random);
        ASSERT_THROW(decode_bit(bob, BsmOutcome::NoClick), std::logic_error);
    }
}

TEST(bell_bsm, outcome_and_bases_reveal_nothing_about_alice_bit) {
    // Sum over Bob's (hidden) bit: P(k | alice bit, bases) must not depend on the bit.
    for (auto basis : {Basis::X, Basis::Y}) {
        for (auto k : kAllBellLabels) {
            double p_given_bit[2] = {0.0, 0.0};
            for (int alice_bit = 0; alice_bit < 2; alice_bit++) {
                for (int bob_bit = 0; bob_bit < 2; bob_bit++) {
                    p_given_bit[alice_bit] += bell_probabilities(Bb84State::from(basis, alice_bit),
                                                                 bob_phase(Bb84State::from(basis, bob_bit)))
                        [static_cast<std::size_t>(k)];
                }
            }
            ASSERT_NEAR(p_given_bit[0] / (p_given_bit[0] + p_given_bit[1]), 0.5, 1e-15);
        }
    }
}
