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

// Monte-Carlo execution of the key-establishment protocol.
//
// Per round: Alice prepares a random BB84 polarization state; the photon
// crosses the channel (where an adversary may act); Bob encodes a random
// BB84 phase on the path qubit and runs the Bell-state analyzer. Bob
// announces every round with at least one click together with his basis,
// Alice answers whether the bases agree, and agreeing rounds are sifted.

#ifndef DDIQKD_PROTOCOL_H
#define DDIQKD_PROTOCOL_H

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ddiqkd/bell_bsm.h"
#include "ddiqkd/channel_noise.h"
#include "ddiqkd/fock_optics.h"
#include "ddiqkd/quantum_core.h"

namespace ddiqkd {

enum class AdversaryKind { None, InterceptResend, DetectorControl };

std::string_view to_string(AdversaryKind k);
AdversaryKind parse_adversary_kind(std::string_view text);

/// Table from true outcome to announced outcome, indexed by BsmOutcome.
using OutcomeRemap = std::array<BsmOutcome, kNumOutcomes>;

OutcomeRemap identity_remap();
OutcomeRemap constant_remap(BsmOutcome target);

/// Parses "identity", "constant:<Outcome>", or a comma-separated list of
/// "<From>=<To>" pairs (unlisted outcomes map to themselves). Pairs are
/// applied simultaneously, so "PhiPlus=PsiPlus,PsiPlus=PhiPlus" is a swap.
OutcomeRemap parse_remap(std::string_view text);
std::string format_remap(const OutcomeRemap &remap);

struct AdversaryModel {
    AdversaryKind kind = AdversaryKind::None;
    /// Fraction of photons Eve intercepts (intercept_resend only).
    double intercept_probability = 1.0;
    /// Applied to the true outcome before announcement (detector_control only).
    OutcomeRemap remap = identity_remap();

    std::string validate() const;
};

struct RoundRecord {
    std::uint64_t index = 0;
    Bb84State alice{Bb84Label::Plus};
    Bb84State bob{Bb84Label::Plus};
    /// As announced, i.e. after any detector-control remapping.
    BsmOutcome outcome = BsmOutcome::NoClick;
    bool announced = false;
    bool sifted = false;
    std::optional<int> alice_bit;
    std::optional<int> bob_bit;
};

/// Sifted-round counts keyed by (announced outcome, basis, Alice's bit).
/// This is everything a detector-controlling adversary sees, plus the secret.
using LeakageCounts = std::array<std::uint64_t, kNumOutcomes * 2 * 2>;

struct SessionStats {
    std::uint64_t n_rounds = 0;
    std::uint64_t n_announced = 0;
    std::uint64_t n_sifted = 0;
    std::uint64_t n_sifted_x = 0;
    std::uint64_t n_sifted_y = 0;
    std::uint64_t errors_x = 0;
    std::uint64_t errors_y = 0;
    double qber_x = 0.0;
    double qber_y = 0.0;
    double qber_total = 0.0;
    std::array<std::uint64_t, kNumOutcomes> outcome_histogram{};
    double secret_fraction = 0.0;
    LeakageCounts leakage{};
    /// Miller-Madow corrected plug-in estimate of I(outcome, basis ; bit), in bits.
    double leaked_information = 0.0;

    /// Adds raw counts; call finalize() afterwards.
    void merge(const SessionStats &other);
    /// Recomputes every derived ratio from the raw counts.
    void finalize();

    bool operator==(const SessionStats &) const = default;
};

struct SessionConfig {
    std::uint64_t n_rounds = 1;
    SourceParams source{};
    ChannelParams channel{};
    DetectorParams detector{};
    AdversaryModel adversary{};
    std::uint64_t seed = 0;
    bool keep_records = false;
    /// Rounds are split into this many independently seeded shards.
    int workers = 1;
    int n_max = kDefaultNMax;

    std::string validate() const;
};

struct SessionResult {
    SessionStats stats;
    std::vector<RoundRecord> records;
};

/// Deterministic for a fixed config (including seed and worker count).
SessionResult run_session(const SessionConfig &config);

SessionResult run_session(std::uint64_t n_rounds, const SourceParams &source, const ChannelParams &channel,
                          const DetectorParams &det, const AdversaryModel &adversary, std::uint64_t seed);

/// Binary entropy in bits, h(0) = h(1) = 0.
double binary_entropy(double p);

/// max(0, 1 - 2 h(q)). Throws std::domain_error unless 0 <= q <= 0.5.
double secret_fraction(double q);

/// Plug-in mutual information (bits) with Miller-Madow bias correction, from
/// a joint count table of shape rows x cols (row-major).
double mutual_information_mm(std::span<const std::uint64_t> joint, std::size_t rows, std::size_t cols);

/// Exact P(alice_bit = 0 | announced outcome, shared basis) for an ideal
/// channel and uniformly random states, given a detector-control remap.
/// Empty when the announced outcome has probability zero.
std::optional<double> bit_posterior(const OutcomeRemap &remap, BsmOutcome announced, Basis basis);

}  // namespace ddiqkd

#endif
