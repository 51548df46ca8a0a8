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

#ifndef DDIQKD_CHANNEL_NOISE_H
#define DDIQKD_CHANNEL_NOISE_H

#include <array>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "ddiqkd/bell_bsm.h"
#include "ddiqkd/quantum_core.h"

namespace ddiqkd {

using Rng = std::mt19937_64;

/// splitmix64 of seed + stream; seeds independent substreams.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

/// Quantum channel between Alice and Bob, plus Bob's interferometer offset.
struct ChannelParams {
    double transmittance = 1.0;
    double depolarization = 0.0;
    /// Additive phase error (radians) on Bob's encoding phase.
    double phase_misalignment = 0.0;
    /// When length_km > 0 the transmittance is derived from fiber loss instead.
    double loss_db_per_km = 0.0;
    double length_km = 0.0;

    double effective_transmittance() const;
    /// Empty when valid; otherwise names the offending field.
    std::string validate() const;
};

double transmittance_from_loss_db(double loss_db);

struct DetectorParams {
    double efficiency = 1.0;
    /// Per port, per gate.
    double dark_count = 0.0;

    std::string validate() const;
};

enum class SourceKind { SinglePhoton, Wcs };

struct SourceParams {
    SourceKind kind = SourceKind::SinglePhoton;
    double mu = 0.5;

    std::string validate() const;
};

/// rho -> (1 - p) rho + p I/2 on a single polarization qubit.
DensityMatrix depolarize(const DensityMatrix &rho, double p);

/// Empty optional when the photon is lost.
std::optional<DensityMatrix> apply_channel(const DensityMatrix &rho, const ChannelParams &params, Rng &rng);

using PortProbabilities = std::array<double, kNumPorts>;
using OutcomeDistribution = std::array<double, kNumOutcomes>;

/// Exact outcome distribution of the threshold detectors for a single photon
/// that arrives at port k with probability port_probs[k] (the remainder of the
/// unit mass is "no photon").
OutcomeDistribution detect_distribution(const PortProbabilities &port_probs, const DetectorParams &det);

/// One draw from detect_distribution, simulated click by click.
BsmOutcome detect(const PortProbabilities &port_probs, const DetectorParams &det, Rng &rng);

/// P_n = e^{-mu} mu^n / n! for n = 0..n_max, followed by the tail mass P(n > n_max).
std::vector<double> poisson_sector_weights(double mu, int n_max);

}  // namespace ddiqkd

#endif
