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

// Experiments built on the simulator: phase scans with sinusoid fits,
// Alice x Bob correlation tables, and asymptotic rate models.
//
// Every probability emitted here is normalized over the four Bell outcomes
// (double clicks and empty rounds are excluded from the denominator).

#ifndef DDIQKD_ANALYSIS_H
#define DDIQKD_ANALYSIS_H

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ddiqkd/bell_bsm.h"
#include "ddiqkd/channel_noise.h"
#include "ddiqkd/quantum_core.h"

namespace ddiqkd {

/// Noise applied by the scan and table experiments.
struct NoiseParams {
    ChannelParams channel{};
    DetectorParams detector{};

    std::string validate() const;
};

/// Single-photon outcome distribution for a fixed Alice state and Bob phase.
OutcomeDistribution outcome_distribution(Bb84State alice, double phi, const NoiseParams &noise);

/// Restricts an outcome distribution (or count vector) to the Bell outcomes
/// and normalizes it. All zeros when no Bell outcome has mass.
BellProbabilities normalize_bell(std::span<const double, kNumOutcomes> dist);

// ---------------------------------------------------------------------------
// Sinusoid fit.

/// y = a + b cos(phi - c), fitted as a + beta cos(phi) + gamma sin(phi).
struct SinusoidFit {
    double a = 0.0;
    double b = 0.0;
    double c = 0.0;
    double se_a = 0.0;
    double se_b = 0.0;
    double se_c = 0.0;
    /// b / a clamped to [0, 1]; empty for a flat (degenerate) curve.
    std::optional<double> visibility;
    double se_visibility = 0.0;
};

/// Ordinary least squares with standard errors from the residual variance.
/// Needs at least four points spanning more than one phase.
SinusoidFit fit_sinusoid(std::span<const double> phis, std::span<const double> ys);

// ---------------------------------------------------------------------------
// Phase scan.

struct ScanParams {
    int points = 16;
    /// Rounds per grid point; 0 evaluates the exact probabilities instead.
    std::uint64_t per_point = 10000;
    std::uint64_t seed = 0;

    std::string validate() const;
};

struct PhaseScanResult {
    Bb84State alice{Bb84Label::Plus};
    std::uint64_t per_point = 0;
    std::vector<double> phis;
    /// probabilities[j][k]: Bell outcome k at phis[j], normalized per phi.
    std::vector<BellProbabilities> probabilities;
    std::array<SinusoidFit, 4> fits;
};

/// Grid phi_j = 2 pi j / points, j = 0..points-1. Throws std::invalid_argument
/// on invalid parameters.
PhaseScanResult phase_scan(Bb84State alice, const ScanParams &scan, const NoiseParams &noise);

// ---------------------------------------------------------------------------
// Correlation table.

struct CorrelationTable {
    std::uint64_t per_cell = 0;
    /// probability[k][alice][bob] = P(Bell outcome k | alice, bob), normalized
    /// per (alice, bob) cell over the four Bell outcomes.
    std::array<std::array<std::array<double, 4>, 4>, 4> probability{};
    /// Bell-outcome counts behind each cell, same indexing; 0 for exact tables.
    std::array<std::array<std::array<std::uint64_t, 4>, 4>, 4> counts{};
};

inline constexpr std::uint64_t kMinTableRounds = 1000;

/// Monte Carlo table with per_cell rounds per (alice, bob) pair; each cell
/// draws from its own substream of `seed`.
CorrelationTable correlation_table(std::uint64_t per_cell, const NoiseParams &noise, std::uint64_t seed);

/// Exact table from outcome_distribution.
CorrelationTable exact_correlation_table(const NoiseParams &noise);

// ---------------------------------------------------------------------------
// Asymptotic rate models ("toy" models: constants are inputs).

struct RateParams {
    double mu = 0.5;
    double eta_det = 0.5;
    double loss_max_db = 40.0;
    double loss_step_db = 1.0;
    /// Pulses per second.
    double clock_rate = 1e6;
    /// QBER fed to the secret fraction 1 - 2 h(Q), shared by both models.
    double qber = 0.015;

    std::string validate() const;
};

/// mu e^{-mu}.
double single_photon_probability(double mu);

/// clock * 1/2 (sifting) * t * eta * P1(mu) * f(Q).
double rate_ddi(double t, double eta_det, double mu, double qber, double clock_rate);
/// clock * 1/2 (sifting) * 1/2 (linear-optics BSM) * (sqrt(t) eta P1(mu))^2 * f(Q);
/// each user sits behind half of the channel.
double rate_mdi(double t, double eta_det, double mu, double qber, double clock_rate);

struct RatePoint {
    double loss_db = 0.0;
    double transmittance = 1.0;
    double rate_ddi = 0.0;
    double rate_mdi = 0.0;
};

struct RateCurve {
    RateParams params;
    std::vector<RatePoint> points;
};

/// Loss grid 0, step, 2 step, ... up to loss_max_db inclusive.
RateCurve rate_curves(const RateParams &params);

}  // namespace ddiqkd

#endif
