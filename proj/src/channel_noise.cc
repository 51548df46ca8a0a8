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

#include "ddiqkd/channel_noise.h"

#include <bit>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace ddiqkd {

namespace {

bool in_unit(double x) {
    return std::isfinite(x) && x >= 0.0 && x <= 1.0;
}

BsmOutcome classify(unsigned click_mask) {
    int clicks = std::popcount(click_mask);
    if (clicks == 0) {
        return BsmOutcome::NoClick;
    }
    if (clicks > 1) {
        return BsmOutcome::DoubleClick;
    }
    std::size_t port = static_cast<std::size_t>(std::countr_zero(click_mask));
    return to_outcome(port_to_bell(DetectorPort::from_index(port)));
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
    std::uint64_t x = seed + stream + 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

double transmittance_from_loss_db(double loss_db) {
    return std::pow(10.0, -loss_db / 10.0);
}

double ChannelParams::effective_transmittance() const {
    if (length_km > 0.0) {
        return transmittance_from_loss_db(loss_db_per_km * length_km);
    }
    return transmittance;
}

std::string ChannelParams::validate() const {
    if (!std::isfinite(transmittance) || transmittance <= 0.0 || transmittance > 1.0) {
        return "channel.transmittance must be in (0, 1]";
    }
    if (!in_unit(depolarization)) {
        return "channel.depolarization must be in [0, 1]";
    }
    if (!std::isfinite(phase_misalignment)) {
        return "channel.phase_misalignment must be finite";
    }
    if (!std::isfinite(loss_db_per_km) || loss_db_per_km < 0.0) {
        return "channel.loss_db_per_km must be >= 0";
    }
    if (!std::isfinite(length_km) || length_km < 0.0) {
        return "channel.length_km must be >= 0";
    }
    return {};
}

std::string DetectorParams::validate() const {
    if (!in_unit(efficiency)) {
        return "detector.efficiency must be in [0, 1]";
    }
    if (!std::isfinite(dark_count) || dark_count < 0.0 || dark_count >= 1.0) {
        return "detector.dark_count must be in [0, 1)";
    }
    return {};
}

std::string SourceParams::validate() const {
    if (kind == SourceKind::Wcs && !(std::isfinite(mu) && mu > 0.0)) {
        return "source.mu must be > 0 for a wcs source";
    }
    return {};
}

DensityMatrix depolarize(const DensityMatrix &rho, double p) {
    if (rho.dim() != 2) {
        throw ShapeError("depolarize: expected a polarization qubit");
    }
    CMatrix m = (1.0 - p) * rho.matrix() + p * CMatrix::Identity(2, 2) / 2.0;
    return DensityMatrix::unchecked(std::move(m));
}

std::optional<DensityMatrix> apply_channel(const DensityMatrix &rho, const ChannelParams &params, Rng &rng) {
    std::bernoulli_distribution transmitted(params.effective_transmittance());
    if (!transmitted(rng)) {
        return std::nullopt;
    }
    return depolarize(rho, params.depolarization);
}

OutcomeDistribution detect_distribution(const PortProbabilities &port_probs, const DetectorParams &det) {
    double present = std::accumulate(port_probs.begin(), port_probs.end(), 0.0);
    // Mutually exclusive photon scenarios: not registered, or registered at port k.
    std::array<double, kNumPorts + 1> scenario{};
    scenario[kNumPorts] = 1.0 - det.efficiency * present;
    for (std::size_t k = 0; k < kNumPorts; k++) {
        scenario[k] = det.efficiency * port_probs[k];
    }

    OutcomeDistribution out{};
    const double pd = det.dark_count;
    for (unsigned mask = 0; mask < (1u << kNumPorts); mask++) {
        for (std::size_t s = 0; s <= kNumPorts; s++) {
            if (scenario[s] == 0.0) {
                continue;
            }
            double p = scenario[s];
            for (std::size_t k = 0; k < kNumPorts; k++) {
                bool click = (mask >> k) & 1u;
                if (k == s) {
                    // The registered photon fires this port regardless of dark counts.
                    p *= click ? 1.0 : 0.0;
                } else {
                    p *= click ? pd : 1.0 - pd;
                }
            }
            out[static_cast<std::size_t>(classify(mask))] += p;
        }
    }
    return out;
}

BsmOutcome detect(const PortProbabilities &port_probs, const DetectorParams &det, Rng &rng) {
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    unsigned mask = 0;

    double r = unif(rng);
    double acc = 0.0;
    for (std::size_t k = 0; k < kNumPorts; k++) {
        acc += port_probs[k];
        if (r < acc) {
            if (det.efficiency >= 1.0 || unif(rng) < det.efficiency) {
                mask |= 1u << k;
            }
            break;
        }
    }
    if (det.dark_count > 0.0) {
        for (std::size_t k = 0; k < kNumPorts; k++) {
            if (unif(rng) < det.dark_count) {
                mask |= 1u << k;
            }
        }
    }
    return classify(mask);
}

std::vector<double> poisson_sector_weights(double mu, int n_max) {
    if (!(mu > 0.0) || !std::isfinite(mu)) {
        throw std::domain_error("poisson_sector_weights: mu must be > 0");
    }
    if (n_max < 0) {
        throw std::domain_error("poisson_sector_weights: n_max must be >= 0");
    }
    std::vector<double> w(static_cast<std::size_t>(n_max) + 2);
    double term = std::exp(-mu);
    for (int n = 0; n <= n_max; n++) {
        if (n > 0) {
            term *= mu / n;
        }
        w[static_cast<std::size_t>(n)] = term;
    }
    // Sum the tail directly; 1 - sum loses all precision when the tail is tiny.
    double tail = 0.0;
    for (int n = n_max + 1; n < n_max + 1000; n++) {
        term *= mu / n;
        tail += term;
        if (term < 1e-20 * (tail + 1e-300) && static_cast<double>(n) > mu) {
            break;
        }
    }
    w.back() = tail;
    return w;
}

}  // namespace ddiqkd
