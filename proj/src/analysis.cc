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

#include "ddiqkd/analysis.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include <Eigen/Dense>

#include "ddiqkd/protocol.h"

namespace ddiqkd {

namespace {

PortProbabilities arriving_port_probabilities(Bb84State alice, double phi, const NoiseParams &noise) {
    DensityMatrix rho = depolarize(DensityMatrix::pure(bb84_vector(alice)), noise.channel.depolarization);
    PortProbabilities p = port_probabilities(rho, phi + noise.channel.phase_misalignment);
    double t = noise.channel.effective_transmittance();
    for (double &x : p) {
        x *= t;
    }
    return p;
}

void require_valid(const std::string &err) {
    if (!err.empty()) {
        throw std::invalid_argument(err);
    }
}

}  // namespace

std::string NoiseParams::validate() const {
    std::string err = channel.validate();
    return err.empty() ? detector.validate() : err;
}

OutcomeDistribution outcome_distribution(Bb84State alice, double phi, const NoiseParams &noise) {
    return detect_distribution(arriving_port_probabilities(alice, phi, noise), noise.detector);
}

BellProbabilities normalize_bell(std::span<const double, kNumOutcomes> dist) {
    BellProbabilities out{};
    double total = 0.0;
    for (auto k : kAllBellLabels) {
        total += dist[static_cast<std::size_t>(to_outcome(k))];
    }
    if (total <= 0.0) {
        return out;
    }
    for (auto k : kAllBellLabels) {
        out[static_cast<std::size_t>(k)] = dist[static_cast<std::size_t>(to_outcome(k))] / total;
    }
    return out;
}

SinusoidFit fit_sinusoid(std::span<const double> phis, std::span<const double> ys) {
    if (phis.size() != ys.size()) {
        throw std::invalid_argument("fit_sinusoid: phis and ys differ in length");
    }
    const auto n = static_cast<Eigen::Index>(phis.size());
    if (n < 4) {
        throw std::invalid_argument("fit_sinusoid: need at least 4 points");
    }
    Eigen::MatrixXd x(n, 3);
    Eigen::VectorXd y(n);
    for (Eigen::Index i = 0; i < n; i++) {
        auto idx = static_cast<std::size_t>(i);
        x(i, 0) = 1.0;
        x(i, 1) = std::cos(phis[idx]);
        x(i, 2) = std::sin(phis[idx]);
        y(i) = ys[idx];
    }
    Eigen::Matrix3d xtx = x.transpose() * x;
    Eigen::FullPivLU<Eigen::Matrix3d> lu(xtx);
    if (lu.rank() < 3) {
        throw std::invalid_argument("fit_sinusoid: phases do not determine a sinusoid");
    }
    Eigen::Vector3d theta = lu.solve(x.transpose() * y);
    double rss = (y - x * theta).squaredNorm();
    double sigma2 = n > 3 ? rss / static_cast<double>(n - 3) : 0.0;
    Eigen::Matrix3d cov = sigma2 * lu.inverse();

    SinusoidFit fit;
    const double a = theta(0), beta = theta(1), gamma = theta(2);
    fit.a = a;
    fit.b = std::hypot(beta, gamma);
    fit.c = std::atan2(gamma, beta);
    fit.se_a = std::sqrt(std::max(0.0, cov(0, 0)));

    const double b = fit.b;
    if (b > 0.0) {
        double var_b = (beta * beta * cov(1, 1) + gamma * gamma * cov(2, 2) + 2 * beta * gamma * cov(1, 2)) / (b * b);
        double var_c =
            (gamma * gamma * cov(1, 1) + beta * beta * cov(2, 2) - 2 * beta * gamma * cov(1, 2)) / (b * b * b * b);
        fit.se_b = std::sqrt(std::max(0.0, var_b));
        fit.se_c = std::sqrt(std::max(0.0, var_c));
    }

    // Flat: no resolvable oscillation above numerical or statistical noise.
    bool flat = !(a > 0.0) || b <= std::max(1e-9 * a, 3.0 * fit.se_b);
    if (!flat) {
        double v = b / a;
        double cov_ab = (beta * cov(0, 1) + gamma * cov(0, 2)) / b;
        double rel = fit.se_b * fit.se_b / (b * b) + cov(0, 0) / (a * a) - 2.0 * cov_ab / (a * b);
        fit.visibility = std::clamp(v, 0.0, 1.0);
        fit.se_visibility = v * std::sqrt(std::max(0.0, rel));
    }
    return fit;
}

std::string ScanParams::validate() const {
    if (points < 8) {
        return "scan.points must be >= 8";
    }
    return {};
}

PhaseScanResult phase_scan(Bb84State alice, const ScanParams &scan, const NoiseParams &noise) {
    require_valid(scan.validate());
    require_valid(noise.validate());

    PhaseScanResult out;
    out.alice = alice;
    out.per_point = scan.per_point;
    for (int j = 0; j < scan.points; j++) {
        double phi = 2.0 * std::numbers::pi * j / scan.points;
        out.phis.push_back(phi);
        if (scan.per_point == 0) {
            out.probabilities.push_back(normalize_bell(outcome_distribution(alice, phi, noise)));
            continue;
        }
        PortProbabilities ports = arriving_port_probabilities(alice, phi, noise);
        Rng rng(derive_seed(scan.seed, static_cast<std::uint64_t>(j)));
        std::array<double, kNumOutcomes> counts{};
        for (std::uint64_t r = 0; r < scan.per_point; r++) {
            counts[static_cast<std::size_t>(detect(ports, noise.detector, rng))] += 1.0;
        }
        out.probabilities.push_back(normalize_bell(counts));
    }
    for (auto k : kAllBellLabels) {
        std::vector<double> ys;
        for (const auto &p : out.probabilities) {
            ys.push_back(p[static_cast<std::size_t>(k)]);
        }
        out.fits[static_cast<std::size_t>(k)] = fit_sinusoid(out.phis, ys);
    }
    return out;
}

CorrelationTable correlation_table(std::uint64_t per_cell, const NoiseParams &noise, std::uint64_t seed) {
    if (per_cell < kMinTableRounds) {
        throw std::invalid_argument("table.per_cell must be >= " + std::to_string(kMinTableRounds));
    }
    require_valid(noise.validate());

    CorrelationTable table;
    table.per_cell = per_cell;
    for (auto a : kAllBb84States) {
        for (auto b : kAllBb84States) {
            auto ai = static_cast<std::size_t>(a.index()), bi = static_cast<std::size_t>(b.index());
            PortProbabilities ports = arriving_port_probabilities(a, bob_phase(b), noise);
            Rng rng(derive_seed(seed, ai * 4 + bi));
            std::array<std::uint64_t, kNumOutcomes> counts{};
            for (std::uint64_t r = 0; r < per_cell; r++) {
                counts[static_cast<std::size_t>(detect(ports, noise.detector, rng))]++;
            }
            std::array<double, kNumOutcomes> as_double{};
            for (std::size_t o = 0; o < kNumOutcomes; o++) {
                as_double[o] = static_cast<double>(counts[o]);
            }
            BellProbabilities p = normalize_bell(as_double);
            for (auto k : kAllBellLabels) {
                auto ki = static_cast<std::size_t>(k);
                table.probability[ki][ai][bi] = p[ki];
                table.counts[ki][ai][bi] = counts[static_cast<std::size_t>(to_outcome(k))];
            }
        }
    }
    return table;
}

CorrelationTable exact_correlation_table(const NoiseParams &noise) {
    require_valid(noise.validate());
    CorrelationTable table;
    for (auto a : kAllBb84States) {
        for (auto b : kAllBb84States) {
            auto ai = static_cast<std::size_t>(a.index()), bi = static_cast<std::size_t>(b.index());
            BellProbabilities p = normalize_bell(outcome_distribution(a, bob_phase(b), noise));
            for (auto k : kAllBellLabels) {
                table.probability[static_cast<std::size_t>(k)][ai][bi] = p[static_cast<std::size_t>(k)];
            }
        }
    }
    return table;
}

std::string RateParams::validate() const {
    if (!(std::isfinite(mu) && mu > 0.0)) {
        return "rates.mu must be > 0";
    }
    if (!(eta_det > 0.0 && eta_det <= 1.0)) {
        return "rates.eta_det must be in (0, 1]";
    }
    if (!(std::isfinite(loss_max_db) && loss_max_db >= 0.0)) {
        return "rates.loss_max_db must be >= 0";
    }
    if (!(std::isfinite(loss_step_db) && loss_step_db > 0.0)) {
        return "rates.loss_step_db must be > 0";
    }
    if (!(std::isfinite(clock_rate) && clock_rate > 0.0)) {
        return "rates.clock_rate must be > 0";
    }
    if (!(qber >= 0.0 && qber <= 0.5)) {
        return "rates.qber must be in [0, 0.5]";
    }
    return {};
}

double single_photon_probability(double mu) {
    return mu * std::exp(-mu);
}

double rate_ddi(double t, double eta_det, double mu, double qber, double clock_rate) {
    return clock_rate * 0.5 * t * eta_det * single_photon_probability(mu) * secret_fraction(qber);
}

double rate_mdi(double t, double eta_det, double mu, double qber, double clock_rate) {
    double arm = std::sqrt(t) * eta_det * single_photon_probability(mu);
    return clock_rate * 0.5 * 0.5 * arm * arm * secret_fraction(qber);
}

RateCurve rate_curves(const RateParams &params) {
    require_valid(params.validate());
    RateCurve curve;
    curve.params = params;
    // Index-based grid so the endpoint is not lost to accumulated roundoff.
    auto steps = static_cast<long>(std::floor(params.loss_max_db / params.loss_step_db + 1e-9));
    for (long i = 0; i <= steps; i++) {
        RatePoint p;
        p.loss_db = static_cast<double>(i) * params.loss_step_db;
        p.transmittance = transmittance_from_loss_db(p.loss_db);
        p.rate_ddi = rate_ddi(p.transmittance, params.eta_det, params.mu, params.qber, params.clock_rate);
        p.rate_mdi = rate_mdi(p.transmittance, params.eta_det, params.mu, params.qber, params.clock_rate);
        curve.points.push_back(p);
    }
    return curve;
}

}  // namespace ddiqkd
