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

#include "ddiqkd/fock_optics.h"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>

namespace ddiqkd {

namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440;

void check_photons(int photons, int n_max) {
    if (n_max > kHardNMax) {
        throw CapacityError("n_max " + std::to_string(n_max) + " exceeds the supported maximum " +
                            std::to_string(kHardNMax));
    }
    if (photons < 0) {
        throw std::invalid_argument("photon number must be >= 0");
    }
    if (photons > n_max) {
        throw CapacityError("photon sector " + std::to_string(photons) + " exceeds n_max " + std::to_string(n_max));
    }
}

void enumerate(int remaining, std::size_t mode, Occupation &cur, std::vector<Occupation> &out) {
    if (mode + 1 == kNumModes) {
        cur[mode] = remaining;
        out.push_back(cur);
        return;
    }
    for (int n = remaining; n >= 0; n--) {
        cur[mode] = n;
        enumerate(remaining - n, mode + 1, cur, out);
    }
}

double factorial(int n) {
    double f = 1.0;
    for (int k = 2; k <= n; k++) {
        f *= k;
    }
    return f;
}

Complex ipow(Complex z, int k) {
    Complex r = 1.0;
    for (int i = 0; i < k; i++) {
        r *= z;
    }
    return r;
}

double occupation_norm(const Occupation &occ) {
    double f = 1.0;
    for (int n : occ) {
        f *= factorial(n);
    }
    return f;
}

/// Mode list with mode j repeated occ[j] times.
std::vector<Eigen::Index> expand(const Occupation &occ) {
    std::vector<Eigen::Index> out;
    for (std::size_t j = 0; j < kNumModes; j++) {
        for (int r = 0; r < occ[j]; r++) {
            out.push_back(static_cast<Eigen::Index>(j));
        }
    }
    return out;
}

CMatrix conjugate(const CMatrix &u, const CMatrix &rho) {
    return u * rho * u.adjoint();
}

}  // namespace

std::size_t sector_dim(int photons, std::size_t modes) {
    // C(photons + modes - 1, modes - 1), computed incrementally.
    std::size_t r = 1;
    for (std::size_t k = 1; k < modes; k++) {
        r = r * (static_cast<std::size_t>(photons) + k) / k;
    }
    return r;
}

FockSector::FockSector(int photons, int n_max) : photons_(photons) {
    check_photons(photons, n_max);
    Occupation cur{};
    enumerate(photons, 0, cur, states_);
    for (std::size_t k = 0; k < states_.size(); k++) {
        index_.emplace(states_[k], k);
    }
}

std::size_t FockSector::index_of(const Occupation &occ) const {
    auto it = index_.find(occ);
    if (it == index_.end()) {
        throw std::out_of_range("FockSector: occupation not in sector");
    }
    return it->second;
}

FockDensity::FockDensity(int photons, CMatrix matrix, int n_max) : photons_(photons), rho_(std::move(matrix)) {
    check_photons(photons, n_max);
    auto expected = static_cast<Eigen::Index>(sector_dim(photons));
    if (rho_.rows() != expected || rho_.cols() != expected) {
        throw ShapeError("FockDensity: matrix is " + std::to_string(rho_.rows()) + "x" + std::to_string(rho_.cols()) +
                         " but the " + std::to_string(photons) + "-photon sector has dimension " +
                         std::to_string(expected));
    }
    std::string err = DensityMatrix::validate(rho_, kPsdTolerance, kPsdTolerance);
    if (!err.empty()) {
        throw std::invalid_argument("FockDensity: " + err);
    }
}

FockDensity FockDensity::pure(int photons, const CVector &amplitudes, int n_max) {
    return FockDensity(photons, amplitudes * amplitudes.adjoint(), n_max);
}

FockDensity FockDensity::vacuum() {
    return FockDensity(0, CMatrix::Ones(1, 1));
}

Complex permanent(const CMatrix &a) {
    const Eigen::Index n = a.rows();
    if (n != a.cols()) {
        throw ShapeError("permanent: matrix must be square");
    }
    if (n == 0) {
        return 1.0;
    }
    if (n > 30) {
        throw CapacityError("permanent: matrix too large");
    }
    // Ryser: perm(A) = (-1)^n sum_{S} (-1)^{|S|} prod_i sum_{j in S} a_ij,
    // walking subsets in Gray-code order to update row sums incrementally.
    CVector row_sums = CVector::Zero(n);
    Complex total = 0.0;
    const std::uint64_t n_subsets = std::uint64_t{1} << n;
    std::uint64_t gray_prev = 0;
    for (std::uint64_t k = 1; k < n_subsets; k++) {
        std::uint64_t gray = k ^ (k >> 1);
        std::uint64_t changed = gray ^ gray_prev;
        auto j = static_cast<Eigen::Index>(std::countr_zero(changed));
        if (gray & changed) {
            row_sums += a.col(j);
        } else {
            row_sums -= a.col(j);
        }
        gray_prev = gray;
        Complex prod = row_sums.prod();
        int sign = (std::popcount(gray) % 2 == 0) ? 1 : -1;
        total += static_cast<double>(sign) * prod;
    }
    return (n % 2 == 0) ? total : -total;
}

UnitaryMatrix lift_unitary(const UnitaryMatrix &mode_u, int photons, int n_max) {
    if (mode_u.dim() != kNumModes) {
        throw ShapeError("lift_unitary: expected a 4x4 mode transformation");
    }
    FockSector sector(photons, n_max);
    const std::size_t d = sector.dim();
    const CMatrix &u = mode_u.matrix();

    std::vector<std::vector<Eigen::Index>> expanded(d);
    std::vector<double> norms(d);
    for (std::size_t k = 0; k < d; k++) {
        expanded[k] = expand(sector.state(k));
        norms[k] = occupation_norm(sector.state(k));
    }

    auto dd = static_cast<Eigen::Index>(d);
    CMatrix lifted(dd, dd);
    CMatrix sub(photons, photons);
    for (std::size_t r = 0; r < d; r++) {
        for (std::size_t c = 0; c < d; c++) {
            for (int i = 0; i < photons; i++) {
                for (int j = 0; j < photons; j++) {
                    sub(i, j) = u(expanded[r][static_cast<std::size_t>(i)], expanded[c][static_cast<std::size_t>(j)]);
                }
            }
            lifted(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
                permanent(sub) / std::sqrt(norms[r] * norms[c]);
        }
    }
    return UnitaryMatrix(std::move(lifted));
}

UnitaryMatrix path_beam_splitter() {
    CMatrix bs2(2, 2);
    bs2 << kInvSqrt2, kInvSqrt2, kInvSqrt2, -kInvSqrt2;
    CMatrix bs = CMatrix::Zero(4, 4);
    bs.block(0, 0, 2, 2) = bs2;
    bs.block(2, 2, 2, 2) = bs2;
    return UnitaryMatrix(std::move(bs));
}

UnitaryMatrix lower_arm_phase(double theta) {
    CMatrix p = CMatrix::Identity(4, 4);
    Complex e = std::polar(1.0, theta);
    p(two_qubit_index(Polarization::H, Path::Lower), two_qubit_index(Polarization::H, Path::Lower)) = e;
    p(two_qubit_index(Polarization::V, Path::Lower), two_qubit_index(Polarization::V, Path::Lower)) = e;
    return UnitaryMatrix(std::move(p));
}

UnitaryMatrix encoder_transform(double phi) {
    return lower_arm_phase(phi) * path_beam_splitter();
}

LinearCircuit bob_circuit(double phi) {
    return LinearCircuit{bsm_unitary() * encoder_transform(phi), phi};
}

FockDensity phase_averaged_channel(const FockDensity &input, std::span<const double> phases, int n_max) {
    if (phases.empty()) {
        throw std::invalid_argument("phase_averaged_channel: no phases");
    }
    const int n = input.photons();
    if (n == 0) {
        return input;
    }
    auto d = static_cast<Eigen::Index>(input.dim());
    CMatrix acc = CMatrix::Zero(d, d);
    for (double phi : phases) {
        UnitaryMatrix lifted = lift_unitary(bob_circuit(phi).mode_transform, n, n_max);
        acc += conjugate(lifted.matrix(), input.matrix());
    }
    acc /= static_cast<double>(phases.size());
    return FockDensity(n, std::move(acc), n_max);
}

FockDensity phase_twirled_channel(const FockDensity &input, int n_max) {
    // Lower-arm photon numbers differ by at most N, so N + 1 equally spaced
    // phases reproduce the continuous average exactly.
    const int n = input.photons();
    std::vector<double> phases(static_cast<std::size_t>(n) + 1);
    for (std::size_t k = 0; k < phases.size(); k++) {
        phases[k] = 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(phases.size());
    }
    return phase_averaged_channel(input, phases, n_max);
}

FockDensity to_encoder_frame(const FockDensity &detector_frame_state, int n_max) {
    const int n = detector_frame_state.photons();
    if (n == 0) {
        return detector_frame_state;
    }
    UnitaryMatrix undo = lift_unitary(bsm_unitary().adjoint(), n, n_max);
    return FockDensity(n, conjugate(undo.matrix(), detector_frame_state.matrix()), n_max);
}

int lower_arm_photons(const Occupation &occ) {
    return occ[two_qubit_index(Polarization::H, Path::Lower)] + occ[two_qubit_index(Polarization::V, Path::Lower)];
}

StateVector signal_port_photons(int photons, const StateVector &pol, int n_max) {
    if (pol.dim() != 2) {
        throw ShapeError("signal_port_photons: polarization must be a 2-vector");
    }
    FockSector sector(photons, n_max);
    CVector amps = CVector::Zero(static_cast<Eigen::Index>(sector.dim()));
    const Complex alpha = pol[0], beta = pol[1];
    // (alpha a_H^dag + beta a_V^dag)^N / sqrt(N!) |0>
    for (int k = 0; k <= photons; k++) {
        Occupation occ{};
        occ[two_qubit_index(Polarization::H, Path::Upper)] = k;
        occ[two_qubit_index(Polarization::V, Path::Upper)] = photons - k;
        double binom = factorial(photons) / (factorial(k) * factorial(photons - k));
        amps(static_cast<Eigen::Index>(sector.index_of(occ))) =
            std::sqrt(binom) * ipow(alpha, k) * ipow(beta, photons - k);
    }
    return StateVector(std::move(amps));
}

double lower_arm_coherence(const FockDensity &encoder_frame_state, int delta, int n_max) {
    FockSector sector(encoder_frame_state.photons(), n_max);
    double best = 0.0;
    const CMatrix &m = encoder_frame_state.matrix();
    for (std::size_t r = 0; r < sector.dim(); r++) {
        int nr = lower_arm_photons(sector.state(r));
        for (std::size_t c = 0; c < sector.dim(); c++) {
            if (std::abs(nr - lower_arm_photons(sector.state(c))) == delta) {
                best = std::max(best, std::abs(m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c))));
            }
        }
    }
    return best;
}

double ClickDistribution::total() const {
    double s = no_click + double_click;
    for (double p : single) {
        s += p;
    }
    return s;
}

OutcomeDistribution ClickDistribution::as_outcomes() const {
    OutcomeDistribution out{};
    out[static_cast<std::size_t>(BsmOutcome::NoClick)] = no_click;
    out[static_cast<std::size_t>(BsmOutcome::DoubleClick)] = double_click;
    for (std::size_t k = 0; k < kNumPorts; k++) {
        out[static_cast<std::size_t>(to_outcome(port_to_bell(DetectorPort::from_index(k))))] += single[k];
    }
    return out;
}

ClickDistribution click_pattern_distribution(const FockDensity &input, double phi, const DetectorParams &det,
                                             int n_max) {
    const int n = input.photons();
    FockSector sector(n, n_max);
    CMatrix out;
    if (n == 0) {
        out = input.matrix();
    } else {
        UnitaryMatrix lifted = lift_unitary(bob_circuit(phi).mode_transform, n, n_max);
        out = conjugate(lifted.matrix(), input.matrix());
    }

    ClickDistribution dist;
    for (std::size_t s = 0; s < sector.dim(); s++) {
        double p_pattern = out(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(s)).real();
        if (p_pattern <= 0.0) {
            continue;
        }
        const Occupation &occ = sector.state(s);
        std::array<double, kNumPorts> p_click{};
        for (std::size_t k = 0; k < kNumPorts; k++) {
            double silent = std::pow(1.0 - det.efficiency, occ[k]) * (1.0 - det.dark_count);
            p_click[k] = 1.0 - silent;
        }
        for (unsigned mask = 0; mask < (1u << kNumPorts); mask++) {
            double p = p_pattern;
            for (std::size_t k = 0; k < kNumPorts; k++) {
                p *= ((mask >> k) & 1u) ? p_click[k] : 1.0 - p_click[k];
            }
            int clicks = std::popcount(mask);
            if (clicks == 0) {
                dist.no_click += p;
            } else if (clicks == 1) {
                dist.single[static_cast<std::size_t>(std::countr_zero(mask))] += p;
            } else {
                dist.double_click += p;
            }
        }
    }
    return dist;
}

InputFamily random_signal_port_family(int n_max) {
    return [n_max](int photons, Rng &rng) {
        FockSector sector(photons, n_max);
        std::normal_distribution<double> gauss(0.0, 1.0);
        std::uniform_int_distribution<int> rank_dist(1, 3);
        const int rank = rank_dist(rng);
        auto d = static_cast<Eigen::Index>(sector.dim());
        CMatrix rho = CMatrix::Zero(d, d);
        std::vector<double> weights(static_cast<std::size_t>(rank));
        std::uniform_real_distribution<double> unif(0.0, 1.0);
        double wsum = 0.0;
        for (auto &w : weights) {
            w = unif(rng) + 1e-3;
            wsum += w;
        }
        for (int r = 0; r < rank; r++) {
            // Random state over the polarization splits of the signal port.
            CVector v = CVector::Zero(d);
            for (int k = 0; k <= photons; k++) {
                Occupation occ{};
                occ[two_qubit_index(Polarization::H, Path::Upper)] = k;
                occ[two_qubit_index(Polarization::V, Path::Upper)] = photons - k;
                v(static_cast<Eigen::Index>(sector.index_of(occ))) = Complex{gauss(rng), gauss(rng)};
            }
            v.normalize();
            rho += (weights[static_cast<std::size_t>(r)] / wsum) * v * v.adjoint();
        }
        return FockDensity(photons, std::move(rho), n_max);
    };
}

FockDensity coherence_probe(int photons, int delta, int n_max) {
    if (delta < 1 || delta > photons) {
        throw std::invalid_argument("coherence_probe: delta must be in [1, N]");
    }
    FockSector sector(photons, n_max);
    Occupation a{}, b{};
    a[two_qubit_index(Polarization::H, Path::Upper)] = photons;
    b[two_qubit_index(Polarization::H, Path::Upper)] = photons - delta;
    b[two_qubit_index(Polarization::H, Path::Lower)] = delta;
    CVector arm = CVector::Zero(static_cast<Eigen::Index>(sector.dim()));
    arm(static_cast<Eigen::Index>(sector.index_of(a))) = kInvSqrt2;
    arm(static_cast<Eigen::Index>(sector.index_of(b))) = kInvSqrt2;
    UnitaryMatrix splitter = lift_unitary(path_beam_splitter(), photons, n_max);
    CVector input = splitter.matrix().adjoint() * arm;
    return FockDensity::pure(photons, input, n_max);
}

namespace {

SectorAudit audit_sector(int photons, const InputFamily &family, const AuditOptions &opt) {
    SectorAudit rep;
    rep.photons = photons;
    rep.dim = sector_dim(photons);
    for (int delta = 1; delta <= photons; delta++) {
        rep.coherences.push_back(CoherenceReport{delta, 0.0, false});
    }

    // Per-sector stream so that results do not depend on sector order.
    Rng rng(opt.seed ^ (0x9E3779B97F4A7C15ull * static_cast<std::uint64_t>(photons + 1)));
    std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);

    std::vector<FockDensity> inputs;
    for (std::size_t s = 0; s < opt.samples; s++) {
        inputs.push_back(family(photons, rng));
    }
    if (opt.include_probes) {
        for (int delta = 1; delta <= photons; delta++) {
            inputs.push_back(coherence_probe(photons, delta, opt.n_max));
        }
    }
    rep.samples = inputs.size();

    if (photons > 0) {
        UnitaryMatrix splitter = lift_unitary(path_beam_splitter(), photons, opt.n_max);
        for (const auto &rho : inputs) {
            FockDensity avg = phase_averaged_channel(rho, kEncodingPhases, opt.n_max);

            // Same input, phase reference in the lower arm rotated by theta.
            UnitaryMatrix shift = lift_unitary(lower_arm_phase(angle(rng)), photons, opt.n_max);
            CMatrix w = splitter.matrix().adjoint() * shift.matrix() * splitter.matrix();
            FockDensity shifted(photons, conjugate(w, rho.matrix()), opt.n_max);
            FockDensity avg_shifted = phase_averaged_channel(shifted, kEncodingPhases, opt.n_max);
            rep.max_pair_distance =
                std::max(rep.max_pair_distance, trace_distance(avg.as_density(), avg_shifted.as_density()));

            FockDensity twirled = phase_twirled_channel(rho, opt.n_max);
            rep.max_twirl_distance =
                std::max(rep.max_twirl_distance, trace_distance(avg.as_density(), twirled.as_density()));

            FockDensity enc = to_encoder_frame(avg, opt.n_max);
            for (auto &c : rep.coherences) {
                c.max_magnitude = std::max(c.max_magnitude, lower_arm_coherence(enc, c.delta, opt.n_max));
            }
        }
    }
    rep.max_trace_distance = std::max(rep.max_pair_distance, rep.max_twirl_distance);
    for (auto &c : rep.coherences) {
        c.survives = c.max_magnitude > opt.tolerance;
    }
    rep.fixed_state = rep.max_trace_distance <= opt.tolerance;

    DetectorParams ideal{};
    double dc = 0.0;
    for (auto alice : kAllBb84States) {
        FockDensity in = FockDensity::pure(photons, signal_port_photons(photons, bb84_vector(alice), opt.n_max).amplitudes(),
                                           opt.n_max);
        for (double phi : kEncodingPhases) {
            dc += click_pattern_distribution(in, phi, ideal, opt.n_max).double_click;
        }
    }
    rep.double_click_probability = dc / 16.0;
    return rep;
}

}  // namespace

AuditReport fixed_state_audit(std::span<const int> sectors, const InputFamily &family, const AuditOptions &options) {
    std::vector<int> order(sectors.begin(), sectors.end());
    std::sort(order.begin(), order.end());
    order.erase(std::unique(order.begin(), order.end()), order.end());
    for (int n : order) {
        check_photons(n, options.n_max);
    }
    AuditReport report;
    report.n_max = options.n_max;
    report.samples = options.samples;
    for (int n : order) {
        report.sectors.push_back(audit_sector(n, family, options));
    }
    return report;
}

}  // namespace ddiqkd
