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

// Fixed-photon-number simulation of Bob's encoder and Bell-state analyzer.
//
// The four optical modes share the two-qubit ordering of quantum_core.h:
// mode index = 2*pol + path. "Path" means the input port at the encoder,
// the interferometer arm (u, l) inside it, and the output arm (1, 2) at the
// detectors. Photons from the channel enter path 0 of the encoder; path 1 is
// the unused (vacuum) port.

#ifndef DDIQKD_FOCK_OPTICS_H
#define DDIQKD_FOCK_OPTICS_H

#include <array>
#include <cstdint>
#include <functional>
#include <map>
#include <span>
#include <vector>

#include "ddiqkd/bell_bsm.h"
#include "ddiqkd/channel_noise.h"
#include "ddiqkd/quantum_core.h"

namespace ddiqkd {

inline constexpr std::size_t kNumModes = 4;
inline constexpr int kDefaultNMax = 4;
/// Hard ceiling on n_max; the N = 12 sector over four modes is 455-dimensional.
inline constexpr int kHardNMax = 12;

using Occupation = std::array<int, kNumModes>;

/// C(n + modes - 1, modes - 1).
std::size_t sector_dim(int photons, std::size_t modes = kNumModes);

/// Occupation basis of the fixed-N sector over the four modes.
///
/// States are ordered by descending lexicographic occupation, so that for
/// N = 1 basis state k is the single photon in mode k.
class FockSector {
   public:
    /// Throws CapacityError if photons > n_max or n_max > kHardNMax.
    explicit FockSector(int photons, int n_max = kDefaultNMax);

    int photons() const {
        return photons_;
    }
    std::size_t dim() const {
        return states_.size();
    }
    const std::vector<Occupation> &states() const {
        return states_;
    }
    const Occupation &state(std::size_t k) const {
        return states_[k];
    }
    std::size_t index_of(const Occupation &occ) const;

   private:
    int photons_;
    std::vector<Occupation> states_;
    std::map<Occupation, std::size_t> index_;
};

/// A density operator confined to one photon-number sector.
class FockDensity {
   public:
    /// Validates Hermiticity, unit trace and positivity within kPsdTolerance.
    FockDensity(int photons, CMatrix matrix, int n_max = kDefaultNMax);

    static FockDensity pure(int photons, const CVector &amplitudes, int n_max = kDefaultNMax);
    static FockDensity vacuum();

    int photons() const {
        return photons_;
    }
    std::size_t dim() const {
        return static_cast<std::size_t>(rho_.rows());
    }
    const CMatrix &matrix() const {
        return rho_;
    }
    DensityMatrix as_density() const {
        return DensityMatrix::unchecked(rho_);
    }

   private:
    int photons_;
    CMatrix rho_;
};

/// Permanent by Ryser's formula.
Complex permanent(const CMatrix &a);

/// Action of a mode transformation on the N-photon sector.
///
/// `mode_u` is the single-photon unitary (creation operators transform as
/// a_j^dagger -> sum_i U_ij a_i^dagger), so lift(U, 1) == U.
UnitaryMatrix lift_unitary(const UnitaryMatrix &mode_u, int photons, int n_max = kDefaultNMax);

/// 50/50 beam splitter on the path index: path0 -> (0 + 1)/sqrt2, path1 -> (0 - 1)/sqrt2.
UnitaryMatrix path_beam_splitter();
/// Phase e^{i theta} on both polarizations of path 1.
UnitaryMatrix lower_arm_phase(double theta);
/// Splitting beam splitter followed by the encoding phase.
UnitaryMatrix encoder_transform(double phi);

struct LinearCircuit {
    UnitaryMatrix mode_transform;
    double phi;
};

/// Encoder (beam splitter, phase phi on the lower arm) then the Bell-state
/// analyzer (half-wave plate on the upper arm, recombining beam splitter).
LinearCircuit bob_circuit(double phi);

inline constexpr std::array<double, 4> kEncodingPhases{
    0.0, 1.5707963267948966, 3.1415926535897931, 4.7123889803846897};

/// (1/|phases|) sum_phi U_phi rho U_phi^dagger on the input's sector.
FockDensity phase_averaged_channel(
    const FockDensity &input, std::span<const double> phases = kEncodingPhases, int n_max = kDefaultNMax);

/// Output for a uniformly random (continuous) encoding phase.
FockDensity phase_twirled_channel(const FockDensity &input, int n_max = kDefaultNMax);

/// Rotates a state from the detector frame back to the encoder frame, i.e.
/// undoes the analyzer so that path indices label the u/l arms again.
FockDensity to_encoder_frame(const FockDensity &detector_frame_state, int n_max = kDefaultNMax);

/// Total photons in the lower arm for an encoder-frame occupation.
int lower_arm_photons(const Occupation &occ);

/// N photons in the signal port, all in polarization `pol` (a 2-vector over H, V).
StateVector signal_port_photons(int photons, const StateVector &pol, int n_max = kDefaultNMax);

/// Largest |rho_ij| between encoder-frame basis states whose lower-arm photon
/// numbers differ by exactly delta.
double lower_arm_coherence(const FockDensity &encoder_frame_state, int delta, int n_max = kDefaultNMax);

struct ClickDistribution {
    double no_click = 0.0;
    /// Indexed by DetectorPort::index().
    std::array<double, kNumPorts> single{};
    double double_click = 0.0;

    double total() const;
    OutcomeDistribution as_outcomes() const;
};

/// Threshold detectors behind bob_circuit(phi). Each photon is registered
/// independently with probability det.efficiency; each port additionally
/// fires on a dark count with probability det.dark_count.
ClickDistribution click_pattern_distribution(const FockDensity &input, double phi, const DetectorParams &det,
                                             int n_max = kDefaultNMax);

// ---------------------------------------------------------------------------
// Fixed-state audit.

using InputFamily = std::function<FockDensity(int photons, Rng &rng)>;

/// Random mixed states (rank 1..3) of N photons entering the signal port.
InputFamily random_signal_port_family(int n_max = kDefaultNMax);

struct CoherenceReport {
    int delta = 0;
    double max_magnitude = 0.0;
    bool survives = false;
};

struct SectorAudit {
    int photons = 0;
    std::size_t dim = 0;
    std::size_t samples = 0;
    /// max(max_pair_distance, max_twirl_distance).
    double max_trace_distance = 0.0;
    /// Between averaged outputs of an input and the same input with its
    /// lower-arm phase reference shifted by a random angle.
    double max_pair_distance = 0.0;
    /// Between the 4-phase average and the continuous phase average.
    double max_twirl_distance = 0.0;
    /// Surviving lower-arm coherences of averaged outputs, delta = 1..N.
    std::vector<CoherenceReport> coherences;
    /// Mean double-click probability, N photons in each BB84 polarization
    /// against each encoding phase, ideal detectors.
    double double_click_probability = 0.0;
    bool fixed_state = false;
};

struct AuditOptions {
    std::size_t samples = 50;
    std::uint64_t seed = 1;
    int n_max = kDefaultNMax;
    /// Distances and coherences at or below this are treated as zero.
    double tolerance = 1e-10;
    /// Add one maximal-coherence probe per delta to the sampled family.
    bool include_probes = true;
};

struct AuditReport {
    int n_max = kDefaultNMax;
    std::size_t samples = 0;
    std::vector<SectorAudit> sectors;
};

/// Sectors are audited independently and reported in ascending order.
AuditReport fixed_state_audit(std::span<const int> sectors, const InputFamily &family, const AuditOptions &options);

/// (|N in u> + |N - delta in u, delta in l>)/sqrt2 in H polarization, given in
/// the encoder frame and mapped back to the input ports.
FockDensity coherence_probe(int photons, int delta, int n_max = kDefaultNMax);

}  // namespace ddiqkd

#endif
