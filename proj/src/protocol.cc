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

#include "ddiqkd/protocol.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <thread>

namespace ddiqkd {

namespace {

std::size_t leakage_index(BsmOutcome o, Basis b, int bit) {
    return (static_cast<std::size_t>(o) * 2 + (b == Basis::X ? 0 : 1)) * 2 + static_cast<std::size_t>(bit);
}

std::string trim(std::string_view s) {
    auto b = s.find_first_not_of(" \t");
    if (b == std::string_view::npos) {
        return {};
    }
    auto e = s.find_last_not_of(" \t");
    return std::string(s.substr(b, e - b + 1));
}

// Pulse polarizations used by the multi-photon path: the four BB84 states
// followed by H and V (the depolarized branch).
constexpr std::size_t kPulseH = 4;
constexpr std::size_t kPulseV = 5;
constexpr std::size_t kNumPulsePolarizations = 6;

StateVector pulse_polarization(std::size_t k) {
    if (k < 4) {
        return bb84_vector(Bb84State::from_index(static_cast<int>(k)));
    }
    return k == kPulseH ? StateVector{1.0, 0.0} : StateVector{0.0, 1.0};
}

template <std::size_t N>
std::size_t sample_index(const std::array<double, N> &probs, double u) {
    double acc = 0.0;
    for (std::size_t k = 0; k < N; k++) {
        acc += probs[k];
        if (u < acc) {
            return k;
        }
    }
    // Roundoff: fall back to the last outcome with positive mass.
    for (std::size_t k = N; k-- > 0;) {
        if (probs[k] > 0.0) {
            return k;
        }
    }
    return N - 1;
}

class RoundSimulator {
   public:
    explicit RoundSimulator(const SessionConfig &cfg) : cfg_(cfg) {
        transmittance_ = cfg.channel.effective_transmittance();
        for (auto a : kAllBb84States) {
            for (auto e : kAllBb84States) {
                born_[a.index()][e.index()] = std::norm(bb84_vector(e).inner(bb84_vector(a)));
            }
        }
        if (cfg.source.kind == SourceKind::SinglePhoton) {
            for (auto s : kAllBb84States) {
                DensityMatrix rho = depolarize(DensityMatrix::pure(bb84_vector(s)), cfg.channel.depolarization);
                for (auto b : kAllBb84States) {
                    port_probs_[s.index()][b.index()] =
                        port_probabilities(rho, bob_phase(b) + cfg.channel.phase_misalignment);
                }
            }
        } else {
            arrivals_ = poisson_sector_weights(cfg.source.mu * transmittance_, cfg.n_max);
            clicks_.resize(static_cast<std::size_t>(cfg.n_max) + 1);
            for (int n = 1; n <= cfg.n_max; n++) {
                for (auto b : kAllBb84States) {
                    for (std::size_t p = 0; p < kNumPulsePolarizations; p++) {
                        FockDensity in = FockDensity::pure(
                            n, signal_port_photons(n, pulse_polarization(p), cfg.n_max).amplitudes(), cfg.n_max);
                        clicks_[static_cast<std::size_t>(n)][p][static_cast<std::size_t>(b.index())] =
                            click_pattern_distribution(in, bob_phase(b) + cfg.channel.phase_misalignment,
                                                       cfg.detector, cfg.n_max)
                                .as_outcomes();
                    }
                }
            }
        }
    }

    RoundRecord run(std::uint64_t index, Rng &rng) const {
        std::uniform_int_distribution<int> pick4(0, 3);
        std::uniform_real_distribution<double> unif(0.0, 1.0);

        RoundRecord rec;
        rec.index = index;
        rec.alice = Bb84State::from_index(pick4(rng));
        rec.bob = Bb84State::from_index(pick4(rng));

        BsmOutcome outcome = cfg_.source.kind == SourceKind::SinglePhoton ? single_photon_round(rec, rng)
                                                                            : wcs_round(rec, rng);
        if (cfg_.adversary.kind == AdversaryKind::DetectorControl) {
            outcome = cfg_.adversary.remap[static_cast<std::size_t>(outcome)];
        }
        rec.outcome = outcome;
        rec.announced = outcome != BsmOutcome::NoClick;
        rec.sifted = rec.announced && rec.alice.basis() == rec.bob.basis();
        if (rec.sifted) {
            rec.alice_bit = rec.alice.bit();
            DecodedBit d = decode_bit(rec.bob, outcome);
            rec.bob_bit = d == DecodedBit::Random ? static_cast<int>(unif(rng) < 0.5) : static_cast<int>(d);
        }
        return rec;
    }

   private:
    Bb84State transmitted_state(Bb84State alice, Rng &rng) const {
        if (cfg_.adversary.kind != AdversaryKind::InterceptResend) {
            return alice;
        }
        std::uniform_real_distribution<double> unif(0.0, 1.0);
        if (!(unif(rng) < cfg_.adversary.intercept_probability)) {
            return alice;
        }
        Basis eve_basis = unif(rng) < 0.5 ? Basis::X : Basis::Y;
        Bb84State zero = Bb84State::from(eve_basis, 0);
        double p_zero = born_[alice.index()][zero.index()];
        return unif(rng) < p_zero ? zero : Bb84State::from(eve_basis, 1);
    }

    BsmOutcome single_photon_round(const RoundRecord &rec, Rng &rng) const {
        Bb84State sent = transmitted_state(rec.alice, rng);
        std::bernoulli_distribution arrives(transmittance_);
        static constexpr PortProbabilities kNoPhoton{};
        if (!arrives(rng)) {
            return detect(kNoPhoton, cfg_.detector, rng);
        }
        return detect(port_probs_[sent.index()][rec.bob.index()], cfg_.detector, rng);
    }

    BsmOutcome wcs_round(const RoundRecord &rec, Rng &rng) const {
        std::uniform_real_distribution<double> unif(0.0, 1.0);
        double u = unif(rng);
        std::size_t n = 0;
        double acc = 0.0;
        for (; n < arrivals_.size(); n++) {
            acc += arrivals_[n];
            if (u < acc) {
                break;
            }
        }
        if (n + 1 >= arrivals_.size()) {
            // Beyond the simulated sectors: pessimistically a double click.
            return BsmOutcome::DoubleClick;
        }
        if (n == 0) {
            static constexpr PortProbabilities kNoPhoton{};
            return detect(kNoPhoton, cfg_.detector, rng);
        }
        std::size_t pol = static_cast<std::size_t>(transmitted_state(rec.alice, rng).index());
        if (cfg_.channel.depolarization > 0.0 && unif(rng) < cfg_.channel.depolarization) {
            pol = unif(rng) < 0.5 ? kPulseH : kPulseV;
        }
        const auto &dist = clicks_[n][pol][static_cast<std::size_t>(rec.bob.index())];
        return static_cast<BsmOutcome>(sample_index(dist, unif(rng)));
    }

    SessionConfig cfg_;
    double transmittance_ = 1.0;
    std::array<std::array<double, 4>, 4> born_{};
    std::array<std::array<PortProbabilities, 4>, 4> port_probs_{};
    std::vector<double> arrivals_;
    std::vector<std::array<std::array<OutcomeDistribution, 4>, kNumPulsePolarizations>> clicks_;
};

void accumulate(SessionStats &s, const RoundRecord &rec) {
    s.n_rounds++;
    s.outcome_histogram[static_cast<std::size_t>(rec.outcome)]++;
    if (rec.announced) {
        s.n_announced++;
    }
    if (!rec.sifted) {
        return;
    }
    s.n_sifted++;
    bool error = *rec.alice_bit != *rec.bob_bit;
    if (rec.alice.basis() == Basis::X) {
        s.n_sifted_x++;
        s.errors_x += error;
    } else {
        s.n_sifted_y++;
        s.errors_y += error;
    }
    s.leakage[leakage_index(rec.outcome, rec.alice.basis(), *rec.alice_bit)]++;
}

SessionResult run_shard(const RoundSimulator &sim, std::uint64_t first, std::uint64_t count, std::uint64_t seed,
                        bool keep_records) {
    SessionResult out;
    Rng rng(seed);
    if (keep_records) {
        out.records.reserve(count);
    }
    for (std::uint64_t k = 0; k < count; k++) {
        RoundRecord rec = sim.run(first + k, rng);
        accumulate(out.stats, rec);
        if (keep_records) {
            out.records.push_back(std::move(rec));
        }
    }
    return out;
}

}  // namespace

std::string_view to_string(AdversaryKind k) {
    switch (k) {
        case AdversaryKind::None:
            return "none";
        case AdversaryKind::InterceptResend:
            return "intercept_resend";
        case AdversaryKind::DetectorControl:
            return "detector_control";
    }
    return "?";
}

AdversaryKind parse_adversary_kind(std::string_view text) {
    for (auto k : {AdversaryKind::None, AdversaryKind::InterceptResend, AdversaryKind::DetectorControl}) {
        if (text == to_string(k)) {
            return k;
        }
    }
    throw std::invalid_argument("unknown adversary kind '" + std::string(text) + "'");
}

OutcomeRemap identity_remap() {
    return kAllOutcomes;
}

OutcomeRemap constant_remap(BsmOutcome target) {
    OutcomeRemap r;
    r.fill(target);
    return r;
}

OutcomeRemap parse_remap(std::string_view text) {
    std::string t = trim(text);
    if (t.empty() || t == "identity") {
        return identity_remap();
    }
    constexpr std::string_view kConst = "constant:";
    if (t.starts_with(kConst)) {
        return constant_remap(parse_outcome(trim(std::string_view(t).substr(kConst.size()))));
    }
    OutcomeRemap r = identity_remap();
    std::string_view rest = t;
    while (!rest.empty()) {
        auto comma = rest.find(',');
        std::string_view item = rest.substr(0, comma);
        rest = comma == std::string_view::npos ? std::string_view{} : rest.substr(comma + 1);
        auto eq = item.find('=');
        if (eq == std::string_view::npos) {
            throw std::invalid_argument("remap entry '" + std::string(item) + "' is not of the form From=To");
        }
        BsmOutcome from = parse_outcome(trim(item.substr(0, eq)));
        BsmOutcome to = parse_outcome(trim(item.substr(eq + 1)));
        r[static_cast<std::size_t>(from)] = to;
    }
    return r;
}

std::string format_remap(const OutcomeRemap &remap) {
    if (remap == identity_remap()) {
        return "identity";
    }
    if (std::all_of(remap.begin(), remap.end(), [&](BsmOutcome o) { return o == remap[0]; })) {
        return "constant:" + std::string(to_string(remap[0]));
    }
    std::string out;
    for (auto o : kAllOutcomes) {
        auto to = remap[static_cast<std::size_t>(o)];
        if (to == o) {
            continue;
        }
        if (!out.empty()) {
            out += ',';
        }
        out += std::string(to_string(o)) + "=" + std::string(to_string(to));
    }
    return out;
}

std::string AdversaryModel::validate() const {
    if (!(intercept_probability >= 0.0 && intercept_probability <= 1.0)) {
        return "adversary.intercept_probability must be in [0, 1]";
    }
    return {};
}

std::string SessionConfig::validate() const {
    if (n_rounds < 1) {
        return "run.rounds must be >= 1";
    }
    if (workers < 1) {
        return "run.workers must be >= 1";
    }
    if (n_max < 1 || n_max > kHardNMax) {
        return "source.n_max must be in [1, " + std::to_string(kHardNMax) + "]";
    }
    for (const std::string &err : {source.validate(), channel.validate(), detector.validate(), adversary.validate()}) {
        if (!err.empty()) {
            return err;
        }
    }
    return {};
}

void SessionStats::merge(const SessionStats &o) {
    n_rounds += o.n_rounds;
    n_announced += o.n_announced;
    n_sifted += o.n_sifted;
    n_sifted_x += o.n_sifted_x;
    n_sifted_y += o.n_sifted_y;
    errors_x += o.errors_x;
    errors_y += o.errors_y;
    for (std::size_t k = 0; k < outcome_histogram.size(); k++) {
        outcome_histogram[k] += o.outcome_histogram[k];
    }
    for (std::size_t k = 0; k < leakage.size(); k++) {
        leakage[k] += o.leakage[k];
    }
}

void SessionStats::finalize() {
    auto ratio = [](std::uint64_t a, std::uint64_t b) {
        return b == 0 ? 0.0 : static_cast<double>(a) / static_cast<double>(b);
    };
    qber_x = ratio(errors_x, n_sifted_x);
    qber_y = ratio(errors_y, n_sifted_y);
    qber_total = ratio(errors_x + errors_y, n_sifted);
    secret_fraction = (n_sifted == 0 || qber_total > 0.5) ? 0.0 : ddiqkd::secret_fraction(qber_total);
    leaked_information = mutual_information_mm(leakage, kNumOutcomes * 2, 2);
}

SessionResult run_session(const SessionConfig &config) {
    std::string err = config.validate();
    if (!err.empty()) {
        throw std::invalid_argument(err);
    }
    const RoundSimulator sim(config);
    const auto workers = static_cast<std::uint64_t>(config.workers);
    std::vector<SessionResult> shards(workers);

    auto shard_range = [&](std::uint64_t k) {
        std::uint64_t base = config.n_rounds / workers, extra = config.n_rounds % workers;
        std::uint64_t first = k * base + std::min(k, extra);
        return std::pair{first, base + (k < extra ? 1 : 0)};
    };
    auto run_one = [&](std::uint64_t k) {
        auto [first, count] = shard_range(k);
        shards[k] = run_shard(sim, first, count, derive_seed(config.seed, k), config.keep_records);
    };

    if (workers == 1) {
        run_one(0);
    } else {
        std::vector<std::jthread> threads;
        for (std::uint64_t k = 0; k < workers; k++) {
            threads.emplace_back(run_one, k);
        }
    }

    SessionResult out;
    for (auto &s : shards) {
        out.stats.merge(s.stats);
        if (config.keep_records) {
            out.records.insert(out.records.end(), std::make_move_iterator(s.records.begin()),
                               std::make_move_iterator(s.records.end()));
        }
    }
    out.stats.finalize();
    return out;
}

SessionResult run_session(std::uint64_t n_rounds, const SourceParams &source, const ChannelParams &channel,
                          const DetectorParams &det, const AdversaryModel &adversary, std::uint64_t seed) {
    SessionConfig cfg;
    cfg.n_rounds = n_rounds;
    cfg.source = source;
    cfg.channel = channel;
    cfg.detector = det;
    cfg.adversary = adversary;
    cfg.seed = seed;
    cfg.keep_records = true;
    return run_session(cfg);
}

double binary_entropy(double p) {
    if (p <= 0.0 || p >= 1.0) {
        return 0.0;
    }
    return -p * std::log2(p) - (1.0 - p) * std::log2(1.0 - p);
}

double secret_fraction(double q) {
    if (!(q >= 0.0 && q <= 0.5)) {
        throw std::domain_error("secret_fraction: q must lie in [0, 0.5]");
    }
    return std::max(0.0, 1.0 - 2.0 * binary_entropy(q));
}

double mutual_information_mm(std::span<const std::uint64_t> joint, std::size_t rows, std::size_t cols) {
    if (joint.size() != rows * cols) {
        throw ShapeError("mutual_information_mm: table size does not match shape");
    }
    std::vector<double> row_sum(rows, 0.0), col_sum(cols, 0.0);
    double n = 0.0;
    for (std::size_t r = 0; r < rows; r++) {
        for (std::size_t c = 0; c < cols; c++) {
            auto v = static_cast<double>(joint[r * cols + c]);
            row_sum[r] += v;
            col_sum[c] += v;
            n += v;
        }
    }
    if (n == 0.0) {
        return 0.0;
    }
    // Miller-Madow: H_MM = H_plugin + (m - 1) / (2n) nats, m = occupied bins.
    auto entropy_mm = [n](const auto &counts) {
        double h = 0.0;
        std::size_t occupied = 0;
        for (double v : counts) {
            if (v > 0.0) {
                h -= (v / n) * std::log(v / n);
                occupied++;
            }
        }
        return h + (static_cast<double>(occupied) - 1.0) / (2.0 * n);
    };
    std::vector<double> cells(joint.begin(), joint.end());
    double mi_nats = entropy_mm(row_sum) + entropy_mm(col_sum) - entropy_mm(cells);
    return mi_nats / std::log(2.0);
}

std::optional<double> bit_posterior(const OutcomeRemap &remap, BsmOutcome announced, Basis basis) {
    double p_bit[2] = {0.0, 0.0};
    for (int alice_bit = 0; alice_bit < 2; alice_bit++) {
        Bb84State alice = Bb84State::from(basis, alice_bit);
        for (int bob_bit = 0; bob_bit < 2; bob_bit++) {
            Bb84State bob = Bb84State::from(basis, bob_bit);
            BellProbabilities p = bell_probabilities(alice, bob_phase(bob));
            for (auto k : kAllBellLabels) {
                if (remap[static_cast<std::size_t>(to_outcome(k))] == announced) {
                    p_bit[alice_bit] += 0.25 * p[static_cast<std::size_t>(k)];
                }
            }
        }
    }
    double total = p_bit[0] + p_bit[1];
    if (total <= 0.0) {
        return std::nullopt;
    }
    return p_bit[0] / total;
}

}  // namespace ddiqkd
