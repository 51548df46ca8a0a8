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

#include "gtest/gtest.h"

#include "test_util.test.h"

using namespace ddiqkd;
using ddiqkd::testing::binomial_z;
using ddiqkd::testing::independent_test_rng;

namespace {

SessionConfig base_config(std::uint64_t rounds, std::uint64_t seed = 1) {
    SessionConfig c;
    c.n_rounds = rounds;
    c.seed = seed;
    return c;
}

std::uint64_t errors(const SessionStats &s) {
    return s.errors_x + s.errors_y;
}

/// Binary entropy written independently of the library.
double h2(double q) {
    return q <= 0 || q >= 1 ? 0.0 : -q * std::log(q) / std::log(2.0) - (1 - q) * std::log(1 - q) / std::log(2.0);
}

OutcomeRemap swap_within_bit_class() {
    return parse_remap("PhiPlus=PsiPlus,PsiPlus=PhiPlus,PhiMinus=PsiMinus,PsiMinus=PhiMinus");
}

}  // namespace

TEST(protocol, remap_parsing) {
    ASSERT_EQ(parse_remap("identity"), identity_remap());
    ASSERT_EQ(parse_remap(""), identity_remap());
    ASSERT_EQ(parse_remap("constant:PhiPlus"), constant_remap(BsmOutcome::PhiPlus));
    OutcomeRemap swap = swap_within_bit_class();
    ASSERT_EQ(swap[static_cast<std::size_t>(BsmOutcome::PhiPlus)], BsmOutcome::PsiPlus);
    ASSERT_EQ(swap[static_cast<std::size_t>(BsmOutcome::PsiPlus)], BsmOutcome::PhiPlus);
    ASSERT_EQ(swap[static_cast<std::size_t>(BsmOutcome::DoubleClick)], BsmOutcome::DoubleClick);
    for (const auto &r : {identity_remap(), constant_remap(BsmOutcome::NoClick), swap}) {
        ASSERT_EQ(parse_remap(format_remap(r)), r);
    }
    ASSERT_THROW(parse_remap("PhiPlus"), std::invalid_argument);
    ASSERT_THROW(parse_remap("PhiPlus=Nope"), std::invalid_argument);
    ASSERT_EQ(parse_adversary_kind("intercept_resend"), AdversaryKind::InterceptResend);
    ASSERT_THROW(parse_adversary_kind("eve"), std::invalid_argument);
}

TEST(protocol, config_validation) {
    SessionConfig c = base_config(0);
    ASSERT_NE(c.validate().find("run.rounds"), std::string::npos);
    c = base_config(10);
    c.adversary.intercept_probability = 2;
    ASSERT_NE(c.validate().find("adversary.intercept_probability"), std::string::npos);
    c = base_config(10);
    c.channel.depolarization = 1.5;
    ASSERT_THROW(run_session(c), std::invalid_argument);
    c = base_config(10);
    c.workers = 0;
    ASSERT_NE(c.validate().find("run.workers"), std::string::npos);
}

TEST(protocol, deterministic_for_fixed_seed) {
    SessionConfig c = base_config(20000, 7);
    c.channel.depolarization = 0.1;
    c.detector = DetectorParams{0.7, 0.001};
    c.keep_records = true;
    SessionResult a = run_session(c), b = run_session(c);
    ASSERT_EQ(a.stats, b.stats);
    ASSERT_EQ(a.records.size(), b.records.size());
    for (std::size_t i = 0; i < a.records.size(); i++) {
        ASSERT_EQ(a.records[i].outcome, b.records[i].outcome);
        ASSERT_EQ(a.records[i].bob_bit, b.records[i].bob_bit);
    }
    c.seed = 8;
    ASSERT_NE(run_session(c).stats, a.stats);
}

TEST(protocol, sharded_runs_are_deterministic_and_complete) {
    SessionConfig c = base_config(10007, 3);
    c.workers = 3;
    c.keep_records = true;
    c.channel.depolarization = 0.2;
    SessionResult a = run_session(c), b = run_session(c);
    ASSERT_EQ(a.stats, b.stats);
    ASSERT_EQ(a.stats.n_rounds, 10007u);
    ASSERT_EQ(a.records.size(), 10007u);
    for (std::size_t i = 0; i < a.records.size(); i++) {
        ASSERT_EQ(a.records[i].index, i);
    }
}

TEST(protocol, record_invariants) {
    SessionConfig c = base_config(5000, 11);
    c.keep_records = true;
    c.channel.transmittance = 0.5;
    c.detector = DetectorParams{0.9, 0.01};
    SessionResult r = run_session(c);
    SessionStats recount;
    for (const auto &rec : r.records) {
        ASSERT_EQ(rec.announced, rec.outcome != BsmOutcome::NoClick);
        ASSERT_EQ(rec.sifted, rec.announced && rec.alice.basis() == rec.bob.basis());
        ASSERT_EQ(rec.alice_bit.has_value(), rec.sifted);
        ASSERT_EQ(rec.bob_bit.has_value(), rec.sifted);
        if (rec.sifted) {
            ASSERT_EQ(*rec.alice_bit, rec.alice.bit());
        }
        recount.n_rounds++;
        recount.n_announced += rec.announced;
        recount.n_sifted += rec.sifted;
    }
    ASSERT_EQ(recount.n_rounds, r.stats.n_rounds);
    ASSERT_EQ(recount.n_announced, r.stats.n_announced);
    ASSERT_EQ(recount.n_sifted, r.stats.n_sifted);
}

TEST(protocol, ideal_run_has_no_errors) {
    SessionResult r = run_session(base_config(100000));
    ASSERT_EQ(errors(r.stats), 0u);
    ASSERT_EQ(r.stats.qber_total, 0.0);
    ASSERT_EQ(r.stats.n_announced, r.stats.n_rounds);
    ASSERT_LT(binomial_z(r.stats.n_sifted, r.stats.n_rounds, 0.5), 4.0);
    ASSERT_EQ(r.stats.secret_fraction, 1.0);
    ASSERT_EQ(r.stats.outcome_histogram[static_cast<std::size_t>(BsmOutcome::DoubleClick)], 0u);
}

TEST(protocol, depolarization_gives_half_p_qber) {
    for (double p : {0.03, 0.1, 0.4}) {
        SessionConfig c = base_config(200000, 5);
        c.channel.depolarization = p;
        SessionResult r = run_session(c);
        ASSERT_LT(binomial_z(errors(r.stats), r.stats.n_sifted, p / 2), 4.0) << p;
    }
}

TEST(protocol, phase_misalignment_qber) {
    // Oracle: matched-basis error probability sin^2(delta / 2).
    SessionConfig c = base_config(200000, 6);
    c.channel.phase_misalignment = 0.3;
    SessionResult r = run_session(c);
    ASSERT_LT(binomial_z(errors(r.stats), r.stats.n_sifted, std::pow(std::sin(0.15), 2)), 4.0);
}

TEST(protocol, loss_reduces_announcements) {
    SessionConfig c = base_config(200000, 12);
    c.channel.transmittance = 0.2;
    c.detector.efficiency = 0.5;
    SessionResult r = run_session(c);
    ASSERT_LT(binomial_z(r.stats.n_announced, r.stats.n_rounds, 0.1), 4.0);
    ASSERT_EQ(errors(r.stats), 0u);
}

TEST(protocol, intercept_resend_qber) {
    for (double p_int : {1.0, 0.4}) {
        SessionConfig c = base_config(200000, 13);
        c.adversary.kind = AdversaryKind::InterceptResend;
        c.adversary.intercept_probability = p_int;
        SessionResult r = run_session(c);
        ASSERT_LT(binomial_z(errors(r.stats), r.stats.n_sifted, 0.25 * p_int), 4.0) << p_int;
        ASSERT_LT(binomial_z(r.stats.errors_x, r.stats.n_sifted_x, 0.25 * p_int), 4.0);
        ASSERT_LT(binomial_z(r.stats.errors_y, r.stats.n_sifted_y, 0.25 * p_int), 4.0);
    }
}

TEST(protocol, identity_remap_matches_no_adversary) {
    SessionConfig c = base_config(30000, 21);
    c.channel.depolarization = 0.05;
    c.detector.dark_count = 0.001;
    SessionStats plain = run_session(c).stats;
    c.adversary.kind = AdversaryKind::DetectorControl;
    c.adversary.remap = identity_remap();
    ASSERT_EQ(run_session(c).stats, plain);
}

TEST(protocol, constant_remap_decodes_half_wrong) {
    // With matched bases the true outcome is uniform over the two Bell states
    // of Alice's bit class; announcing PhiPlus always decodes bit 0 for Bob's
    // "+" and "-i" states and bit 1 otherwise, which is wrong half the time.
    SessionConfig c = base_config(200000, 22);
    c.adversary.kind = AdversaryKind::DetectorControl;
    c.adversary.remap = constant_remap(BsmOutcome::PhiPlus);
    SessionResult r = run_session(c);
    ASSERT_LT(binomial_z(errors(r.stats), r.stats.n_sifted, 0.5), 4.0);
    ASSERT_LT(r.stats.leaked_information, 1e-3);
}

TEST(protocol, swap_remap_preserves_x_and_inverts_y) {
    // Phi+ <-> Psi+ and Phi- <-> Psi- keeps the X bit classes {Phi+, Psi+} and
    // {Phi-, Psi-} but exchanges the Y classes {Psi+, Phi-} and {Phi+, Psi-}.
    SessionConfig c = base_config(50000, 23);
    c.adversary.kind = AdversaryKind::DetectorControl;
    c.adversary.remap = swap_within_bit_class();
    SessionResult r = run_session(c);
    ASSERT_EQ(r.stats.errors_x, 0u);
    ASSERT_EQ(r.stats.errors_y, r.stats.n_sifted_y);
    ASSERT_EQ(r.stats.qber_x, 0.0);
    ASSERT_EQ(r.stats.qber_y, 1.0);
}

TEST(protocol, bit_posterior_is_uniform_for_every_remap_property) {
    auto rng = independent_test_rng(40);
    std::uniform_int_distribution<int> pick(0, static_cast<int>(kNumOutcomes) - 1);
    std::vector<OutcomeRemap> remaps{identity_remap(), constant_remap(BsmOutcome::PhiPlus), swap_within_bit_class()};
    for (int trial = 0; trial < 200; trial++) {
        OutcomeRemap r;
        for (auto &o : r) {
            o = static_cast<BsmOutcome>(pick(rng));
        }
        remaps.push_back(r);
    }
    for (const auto &remap : remaps) {
        for (auto basis : {Basis::X, Basis::Y}) {
            bool any = false;
            for (auto announced : kAllOutcomes) {
                auto p = bit_posterior(remap, announced, basis);
                if (p) {
                    any = true;
                    ASSERT_EQ(*p, 0.5) << format_remap(remap);
                }
            }
            ASSERT_TRUE(any);
        }
    }
    ASSERT_FALSE(bit_posterior(identity_remap(), BsmOutcome::DoubleClick, Basis::X).has_value());
}

TEST(protocol, secret_fraction_values) {
    ASSERT_EQ(secret_fraction(0.0), 1.0);
    ASSERT_EQ(secret_fraction(0.5), 0.0);
    ASSERT_THROW(secret_fraction(-0.1), std::domain_error);
    ASSERT_THROW(secret_fraction(0.6), std::domain_error);
    // Independent bisection for 1 - 2 h(q) = 0 on (0, 0.5).
    double lo = 0.01, hi = 0.3;
    for (int i = 0; i < 200; i++) {
        double mid = 0.5 * (lo + hi);
        (1 - 2 * h2(mid) > 0 ? lo : hi) = mid;
    }
    ASSERT_NEAR(lo, 0.110028, 1e-6);
    ASSERT_NEAR(secret_fraction(lo - 1e-9), 0.0, 1e-7);
    ASSERT_GT(secret_fraction(lo - 1e-4), 0.0);
    ASSERT_EQ(secret_fraction(lo + 1e-4), 0.0);
    for (double q = 0.0; q < 0.11; q += 0.005) {
        ASSERT_NEAR(secret_fraction(q), 1 - 2 * h2(q), 1e-14);
    }
}

TEST(protocol, mutual_information_estimator) {
    std::array<std::uint64_t, 4> independent{100, 100, 100, 100};
    std::array<std::uint64_t, 4> correlated{500, 0, 0, 500};
    // Plug-in MI is 0 and 1 bit; Miller-Madow adds (m_row - 1 + m_col - 1 - (m_joint - 1)) / 2n nats.
    ASSERT_NEAR(mutual_information_mm(independent, 2, 2), (1.0 + 1.0 - 3.0) / (2 * 400.0) / std::log(2.0), 1e-15);
    ASSERT_NEAR(mutual_information_mm(correlated, 2, 2), 1.0 + (1.0 + 1.0 - 1.0) / (2 * 1000.0) / std::log(2.0),
                1e-14);
    std::array<std::uint64_t, 4> empty{};
    ASSERT_EQ(mutual_information_mm(empty, 2, 2), 0.0);
    ASSERT_THROW(mutual_information_mm(empty, 3, 2), ShapeError);
}

TEST(protocol, stats_merge_adds_counts) {
    SessionConfig c = base_config(4000, 31);
    c.channel.depolarization = 0.2;
    SessionStats a = run_session(c).stats;
    c.seed = 32;
    SessionStats b = run_session(c).stats;
    SessionStats m = a;
    m.merge(b);
    m.finalize();
    ASSERT_EQ(m.n_rounds, 8000u);
    ASSERT_EQ(m.n_sifted, a.n_sifted + b.n_sifted);
    ASSERT_EQ(m.errors_x, a.errors_x + b.errors_x);
    ASSERT_DOUBLE_EQ(m.qber_total, static_cast<double>(errors(a) + errors(b)) / static_cast<double>(m.n_sifted));
}

TEST(protocol, wcs_source_matches_sector_oracle) {
    // Ideal detectors: every round with n >= 1 arriving photons clicks, and
    // double clicks come from n >= 2 at the exact per-sector rate.
    const double mu = 0.8;
    SessionConfig c = base_config(300000, 41);
    c.source = SourceParams{SourceKind::Wcs, mu};
    SessionResult r = run_session(c);
    ASSERT_LT(binomial_z(r.stats.n_announced, r.stats.n_rounds, 1 - std::exp(-mu)), 4.0);

    std::array<int, 4> sectors{1, 2, 3, 4};
    AuditOptions opts;
    opts.samples = 1;
    AuditReport audit = fixed_state_audit(sectors, random_signal_port_family(), opts);
    std::vector<double> w = poisson_sector_weights(mu, 4);
    double p_double = w.back();
    for (const auto &s : audit.sectors) {
        p_double += w[static_cast<std::size_t>(s.photons)] * s.double_click_probability;
    }
    std::uint64_t doubles = r.stats.outcome_histogram[static_cast<std::size_t>(BsmOutcome::DoubleClick)];
    ASSERT_LT(binomial_z(doubles, r.stats.n_rounds, p_double), 4.0);
    ASSERT_GT(r.stats.qber_total, 0.0);
}

TEST(protocol, wcs_with_weak_pulses_behaves_like_single_photons) {
    SessionConfig c = base_config(100000, 42);
    c.source = SourceParams{SourceKind::Wcs, 1e-3};
    c.channel.depolarization = 0.1;
    SessionResult r = run_session(c);
    ASSERT_LT(binomial_z(errors(r.stats), r.stats.n_sifted, 0.05), 4.0);
}

TEST(protocol, positional_overload) {
    SessionResult r = run_session(1000, SourceParams{}, ChannelParams{}, DetectorParams{}, AdversaryModel{}, 3);
    ASSERT_EQ(r.records.size(), 1000u);
    ASSERT_EQ(r.stats.n_rounds, 1000u);
}
