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

#include "ddiqkd/config.h"

#include <set>

#include "gtest/gtest.h"

using namespace ddiqkd;

namespace {

const char *kFullConfig = R"(; a complete run description
[run]
experiment = phase-scan
rounds = 5000
seed = 42
workers = 2
out = results/a

[source]
kind = wcs
mu = 0.3
n_max = 6

[channel]
transmittance = 0.8
depolarization = 0.03
phase_misalignment = 0.1

[detector]
efficiency = 0.6
dark_count = 1e-6

[adversary]
kind = detector_control
remap = PhiPlus=PsiPlus,PhiMinus=PsiMinus

[scan]
state = +i
points = 24
per_point = 0

[table]
per_cell = 2000

[rates]
qber = 0.02

[audit]
sectors = 1, 3
samples = 20
n_max = 5
)";

}  // namespace

TEST(config, defaults_are_valid) {
    RunConfig c;
    ASSERT_EQ(c.validate(), "");
    ASSERT_EQ(c.experiment, ExperimentKind::Simulate);
}

TEST(config, parses_every_section) {
    RunConfig c = parse_config(kFullConfig);
    ASSERT_EQ(c.validate(), "");
    ASSERT_EQ(c.experiment, ExperimentKind::PhaseScan);
    ASSERT_EQ(c.session.n_rounds, 5000u);
    ASSERT_EQ(c.session.seed, 42u);
    ASSERT_EQ(c.session.workers, 2);
    ASSERT_EQ(c.out_dir, "results/a");
    ASSERT_EQ(c.session.source.kind, SourceKind::Wcs);
    ASSERT_EQ(c.session.source.mu, 0.3);
    ASSERT_EQ(c.session.n_max, 6);
    ASSERT_EQ(c.session.channel.transmittance, 0.8);
    ASSERT_EQ(c.session.channel.depolarization, 0.03);
    ASSERT_EQ(c.session.detector.dark_count, 1e-6);
    ASSERT_EQ(c.session.adversary.kind, AdversaryKind::DetectorControl);
    ASSERT_EQ(c.session.adversary.remap, parse_remap("PhiPlus=PsiPlus,PhiMinus=PsiMinus"));
    ASSERT_EQ(c.scan_state.label, Bb84Label::PlusI);
    ASSERT_EQ(c.scan.points, 24);
    ASSERT_EQ(c.scan.per_point, 0u);
    ASSERT_EQ(c.table_per_cell, 2000u);
    ASSERT_EQ(c.rates.qber, 0.02);
    ASSERT_EQ(c.audit_sectors, (std::vector<int>{1, 3}));
    ASSERT_EQ(c.audit.samples, 20u);
    ASSERT_EQ(c.audit.n_max, 5);
}

TEST(config, get_set_round_trip_for_every_key) {
    RunConfig original = parse_config(kFullConfig);
    RunConfig copy;
    for (const auto &[key, value] : config_entries(original)) {
        copy.set(key, value);
    }
    ASSERT_EQ(config_entries(copy), config_entries(original));
    std::set<std::string> unique(RunConfig::keys().begin(), RunConfig::keys().end());
    ASSERT_EQ(unique.size(), RunConfig::keys().size());
    ASSERT_EQ(config_entries(original).size(), RunConfig::keys().size());
}

TEST(config, doubles_survive_text_round_trip) {
    RunConfig c;
    c.session.channel.depolarization = 0.1 + 0.2;
    RunConfig d;
    d.set("channel.depolarization", c.get("channel.depolarization"));
    ASSERT_EQ(d.session.channel.depolarization, c.session.channel.depolarization);
}

TEST(config, overrides_apply_in_order) {
    RunConfig c;
    apply_overrides(c, {"run.seed=5", "channel.depolarization=0.1", "run.seed=9"});
    ASSERT_EQ(c.session.seed, 9u);
    ASSERT_EQ(c.session.channel.depolarization, 0.1);
    ASSERT_THROW(apply_overrides(c, {"run.seed"}), ConfigError);
}

TEST(config, unknown_key_is_rejected) {
    RunConfig c;
    try {
        c.set("channel.colour", "blue");
        FAIL();
    } catch (const ConfigError &e) {
        ASSERT_NE(std::string(e.what()).find("channel.colour"), std::string::npos);
    }
    ASSERT_THROW(parse_config("[run]\nspeed = 3\n"), ConfigError);
}

TEST(config, bad_values_name_the_key) {
    RunConfig c;
    for (auto [key, value] : std::vector<std::pair<std::string, std::string>>{{"run.rounds", "many"},
                                                                              {"run.rounds", "-3"},
                                                                              {"channel.depolarization", "0.1x"},
                                                                              {"source.kind", "laser"},
                                                                              {"adversary.remap", "PhiPlus=Nothing"},
                                                                              {"scan.state", "diagonal"},
                                                                              {"run.log_rounds", "maybe"},
                                                                              {"audit.sectors", "1,,2"}}) {
        try {
            c.set(key, value);
            FAIL() << key << "=" << value;
        } catch (const ConfigError &e) {
            ASSERT_NE(std::string(e.what()).find(key), std::string::npos) << e.what();
        }
    }
}

TEST(config, malformed_text_is_rejected) {
    ASSERT_THROW(parse_config("[run\nseed = 1\n"), ConfigError);
    ASSERT_THROW(parse_config("seed = 1\n"), ConfigError);
    ASSERT_THROW(parse_config("[run]\nseed = 1\nseed = 2\n"), ConfigError);
    ASSERT_THROW(load_config_file("/nonexistent/ddiqkd.ini"), ConfigError);
}

TEST(config, comments_and_blank_lines_are_ignored) {
    RunConfig c = parse_config("\n; leading comment\n[run]\n\n; seed below\nseed = 11\n");
    ASSERT_EQ(c.session.seed, 11u);
}

TEST(config, validation_names_the_field) {
    auto check = [](const std::string &key, const std::string &value, const std::string &field) {
        RunConfig c;
        c.set(key, value);
        std::string err = c.validate();
        ASSERT_NE(err.find(field), std::string::npos) << key << " -> " << err;
    };
    check("run.rounds", "0", "run.rounds");
    check("run.workers", "0", "run.workers");
    check("source.n_max", "13", "source.n_max");
    check("channel.transmittance", "1.5", "channel.transmittance");
    check("channel.depolarization", "2", "channel.depolarization");
    check("detector.efficiency", "1.5", "detector.efficiency");
    check("adversary.intercept_probability", "1.2", "adversary.intercept_probability");
    check("scan.points", "4", "scan.points");
    check("table.per_cell", "999", "table.per_cell");
    check("rates.mu", "0", "rates.mu");
    check("audit.samples", "0", "audit.samples");
    check("audit.sectors", "1,9", "audit.sectors");
}

TEST(config, make_ideal_clears_noise_and_adversary) {
    RunConfig c = parse_config(kFullConfig);
    c.make_ideal();
    ASSERT_EQ(c.session.channel.depolarization, 0.0);
    ASSERT_EQ(c.session.channel.transmittance, 1.0);
    ASSERT_EQ(c.session.detector.efficiency, 1.0);
    ASSERT_EQ(c.session.detector.dark_count, 0.0);
    ASSERT_EQ(c.session.adversary.kind, AdversaryKind::None);
    // Unrelated settings stay.
    ASSERT_EQ(c.session.seed, 42u);
}

TEST(config, experiment_names) {
    for (auto k : {ExperimentKind::Simulate, ExperimentKind::PhaseScan, ExperimentKind::Table, ExperimentKind::Rates,
                   ExperimentKind::FockAudit}) {
        ASSERT_EQ(parse_experiment(to_string(k)), k);
    }
    ASSERT_THROW(parse_experiment("teleport"), std::invalid_argument);
}
