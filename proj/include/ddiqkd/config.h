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

// Run configuration: an INI-style file of [section] key = value lines, where
// every parameter is addressed as section.key. See docs/config.md.

#ifndef DDIQKD_CONFIG_H
#define DDIQKD_CONFIG_H

#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "ddiqkd/analysis.h"
#include "ddiqkd/fock_optics.h"
#include "ddiqkd/protocol.h"

namespace ddiqkd {

/// Malformed text: bad syntax, unknown key, or a value of the wrong type.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Well-formed but out of range. The message names the field.
struct ValidationError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

enum class ExperimentKind { Simulate, PhaseScan, Table, Rates, FockAudit };

std::string_view to_string(ExperimentKind k);
ExperimentKind parse_experiment(std::string_view text);

struct RunConfig {
    ExperimentKind experiment = ExperimentKind::Simulate;

    /// rounds, seed, workers, source, channel, detector and adversary blocks.
    SessionConfig session{};
    std::string out_dir = ".";
    bool log_rounds = false;

    Bb84State scan_state{Bb84Label::Plus};
    ScanParams scan{};

    std::uint64_t table_per_cell = 10000;

    RateParams rates{};

    std::vector<int> audit_sectors{1, 2, 3, 4};
    AuditOptions audit{};

    /// Sets one parameter by its section.key name. Throws ConfigError.
    void set(std::string_view key, std::string_view value);
    /// Current value of a parameter in the text form accepted by set().
    std::string get(std::string_view key) const;
    /// Every addressable section.key, in documentation order.
    static const std::vector<std::string> &keys();

    /// Turns off every noise source and adversary.
    void make_ideal();
    NoiseParams noise() const;

    /// Empty when valid; otherwise the first violated precondition, naming its field.
    std::string validate() const;
};

/// Parses INI text on top of the defaults. Throws ConfigError.
RunConfig parse_config(const std::string &text);
RunConfig load_config_file(const std::string &path);

/// Applies "section.key=value" overrides in order. Throws ConfigError.
void apply_overrides(RunConfig &config, const std::vector<std::string> &assignments);

/// All parameters as (section.key, value) pairs.
std::vector<std::pair<std::string, std::string>> config_entries(const RunConfig &config);

}  // namespace ddiqkd

#endif
