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

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

namespace ddiqkd {

namespace {

std::string trim(std::string_view s) {
    auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) {
        return {};
    }
    auto e = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(b, e - b + 1));
}

[[noreturn]] void bad_value(std::string_view key, std::string_view value, std::string_view expected) {
    throw ConfigError("invalid value '" + std::string(value) + "' for " + std::string(key) + ": expected " +
                      std::string(expected));
}

double to_double(std::string_view key, std::string_view text) {
    std::string s = trim(text);
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || ec != std::errc() || ptr != s.data() + s.size()) {
        bad_value(key, text, "a number");
    }
    return v;
}

template <typename Int>
Int to_int(std::string_view key, std::string_view text) {
    std::string s = trim(text);
    Int v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || ec != std::errc() || ptr != s.data() + s.size()) {
        bad_value(key, text, "an integer");
    }
    return v;
}

bool to_bool(std::string_view key, std::string_view text) {
    std::string s = trim(text);
    if (s == "true" || s == "1" || s == "yes") {
        return true;
    }
    if (s == "false" || s == "0" || s == "no") {
        return false;
    }
    bad_value(key, text, "true or false");
}

std::string from_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

template <typename Parse>
auto parse_enum(std::string_view key, std::string_view text, Parse parse, std::string_view expected) {
    try {
        return parse(trim(text));
    } catch (const std::invalid_argument &) {
        bad_value(key, text, expected);
    }
}

std::vector<int> to_int_list(std::string_view key, std::string_view text) {
    std::vector<int> out;
    std::string s = trim(text);
    std::string_view rest = s;
    while (!rest.empty()) {
        auto comma = rest.find(',');
        out.push_back(to_int<int>(key, rest.substr(0, comma)));
        rest = comma == std::string_view::npos ? std::string_view{} : rest.substr(comma + 1);
    }
    if (out.empty()) {
        bad_value(key, text, "a comma-separated list of integers");
    }
    return out;
}

std::string from_int_list(const std::vector<int> &v) {
    std::string out;
    for (int x : v) {
        out += (out.empty() ? "" : ",") + std::to_string(x);
    }
    return out;
}

std::string_view to_string(SourceKind k) {
    return k == SourceKind::SinglePhoton ? "single_photon" : "wcs";
}

SourceKind parse_source_kind(std::string_view s) {
    if (s == "single_photon") {
        return SourceKind::SinglePhoton;
    }
    if (s == "wcs") {
        return SourceKind::Wcs;
    }
    throw std::invalid_argument("source kind");
}

struct Field {
    std::string key;
    std::function<void(RunConfig &, std::string_view)> set;
    std::function<std::string(const RunConfig &)> get;
};

#define DDIQKD_DOUBLE(name, member)                                                          \
    Field {                                                                                  \
        name, [](RunConfig &c, std::string_view v) { c.member = to_double(name, v); },       \
            [](const RunConfig &c) { return from_double(c.member); }                         \
    }
#define DDIQKD_INT(name, member)                                                                          \
    Field {                                                                                               \
        name, [](RunConfig &c, std::string_view v) { c.member = to_int<decltype(c.member)>(name, v); }, \
            [](const RunConfig &c) { return std::to_string(c.member); }                                   \
    }

const std::vector<Field> &fields() {
    static const std::vector<Field> kFields{
        Field{"run.experiment",
              [](RunConfig &c, std::string_view v) {
                  c.experiment = parse_enum("run.experiment", v, parse_experiment,
                                            "simulate, phase-scan, table, rates or fock-audit");
              },
              [](const RunConfig &c) { return std::string(to_string(c.experiment)); }},
        DDIQKD_INT("run.rounds", session.n_rounds),
        DDIQKD_INT("run.seed", session.seed),
        DDIQKD_INT("run.workers", session.workers),
        Field{"run.out", [](RunConfig &c, std::string_view v) { c.out_dir = trim(v); },
              [](const RunConfig &c) { return c.out_dir; }},
        Field{"run.log_rounds", [](RunConfig &c, std::string_view v) { c.log_rounds = to_bool("run.log_rounds", v); },
              [](const RunConfig &c) { return std::string(c.log_rounds ? "true" : "false"); }},
        Field{"source.kind",
              [](RunConfig &c, std::string_view v) {
                  c.session.source.kind = parse_enum("source.kind", v, parse_source_kind, "single_photon or wcs");
              },
              [](const RunConfig &c) { return std::string(to_string(c.session.source.kind)); }},
        DDIQKD_DOUBLE("source.mu", session.source.mu),
        DDIQKD_INT("source.n_max", session.n_max),
        DDIQKD_DOUBLE("channel.transmittance", session.channel.transmittance),
        DDIQKD_DOUBLE("channel.depolarization", session.channel.depolarization),
        DDIQKD_DOUBLE("channel.phase_misalignment", session.channel.phase_misalignment),
        DDIQKD_DOUBLE("channel.loss_db_per_km", session.channel.loss_db_per_km),
        DDIQKD_DOUBLE("channel.length_km", session.channel.length_km),
        DDIQKD_DOUBLE("detector.efficiency", session.detector.efficiency),
        DDIQKD_DOUBLE("detector.dark_count", session.detector.dark_count),
        Field{"adversary.kind",
              [](RunConfig &c, std::string_view v) {
                  c.session.adversary.kind = parse_enum("adversary.kind", v, parse_adversary_kind,
                                                        "none, intercept_resend or detector_control");
              },
              [](const RunConfig &c) { return std::string(to_string(c.session.adversary.kind)); }},
        DDIQKD_DOUBLE("adversary.intercept_probability", session.adversary.intercept_probability),
        Field{"adversary.remap",
              [](RunConfig &c, std::string_view v) {
                  c.session.adversary.remap =
                      parse_enum("adversary.remap", v, parse_remap, "identity, constant:<Outcome> or From=To pairs");
              },
              [](const RunConfig &c) { return format_remap(c.session.adversary.remap); }},
        Field{"scan.state",
              [](RunConfig &c, std::string_view v) {
                  c.scan_state = parse_enum("scan.state", v, parse_bb84, "Plus, Minus, PlusI, MinusI, +, -, +i or -i");
              },
              [](const RunConfig &c) { return std::string(to_string(c.scan_state.label)); }},
        DDIQKD_INT("scan.points", scan.points),
        DDIQKD_INT("scan.per_point", scan.per_point),
        DDIQKD_INT("table.per_cell", table_per_cell),
        DDIQKD_DOUBLE("rates.mu", rates.mu),
        DDIQKD_DOUBLE("rates.eta_det", rates.eta_det),
        DDIQKD_DOUBLE("rates.loss_max_db", rates.loss_max_db),
        DDIQKD_DOUBLE("rates.loss_step_db", rates.loss_step_db),
        DDIQKD_DOUBLE("rates.clock_rate", rates.clock_rate),
        DDIQKD_DOUBLE("rates.qber", rates.qber),
        Field{"audit.sectors",
              [](RunConfig &c, std::string_view v) { c.audit_sectors = to_int_list("audit.sectors", v); },
              [](const RunConfig &c) { return from_int_list(c.audit_sectors); }},
        DDIQKD_INT("audit.samples", audit.samples),
        DDIQKD_INT("audit.n_max", audit.n_max),
        DDIQKD_DOUBLE("audit.tolerance", audit.tolerance),
        Field{"audit.include_probes",
              [](RunConfig &c, std::string_view v) {
                  c.audit.include_probes = to_bool("audit.include_probes", v);
              },
              [](const RunConfig &c) { return std::string(c.audit.include_probes ? "true" : "false"); }},
    };
    return kFields;
}

#undef DDIQKD_DOUBLE
#undef DDIQKD_INT

const Field &field(std::string_view key) {
    for (const auto &f : fields()) {
        if (f.key == key) {
            return f;
        }
    }
    throw ConfigError("unknown config key '" + std::string(key) + "'");
}

}  // namespace

std::string_view to_string(ExperimentKind k) {
    switch (k) {
        case ExperimentKind::Simulate:
            return "simulate";
        case ExperimentKind::PhaseScan:
            return "phase-scan";
        case ExperimentKind::Table:
            return "table";
        case ExperimentKind::Rates:
            return "rates";
        case ExperimentKind::FockAudit:
            return "fock-audit";
    }
    return "?";
}

ExperimentKind parse_experiment(std::string_view text) {
    for (auto k : {ExperimentKind::Simulate, ExperimentKind::PhaseScan, ExperimentKind::Table, ExperimentKind::Rates,
                   ExperimentKind::FockAudit}) {
        if (text == to_string(k)) {
            return k;
        }
    }
    throw std::invalid_argument("unknown experiment '" + std::string(text) + "'");
}

void RunConfig::set(std::string_view key, std::string_view value) {
    field(trim(key)).set(*this, value);
}

std::string RunConfig::get(std::string_view key) const {
    return field(trim(key)).get(*this);
}

const std::vector<std::string> &RunConfig::keys() {
    static const std::vector<std::string> kKeys = [] {
        std::vector<std::string> out;
        for (const auto &f : fields()) {
            out.push_back(f.key);
        }
        return out;
    }();
    return kKeys;
}

void RunConfig::make_ideal() {
    session.channel = ChannelParams{};
    session.detector = DetectorParams{};
    session.adversary = AdversaryModel{};
}

NoiseParams RunConfig::noise() const {
    return NoiseParams{session.channel, session.detector};
}

std::string RunConfig::validate() const {
    std::string err = session.validate();
    if (!err.empty()) {
        return err;
    }
    if (out_dir.empty()) {
        return "run.out must not be empty";
    }
    if (err = scan.validate(); !err.empty()) {
        return err;
    }
    if (table_per_cell < kMinTableRounds) {
        return "table.per_cell must be >= " + std::to_string(kMinTableRounds);
    }
    if (err = rates.validate(); !err.empty()) {
        return err;
    }
    if (audit.n_max < 1 || audit.n_max > kHardNMax) {
        return "audit.n_max must be in [1, " + std::to_string(kHardNMax) + "]";
    }
    if (audit.samples < 1) {
        return "audit.samples must be >= 1";
    }
    if (!(audit.tolerance >= 0.0)) {
        return "audit.tolerance must be >= 0";
    }
    for (int n : audit_sectors) {
        if (n < 1 || n > audit.n_max) {
            return "audit.sectors entries must be in [1, audit.n_max]";
        }
    }
    return {};
}

RunConfig parse_config(const std::string &text) {
    namespace pt = boost::property_tree;
    pt::ptree tree;
    std::istringstream in(text);
    try {
        pt::read_ini(in, tree);
    } catch (const pt::ini_parser_error &e) {
        throw ConfigError("malformed config at line " + std::to_string(e.line()) + ": " + e.message());
    }
    RunConfig config;
    for (const auto &[section, body] : tree) {
        if (body.empty() && !body.data().empty()) {
            throw ConfigError("malformed config: key '" + section + "' is outside any [section]");
        }
        for (const auto &[key, value] : body) {
            config.set(section + "." + key, value.data());
        }
    }
    return config;
}

RunConfig load_config_file(const std::string &path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot read config file '" + path + "'");
    }
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

void apply_overrides(RunConfig &config, const std::vector<std::string> &assignments) {
    for (const auto &a : assignments) {
        auto eq = a.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("override '" + a + "' is not of the form section.key=value");
        }
        config.set(a.substr(0, eq), a.substr(eq + 1));
    }
}

std::vector<std::pair<std::string, std::string>> config_entries(const RunConfig &config) {
    std::vector<std::pair<std::string, std::string>> out;
    for (const auto &f : fields()) {
        out.emplace_back(f.key, f.get(config));
    }
    return out;
}

}  // namespace ddiqkd
