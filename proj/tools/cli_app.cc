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

#include "cli_app.h"

#include <algorithm>
#include <filesystem>
#include <map>
#include <optional>

#include "CLI11.hpp"

#include "ddiqkd/analysis.h"
#include "ddiqkd/config.h"
#include "ddiqkd/fock_optics.h"
#include "ddiqkd/protocol.h"
#include "ddiqkd/result_io.h"

namespace ddiqkd {

namespace {

constexpr std::array<std::string_view, 5> kSubcommands{"simulate", "phase-scan", "table", "rates", "fock-audit"};

/// Flags collected for one subcommand before the RunConfig is assembled.
struct Flags {
    std::string config_path;
    std::vector<std::string> sets;
    std::map<std::string, std::string> mirrored;
    std::optional<std::uint64_t> seed;
    std::optional<std::uint64_t> rounds;
    std::optional<std::string> out;
    std::optional<int> workers;
    bool ideal = false;
    bool log_rounds = false;
    std::optional<std::string> state;
    std::optional<int> points;
    std::optional<std::uint64_t> per_point;
    bool exact = false;
    std::optional<std::uint64_t> per_cell;
    std::optional<double> loss_max_db;
    std::optional<double> loss_step_db;
    std::optional<double> mu;
    std::optional<double> eta_det;
    std::optional<std::size_t> samples;
    std::optional<std::string> sectors;
};

void add_common(CLI::App *sub, Flags &f) {
    sub->add_option("--config", f.config_path, "INI run configuration file");
    sub->add_option("--seed", f.seed, "run.seed");
    sub->add_option("--rounds", f.rounds, "run.rounds");
    sub->add_option("--out", f.out, "run.out (output directory)");
    sub->add_option("--workers", f.workers, "run.workers");
    sub->add_option("--set", f.sets, "section.key=value override (repeatable, applied last)");
    // Every config key is also a flag of the same name.
    for (const auto &key : RunConfig::keys()) {
        sub->add_option_function<std::string>(
               "--" + key, [&f, key](const std::string &v) { f.mirrored[key] = v; }, key)
            ->group("Config keys");
    }
}

RunConfig assemble(ExperimentKind kind, const Flags &f) {
    RunConfig cfg = f.config_path.empty() ? RunConfig{} : load_config_file(f.config_path);
    cfg.experiment = kind;
    for (const auto &key : RunConfig::keys()) {
        if (auto it = f.mirrored.find(key); it != f.mirrored.end()) {
            cfg.set(key, it->second);
        }
    }
    if (f.seed) cfg.session.seed = *f.seed;
    if (f.rounds) cfg.session.n_rounds = *f.rounds;
    if (f.out) cfg.out_dir = *f.out;
    if (f.workers) cfg.session.workers = *f.workers;
    if (f.log_rounds) cfg.log_rounds = true;
    if (f.state) cfg.set("scan.state", *f.state);
    if (f.points) cfg.scan.points = *f.points;
    if (f.per_point) cfg.scan.per_point = *f.per_point;
    if (f.exact) cfg.scan.per_point = 0;
    if (f.per_cell) cfg.table_per_cell = *f.per_cell;
    if (f.loss_max_db) cfg.rates.loss_max_db = *f.loss_max_db;
    if (f.loss_step_db) cfg.rates.loss_step_db = *f.loss_step_db;
    if (f.mu) cfg.rates.mu = *f.mu;
    if (f.eta_det) cfg.rates.eta_det = *f.eta_det;
    if (f.samples) cfg.audit.samples = *f.samples;
    if (f.sectors) cfg.set("audit.sectors", *f.sectors);
    apply_overrides(cfg, f.sets);
    if (f.ideal) cfg.make_ideal();
    std::string err = cfg.validate();
    if (!err.empty()) {
        throw ValidationError(err);
    }
    return cfg;
}

Json config_json(const RunConfig &cfg) {
    Json j = Json::object();
    for (const auto &[k, v] : config_entries(cfg)) {
        j[k] = v;
    }
    return j;
}

std::string path_in(const RunConfig &cfg, const std::string &name) {
    return (std::filesystem::path(cfg.out_dir) / name).string();
}

void run_simulate(const RunConfig &cfg, std::ostream &out) {
    SessionConfig sc = cfg.session;
    sc.keep_records = cfg.log_rounds;
    SessionResult result = run_session(sc);

    Json j;
    j["experiment"] = "simulate";
    j["config"] = config_json(cfg);
    j["stats"] = to_json(result.stats);
    std::filesystem::create_directories(cfg.out_dir);
    write_text_file(path_in(cfg, "stats.json"), j.dump(2) + "\n");
    if (cfg.log_rounds) {
        write_text_file(path_in(cfg, "rounds.csv"), write_csv(rounds_csv(result.records)));
    }
    const auto &s = result.stats;
    out << "rounds " << s.n_rounds << ", sifted " << s.n_sifted << ", qber_x " << format_double(s.qber_x)
        << ", qber_y " << format_double(s.qber_y) << ", secret_fraction " << format_double(s.secret_fraction) << "\n";
}

void run_phase_scan(const RunConfig &cfg, std::ostream &out) {
    ScanParams scan = cfg.scan;
    scan.seed = cfg.session.seed;
    PhaseScanResult result = phase_scan(cfg.scan_state, scan, cfg.noise());
    std::filesystem::create_directories(cfg.out_dir);
    const std::string name = "phase_scan_" + std::string(to_string(cfg.scan_state.label)) + ".csv";
    write_text_file(path_in(cfg, name), write_csv(phase_scan_csv(result)));
    for (auto k : kAllBellLabels) {
        const auto &f = result.fits[static_cast<std::size_t>(k)];
        out << to_string(k) << " visibility "
            << (f.visibility ? format_double(*f.visibility) + " +- " + format_double(f.se_visibility)
                             : std::string("undefined"))
            << "\n";
    }
}

void run_table(const RunConfig &cfg, std::ostream &out) {
    CorrelationTable table = correlation_table(cfg.table_per_cell, cfg.noise(), cfg.session.seed);
    std::filesystem::create_directories(cfg.out_dir);
    for (auto k : kAllBellLabels) {
        write_text_file(path_in(cfg, "table_" + std::string(to_string(k)) + ".csv"), write_csv(table_csv(table, k)));
    }
    out << "wrote 4 tables, " << cfg.table_per_cell << " rounds per cell\n";
}

void run_rates(const RunConfig &cfg, std::ostream &out) {
    RateCurve curve = rate_curves(cfg.rates);
    std::filesystem::create_directories(cfg.out_dir);
    write_text_file(path_in(cfg, "rates.csv"), write_csv(rates_csv(curve)));
    out << "wrote " << curve.points.size() << " rate points\n";
}

void run_fock_audit(const RunConfig &cfg, std::ostream &out) {
    AuditOptions opts = cfg.audit;
    opts.seed = cfg.session.seed;
    AuditReport report = fixed_state_audit(cfg.audit_sectors, random_signal_port_family(opts.n_max), opts);
    Json j;
    j["experiment"] = "fock-audit";
    j["config"] = config_json(cfg);
    j["report"] = to_json(report);
    std::filesystem::create_directories(cfg.out_dir);
    write_text_file(path_in(cfg, "fock_audit.json"), j.dump(2) + "\n");
    for (const auto &s : report.sectors) {
        out << "N=" << s.photons << " fixed_state " << (s.fixed_state ? "yes" : "no") << " max_trace_distance "
            << format_double(s.max_trace_distance) << "\n";
    }
}

}  // namespace

int cli_main(const std::vector<std::string> &args, std::ostream &out, std::ostream &err) {
    if (!args.empty() && !args[0].starts_with("-") &&
        std::find(kSubcommands.begin(), kSubcommands.end(), args[0]) == kSubcommands.end()) {
        err << "error: unknown subcommand '" << args[0]
            << "' (expected simulate, phase-scan, table, rates or fock-audit)\n";
        return kExitUsage;
    }

    CLI::App app{"Simulator for detector-device-independent QKD with two-qubit single photons", "ddiqkd_cli"};
    app.require_subcommand(1);

    Flags flags;
    std::optional<ExperimentKind> chosen;
    auto sub = [&](const char *name, const char *help, ExperimentKind kind) {
        CLI::App *s = app.add_subcommand(name, help);
        add_common(s, flags);
        s->callback([&chosen, kind] { chosen = kind; });
        return s;
    };

    auto *simulate = sub("simulate", "Run the protocol and write stats.json", ExperimentKind::Simulate);
    simulate->add_flag("--log-rounds", flags.log_rounds, "also write rounds.csv");

    auto *scan = sub("phase-scan", "Scan Bob's phase for a fixed Alice state", ExperimentKind::PhaseScan);
    scan->add_option("--state", flags.state, "scan.state");
    scan->add_option("--points", flags.points, "scan.points");
    scan->add_option("--per-point", flags.per_point, "scan.per_point");
    scan->add_flag("--exact", flags.exact, "exact probabilities instead of sampling");
    scan->add_flag("--ideal", flags.ideal, "disable all noise");

    auto *table = sub("table", "Alice x Bob correlation tables per Bell outcome", ExperimentKind::Table);
    table->add_option("--per-cell", flags.per_cell, "table.per_cell");
    table->add_flag("--ideal", flags.ideal, "disable all noise");

    auto *rates = sub("rates", "Asymptotic rate curves versus channel loss", ExperimentKind::Rates);
    rates->add_option("--loss-max-db", flags.loss_max_db, "rates.loss_max_db");
    rates->add_option("--loss-step-db", flags.loss_step_db, "rates.loss_step_db");
    rates->add_option("--mu", flags.mu, "rates.mu");
    rates->add_option("--eta-det", flags.eta_det, "rates.eta_det");

    auto *audit = sub("fock-audit", "Photon-number sector audit of the encoder", ExperimentKind::FockAudit);
    audit->add_option("--samples", flags.samples, "audit.samples");
    audit->add_option("--sectors", flags.sectors, "audit.sectors");

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp &) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::ParseError &e) {
        if (e.get_exit_code() == 0) {
            out << app.help();
            return kExitOk;
        }
        err << "error: invalid command line: " << e.what() << "\n";
        return kExitUsage;
    }

    try {
        RunConfig cfg = assemble(*chosen, flags);
        switch (cfg.experiment) {
            case ExperimentKind::Simulate:
                run_simulate(cfg, out);
                break;
            case ExperimentKind::PhaseScan:
                run_phase_scan(cfg, out);
                break;
            case ExperimentKind::Table:
                run_table(cfg, out);
                break;
            case ExperimentKind::Rates:
                run_rates(cfg, out);
                break;
            case ExperimentKind::FockAudit:
                run_fock_audit(cfg, out);
                break;
        }
    } catch (const ConfigError &e) {
        err << "error: malformed config: " << e.what() << "\n";
        return kExitMalformedConfig;
    } catch (const ValidationError &e) {
        err << "error: invalid parameter: " << e.what() << "\n";
        return kExitInvalidParameter;
    } catch (const std::exception &e) {
        err << "error: " << e.what() << "\n";
        return kExitRuntime;
    }
    return kExitOk;
}

}  // namespace ddiqkd
