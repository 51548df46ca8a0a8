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

#include "ddiqkd/result_io.h"

#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace ddiqkd {

namespace {

constexpr const char *kBellNormalization =
    "per (alice, bob) cell over the four Bell outcomes; double clicks and empty rounds excluded";
constexpr const char *kScanNormalization =
    "per phi over the four Bell outcomes; alternative per-curve normalization not applied";

std::vector<std::string> split(const std::string &line, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char ch : line) {
        if (ch == sep) {
            out.push_back(cur);
            cur.clear();
        } else {
            cur += ch;
        }
    }
    out.push_back(cur);
    return out;
}

std::uint64_t parse_u64(const std::string &text) {
    std::uint64_t v = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (text.empty() || ec != std::errc() || ptr != text.data() + text.size()) {
        throw ResultFormatError("expected an unsigned integer, got '" + text + "'");
    }
    return v;
}

template <typename Fn>
auto rethrow_format(const std::string &what, Fn fn) {
    try {
        return fn();
    } catch (const std::invalid_argument &e) {
        throw ResultFormatError(what + ": " + e.what());
    }
}

std::string optional_double(const std::optional<double> &v) {
    return v ? format_double(*v) : "undefined";
}

std::optional<double> parse_optional_double(const std::string &text) {
    if (text == "undefined") {
        return std::nullopt;
    }
    return parse_double(text);
}

}  // namespace

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

double parse_double(const std::string &text) {
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (text.empty() || ec != std::errc() || ptr != text.data() + text.size()) {
        throw ResultFormatError("expected a number, got '" + text + "'");
    }
    return v;
}

const std::string &CsvDocument::meta(const std::string &key) const {
    for (const auto &[k, v] : metadata) {
        if (k == key) {
            return v;
        }
    }
    throw ResultFormatError("missing metadata key '" + key + "'");
}

std::size_t CsvDocument::column(const std::string &name) const {
    for (std::size_t i = 0; i < header.size(); i++) {
        if (header[i] == name) {
            return i;
        }
    }
    throw ResultFormatError("missing column '" + name + "'");
}

std::string write_csv(const CsvDocument &doc) {
    std::string out;
    for (const auto &[k, v] : doc.metadata) {
        out += "# " + k + ": " + v + "\n";
    }
    auto line = [&out](const std::vector<std::string> &cells) {
        for (std::size_t i = 0; i < cells.size(); i++) {
            out += (i ? "," : "") + cells[i];
        }
        out += "\n";
    };
    line(doc.header);
    for (const auto &r : doc.rows) {
        line(r);
    }
    return out;
}

CsvDocument read_csv(const std::string &text) {
    CsvDocument doc;
    std::istringstream in(text);
    std::string line;
    bool have_header = false;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (line.empty()) {
            continue;
        }
        if (!have_header && line.starts_with("# ")) {
            auto colon = line.find(": ", 2);
            if (colon == std::string::npos) {
                throw ResultFormatError("malformed metadata line '" + line + "'");
            }
            doc.metadata.emplace_back(line.substr(2, colon - 2), line.substr(colon + 2));
            continue;
        }
        auto cells = split(line, ',');
        if (!have_header) {
            doc.header = std::move(cells);
            have_header = true;
            continue;
        }
        if (cells.size() != doc.header.size()) {
            throw ResultFormatError("row has " + std::to_string(cells.size()) + " cells, header has " +
                                    std::to_string(doc.header.size()));
        }
        doc.rows.push_back(std::move(cells));
    }
    if (!have_header) {
        throw ResultFormatError("missing header row");
    }
    return doc;
}

Json to_json(const SessionStats &s) {
    Json j;
    j["n_rounds"] = s.n_rounds;
    j["n_announced"] = s.n_announced;
    j["n_sifted"] = s.n_sifted;
    j["n_sifted_x"] = s.n_sifted_x;
    j["n_sifted_y"] = s.n_sifted_y;
    j["errors_x"] = s.errors_x;
    j["errors_y"] = s.errors_y;
    j["qber_x"] = s.qber_x;
    j["qber_y"] = s.qber_y;
    j["qber_total"] = s.qber_total;
    j["secret_fraction"] = s.secret_fraction;
    Json hist = Json::object();
    for (auto o : kAllOutcomes) {
        hist[std::string(to_string(o))] = s.outcome_histogram[static_cast<std::size_t>(o)];
    }
    j["outcome_histogram"] = hist;
    j["leaked_information_bits"] = s.leaked_information;
    j["leakage_counts"] = s.leakage;
    j["leakage_layout"] = "index = (outcome * 2 + basis) * 2 + alice_bit; outcome order as outcome_histogram, basis X=0 Y=1";
    return j;
}

SessionStats session_stats_from_json(const Json &j) {
    try {
        SessionStats s;
        s.n_rounds = j.at("n_rounds").get<std::uint64_t>();
        s.n_announced = j.at("n_announced").get<std::uint64_t>();
        s.n_sifted = j.at("n_sifted").get<std::uint64_t>();
        s.n_sifted_x = j.at("n_sifted_x").get<std::uint64_t>();
        s.n_sifted_y = j.at("n_sifted_y").get<std::uint64_t>();
        s.errors_x = j.at("errors_x").get<std::uint64_t>();
        s.errors_y = j.at("errors_y").get<std::uint64_t>();
        s.qber_x = j.at("qber_x").get<double>();
        s.qber_y = j.at("qber_y").get<double>();
        s.qber_total = j.at("qber_total").get<double>();
        s.secret_fraction = j.at("secret_fraction").get<double>();
        for (auto o : kAllOutcomes) {
            s.outcome_histogram[static_cast<std::size_t>(o)] =
                j.at("outcome_histogram").at(std::string(to_string(o))).get<std::uint64_t>();
        }
        s.leaked_information = j.at("leaked_information_bits").get<double>();
        s.leakage = j.at("leakage_counts").get<LeakageCounts>();
        return s;
    } catch (const Json::exception &e) {
        throw ResultFormatError(std::string("session stats: ") + e.what());
    }
}

Json to_json(const AuditReport &r) {
    Json j;
    j["n_max"] = r.n_max;
    j["samples"] = r.samples;
    Json sectors = Json::array();
    for (const auto &s : r.sectors) {
        Json js;
        js["photons"] = s.photons;
        js["dim"] = s.dim;
        js["samples"] = s.samples;
        js["max_trace_distance"] = s.max_trace_distance;
        js["max_pair_distance"] = s.max_pair_distance;
        js["max_twirl_distance"] = s.max_twirl_distance;
        js["fixed_state"] = s.fixed_state;
        js["double_click_probability"] = s.double_click_probability;
        Json coh = Json::array();
        for (const auto &c : s.coherences) {
            coh.push_back(Json{{"delta", c.delta}, {"max_magnitude", c.max_magnitude}, {"survives", c.survives}});
        }
        js["coherences"] = coh;
        sectors.push_back(js);
    }
    j["sectors"] = sectors;
    return j;
}

AuditReport audit_report_from_json(const Json &j) {
    try {
        AuditReport r;
        r.n_max = j.at("n_max").get<int>();
        r.samples = j.at("samples").get<std::size_t>();
        for (const auto &js : j.at("sectors")) {
            SectorAudit s;
            s.photons = js.at("photons").get<int>();
            s.dim = js.at("dim").get<std::size_t>();
            s.samples = js.at("samples").get<std::size_t>();
            s.max_trace_distance = js.at("max_trace_distance").get<double>();
            s.max_pair_distance = js.at("max_pair_distance").get<double>();
            s.max_twirl_distance = js.at("max_twirl_distance").get<double>();
            s.fixed_state = js.at("fixed_state").get<bool>();
            s.double_click_probability = js.at("double_click_probability").get<double>();
            for (const auto &c : js.at("coherences")) {
                s.coherences.push_back(CoherenceReport{c.at("delta").get<int>(), c.at("max_magnitude").get<double>(),
                                                       c.at("survives").get<bool>()});
            }
            r.sectors.push_back(std::move(s));
        }
        return r;
    } catch (const Json::exception &e) {
        throw ResultFormatError(std::string("audit report: ") + e.what());
    }
}

CsvDocument rounds_csv(const std::vector<RoundRecord> &records) {
    CsvDocument doc;
    doc.header = {"index", "alice", "bob", "outcome", "announced", "sifted", "alice_bit", "bob_bit"};
    auto bit = [](const std::optional<int> &b) { return b ? std::to_string(*b) : std::string(); };
    for (const auto &r : records) {
        doc.rows.push_back({std::to_string(r.index), std::string(to_string(r.alice.label)),
                            std::string(to_string(r.bob.label)), std::string(to_string(r.outcome)),
                            r.announced ? "1" : "0", r.sifted ? "1" : "0", bit(r.alice_bit), bit(r.bob_bit)});
    }
    return doc;
}

std::vector<RoundRecord> rounds_from_csv(const CsvDocument &doc) {
    const std::size_t ci = doc.column("index"), ca = doc.column("alice"), cb = doc.column("bob"),
                      co = doc.column("outcome"), cn = doc.column("announced"), cs = doc.column("sifted"),
                      cab = doc.column("alice_bit"), cbb = doc.column("bob_bit");
    auto bit = [](const std::string &s) -> std::optional<int> {
        if (s.empty()) {
            return std::nullopt;
        }
        return static_cast<int>(parse_u64(s));
    };
    std::vector<RoundRecord> out;
    for (const auto &row : doc.rows) {
        RoundRecord r;
        r.index = parse_u64(row[ci]);
        r.alice = rethrow_format("alice", [&] { return parse_bb84(row[ca]); });
        r.bob = rethrow_format("bob", [&] { return parse_bb84(row[cb]); });
        r.outcome = rethrow_format("outcome", [&] { return parse_outcome(row[co]); });
        r.announced = parse_u64(row[cn]) != 0;
        r.sifted = parse_u64(row[cs]) != 0;
        r.alice_bit = bit(row[cab]);
        r.bob_bit = bit(row[cbb]);
        out.push_back(r);
    }
    return out;
}

CsvDocument table_csv(const CorrelationTable &table, BellLabel k) {
    CsvDocument doc;
    doc.metadata = {{"outcome", std::string(to_string(k))},
                    {"per_cell", std::to_string(table.per_cell)},
                    {"normalization", kBellNormalization}};
    doc.header = {"alice", "bob", "probability", "count"};
    auto ki = static_cast<std::size_t>(k);
    for (auto a : kAllBb84States) {
        for (auto b : kAllBb84States) {
            auto ai = static_cast<std::size_t>(a.index()), bi = static_cast<std::size_t>(b.index());
            doc.rows.push_back({std::string(to_string(a.label)), std::string(to_string(b.label)),
                                format_double(table.probability[ki][ai][bi]),
                                std::to_string(table.counts[ki][ai][bi])});
        }
    }
    return doc;
}

CorrelationTable table_from_csv(const std::array<CsvDocument, 4> &docs) {
    CorrelationTable table;
    for (auto k : kAllBellLabels) {
        const auto &doc = docs[static_cast<std::size_t>(k)];
        if (doc.meta("outcome") != to_string(k)) {
            throw ResultFormatError("table document for " + std::string(to_string(k)) + " is labeled " +
                                    doc.meta("outcome"));
        }
        table.per_cell = parse_u64(doc.meta("per_cell"));
        const std::size_t ca = doc.column("alice"), cb = doc.column("bob"), cp = doc.column("probability"),
                          cc = doc.column("count");
        auto ki = static_cast<std::size_t>(k);
        for (const auto &row : doc.rows) {
            auto a = static_cast<std::size_t>(rethrow_format("alice", [&] { return parse_bb84(row[ca]); }).index());
            auto b = static_cast<std::size_t>(rethrow_format("bob", [&] { return parse_bb84(row[cb]); }).index());
            table.probability[ki][a][b] = parse_double(row[cp]);
            table.counts[ki][a][b] = parse_u64(row[cc]);
        }
    }
    return table;
}

CsvDocument phase_scan_csv(const PhaseScanResult &scan) {
    CsvDocument doc;
    doc.metadata = {{"alice", std::string(to_string(scan.alice.label))},
                    {"per_point", std::to_string(scan.per_point)},
                    {"normalization", kScanNormalization},
                    {"fit_model", "P(phi) = a + b cos(phi - c); visibility = b / a clamped to [0, 1]"}};
    for (auto k : kAllBellLabels) {
        const auto &f = scan.fits[static_cast<std::size_t>(k)];
        const std::string p = "fit." + std::string(to_string(k)) + ".";
        doc.metadata.emplace_back(p + "a", format_double(f.a));
        doc.metadata.emplace_back(p + "b", format_double(f.b));
        doc.metadata.emplace_back(p + "c", format_double(f.c));
        doc.metadata.emplace_back(p + "se_a", format_double(f.se_a));
        doc.metadata.emplace_back(p + "se_b", format_double(f.se_b));
        doc.metadata.emplace_back(p + "se_c", format_double(f.se_c));
        doc.metadata.emplace_back(p + "visibility", optional_double(f.visibility));
        doc.metadata.emplace_back(p + "se_visibility", format_double(f.se_visibility));
    }
    doc.header = {"phi"};
    for (auto k : kAllBellLabels) {
        doc.header.emplace_back(to_string(k));
    }
    for (std::size_t j = 0; j < scan.phis.size(); j++) {
        std::vector<std::string> row{format_double(scan.phis[j])};
        for (double p : scan.probabilities[j]) {
            row.push_back(format_double(p));
        }
        doc.rows.push_back(std::move(row));
    }
    return doc;
}

PhaseScanResult phase_scan_from_csv(const CsvDocument &doc) {
    PhaseScanResult scan;
    scan.alice = rethrow_format("alice", [&] { return parse_bb84(doc.meta("alice")); });
    scan.per_point = parse_u64(doc.meta("per_point"));
    for (auto k : kAllBellLabels) {
        auto &f = scan.fits[static_cast<std::size_t>(k)];
        const std::string p = "fit." + std::string(to_string(k)) + ".";
        f.a = parse_double(doc.meta(p + "a"));
        f.b = parse_double(doc.meta(p + "b"));
        f.c = parse_double(doc.meta(p + "c"));
        f.se_a = parse_double(doc.meta(p + "se_a"));
        f.se_b = parse_double(doc.meta(p + "se_b"));
        f.se_c = parse_double(doc.meta(p + "se_c"));
        f.visibility = parse_optional_double(doc.meta(p + "visibility"));
        f.se_visibility = parse_double(doc.meta(p + "se_visibility"));
    }
    const std::size_t cphi = doc.column("phi");
    std::array<std::size_t, 4> cols{};
    for (auto k : kAllBellLabels) {
        cols[static_cast<std::size_t>(k)] = doc.column(std::string(to_string(k)));
    }
    for (const auto &row : doc.rows) {
        scan.phis.push_back(parse_double(row[cphi]));
        BellProbabilities p{};
        for (std::size_t k = 0; k < 4; k++) {
            p[k] = parse_double(row[cols[k]]);
        }
        scan.probabilities.push_back(p);
    }
    return scan;
}

CsvDocument rates_csv(const RateCurve &curve) {
    const auto &p = curve.params;
    CsvDocument doc;
    doc.metadata = {
        {"model", "toy asymptotic rates, secret fraction f(Q) = 1 - 2 h(Q)"},
        {"rate_ddi", "clock_rate * 1/2 * t * eta_det * P1(mu) * f(Q)"},
        {"rate_mdi", "clock_rate * 1/2 * 1/2 * (sqrt(t) * eta_det * P1(mu))^2 * f(Q)"},
        {"constants", "1/2 sifting; extra 1/2 linear-optics BSM efficiency for mdi; P1(mu) = mu exp(-mu)"},
        {"mu", format_double(p.mu)},
        {"eta_det", format_double(p.eta_det)},
        {"loss_max_db", format_double(p.loss_max_db)},
        {"loss_step_db", format_double(p.loss_step_db)},
        {"clock_rate", format_double(p.clock_rate)},
        {"qber", format_double(p.qber)},
    };
    doc.header = {"loss_db", "transmittance", "rate_ddi", "rate_mdi"};
    for (const auto &pt : curve.points) {
        doc.rows.push_back({format_double(pt.loss_db), format_double(pt.transmittance), format_double(pt.rate_ddi),
                            format_double(pt.rate_mdi)});
    }
    return doc;
}

RateCurve rates_from_csv(const CsvDocument &doc) {
    RateCurve curve;
    auto &p = curve.params;
    p.mu = parse_double(doc.meta("mu"));
    p.eta_det = parse_double(doc.meta("eta_det"));
    p.loss_max_db = parse_double(doc.meta("loss_max_db"));
    p.loss_step_db = parse_double(doc.meta("loss_step_db"));
    p.clock_rate = parse_double(doc.meta("clock_rate"));
    p.qber = parse_double(doc.meta("qber"));
    const std::size_t cl = doc.column("loss_db"), ct = doc.column("transmittance"), cd = doc.column("rate_ddi"),
                      cm = doc.column("rate_mdi");
    for (const auto &row : doc.rows) {
        curve.points.push_back(
            RatePoint{parse_double(row[cl]), parse_double(row[ct]), parse_double(row[cd]), parse_double(row[cm])});
    }
    return curve;
}

std::string read_text_file(const std::string &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw std::runtime_error("cannot read '" + path + "'");
    }
    std::stringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_text_file(const std::string &path, const std::string &content) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw std::runtime_error("cannot write '" + path + "'");
        }
        out << content;
        if (!out.flush()) {
            throw std::runtime_error("cannot write '" + path + "'");
        }
    }
    std::filesystem::rename(tmp, path);
}

}  // namespace ddiqkd
