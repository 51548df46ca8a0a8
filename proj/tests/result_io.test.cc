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

#include <filesystem>

#include "gtest/gtest.h"

#include "test_util.test.h"

using namespace ddiqkd;
using ddiqkd::testing::independent_test_rng;

namespace {

SessionConfig noisy_session() {
    SessionConfig c;
    c.n_rounds = 3000;
    c.seed = 17;
    c.channel.depolarization = 0.1;
    c.channel.transmittance = 0.7;
    c.detector = DetectorParams{0.8, 0.01};
    return c;
}

void expect_same(const SectorAudit &a, const SectorAudit &b) {
    ASSERT_EQ(a.photons, b.photons);
    ASSERT_EQ(a.dim, b.dim);
    ASSERT_EQ(a.samples, b.samples);
    ASSERT_EQ(a.max_trace_distance, b.max_trace_distance);
    ASSERT_EQ(a.max_pair_distance, b.max_pair_distance);
    ASSERT_EQ(a.max_twirl_distance, b.max_twirl_distance);
    ASSERT_EQ(a.double_click_probability, b.double_click_probability);
    ASSERT_EQ(a.fixed_state, b.fixed_state);
    ASSERT_EQ(a.coherences.size(), b.coherences.size());
    for (std::size_t i = 0; i < a.coherences.size(); i++) {
        ASSERT_EQ(a.coherences[i].delta, b.coherences[i].delta);
        ASSERT_EQ(a.coherences[i].max_magnitude, b.coherences[i].max_magnitude);
        ASSERT_EQ(a.coherences[i].survives, b.coherences[i].survives);
    }
}

}  // namespace

TEST(result_io, doubles_round_trip_exactly_property) {
    auto rng = independent_test_rng(60);
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    for (int i = 0; i < 1000; i++) {
        double v = unif(rng) * std::pow(10.0, (i % 40) - 20);
        ASSERT_EQ(parse_double(format_double(v)), v);
    }
    ASSERT_THROW(parse_double("1.5abc"), ResultFormatError);
    ASSERT_THROW(parse_double(""), ResultFormatError);
}

TEST(result_io, csv_round_trip_with_metadata) {
    CsvDocument doc;
    doc.metadata = {{"kind", "demo"}, {"seed", "3"}};
    doc.header = {"a", "b"};
    doc.rows = {{"1", "x"}, {"2", "y"}};
    CsvDocument back = read_csv(write_csv(doc));
    ASSERT_EQ(back.metadata, doc.metadata);
    ASSERT_EQ(back.header, doc.header);
    ASSERT_EQ(back.rows, doc.rows);
    ASSERT_EQ(back.meta("seed"), "3");
    ASSERT_EQ(back.column("b"), 1u);
    ASSERT_THROW(back.meta("missing"), ResultFormatError);
    ASSERT_THROW(back.column("c"), ResultFormatError);
}

TEST(result_io, csv_rejects_ragged_rows) {
    ASSERT_THROW(read_csv("a,b\n1,2,3\n"), ResultFormatError);
    ASSERT_THROW(read_csv("# only: metadata\n"), ResultFormatError);
}

TEST(result_io, session_stats_json_round_trip) {
    SessionStats s = run_session(noisy_session()).stats;
    Json j = to_json(s);
    SessionStats back = session_stats_from_json(Json::parse(j.dump()));
    ASSERT_EQ(back, s);
    Json broken = j;
    broken.erase("qber_x");
    ASSERT_THROW(session_stats_from_json(broken), ResultFormatError);
}

TEST(result_io, audit_json_round_trip) {
    AuditOptions opts;
    opts.samples = 5;
    opts.n_max = 3;
    std::vector<int> sectors{1, 2};
    AuditReport r = fixed_state_audit(sectors, random_signal_port_family(opts.n_max), opts);
    AuditReport back = audit_report_from_json(Json::parse(to_json(r).dump()));
    ASSERT_EQ(back.n_max, r.n_max);
    ASSERT_EQ(back.samples, r.samples);
    ASSERT_EQ(back.sectors.size(), r.sectors.size());
    for (std::size_t i = 0; i < r.sectors.size(); i++) {
        expect_same(back.sectors[i], r.sectors[i]);
    }
    ASSERT_THROW(audit_report_from_json(Json::parse("{\"n_max\": 3}")), ResultFormatError);
}

TEST(result_io, rounds_csv_round_trip) {
    SessionConfig c = noisy_session();
    c.keep_records = true;
    std::vector<RoundRecord> records = run_session(c).records;
    std::vector<RoundRecord> back = rounds_from_csv(read_csv(write_csv(rounds_csv(records))));
    ASSERT_EQ(back.size(), records.size());
    for (std::size_t i = 0; i < records.size(); i++) {
        ASSERT_EQ(back[i].index, records[i].index);
        ASSERT_EQ(back[i].alice, records[i].alice);
        ASSERT_EQ(back[i].bob, records[i].bob);
        ASSERT_EQ(back[i].outcome, records[i].outcome);
        ASSERT_EQ(back[i].announced, records[i].announced);
        ASSERT_EQ(back[i].sifted, records[i].sifted);
        ASSERT_EQ(back[i].alice_bit, records[i].alice_bit);
        ASSERT_EQ(back[i].bob_bit, records[i].bob_bit);
    }
}

TEST(result_io, table_csv_round_trip) {
    NoiseParams noise;
    noise.channel.depolarization = 0.05;
    CorrelationTable t = correlation_table(1000, noise, 5);
    std::array<CsvDocument, 4> docs;
    for (auto k : kAllBellLabels) {
        docs[static_cast<std::size_t>(k)] = read_csv(write_csv(table_csv(t, k)));
    }
    CorrelationTable back = table_from_csv(docs);
    ASSERT_EQ(back.per_cell, t.per_cell);
    ASSERT_EQ(back.probability, t.probability);
    ASSERT_EQ(back.counts, t.counts);
    // Long format: one row per (alice, bob) cell.
    ASSERT_EQ(docs[0].rows.size(), 16u);
    ASSERT_EQ(docs[0].header, (std::vector<std::string>{"alice", "bob", "probability", "count"}));
}

TEST(result_io, phase_scan_csv_round_trip) {
    NoiseParams noise;
    noise.detector = DetectorParams{0.9, 0.001};
    PhaseScanResult r = phase_scan({Bb84Label::MinusI}, ScanParams{10, 2000, 8}, noise);
    PhaseScanResult back = phase_scan_from_csv(read_csv(write_csv(phase_scan_csv(r))));
    ASSERT_EQ(back.alice, r.alice);
    ASSERT_EQ(back.per_point, r.per_point);
    ASSERT_EQ(back.phis, r.phis);
    ASSERT_EQ(back.probabilities, r.probabilities);
    for (std::size_t k = 0; k < 4; k++) {
        ASSERT_EQ(back.fits[k].a, r.fits[k].a);
        ASSERT_EQ(back.fits[k].b, r.fits[k].b);
        ASSERT_EQ(back.fits[k].c, r.fits[k].c);
        ASSERT_EQ(back.fits[k].se_b, r.fits[k].se_b);
        ASSERT_EQ(back.fits[k].visibility, r.fits[k].visibility);
    }
}

TEST(result_io, phase_scan_csv_keeps_undefined_visibility) {
    PhaseScanResult r = phase_scan({Bb84Label::Plus}, ScanParams{8, 0, 0}, NoiseParams{});
    r.fits[2].visibility.reset();
    PhaseScanResult back = phase_scan_from_csv(read_csv(write_csv(phase_scan_csv(r))));
    ASSERT_FALSE(back.fits[2].visibility.has_value());
    ASSERT_TRUE(back.fits[0].visibility.has_value());
}

TEST(result_io, rates_csv_round_trip) {
    RateParams p;
    p.loss_max_db = 30;
    p.loss_step_db = 0.25;
    RateCurve c = rate_curves(p);
    RateCurve back = rates_from_csv(read_csv(write_csv(rates_csv(c))));
    ASSERT_EQ(back.points.size(), c.points.size());
    ASSERT_EQ(back.params.mu, p.mu);
    ASSERT_EQ(back.params.eta_det, p.eta_det);
    ASSERT_EQ(back.params.qber, p.qber);
    for (std::size_t i = 0; i < c.points.size(); i++) {
        ASSERT_EQ(back.points[i].loss_db, c.points[i].loss_db);
        ASSERT_EQ(back.points[i].transmittance, c.points[i].transmittance);
        ASSERT_EQ(back.points[i].rate_ddi, c.points[i].rate_ddi);
        ASSERT_EQ(back.points[i].rate_mdi, c.points[i].rate_mdi);
    }
}

TEST(result_io, text_files) {
    auto dir = std::filesystem::temp_directory_path() / "ddiqkd_result_io_test";
    std::filesystem::create_directories(dir);
    std::string path = (dir / "x.txt").string();
    write_text_file(path, "abc\n");
    ASSERT_EQ(read_text_file(path), "abc\n");
    write_text_file(path, "replaced");
    ASSERT_EQ(read_text_file(path), "replaced");
    std::filesystem::remove_all(dir);
    ASSERT_THROW(read_text_file((dir / "missing").string()), std::runtime_error);
}
