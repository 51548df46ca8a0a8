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

// Result files. Structured results are JSON; curve data is CSV with leading
// "# key: value" metadata lines, then one header row, then one row per point.
// Floating-point values are written with 17 significant digits, so every
// writer/reader pair round-trips exactly.

#ifndef DDIQKD_RESULT_IO_H
#define DDIQKD_RESULT_IO_H

#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "ddiqkd/analysis.h"
#include "ddiqkd/fock_optics.h"
#include "ddiqkd/protocol.h"

namespace ddiqkd {

using Json = nlohmann::ordered_json;

/// Thrown by the readers on malformed input.
struct ResultFormatError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string format_double(double v);
double parse_double(const std::string &text);

struct CsvDocument {
    std::vector<std::pair<std::string, std::string>> metadata;
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    /// Value of a metadata key; throws ResultFormatError when absent.
    const std::string &meta(const std::string &key) const;
    /// Column index by name; throws ResultFormatError when absent.
    std::size_t column(const std::string &name) const;
};

std::string write_csv(const CsvDocument &doc);
CsvDocument read_csv(const std::string &text);

Json to_json(const SessionStats &stats);
SessionStats session_stats_from_json(const Json &j);

Json to_json(const AuditReport &report);
AuditReport audit_report_from_json(const Json &j);

CsvDocument rounds_csv(const std::vector<RoundRecord> &records);
std::vector<RoundRecord> rounds_from_csv(const CsvDocument &doc);

/// One document per Bell outcome, long format (alice, bob, probability, count).
CsvDocument table_csv(const CorrelationTable &table, BellLabel k);
/// Reassembles a table from its four per-outcome documents, indexed by BellLabel.
CorrelationTable table_from_csv(const std::array<CsvDocument, 4> &docs);

CsvDocument phase_scan_csv(const PhaseScanResult &scan);
PhaseScanResult phase_scan_from_csv(const CsvDocument &doc);

CsvDocument rates_csv(const RateCurve &curve);
RateCurve rates_from_csv(const CsvDocument &doc);

std::string read_text_file(const std::string &path);
/// Writes atomically enough for a single writer: temp file then rename.
void write_text_file(const std::string &path, const std::string &content);

}  // namespace ddiqkd

#endif
