#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "simdoc/metrics.hpp"

namespace simdoc {

struct ReportRow {
  std::string model;
  std::string dataset;
  std::string loss;
  std::string setting;
  MetricsReport metrics;
  bool best = false;
};

const std::vector<std::string>& report_columns();

// Tab-separated, header plus one line per row, three decimals.
void write_report_tsv(std::ostream& out, const std::vector<ReportRow>& rows);
// Space-aligned plain text; best rows carry a '*' after D-SARI.
void write_report_table(std::ostream& out, const std::vector<ReportRow>& rows);

}  // namespace simdoc
