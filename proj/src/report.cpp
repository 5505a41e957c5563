#include "simdoc/report.hpp"

#include <algorithm>
#include <ostream>

#include "simdoc/numfmt.hpp"

namespace simdoc {

namespace {

std::vector<std::string> cells(const ReportRow& r, bool mark_best) {
  const auto& m = r.metrics;
  return {r.model,
          r.dataset,
          r.loss,
          r.setting,
          fixed(m.d_sari_s, 3) + (mark_best && r.best ? "*" : ""),
          fixed(m.fkgl_c, 3),
          fixed(m.fkgl_s, 3),
          fixed(m.fre_c, 3),
          fixed(m.fre_s, 3),
          fixed(m.coh_s, 3)};
}

}  // namespace

const std::vector<std::string>& report_columns() {
  static const std::vector<std::string> cols = {"Model", "Dataset", "Loss",  "Setting", "D-SARI_S",
                                                "FKGL_C", "FKGL_S", "FRE_C", "FRE_S",   "COH_S"};
  return cols;
}

void write_report_tsv(std::ostream& out, const std::vector<ReportRow>& rows) {
  const auto& cols = report_columns();
  for (std::size_t i = 0; i < cols.size(); ++i) out << (i ? "\t" : "") << cols[i];
  out << '\n';
  for (const auto& r : rows) {
    const auto c = cells(r, false);
    for (std::size_t i = 0; i < c.size(); ++i) out << (i ? "\t" : "") << c[i];
    out << '\n';
  }
}

void write_report_table(std::ostream& out, const std::vector<ReportRow>& rows) {
  std::vector<std::vector<std::string>> grid{report_columns()};
  for (const auto& r : rows) grid.push_back(cells(r, true));
  std::vector<std::size_t> width(grid.front().size(), 0);
  for (const auto& line : grid) {
    for (std::size_t i = 0; i < line.size(); ++i) width[i] = std::max(width[i], line[i].size());
  }
  for (const auto& line : grid) {
    std::string text;
    for (std::size_t i = 0; i < line.size(); ++i) {
      if (i) text += "  ";
      text += line[i];
      if (i + 1 < line.size()) text.append(width[i] - line[i].size(), ' ');
    }
    out << text << '\n';
  }
}

}  // namespace simdoc
