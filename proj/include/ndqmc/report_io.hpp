#pragma once

// JSON and CSV encodings of reports and studies.

#include <cstdio>
#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "ndqmc/bounds.hpp"
#include "ndqmc/integrate.hpp"
#include "ndqmc/io.hpp"
#include "ndqmc/negdep.hpp"

namespace ndqmc {

inline std::string format_real(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

/// A table with a fixed column order. Cells are quoted when they contain a
/// comma, quote or newline.
class CsvTable {
 public:
  struct Column {
    std::string name;
    std::string description;
  };

  explicit CsvTable(std::vector<Column> columns) : columns_(std::move(columns)) {}

  const std::vector<Column>& columns() const { return columns_; }
  std::size_t rows() const { return rows_.size(); }

  void add_row(std::vector<std::string> row) {
    detail::require(row.size() == columns_.size(), "CsvTable: row width does not match the header");
    rows_.push_back(std::move(row));
  }

  void write(std::ostream& os) const {
    write_line(os, names());
    for (const auto& row : rows_) write_line(os, row);
  }

  /// Column names and descriptions, in order.
  Json schema(const std::string& table, int version = 1) const {
    Json cols = Json::array();
    for (const auto& c : columns_) cols.push_back({{"name", c.name}, {"description", c.description}});
    return {{"table", table}, {"version", version}, {"columns", cols}};
  }

 private:
  std::vector<std::string> names() const {
    std::vector<std::string> out;
    for (const auto& c : columns_) out.push_back(c.name);
    return out;
  }

  static void write_line(std::ostream& os, const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) os << ',';
      const auto& cell = cells[i];
      if (cell.find_first_of(",\"\n") == std::string::npos) {
        os << cell;
        continue;
      }
      os << '"';
      for (char ch : cell) {
        if (ch == '"') os << '"';
        os << ch;
      }
      os << '"';
    }
    os << '\n';
  }

  std::vector<Column> columns_;
  std::vector<std::vector<std::string>> rows_;
};

// ------------------------------------------------------ dependence reports

inline Json to_json(const DependenceReport& r) {
  return {{"notion", to_string(r.notion)}, {"event", r.event},           {"lhs", r.lhs},
          {"rhs", r.rhs},                  {"ci_halfwidth", r.ci_halfwidth}, {"verdict", to_string(r.verdict)},
          {"replications", r.replications}, {"exact", r.exact}};
}

inline CsvTable dependence_table() {
  return CsvTable({{"scheme", "scheme name"},
                   {"notion", "upper_nd | lower_nd | pairwise_nd | conditional_nqd | ci_nqd"},
                   {"event", "JSON description of the tested event"},
                   {"lhs", "estimated or exact joint probability"},
                   {"rhs", "reference product (times gamma)"},
                   {"ci_halfwidth", "confidence halfwidth of lhs (0 when exact)"},
                   {"verdict", "holds | violated | inconclusive"},
                   {"replications", "replications used (0 when exact)"},
                   {"exact", "1 when lhs is an exact probability"},
                   {"oracle", "exact probability alongside an empirical lhs, when requested and available"}});
}

inline std::vector<std::string> dependence_row(const std::string& scheme, const DependenceReport& r,
                                               std::optional<double> oracle = std::nullopt) {
  return {scheme,
          to_string(r.notion),
          r.event.dump(),
          format_real(r.lhs),
          format_real(r.rhs),
          format_real(r.ci_halfwidth),
          to_string(r.verdict),
          std::to_string(r.replications),
          r.exact ? "1" : "0",
          oracle ? format_real(*oracle) : std::string()};
}

// ------------------------------------------------------------------ bounds

inline Json to_json(const BoundResult& r) {
  return {{"formula", to_string(r.formula)}, {"bound_value", r.bound_value}, {"success_prob", r.success_prob},
          {"unclamped", r.unclamped},        {"clamped", r.clamped},         {"diverged", r.diverged}};
}

// --------------------------------------------------------- variance study

inline Json to_json(const VarianceStudy& v) {
  return {{"scheme", v.scheme},         {"function", v.function}, {"n", v.n},
          {"d", v.d},                   {"replications", v.replications},
          {"mean_scheme", v.mean_scheme}, {"mean_mc", v.mean_mc}, {"var_scheme", v.var_scheme},
          {"var_mc", v.var_mc},         {"ratio", v.ratio},       {"ratio_stderr", v.ratio_stderr}};
}

inline CsvTable variance_table() {
  return CsvTable({{"scheme", "scheme name"},
                   {"function", "test function"},
                   {"n", "points per draw"},
                   {"d", "dimension"},
                   {"replications", "independent draws per scheme"},
                   {"mean_scheme", "mean estimate under the scheme"},
                   {"mean_mc", "mean estimate under Monte Carlo"},
                   {"var_scheme", "sample variance of the scheme estimator"},
                   {"var_mc", "sample variance of the Monte Carlo estimator"},
                   {"ratio", "var_scheme / var_mc"},
                   {"ratio_stderr", "delta-method standard error of ratio"}});
}

inline std::vector<std::string> variance_row(const VarianceStudy& v) {
  return {v.scheme,
          v.function,
          std::to_string(v.n),
          std::to_string(v.d),
          std::to_string(v.replications),
          format_real(v.mean_scheme),
          format_real(v.mean_mc),
          format_real(v.var_scheme),
          format_real(v.var_mc),
          format_real(v.ratio),
          format_real(v.ratio_stderr)};
}

}  // namespace ndqmc
