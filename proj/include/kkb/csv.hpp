#pragma once

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "kkb/akkb.hpp"
#include "kkb/data_model.hpp"
#include "kkb/eval.hpp"

namespace kkb::csv {

/// Shortest representation that round-trips a double exactly.
inline std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

inline std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw io_error(detail::str("cannot open ", path.string(), " for writing"));
  return out;
}

inline std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw io_error(detail::str("cannot open ", path.string(), " for reading"));
  return in;
}

/// One matrix row per line, comma separated, no header. Covariates with
/// d > 1 occupy contiguous column blocks.
inline void write_matrix(const std::filesystem::path& path, const DataMatrix& m) {
  std::ofstream out = open_out(path);
  for (int r = 0; r < m.rows; ++r) {
    for (int c = 0; c < m.columns(); ++c) {
      if (c > 0) out << ',';
      out << format_double(m.at(r, c));
    }
    out << '\n';
  }
  if (!out) throw io_error(detail::str("write failed: ", path.string()));
}

inline double parse_double(const std::string& token, const std::filesystem::path& path, int line,
                           int column) {
  const char* begin = token.c_str();
  char* end = nullptr;
  const double v = std::strtod(begin, &end);
  while (end != nullptr && (*end == ' ' || *end == '\t' || *end == '\r')) ++end;
  if (end == begin || end == nullptr || *end != '\0')
    throw io_error(detail::str(path.string(), ": line ", line, ", column ", column,
                               ": cannot parse '", token, "' as a number"));
  return v;
}

/// Reads a numeric matrix. The layout is declared, never inferred: grid_width
/// fixes the block width and covariates (0 = derive p from the column count)
/// must be consistent with the file.
inline DataMatrix read_matrix(const std::filesystem::path& path, int grid_width = 1,
                              int covariates = 0, bool skip_header = false) {
  std::ifstream in = open_in(path);
  if (grid_width < 1) throw validation_error("read matrix: grid width must be >= 1");
  std::vector<double> values;
  std::string line;
  int line_no = 0, columns = -1, rows = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (skip_header && line_no == 1) continue;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    int column = 0;
    std::size_t start = 0;
    while (true) {
      const std::size_t comma = line.find(',', start);
      const std::string token = line.substr(start, comma == std::string::npos ? comma : comma - start);
      ++column;
      values.push_back(parse_double(token, path, line_no, column));
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    if (columns < 0) columns = column;
    if (column != columns)
      throw io_error(detail::str(path.string(), ": line ", line_no, ": expected ", columns,
                                 " columns, found ", column));
    ++rows;
  }
  if (rows == 0) throw io_error(detail::str(path.string(), ": no data rows"));
  if (columns % grid_width != 0)
    throw io_error(detail::str(path.string(), ": ", columns,
                               " columns are not divisible by grid width ", grid_width));
  const int p = columns / grid_width;
  if (covariates > 0 && covariates != p)
    throw io_error(detail::str(path.string(), ": declared ", covariates, " covariates x ",
                               grid_width, " samples but the file has ", columns, " columns"));
  try {
    return build_matrix(std::move(values), rows, CovariateLayout{p, grid_width});
  } catch (const validation_error& e) {
    throw io_error(detail::str(path.string(), ": ", e.what()));
  }
}

/// One integer label per line, aligned with matrix row (or column) order.
inline void write_labels(const std::filesystem::path& path, const std::vector<int>& labels) {
  std::ofstream out = open_out(path);
  for (int l : labels) out << l << '\n';
  if (!out) throw io_error(detail::str("write failed: ", path.string()));
}

inline std::vector<int> read_labels(const std::filesystem::path& path) {
  std::ifstream in = open_in(path);
  std::vector<int> labels;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const char* begin = line.c_str();
    char* end = nullptr;
    const long v = std::strtol(begin, &end, 10);
    while (end != nullptr && (*end == ' ' || *end == '\t')) ++end;
    if (end == begin || *end != '\0')
      throw io_error(detail::str(path.string(), ": line ", line_no, ": cannot parse '", line,
                                 "' as an integer label"));
    labels.push_back(int(v));
  }
  if (labels.empty()) throw io_error(detail::str(path.string(), ": no labels"));
  return labels;
}

inline void write_history(const std::filesystem::path& path, const std::vector<HalfStep>& history) {
  std::ofstream out = open_out(path);
  out << "phase,axis,round,objective_before,objective_after,moves,sweeps,best_start,min_cluster_size\n";
  for (const HalfStep& step : history) {
    out << (step.round == 0 ? "init" : "update") << ',' << name_of(step.axis) << ',' << step.round
        << ',' << format_double(step.objective_before) << ',' << format_double(step.objective_after)
        << ',' << step.moves << ',' << step.sweeps << ',' << step.best_start << ','
        << step.min_cluster_size << '\n';
  }
  if (!out) throw io_error(detail::str("write failed: ", path.string()));
}

inline void write_restart_log(const std::filesystem::path& path,
                              const std::vector<RestartRecord>& restarts) {
  std::ofstream out = open_out(path);
  out << "restart,initial_objective,objective,sweeps,moves,converged\n";
  for (const RestartRecord& r : restarts) {
    out << r.restart << ',' << format_double(r.initial_objective) << ','
        << format_double(r.objective) << ',' << r.sweeps << ',' << r.moves << ','
        << (r.converged ? 1 : 0) << '\n';
  }
  if (!out) throw io_error(detail::str("write failed: ", path.string()));
}

/// Grid rows follow the data multipliers, columns the variable multipliers;
/// the first row and column carry the multiplier values themselves.
inline void write_grid(const std::filesystem::path& path, const SweepGrid& grid) {
  std::ofstream out = open_out(path);
  out << "data_mult";
  for (double b : grid.multipliers_vars) out << ',' << format_double(b);
  out << '\n';
  for (std::size_t i = 0; i < grid.multipliers_data.size(); ++i) {
    out << format_double(grid.multipliers_data[i]);
    for (std::size_t j = 0; j < grid.multipliers_vars.size(); ++j)
      out << ',' << format_double(grid.mean_accuracy[i * grid.multipliers_vars.size() + j]);
    out << '\n';
  }
  if (!out) throw io_error(detail::str("write failed: ", path.string()));
}

}  // namespace kkb::csv
