#pragma once

#include <cstddef>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "volterra/metrics.hpp"
#include "volterra/newton_kantorovich.hpp"

namespace volterra::cli {

enum class Format { Table, Csv, Json };

struct PointResult {
  std::size_t parameter = 0;
  std::optional<std::string> failure;
  std::optional<ErrorSummary> error;
  std::string stop;
  std::vector<IterationRecord> history;
  std::vector<std::string> warnings;
  double seconds = 0.0;
};

struct Report {
  std::string problem;
  std::string method;          // "pc" or "collocation"
  std::string parameter_name;  // "N" or "m"
  std::size_t components = 0;
  std::size_t panels = 0;
  std::size_t max_iterations = 0;
  double tolerance = 0.0;
  std::vector<PointResult> points;
};

/// Single solve: error summary and iteration history.
void write_run(const Report& report, Format format, std::ostream& out);
/// Sweep: one row per point, ordered as in report.points.
void write_study(const Report& report, Format format, std::ostream& out);

/// RFC 4180 field quoting.
std::string csv_field(const std::string& text);
/// Shortest text that reads back to the same double; empty for NaN.
std::string csv_number(double v);

}  // namespace volterra::cli
