#include "report.hpp"

#include <cmath>
#include <cstdio>

#include <fmt/format.h>
#include <json.hpp>

namespace volterra::cli {

namespace {

constexpr const char* kEol = "\r\n";

std::string sig6(double v) {
  if (std::isnan(v)) return "-";
  return fmt::format("{:.6g}", v);
}

nlohmann::json json_number(double v) {
  if (!std::isfinite(v)) return nullptr;
  return v;
}

std::vector<std::string> error_columns(std::size_t components) {
  std::vector<std::string> cols;
  for (std::size_t c = 1; c <= components; ++c) cols.push_back(fmt::format("eps_{}", c));
  for (std::size_t c = 1; c <= components; ++c) cols.push_back(fmt::format("t_max_{}", c));
  cols.push_back("eps");
  return cols;
}

std::vector<double> error_values(const std::optional<ErrorSummary>& e, std::size_t components) {
  std::vector<double> v(2 * components + 1, std::nan(""));
  if (!e) return v;
  for (std::size_t c = 0; c < components; ++c) {
    v[c] = e->component_errors[c];
    v[components + c] = e->worst_points[c];
  }
  v[2 * components] = e->aggregate;
  return v;
}

void write_row(std::ostream& out, const std::vector<std::string>& cells, const std::vector<std::size_t>& widths) {
  for (std::size_t c = 0; c < cells.size(); ++c) {
    const bool last_of_short = cells.size() < widths.size() && c + 1 == cells.size();
    out << (c ? "  " : "") << (last_of_short ? cells[c] : fmt::format("{:>{}}", cells[c], widths[c]));
  }
  out << '\n';
}

void write_grid(std::ostream& out, const std::vector<std::string>& header,
                const std::vector<std::vector<std::string>>& rows) {
  std::vector<std::size_t> widths(header.size());
  for (std::size_t c = 0; c < header.size(); ++c) widths[c] = header[c].size();
  for (const auto& row : rows) {
    if (row.size() != header.size()) continue;  // failure rows run free
    for (std::size_t c = 0; c < row.size(); ++c) widths[c] = std::max(widths[c], row[c].size());
  }
  write_row(out, header, widths);
  for (const auto& row : rows) write_row(out, row, widths);
}

std::string method_label(const Report& r, std::size_t parameter) {
  return fmt::format("{} {}={}", r.method, r.parameter_name, parameter);
}

}  // namespace

std::string csv_field(const std::string& text) {
  if (text.find_first_of(",\"\r\n") == std::string::npos) return text;
  std::string out = "\"";
  for (char ch : text) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

std::string csv_number(double v) {
  if (std::isnan(v)) return "";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_run(const Report& r, Format format, std::ostream& out) {
  const PointResult& p = r.points.at(0);
  const std::size_t n = r.components;
  const std::vector<std::string> err_cols = error_columns(n);

  if (format == Format::Json) {
    nlohmann::json j;
    j["problem"] = r.problem;
    j["method"] = r.method;
    j[r.parameter_name] = p.parameter;
    j["panels"] = r.panels;
    j["iterations"] = p.history.size();
    j["stop"] = p.stop;
    j["wall_time_s"] = p.seconds;
    j["warnings"] = p.warnings;
    if (p.error) {
      j["eps"] = json_number(p.error->aggregate);
      j["eps_components"] = nlohmann::json::array();
      j["t_max"] = nlohmann::json::array();
      for (std::size_t c = 0; c < n; ++c) {
        j["eps_components"].push_back(json_number(p.error->component_errors[c]));
        j["t_max"].push_back(json_number(p.error->worst_points[c]));
      }
    }
    nlohmann::json history = nlohmann::json::array();
    for (const IterationRecord& rec : p.history) {
      nlohmann::json h;
      h["iteration"] = rec.index;
      h["correction"] = json_number(rec.correction);
      h["ratio"] = json_number(rec.ratio);
      const std::vector<double> v = error_values(rec.error, n);
      for (std::size_t c = 0; c < err_cols.size(); ++c) h[err_cols[c]] = json_number(v[c]);
      history.push_back(h);
    }
    j["history"] = history;
    out << j.dump(2) << '\n';
    return;
  }

  if (format == Format::Csv) {
    out << "iteration,correction,ratio";
    for (const std::string& c : err_cols) out << ',' << c;
    out << kEol;
    for (const IterationRecord& rec : p.history) {
      out << rec.index << ',' << csv_number(rec.correction) << ',' << csv_number(rec.ratio);
      for (double v : error_values(rec.error, n)) out << ',' << csv_number(v);
      out << kEol;
    }
    return;
  }

  out << "problem   " << r.problem << '\n';
  out << "method    " << method_label(r, p.parameter) << ", " << r.panels << " panels per band segment\n";
  out << "stop      " << p.stop << " after " << p.history.size() << " iteration(s)\n";
  for (const std::string& w : p.warnings) out << "warning   " << w << '\n';
  if (p.error) {
    out << '\n';
    std::vector<std::vector<std::string>> rows;
    for (std::size_t c = 0; c < n; ++c) {
      rows.push_back({std::to_string(c + 1), sig6(p.error->component_errors[c]), sig6(p.error->worst_points[c])});
    }
    write_grid(out, {"component", "eps", "t_max"}, rows);
    out << "aggregate eps = " << sig6(p.error->aggregate) << '\n';
  }
  out << '\n';
  std::vector<std::vector<std::string>> rows;
  for (const IterationRecord& rec : p.history) {
    rows.push_back({std::to_string(rec.index), sig6(rec.correction), sig6(rec.ratio),
                    rec.error ? sig6(rec.error->aggregate) : "-"});
  }
  write_grid(out, {"iteration", "correction", "ratio", "eps"}, rows);
  out << fmt::format("\nwall time {:.3f} s\n", p.seconds);
}

void write_study(const Report& r, Format format, std::ostream& out) {
  const std::size_t n = r.components;
  const std::vector<std::string> err_cols = error_columns(n);

  if (format == Format::Json) {
    nlohmann::json rows = nlohmann::json::array();
    for (const PointResult& p : r.points) {
      nlohmann::json j;
      j[r.parameter_name] = p.parameter;
      const std::vector<double> v = error_values(p.error, n);
      for (std::size_t c = 0; c < err_cols.size(); ++c) j[err_cols[c]] = json_number(v[c]);
      j["iterations"] = p.history.size();
      j["stop"] = p.stop;
      j["error"] = p.failure ? nlohmann::json(*p.failure) : nlohmann::json(nullptr);
      rows.push_back(j);
    }
    out << rows.dump(2) << '\n';
    return;
  }

  if (format == Format::Csv) {
    out << r.parameter_name;
    for (const std::string& c : err_cols) out << ',' << c;
    out << ",iterations,stop,error" << kEol;
    for (const PointResult& p : r.points) {
      out << p.parameter;
      for (double v : error_values(p.error, n)) out << ',' << csv_number(v);
      out << ',' << p.history.size() << ',' << csv_field(p.stop) << ','
          << csv_field(p.failure.value_or("")) << kEol;
    }
    return;
  }

  out << "problem   " << r.problem << '\n';
  out << "method    " << r.method << ", " << r.panels << " panels per band segment, at most "
      << r.max_iterations << " iterations\n\n";
  std::vector<std::string> header{r.parameter_name};
  header.insert(header.end(), err_cols.begin(), err_cols.end());
  header.push_back("iters");
  std::vector<std::vector<std::string>> rows;
  for (const PointResult& p : r.points) {
    std::vector<std::string> row{std::to_string(p.parameter)};
    if (p.failure) {
      row.push_back("failed: " + *p.failure);
      rows.push_back(row);
      continue;
    }
    for (double v : error_values(p.error, n)) row.push_back(sig6(v));
    row.push_back(std::to_string(p.history.size()));
    rows.push_back(row);
  }
  write_grid(out, header, rows);
  for (const PointResult& p : r.points) {
    for (const std::string& w : p.warnings) out << "warning   " << w << '\n';
  }
}

}  // namespace volterra::cli
