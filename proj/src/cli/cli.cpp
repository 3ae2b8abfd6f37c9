#include "volterra/cli.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <fstream>
#include <future>
#include <optional>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "report.hpp"
#include "volterra/error.hpp"
#include "volterra/newton_kantorovich.hpp"
#include "volterra/problem.hpp"

namespace volterra::cli {

namespace {

struct Options {
  std::string builtin;
  std::string config;
  std::string method = "collocation";
  std::string nodes;
  std::string degree;
  std::size_t iters = 20;
  double tol = 1e-12;
  std::optional<std::size_t> panels;
  std::string format = "table";
  std::string out;
};

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void add_problem_options(CLI::App* cmd, Options& o, bool sweep) {
  auto* b = cmd->add_option("--builtin", o.builtin, "Builtin problem name (see `list`)");
  auto* c = cmd->add_option("--config", o.config, "Problem config file");
  b->excludes(c);
  cmd->add_option("--method", o.method, "Inner solver")
      ->check(CLI::IsMember({"pc", "collocation"}))
      ->capture_default_str();
  const char* list_hint = sweep ? " (comma-separated, increasing)" : "";
  cmd->add_option("--nodes", o.nodes, std::string("Mesh intervals N for pc") + list_hint);
  cmd->add_option("--degree", o.degree, std::string("Polynomial degree m for collocation") + list_hint);
  cmd->add_option("--iters", o.iters, "Maximum Newton-Kantorovich iterations")->capture_default_str();
  cmd->add_option("--tol", o.tol, "Stop when the correction sup-norm falls to this")->capture_default_str();
  cmd->add_option("--panels", o.panels, "Midpoint panels per band segment");
  cmd->add_option("--format", o.format, "Output format")
      ->check(CLI::IsMember({"table", "csv", "json"}))
      ->capture_default_str();
  cmd->add_option("--out", o.out, "Write the report here instead of stdout");
}

std::vector<std::size_t> parse_list(const std::string& text, const char* flag) {
  std::vector<std::size_t> values;
  std::string_view rest = text;
  while (!rest.empty()) {
    const auto comma = rest.find(',');
    std::string_view item = rest.substr(0, comma);
    while (!item.empty() && item.front() == ' ') item.remove_prefix(1);
    while (!item.empty() && item.back() == ' ') item.remove_suffix(1);
    std::size_t v = 0;
    const auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), v);
    if (item.empty() || ec != std::errc() || ptr != item.data() + item.size()) {
      throw UsageError(fmt::format("{}: '{}' is not a positive integer", flag, item));
    }
    values.push_back(v);
    if (comma == std::string_view::npos) break;
    rest = rest.substr(comma + 1);
  }
  return values;
}

struct Plan {
  InnerKind kind;
  std::string parameter_name;
  std::vector<std::size_t> sweep;
};

Plan make_plan(const Options& o, bool sweep) {
  Plan plan;
  const bool pc = o.method == "pc";
  plan.kind = pc ? InnerKind::PiecewiseConstant : InnerKind::Collocation;
  plan.parameter_name = pc ? "N" : "m";
  const std::string& wanted = pc ? o.nodes : o.degree;
  const std::string& other = pc ? o.degree : o.nodes;
  const char* flag = pc ? "--nodes" : "--degree";
  if (!other.empty()) {
    throw UsageError(fmt::format("{} does not apply to --method {}", pc ? "--degree" : "--nodes", o.method));
  }
  plan.sweep = parse_list(wanted, flag);
  if (plan.sweep.empty()) throw UsageError(fmt::format("{} needs {}", flag, sweep ? "a non-empty list" : "a value"));
  if (!sweep && plan.sweep.size() != 1) throw UsageError(fmt::format("run takes a single {} value", flag));
  for (std::size_t q = 1; q < plan.sweep.size(); ++q) {
    if (plan.sweep[q] <= plan.sweep[q - 1]) throw UsageError(fmt::format("{} values must increase strictly", flag));
  }
  const std::size_t minimum = pc ? 2 : 1;
  for (std::size_t v : plan.sweep) {
    if (v < minimum) throw UsageError(fmt::format("{} must be at least {}", flag, minimum));
  }
  if (o.iters == 0) throw UsageError("--iters must be at least 1");
  if (!(o.tol > 0.0)) throw UsageError("--tol must be positive");
  if (o.panels && *o.panels == 0) throw UsageError("--panels must be at least 1");
  return plan;
}

VolterraSystem load_problem(const Options& o) {
  const SystemSpec spec = o.builtin.empty() ? load_config(o.config) : builtin_spec(o.builtin);
  VolterraSystem sys = VolterraSystem::from_spec(spec);
  const std::vector<Diagnostic> diags = validate(sys);
  if (!diags.empty()) {
    std::string msg = fmt::format("problem '{}' failed validation:", sys.name());
    for (const Diagnostic& d : diags) msg += "\n  " + d.message;
    throw ValidationError(msg);
  }
  return sys;
}

PointResult solve_point(const VolterraSystem& sys, InnerKind kind, std::size_t parameter,
                        const IterationOptions& options) {
  PointResult p;
  p.parameter = parameter;
  const auto start = std::chrono::steady_clock::now();
  try {
    IterationResult r = iterate(sys, InnerMethod{kind, parameter}, options);
    p.stop = std::string(to_string(r.report.stop));
    p.history = std::move(r.report.records);
    p.warnings = std::move(r.report.warnings);
    if (!p.history.empty()) p.error = p.history.back().error;
  } catch (const DivergenceError& e) {
    p.failure = e.what();
    p.stop = std::string(to_string(StopReason::Divergence));
    p.history = e.report().records;
  } catch (const Error& e) {
    p.failure = e.what();
    p.stop = "error";
  }
  p.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return p;
}

Format parse_format(const std::string& f) {
  if (f == "csv") return Format::Csv;
  if (f == "json") return Format::Json;
  return Format::Table;
}

int execute(const Options& o, bool sweep, std::ostream& out, std::ostream& err) {
  if (o.builtin.empty() && o.config.empty()) throw UsageError("one of --builtin or --config is required");
  const VolterraSystem sys = load_problem(o);
  const Plan plan = make_plan(o, sweep);

  IterationOptions options;
  options.max_iterations = o.iters;
  options.tolerance = o.tol;
  options.panels = o.panels;

  Report report;
  report.problem = sys.name();
  report.method = o.method;
  report.parameter_name = plan.parameter_name;
  report.components = sys.components();
  report.panels = o.panels.value_or(InnerMethod{plan.kind, 0}.default_panels());
  report.max_iterations = o.iters;
  report.tolerance = o.tol;

  // Sweep points are independent; run them in batches and keep sweep order.
  const std::size_t width = std::max(1u, std::thread::hardware_concurrency());
  for (std::size_t first = 0; first < plan.sweep.size(); first += width) {
    std::vector<std::future<PointResult>> batch;
    const std::size_t last = std::min(plan.sweep.size(), first + width);
    for (std::size_t q = first; q < last; ++q) {
      batch.push_back(std::async(std::launch::async, solve_point, std::cref(sys), plan.kind,
                                 plan.sweep[q], options));
    }
    for (auto& f : batch) report.points.push_back(f.get());
  }

  std::ofstream file;
  if (!o.out.empty()) {
    file.open(o.out, std::ios::binary);
    if (!file) throw UsageError(fmt::format("cannot open {} for writing", o.out));
  }
  std::ostream& sink = o.out.empty() ? out : file;

  const Format format = parse_format(o.format);
  if (!sweep) {
    const PointResult& p = report.points.front();
    if (p.failure) {
      err << "solver error: " << *p.failure << '\n';
      return kSolverFailure;
    }
    write_run(report, format, sink);
    return kSuccess;
  }
  write_study(report, format, sink);
  bool failed = false;
  for (const PointResult& p : report.points) {
    if (p.failure) {
      err << fmt::format("{}={} failed: {}\n", plan.parameter_name, p.parameter, *p.failure);
      failed = true;
    }
  }
  return failed ? kSolverFailure : kSuccess;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Newton-Kantorovich solver for first-kind Volterra systems with discontinuous kernels",
               "volterra"};
  app.require_subcommand(1);
  Options opts;
  auto* list = app.add_subcommand("list", "List builtin problems");
  auto* run = app.add_subcommand("run", "Solve one problem and report errors and iteration history");
  auto* study = app.add_subcommand("study", "Sweep N or m and tabulate the errors");
  add_problem_options(run, opts, false);
  add_problem_options(study, opts, true);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kSuccess : kUsage;
  }

  try {
    if (list->parsed()) {
      for (const BuiltinInfo& b : builtin_catalog()) out << fmt::format("{:<18}{}\n", b.name, b.description);
      return kSuccess;
    }
    return execute(opts, study->parsed(), out, err);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return kUsage;
  } catch (const ValidationError& e) {
    err << e.what() << '\n';
    return kInvalidProblem;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kInvalidProblem;
  } catch (const Error& e) {
    err << "solver error: " << e.what() << '\n';
    return kSolverFailure;
  }
}

}  // namespace volterra::cli
