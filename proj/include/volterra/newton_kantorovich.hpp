#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "volterra/approximation.hpp"
#include "volterra/error.hpp"
#include "volterra/metrics.hpp"
#include "volterra/problem.hpp"

namespace volterra {

enum class InnerKind { PiecewiseConstant, Collocation };

struct InnerMethod {
  InnerKind kind = InnerKind::Collocation;
  std::size_t parameter = 0;  // mesh intervals N or polynomial degree m

  static InnerMethod piecewise_constant(std::size_t intervals) { return {InnerKind::PiecewiseConstant, intervals}; }
  static InnerMethod collocation(std::size_t degree) { return {InnerKind::Collocation, degree}; }
  /// Panels per band segment used when none is requested explicitly.
  std::size_t default_panels() const;
};

struct IterationOptions {
  std::size_t max_iterations = 20;
  double tolerance = 1e-12;
  std::optional<std::size_t> panels;
  std::size_t samples = kDefaultErrorSamples;
};

struct IterationRecord {
  std::size_t index = 0;  // 1-based
  double correction = 0.0;
  double ratio = 0.0;     // correction / previous correction; NaN for the first
  std::optional<ErrorSummary> error;
  std::uint64_t operator_fingerprint = 0;
};

enum class StopReason { Tolerance, MaxIterations, Divergence };
std::string_view to_string(StopReason reason);

struct IterationReport {
  std::vector<IterationRecord> records;
  StopReason stop = StopReason::MaxIterations;
  std::vector<std::string> warnings;
};

struct IterationResult {
  std::shared_ptr<const Approximation> solution;
  IterationReport report;
};

class DivergenceError : public SolverError {
 public:
  DivergenceError(const std::string& message, IterationReport report)
      : SolverError(message), report_(std::move(report)) {}
  const IterationReport& report() const { return report_; }

 private:
  IterationReport report_;
};

/// Modified Newton-Kantorovich iteration: the linear operator is frozen at
/// the system's initial guess and factorized once; each iteration only
/// rebuilds the right-hand side Psi from the current iterate.
IterationResult iterate(const VolterraSystem& sys, InnerMethod inner,
                        const IterationOptions& options = {});

/// Psi(t) for iterate xm with the derivative frozen at x0.
std::vector<double> psi(const VolterraSystem& sys, std::shared_ptr<const Approximation> x0,
                        const Approximation& xm, double t, std::size_t panels);

}  // namespace volterra
