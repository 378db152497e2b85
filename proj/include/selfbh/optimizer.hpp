#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "selfbh/constraints.hpp"
#include "selfbh/parallel.hpp"
#include "selfbh/rates.hpp"

namespace selfbh {

struct OptimizerOptions {
  int n_starts = 50;
  std::uint64_t rng_seed = 42;
  int max_iterations = 60;  // outer augmented-Lagrangian iterations per start
  double feasibility_tol = kDefaultFeasibilityTol;
  double objective_tol = 1e-9;
  /// Only used when K_AN > 0. When false the min{.,.} objective is
  /// maximized directly with the derivative-free inner solver.
  bool epigraph_enabled = true;
  Execution execution = Execution::Parallel;
};

struct StartSummary {
  int start_index = 0;
  double objective = 0.0;  // c_s at the start's final point
  double max_violation = 0.0;
  int iterations = 0;
  bool repaired = false;   // the initial point needed feasibility repair
  bool feasible = false;
  bool converged = false;
};

struct OptResult {
  PowerAllocation best_alloc;
  RateBreakdown best_rates;
  ConstraintReport best_report;
  std::vector<StartSummary> starts;
  int best_start = -1;
  int converged_count = 0;
};

/// No start produced a feasible, converged point.
class InfeasibleError : public std::runtime_error {
 public:
  InfeasibleError(const std::string& what, std::vector<StartSummary> starts)
      : std::runtime_error(what), starts_(std::move(starts)) {}
  const std::vector<StartSummary>& starts() const { return starts_; }

 private:
  std::vector<StartSummary> starts_;
};

/// Multi-start maximization of c_s over the applicable transmit powers and
/// (HD/RL) the time split, subject to constraints(). Throws ConfigError for
/// invalid parameters and InfeasibleError when every start fails.
OptResult optimize(Scheme scheme, const SystemParams& params,
                   const OptimizerOptions& opts = {});

/// Unoptimized reference point: full budgets, eta = 0.5.
struct BaselineResult {
  RateBreakdown rates;      // delivered rates after clamping
  RateBreakdown raw;        // closed-form rates at the max-power point
  ConstraintReport report;  // constraints at the max-power point
  bool clamped = false;     // clamping changed at least one component
};

/// Delivered rates are limited by the backhaul capacity in each direction
/// and then by the UL/DL rate-ratio window.
BaselineResult baseline(Scheme scheme, const SystemParams& params);

/// Max-power allocation used by baseline().
PowerAllocation baseline_allocation(Scheme scheme, const SystemParams& params);

}  // namespace selfbh
