#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace selfbh::nlp {

/// Evaluates the objective (to be minimized) at `x` and writes the
/// inequality constraint values g(x) <= 0 into `g`.
using Evaluator = std::function<double(std::span<const double> x, std::span<double> g)>;

/// min f(x) s.t. g(x) <= 0, lower <= x <= upper.
struct Problem {
  std::vector<double> lower;
  std::vector<double> upper;
  std::size_t num_constraints = 0;
  Evaluator evaluate;

  std::size_t dim() const { return lower.size(); }
};

enum class InnerMethod {
  QuasiNewton,  // projected BFGS on central finite-difference gradients
  NelderMead,   // derivative-free; tolerates kinks in f and g
};

struct Options {
  InnerMethod inner = InnerMethod::QuasiNewton;
  int max_outer = 60;
  int max_inner = 400;
  double feasibility_tol = 1e-6;
  double objective_tol = 1e-9;
  double fd_step = 1e-6;  // relative central-difference step
  double initial_penalty = 10.0;
  double max_penalty = 1e12;
};

struct Result {
  std::vector<double> x;
  std::vector<double> g;
  double objective = 0.0;
  double max_violation = 0.0;
  int outer_iterations = 0;
  int inner_iterations = 0;
  bool converged = false;
};

/// Augmented-Lagrangian (Powell-Hestenes-Rockafellar) method. Box bounds are
/// enforced exactly by projection; inequality constraints through the
/// multiplier/penalty pair. Deterministic for a given start.
Result minimize(const Problem& problem, std::span<const double> start,
                const Options& options = {});

}  // namespace selfbh::nlp
