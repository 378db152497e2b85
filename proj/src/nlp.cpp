#include "selfbh/nlp.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace selfbh::nlp {

namespace {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

// Augmented Lagrangian of the current outer iteration, restricted to the box.
class Subproblem {
 public:
  Subproblem(const Problem& problem, const Vec& multipliers, double penalty)
      : problem_(problem),
        multipliers_(multipliers),
        penalty_(penalty),
        g_(problem.num_constraints) {}

  double operator()(const Vec& x) {
    ++evaluations;
    const double f = problem_.evaluate({x.data(), static_cast<std::size_t>(x.size())},
                                       {g_.data(), g_.size()});
    double shift = 0.0;
    for (std::size_t j = 0; j < g_.size(); ++j) {
      const double lam = multipliers_[static_cast<Eigen::Index>(j)];
      const double s = std::max(0.0, lam + penalty_ * g_[j]);
      shift += s * s - lam * lam;
    }
    const double value = f + shift / (2.0 * penalty_);
    return std::isfinite(value) ? value : std::numeric_limits<double>::infinity();
  }

  long evaluations = 0;

 private:
  const Problem& problem_;
  const Vec& multipliers_;
  double penalty_;
  std::vector<double> g_;
};

Vec project(const Vec& x, const Vec& lower, const Vec& upper) {
  return x.cwiseMax(lower).cwiseMin(upper);
}

Vec fd_gradient(Subproblem& fn, const Vec& x, const Vec& lower, const Vec& upper,
                double rel_step) {
  Vec grad(x.size());
  Vec probe = x;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double h = rel_step * std::max(1.0, std::abs(x[i]));
    const double hi = std::min(x[i] + h, upper[i]);
    const double lo = std::max(x[i] - h, lower[i]);
    probe[i] = hi;
    const double f_hi = fn(probe);
    probe[i] = lo;
    const double f_lo = fn(probe);
    probe[i] = x[i];
    grad[i] = hi > lo ? (f_hi - f_lo) / (hi - lo) : 0.0;
  }
  return grad;
}

// Projected BFGS with Armijo backtracking along the projection arc.
int quasi_newton(Subproblem& fn, Vec& x, const Vec& lower, const Vec& upper,
                 const Options& opt) {
  const Eigen::Index n = x.size();
  Mat h_inv = Mat::Identity(n, n);
  bool fresh_metric = true;
  double fx = fn(x);
  Vec grad = fd_gradient(fn, x, lower, upper, opt.fd_step);
  int stalls = 0;
  int it = 0;
  for (; it < opt.max_inner; ++it) {
    const double pg = (project(x - grad, lower, upper) - x).lpNorm<Eigen::Infinity>();
    if (pg < 1e-9) break;

    Vec free_mask(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      const bool pinned = (x[i] <= lower[i] && grad[i] > 0.0) ||
                          (x[i] >= upper[i] && grad[i] < 0.0);
      free_mask[i] = pinned ? 0.0 : 1.0;
    }
    const Vec g_free = grad.cwiseProduct(free_mask);
    Vec dir = -(h_inv * g_free).cwiseProduct(free_mask);
    if (dir.dot(g_free) >= 0.0) {
      h_inv.setIdentity();
      fresh_metric = true;
      dir = -g_free;
    }

    double step = 1.0;
    Vec trial;
    double f_trial = fx;
    bool accepted = false;
    for (int ls = 0; ls < 60; ++ls) {
      trial = project(x + step * dir, lower, upper);
      const double decrease = grad.dot(trial - x);
      if (decrease < 0.0) {
        f_trial = fn(trial);
        if (f_trial <= fx + 1e-4 * decrease) {
          accepted = true;
          break;
        }
      }
      step *= 0.5;
    }
    if (!accepted) {
      if (fresh_metric) break;
      h_inv.setIdentity();
      fresh_metric = true;
      continue;
    }

    const Vec s = trial - x;
    const Vec new_grad = fd_gradient(fn, trial, lower, upper, opt.fd_step);
    const Vec y = new_grad - grad;
    const double sy = s.dot(y);
    if (sy > 1e-12 * s.norm() * y.norm()) {
      if (fresh_metric) {
        h_inv *= sy / y.squaredNorm();
        fresh_metric = false;
      }
      const double rho = 1.0 / sy;
      const Mat left = Mat::Identity(n, n) - rho * s * y.transpose();
      h_inv = left * h_inv * left.transpose() + rho * s * s.transpose();
    }

    const double change = fx - f_trial;
    x = trial;
    grad = new_grad;
    fx = f_trial;
    stalls = change <= 1e-15 * (1.0 + std::abs(fx)) ? stalls + 1 : 0;
    if (stalls >= 3) break;
  }
  return it;
}

// Nelder-Mead with vertices projected onto the box.
int nelder_mead(Subproblem& fn, Vec& x, const Vec& lower, const Vec& upper,
                const Options& opt) {
  const Eigen::Index n = x.size();
  const int max_iter = opt.max_inner * 25;
  std::vector<Vec> simplex(static_cast<std::size_t>(n + 1), x);
  std::vector<double> values(static_cast<std::size_t>(n + 1));
  for (Eigen::Index i = 0; i < n; ++i) {
    Vec& v = simplex[static_cast<std::size_t>(i + 1)];
    const double width = 0.05 * (upper[i] - lower[i]);
    v[i] = v[i] + width <= upper[i] ? v[i] + width : v[i] - width;
  }
  for (std::size_t i = 0; i < simplex.size(); ++i) values[i] = fn(simplex[i]);

  std::vector<std::size_t> order(simplex.size());
  int it = 0;
  for (; it < max_iter; ++it) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    const std::size_t best = order.front(), worst = order.back();
    const std::size_t second = order[order.size() - 2];

    double diameter = 0.0;
    for (const Vec& v : simplex) {
      diameter = std::max(diameter, (v - simplex[best]).lpNorm<Eigen::Infinity>());
    }
    const double spread = values[worst] - values[best];
    if (diameter < 1e-11 || (spread <= 1e-14 * (1.0 + std::abs(values[best])) &&
                             diameter < 1e-8)) {
      break;
    }

    Vec centroid = Vec::Zero(n);
    for (std::size_t i : order) {
      if (i != worst) centroid += simplex[i];
    }
    centroid /= static_cast<double>(n);

    const Vec reflected = project(centroid + (centroid - simplex[worst]), lower, upper);
    const double f_r = fn(reflected);
    if (f_r < values[best]) {
      const Vec expanded =
          project(centroid + 2.0 * (centroid - simplex[worst]), lower, upper);
      const double f_e = fn(expanded);
      if (f_e < f_r) {
        simplex[worst] = expanded;
        values[worst] = f_e;
      } else {
        simplex[worst] = reflected;
        values[worst] = f_r;
      }
      continue;
    }
    if (f_r < values[second]) {
      simplex[worst] = reflected;
      values[worst] = f_r;
      continue;
    }
    const bool outside = f_r < values[worst];
    const Vec contracted =
        outside ? project(centroid + 0.5 * (reflected - centroid), lower, upper)
                : project(centroid + 0.5 * (simplex[worst] - centroid), lower, upper);
    const double f_c = fn(contracted);
    if (f_c < (outside ? f_r : values[worst])) {
      simplex[worst] = contracted;
      values[worst] = f_c;
      continue;
    }
    for (std::size_t i = 0; i < simplex.size(); ++i) {
      if (i == best) continue;
      simplex[i] = simplex[best] + 0.5 * (simplex[i] - simplex[best]);
      values[i] = fn(simplex[i]);
    }
  }
  const auto best_it = std::min_element(values.begin(), values.end());
  x = simplex[static_cast<std::size_t>(best_it - values.begin())];
  return it;
}

}  // namespace

Result minimize(const Problem& problem, std::span<const double> start,
                const Options& opt) {
  const std::size_t n = problem.dim();
  if (problem.upper.size() != n || start.size() != n) {
    throw std::invalid_argument("nlp::minimize: dimension mismatch");
  }
  const Eigen::Map<const Vec> lower(problem.lower.data(), static_cast<Eigen::Index>(n));
  const Eigen::Map<const Vec> upper(problem.upper.data(), static_cast<Eigen::Index>(n));
  Vec x = project(Eigen::Map<const Vec>(start.data(), static_cast<Eigen::Index>(n)),
                  lower, upper);

  const std::size_t m = problem.num_constraints;
  Vec multipliers = Vec::Zero(static_cast<Eigen::Index>(m));
  double penalty = opt.initial_penalty;

  Result result;
  result.g.assign(m, 0.0);
  auto evaluate_at = [&](const Vec& point) {
    result.objective = problem.evaluate({point.data(), n}, result.g);
    result.max_violation = 0.0;
    for (double gj : result.g) result.max_violation = std::max(result.max_violation, gj);
  };

  double prev_objective = std::numeric_limits<double>::infinity();
  double prev_complementarity = std::numeric_limits<double>::infinity();
  for (int outer = 0; outer < opt.max_outer; ++outer) {
    Subproblem sub(problem, multipliers, penalty);
    result.inner_iterations += opt.inner == InnerMethod::QuasiNewton
                                   ? quasi_newton(sub, x, lower, upper, opt)
                                   : nelder_mead(sub, x, lower, upper, opt);
    result.outer_iterations = outer + 1;

    evaluate_at(x);
    double complementarity = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
      const auto jj = static_cast<Eigen::Index>(j);
      complementarity = std::max(
          complementarity, std::abs(std::max(result.g[j], -multipliers[jj] / penalty)));
      multipliers[jj] = std::max(0.0, multipliers[jj] + penalty * result.g[j]);
    }

    const bool stationary = std::abs(result.objective - prev_objective) <=
                            opt.objective_tol * (1.0 + std::abs(result.objective));
    if (result.max_violation <= opt.feasibility_tol &&
        complementarity <= opt.feasibility_tol && stationary) {
      result.converged = true;
      break;
    }
    if (complementarity > 0.25 * prev_complementarity) {
      penalty = std::min(penalty * 10.0, opt.max_penalty);
    }
    prev_complementarity = complementarity;
    prev_objective = result.objective;
  }
  result.x.assign(x.data(), x.data() + n);
  return result;
}

}  // namespace selfbh::nlp
