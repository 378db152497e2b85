#include "selfbh/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "selfbh/nlp.hpp"

namespace selfbh {

namespace {

// Powers are searched on a log scale spanning this many decades below each
// budget; the bottom of the range maps to exactly zero.
constexpr double kDecades = 12.0;
const double kFloor = std::pow(10.0, -kDecades);

double power_from_unit(double y, double budget) {
  return budget * (std::pow(10.0, kDecades * (y - 1.0)) - kFloor) / (1.0 - kFloor);
}

double unit_from_power(double p, double budget) {
  if (p <= 0.0) return 0.0;
  const double y = 1.0 + std::log10(p / budget * (1.0 - kFloor) + kFloor) / kDecades;
  return std::clamp(y, 0.0, 1.0);
}

// Upper bound for the epigraph variable: no per-stream rate can exceed it.
constexpr double kEpigraphCap = 64.0;

// FD/HD share one AN budget between P_d and P_u^BH. The pair is searched as
// (total on the log scale, log10(P_d / P_u^BH) in +-kSplitDecades), which
// satisfies the budget by construction and resolves either power near zero.
constexpr double kSplitDecades = 12.0;

enum class Var { Pd, Pu, PbhD, PbhU, PuD2d, Eta, Epigraph, AnTotal, AnSplit };

// Fraction of the AN total assigned to P_d.
double dl_share(double split_unit) {
  const double ratio_log = 2.0 * kSplitDecades * (split_unit - 0.5);
  return 1.0 / (1.0 + std::pow(10.0, -ratio_log));
}

double split_unit_from(double p_d, double p_bh_u) {
  if (p_d <= 0.0 && p_bh_u <= 0.0) return 0.5;
  if (p_bh_u <= 0.0) return 1.0;
  if (p_d <= 0.0) return 0.0;
  const double ratio_log = std::log10(p_d / p_bh_u);
  return std::clamp(0.5 + ratio_log / (2.0 * kSplitDecades), 0.0, 1.0);
}

double& field(PowerAllocation& a, Var v) {
  switch (v) {
    case Var::Pd:
      return a.p_d;
    case Var::Pu:
      return a.p_u;
    case Var::PbhD:
      return a.p_bh_d;
    case Var::PbhU:
      return a.p_bh_u;
    case Var::PuD2d:
      return a.p_u_d2d;
    default:
      return a.eta;
  }
}

double budget_of(const SystemParams& p, Var v) {
  switch (v) {
    case Var::Pd:
    case Var::PbhU:
      return p.p_an_max;
    case Var::Pu:
    case Var::PuD2d:
      return p.p_ue_max;
    case Var::PbhD:
      return p.p_bh_d_max;
    default:
      return 1.0;
  }
}

// Decision vector layout and the NLP built on top of the rate model.
class Formulation {
 public:
  Formulation(const RateModel& model, const ConstraintSet& set, bool epigraph)
      : model_(model) {
    const SystemParams& p = model.params();
    sum_budget_ = model.scheme() != Scheme::HybridRelay;
    if (sum_budget_) {
      vars_ = {Var::AnTotal, Var::AnSplit, Var::Pu, Var::PbhD};
    } else {
      vars_ = {Var::Pd, Var::PbhU, Var::Pu, Var::PbhD};
    }
    if (p.k_d2d > 0) vars_.push_back(Var::PuD2d);
    if (model.scheme() != Scheme::FullDuplex) vars_.push_back(Var::Eta);
    epigraph_ = epigraph && p.k_an > 0;
    if (epigraph_) vars_.push_back(Var::Epigraph);
    has_rho_ = set.has_rate_ratio();
    num_constraints_ = 2 + (has_rho_ ? 2 : 0) + (epigraph_ ? 2 : 0);
  }

  std::size_t dim() const { return vars_.size(); }

  PowerAllocation decode(std::span<const double> x) const {
    const SystemParams& p = model_.params();
    PowerAllocation a;
    double total = 0.0, share = 0.0;
    for (std::size_t i = 0; i < vars_.size(); ++i) {
      const Var v = vars_[i];
      if (v == Var::Epigraph) continue;
      if (v == Var::AnTotal) {
        total = power_from_unit(x[i], p.p_an_max);
      } else if (v == Var::AnSplit) {
        share = dl_share(x[i]);
      } else {
        field(a, v) = v == Var::Eta ? x[i] : power_from_unit(x[i], budget_of(p, v));
      }
    }
    if (sum_budget_) {
      a.p_d = total * share;
      a.p_bh_u = total * (1.0 - share);
    }
    return a;
  }

  std::vector<double> encode(const PowerAllocation& a) const {
    const SystemParams& p = model_.params();
    std::vector<double> x(vars_.size());
    PowerAllocation copy = a;
    for (std::size_t i = 0; i < vars_.size(); ++i) {
      const Var v = vars_[i];
      if (v == Var::Epigraph) {
        const RateTerms t = model_.terms(a);
        x[i] = std::min(t.relay_dl, t.relay_ul) / kEpigraphCap;
      } else if (v == Var::AnTotal) {
        x[i] = unit_from_power(a.p_d + a.p_bh_u, p.p_an_max);
      } else if (v == Var::AnSplit) {
        x[i] = split_unit_from(a.p_d, a.p_bh_u);
      } else if (v == Var::Eta) {
        x[i] = a.eta;
      } else {
        x[i] = unit_from_power(field(copy, v), budget_of(p, v));
      }
    }
    return x;
  }

  nlp::Problem problem() const {
    nlp::Problem prob;
    prob.lower.assign(vars_.size(), 0.0);
    prob.upper.assign(vars_.size(), 1.0);
    prob.num_constraints = num_constraints_;
    prob.evaluate = [this](std::span<const double> x, std::span<double> g) {
      return evaluate(x, g);
    };
    return prob;
  }

  // Negated objective; constraint values in bits/s/Hz.
  double evaluate(std::span<const double> x, std::span<double> g) const {
    const SystemParams& p = model_.params();
    const PowerAllocation a = decode(x);
    const RateTerms t = model_.terms(a);
    std::size_t j = 0;
    g[j++] = t.c_d - t.c_bh_d;
    g[j++] = t.c_u - t.c_bh_u;
    if (has_rho_) {
      g[j++] = p.rho_min * t.c_d - t.c_u;
      g[j++] = t.c_u - p.rho_max * t.c_d;
    }
    double value = t.c_d + t.c_u + t.c_d2d;
    if (epigraph_) {
      const double level = kEpigraphCap * x.back();
      g[j++] = level - t.relay_dl;
      g[j++] = level - t.relay_ul;
      value += p.k_an * level;
    } else {
      value += p.k_an * std::min(t.relay_dl, t.relay_ul);
    }
    return -value;
  }

 private:
  const RateModel& model_;
  std::vector<Var> vars_;
  bool epigraph_ = false;
  bool sum_budget_ = true;
  bool has_rho_ = false;
  std::size_t num_constraints_ = 0;
};

// Largest value in [0, current] of one power for which `violated` is false,
// found by bisection on the log-scale coordinate. Returns false when even
// zero power violates.
template <typename Pred>
bool shrink_power(const RateModel& model, PowerAllocation& a, Var v, Pred violated) {
  const double budget = budget_of(model.params(), v);
  double& power = field(a, v);
  const double original = power;
  power = 0.0;
  if (violated(model.terms(a))) {
    power = original;
    return false;
  }
  double lo = 0.0, hi = unit_from_power(original, budget);
  for (int it = 0; it < 64; ++it) {
    const double mid = 0.5 * (lo + hi);
    power = power_from_unit(mid, budget);
    if (violated(model.terms(a))) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  power = power_from_unit(lo, budget);
  return true;
}

// Pulls an allocation into the feasible set: AN pair scaled onto the
// budget, then powers that drive a violated rate constraint shrunk.
bool repair(const RateModel& model, PowerAllocation& a) {
  const SystemParams& p = model.params();
  a.p_d = std::min(a.p_d, p.p_an_max);
  a.p_bh_u = std::min(a.p_bh_u, p.p_an_max);
  a.p_u = std::min(a.p_u, p.p_ue_max);
  a.p_u_d2d = p.k_d2d > 0 ? std::min(a.p_u_d2d, p.p_ue_max) : 0.0;
  a.p_bh_d = std::min(a.p_bh_d, p.p_bh_d_max);
  a.eta = std::clamp(a.eta, 0.0, 1.0);
  if (model.scheme() != Scheme::HybridRelay) {
    const double sum = a.p_d + a.p_bh_u;
    if (sum > p.p_an_max) {
      const double scale = p.p_an_max / sum;
      a.p_d *= scale;
      a.p_bh_u *= scale;
    }
  }

  const bool rho = p.d - p.k_d2d - p.k_an > 0 && p.u - p.k_d2d - p.k_an > 0;
  auto bh_dl = [](const RateTerms& t) { return t.c_d - t.c_bh_d > 0.0; };
  auto bh_ul = [](const RateTerms& t) { return t.c_u - t.c_bh_u > 0.0; };
  auto rho_lo = [&](const RateTerms& t) { return rho && p.rho_min * t.c_d - t.c_u > 0.0; };
  auto rho_hi = [&](const RateTerms& t) { return rho && t.c_u - p.rho_max * t.c_d > 0.0; };

  for (int round = 0; round < 60; ++round) {
    const RateTerms t = model.terms(a);
    bool ok = true;
    if (bh_dl(t)) {
      ok = shrink_power(model, a, Var::Pd, bh_dl);
    } else if (bh_ul(t)) {
      ok = shrink_power(model, a, Var::Pu, bh_ul);
    } else if (rho_hi(t)) {
      ok = shrink_power(model, a, Var::Pu, rho_hi);
    } else if (rho_lo(t)) {
      ok = shrink_power(model, a, Var::Pd, rho_lo);
    } else {
      return true;
    }
    if (!ok) return false;
  }
  return false;
}

PowerAllocation random_start(const SystemParams& p, Scheme scheme, std::mt19937_64& rng) {
  auto log_uniform = [&](double budget) {
    const double lo = std::min(1e-3, budget);
    std::uniform_real_distribution<double> dist(std::log(lo), std::log(budget));
    return std::exp(dist(rng));
  };
  PowerAllocation a;
  a.p_d = log_uniform(p.p_an_max);
  a.p_u = log_uniform(p.p_ue_max);
  a.p_bh_d = log_uniform(p.p_bh_d_max);
  a.p_bh_u = log_uniform(p.p_an_max);
  a.p_u_d2d = p.k_d2d > 0 ? log_uniform(p.p_ue_max) : 0.0;
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double eta = unit(rng);
  a.eta = scheme == Scheme::FullDuplex ? 0.5 : eta;
  return a;
}

std::mt19937_64 start_rng(std::uint64_t seed, int start_index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(start_index), 0x5eedu};
  return std::mt19937_64(seq);
}

struct StartOutcome {
  StartSummary summary;
  PowerAllocation alloc;
};

StartOutcome run_start(const RateModel& model, const ConstraintSet& set,
                       const Formulation& form, const OptimizerOptions& opts,
                       int index) {
  StartOutcome out;
  out.summary.start_index = index;
  auto rng = start_rng(opts.rng_seed, index);
  PowerAllocation start = random_start(model.params(), model.scheme(), rng);
  const PowerAllocation drawn = start;
  if (!repair(model, start)) return out;
  out.summary.repaired = !(start == drawn);

  nlp::Options nopt;
  // The min-form objective has a kink; only the epigraph form is smooth.
  nopt.inner = model.params().k_an > 0 && !opts.epigraph_enabled
                   ? nlp::InnerMethod::NelderMead
                   : nlp::InnerMethod::QuasiNewton;
  nopt.max_outer = opts.max_iterations;
  nopt.feasibility_tol = 0.1 * opts.feasibility_tol;
  nopt.objective_tol = opts.objective_tol;

  const nlp::Problem problem = form.problem();
  const auto x0 = form.encode(start);
  const nlp::Result res = nlp::minimize(problem, x0, nopt);
  out.summary.iterations = res.outer_iterations;
  out.summary.converged = res.converged;

  PowerAllocation a = form.decode(res.x);
  if (model.scheme() == Scheme::FullDuplex) a.eta = 0.5;
  repair(model, a);
  const ConstraintReport report = set.report(a, opts.feasibility_tol);
  out.alloc = a;
  out.summary.objective = model.rates(a).c_s;
  out.summary.max_violation = report.max_violation;
  out.summary.feasible = report.feasible;
  return out;
}

}  // namespace

OptResult optimize(Scheme scheme, const SystemParams& params, const OptimizerOptions& opts) {
  if (opts.n_starts < 1) throw std::invalid_argument("n_starts must be >= 1");
  if (!(opts.feasibility_tol > 0.0) || !(opts.objective_tol > 0.0)) {
    throw std::invalid_argument("optimizer tolerances must be positive");
  }
  const RateModel model(scheme, params);
  const ConstraintSet set(model);
  const Formulation form(model, set, opts.epigraph_enabled);

  std::vector<StartOutcome> outcomes(static_cast<std::size_t>(opts.n_starts));
  for_each_index(outcomes.size(), opts.execution, [&](std::size_t i) {
    outcomes[i] = run_start(model, set, form, opts, static_cast<int>(i));
  });

  OptResult result;
  for (const auto& o : outcomes) {
    result.starts.push_back(o.summary);
    if (!o.summary.feasible || !o.summary.converged) continue;
    ++result.converged_count;
    if (result.best_start < 0 ||
        o.summary.objective > result.starts[static_cast<std::size_t>(result.best_start)].objective) {
      result.best_start = o.summary.start_index;
    }
  }
  if (result.best_start < 0) {
    std::ostringstream os;
    os << "no feasible converged point for scheme " << to_string(scheme) << " across "
       << opts.n_starts << " starts";
    throw InfeasibleError(os.str(), std::move(result.starts));
  }
  result.best_alloc = outcomes[static_cast<std::size_t>(result.best_start)].alloc;
  result.best_rates = model.rates(result.best_alloc);
  result.best_report = set.report(result.best_alloc, opts.feasibility_tol);
  return result;
}

PowerAllocation baseline_allocation(Scheme scheme, const SystemParams& params) {
  PowerAllocation a;
  const double an = scheme == Scheme::HybridRelay ? params.p_an_max : params.p_an_max / 2.0;
  a.p_d = an;
  a.p_bh_u = an;
  a.p_u = params.p_ue_max;
  a.p_u_d2d = params.k_d2d > 0 ? params.p_ue_max : 0.0;
  a.p_bh_d = params.p_bh_d_max;
  a.eta = 0.5;
  return a;
}

BaselineResult baseline(Scheme scheme, const SystemParams& params) {
  const RateModel model(scheme, params);
  const ConstraintSet set(model);
  const PowerAllocation a = baseline_allocation(scheme, params);
  const RateTerms t = model.terms(a);

  BaselineResult out;
  out.raw = model.rates(a);
  out.report = set.report(a, kDefaultFeasibilityTol);
  out.rates = out.raw;
  RateBreakdown& r = out.rates;
  r.c_d = std::min(r.c_d, r.c_bh_d);
  r.c_u = std::min(r.c_u, r.c_bh_u);
  if (set.has_rate_ratio()) {
    r.c_u = std::min(r.c_u, params.rho_max * r.c_d);
    r.c_d = std::min(r.c_d, r.c_u / params.rho_min);
  }
  // Clamping lowers the per-stream DL/UL rate, which relayed intra-cell
  // pairs share with the outgoing users.
  const double dl_scale = out.raw.c_d > 0.0 ? r.c_d / out.raw.c_d : 1.0;
  const double ul_scale = out.raw.c_u > 0.0 ? r.c_u / out.raw.c_u : 1.0;
  r.c_ic = t.c_d2d + params.k_an * std::min(dl_scale * t.relay_dl, ul_scale * t.relay_ul);
  r.c_s = r.c_d + r.c_u + r.c_ic;
  out.clamped = r.c_d != out.raw.c_d || r.c_u != out.raw.c_u || r.c_ic != out.raw.c_ic;
  return out;
}

}  // namespace selfbh
