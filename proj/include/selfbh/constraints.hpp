#pragma once

#include <span>
#include <string_view>
#include <vector>

#include "selfbh/rates.hpp"

namespace selfbh {

inline constexpr double kDefaultFeasibilityTol = 1e-6;

/// Inequality constraints g(lambda) <= 0, in report order.
enum class ConstraintId {
  BhDl,      // C_d - C_d^BH
  BhUl,      // C_u - C_u^BH
  PwrAn,     // AN budget (sum form; max form for the hybrid relay)
  PwrUeUl,   // P_u - P_UE
  PwrUeD2d,  // P_u^D2D - P_UE, only with K_D2D > 0
  PwrBn,     // P_d^BH - P_d,max^BH
  RhoLo,     // rho_min C_d - C_u
  RhoHi,     // C_u - rho_max C_d
  EtaLo,     // -eta, HD/RL only
  EtaHi,     // eta - 1, HD/RL only
};

std::string_view label(ConstraintId id);

struct ConstraintValue {
  ConstraintId id;
  double value;  // feasible when <= tol; mW for powers, bits/s/Hz for rates
};

struct ConstraintReport {
  std::vector<ConstraintValue> values;
  double max_violation = 0.0;  // max(0, max value)
  bool feasible = true;
  double tol = kDefaultFeasibilityTol;

  /// Value of `id`, or nullptr when the constraint does not apply.
  const ConstraintValue* find(ConstraintId id) const;
};

/// The constraints that apply to a (scheme, parameters) pair, with an
/// allocation-free evaluator for the optimizer's inner loop.
class ConstraintSet {
 public:
  explicit ConstraintSet(const RateModel& model);

  const std::vector<ConstraintId>& ids() const { return ids_; }
  std::size_t size() const { return ids_.size(); }

  /// Writes one value per ids() entry. `out.size()` must equal size().
  void evaluate(const PowerAllocation& alloc, const RateTerms& terms,
                std::span<double> out) const;
  ConstraintReport report(const PowerAllocation& alloc, double tol) const;

  bool has_rate_ratio() const { return has_rho_; }

 private:
  const RateModel* model_;
  std::vector<ConstraintId> ids_;
  bool has_rho_ = false;
};

ConstraintReport constraints(Scheme scheme, const SystemParams& params,
                             const PowerAllocation& alloc,
                             double tol = kDefaultFeasibilityTol);

}  // namespace selfbh
