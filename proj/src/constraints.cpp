#include "selfbh/constraints.hpp"

#include <algorithm>
#include <cassert>

namespace selfbh {

std::string_view label(ConstraintId id) {
  switch (id) {
    case ConstraintId::BhDl:
      return "bh_dl";
    case ConstraintId::BhUl:
      return "bh_ul";
    case ConstraintId::PwrAn:
      return "pwr_an";
    case ConstraintId::PwrUeUl:
      return "pwr_ue_ul";
    case ConstraintId::PwrUeD2d:
      return "pwr_ue_d2d";
    case ConstraintId::PwrBn:
      return "pwr_bn";
    case ConstraintId::RhoLo:
      return "rho_lo";
    case ConstraintId::RhoHi:
      return "rho_hi";
    case ConstraintId::EtaLo:
      return "eta_lo";
    case ConstraintId::EtaHi:
      return "eta_hi";
  }
  return "?";
}

const ConstraintValue* ConstraintReport::find(ConstraintId id) const {
  const auto it = std::find_if(values.begin(), values.end(),
                               [id](const ConstraintValue& v) { return v.id == id; });
  return it == values.end() ? nullptr : &*it;
}

ConstraintSet::ConstraintSet(const RateModel& model) : model_(&model) {
  const SystemParams& p = model.params();
  ids_ = {ConstraintId::BhDl, ConstraintId::BhUl, ConstraintId::PwrAn,
          ConstraintId::PwrUeUl};
  if (p.k_d2d > 0) ids_.push_back(ConstraintId::PwrUeD2d);
  ids_.push_back(ConstraintId::PwrBn);
  // With no DL or no UL traffic leaving the cell the ratio is undefined.
  has_rho_ = p.d - p.k_d2d - p.k_an > 0 && p.u - p.k_d2d - p.k_an > 0;
  if (has_rho_) {
    ids_.push_back(ConstraintId::RhoLo);
    ids_.push_back(ConstraintId::RhoHi);
  }
  if (model.scheme() != Scheme::FullDuplex) {
    ids_.push_back(ConstraintId::EtaLo);
    ids_.push_back(ConstraintId::EtaHi);
  }
}

void ConstraintSet::evaluate(const PowerAllocation& a, const RateTerms& t,
                             std::span<double> out) const {
  assert(out.size() == ids_.size());
  const SystemParams& p = model_->params();
  for (std::size_t i = 0; i < ids_.size(); ++i) {
    double g = 0.0;
    switch (ids_[i]) {
      case ConstraintId::BhDl:
        g = t.c_d - t.c_bh_d;
        break;
      case ConstraintId::BhUl:
        g = t.c_u - t.c_bh_u;
        break;
      case ConstraintId::PwrAn:
        // The relay's DL and backhaul-out transmissions use disjoint slots.
        g = model_->scheme() == Scheme::HybridRelay
                ? std::max(a.p_d, a.p_bh_u) - p.p_an_max
                : a.p_d + a.p_bh_u - p.p_an_max;
        break;
      case ConstraintId::PwrUeUl:
        g = a.p_u - p.p_ue_max;
        break;
      case ConstraintId::PwrUeD2d:
        g = a.p_u_d2d - p.p_ue_max;
        break;
      case ConstraintId::PwrBn:
        g = a.p_bh_d - p.p_bh_d_max;
        break;
      case ConstraintId::RhoLo:
        g = p.rho_min * t.c_d - t.c_u;
        break;
      case ConstraintId::RhoHi:
        g = t.c_u - p.rho_max * t.c_d;
        break;
      case ConstraintId::EtaLo:
        g = -a.eta;
        break;
      case ConstraintId::EtaHi:
        g = a.eta - 1.0;
        break;
    }
    out[i] = g;
  }
}

ConstraintReport ConstraintSet::report(const PowerAllocation& alloc,
                                       double tol) const {
  std::vector<double> g(ids_.size());
  evaluate(alloc, model_->terms(alloc), g);
  ConstraintReport r;
  r.tol = tol;
  r.values.reserve(ids_.size());
  for (std::size_t i = 0; i < ids_.size(); ++i) {
    r.values.push_back({ids_[i], g[i]});
    r.max_violation = std::max(r.max_violation, g[i]);
  }
  r.feasible = r.max_violation <= tol;
  return r;
}

ConstraintReport constraints(Scheme scheme, const SystemParams& params,
                             const PowerAllocation& alloc, double tol) {
  require_valid_allocation(alloc);
  const RateModel model(scheme, params);
  return ConstraintSet(model).report(alloc, tol);
}

}  // namespace selfbh
