#pragma once

#include "selfbh/system_model.hpp"

namespace selfbh {

/// Per-stream linear SINRs of every link in a scheme.
struct SinrSet {
  double sinr_d = 0.0;
  double sinr_u = 0.0;
  double sinr_d2d = 0.0;
  double sinr_bh_d = 0.0;  // BN -> AN, per received backhaul stream
  double sinr_bh_u = 0.0;  // AN -> BN, per transmitted backhaul stream
};

/// Spectral efficiencies in bits/s/Hz. c_s = c_d + c_u + c_ic; the
/// backhaul rates are capacities and never enter c_s.
struct RateBreakdown {
  Scheme scheme = Scheme::FullDuplex;
  PowerAllocation alloc;
  double c_d = 0.0;
  double c_u = 0.0;
  double c_ic = 0.0;
  double c_s = 0.0;
  double c_bh_d = 0.0;
  double c_bh_u = 0.0;
};

/// Rate components before the relayed-pair minimum is taken. The
/// optimizer's epigraph form needs the two sides of the minimum separately.
struct RateTerms {
  double c_d = 0.0;
  double c_u = 0.0;
  double c_d2d = 0.0;     // K_D2D pairs, time weight applied
  double relay_dl = 0.0;  // per relayed pair, DL hop, time weight applied
  double relay_ul = 0.0;  // per relayed pair, UL hop, time weight applied
  double c_bh_d = 0.0;
  double c_bh_u = 0.0;

  double c_ic(int k_an) const;
};

/// Closed-form rate model for one (scheme, parameters) pair. The
/// constructor validates the parameters once; evaluation is unchecked and
/// allocation-free.
class RateModel {
 public:
  RateModel(Scheme scheme, const SystemParams& params);

  Scheme scheme() const { return scheme_; }
  const SystemParams& params() const { return params_; }

  SinrSet sinr(const PowerAllocation& alloc) const;
  RateTerms terms(const PowerAllocation& alloc) const;
  RateBreakdown rates(const PowerAllocation& alloc) const;

 private:
  Scheme scheme_;
  SystemParams params_;
};

/// log2(1 + sinr), accurate for small sinr.
double spectral_efficiency(double sinr);

/// Throws std::invalid_argument on negative or non-finite powers or an eta
/// outside [0, 1].
void require_valid_allocation(const PowerAllocation& alloc);

SinrSet sinr_set(Scheme scheme, const SystemParams& params,
                 const PowerAllocation& alloc);
RateBreakdown rates(Scheme scheme, const SystemParams& params,
                    const PowerAllocation& alloc);

}  // namespace selfbh
