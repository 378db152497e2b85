#include "selfbh/rates.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace selfbh {

double spectral_efficiency(double sinr) {
  return std::log1p(sinr) / std::numbers::ln2;
}

double RateTerms::c_ic(int k_an) const {
  return c_d2d + k_an * std::min(relay_dl, relay_ul);
}

RateModel::RateModel(Scheme scheme, const SystemParams& params)
    : scheme_(scheme), params_(params) {
  require_valid(params_, scheme_);
}

namespace {

// Direct-link SINR shared by all schemes. Zero power is the continuous
// limit of the closed form; K_D2D = 0 means there is no such link.
double d2d_sinr(const SystemParams& p, const PowerAllocation& a) {
  if (p.k_d2d == 0 || a.p_u_d2d <= 0.0) return 0.0;
  return 1.0 / ((p.k_d2d - 1) + p.sigma_n2 / (p.l_ud * a.p_u_d2d) +
                a.p_u / a.p_u_d2d);
}

}  // namespace

SinrSet RateModel::sinr(const PowerAllocation& a) const {
  const SystemParams& p = params_;
  const double nt = p.n_t, nr = p.n_r, mt = p.m_bh_t, mr = p.m_bh_r;
  const double d = p.d, u = p.u, k = p.k_d2d;
  const double dl_streams = d - k;

  SinrSet s;
  s.sinr_d2d = d2d_sinr(p, a);

  switch (scheme_) {
    case Scheme::FullDuplex: {
      const double si = p.sigma_n2 + p.alpha * (a.p_d + a.p_bh_u);
      if (dl_streams > 0) {
        const double iui = p.l_ud * (u - k) * a.p_u + p.l_ud * k * a.p_u_d2d;
        s.sinr_d = p.l_ue * (nt - d - mt - nr) * a.p_d /
                   (dl_streams * (p.sigma_n2 + iui));
      }
      s.sinr_u = p.l_ue * (nr - u - mr) * a.p_u / si;
      if (mr > 0) s.sinr_bh_d = p.l_bh * (nr - u - mr) * a.p_bh_d / (mr * si);
      if (mt > 0) {
        s.sinr_bh_u = p.l_bh * (nt - d - mt - nr) * a.p_bh_u / (mt * p.sigma_n2);
      }
      break;
    }
    case Scheme::HalfDuplex: {
      if (dl_streams > 0) {
        s.sinr_d = (nt - d + k - mt) * p.l_ue * a.p_d / (dl_streams * p.sigma_n2);
      }
      s.sinr_u = (nr - u - mr) * p.l_ue * a.p_u / p.sigma_n2;
      if (mr > 0) {
        s.sinr_bh_d = (nr - u - mr) * p.l_bh * a.p_bh_d / (mr * p.sigma_n2);
      }
      if (mt > 0) {
        s.sinr_bh_u = (nt - d + k - mt) * p.l_bh * a.p_bh_u / (mt * p.sigma_n2);
      }
      break;
    }
    case Scheme::HybridRelay: {
      if (dl_streams > 0) {
        s.sinr_d = (nt - d + k - nr) * p.l_ue * a.p_d / (dl_streams * p.sigma_n2);
      }
      s.sinr_u = (nr - u) * p.l_ue * a.p_u / (p.sigma_n2 + p.alpha * a.p_bh_u);
      if (mr > 0) {
        s.sinr_bh_d = (nr - mr) * p.l_bh * a.p_bh_d /
                      (mr * (p.sigma_n2 + p.alpha * a.p_d));
      }
      if (mt > 0) {
        s.sinr_bh_u = (nt - mt - k - nr) * p.l_bh * a.p_bh_u / (mt * p.sigma_n2);
      }
      break;
    }
  }
  return s;
}

RateTerms RateModel::terms(const PowerAllocation& a) const {
  const SystemParams& p = params_;
  const SinrSet s = sinr(a);
  const double r_d = spectral_efficiency(s.sinr_d);
  const double r_u = spectral_efficiency(s.sinr_u);
  const double r_d2d = spectral_efficiency(s.sinr_d2d);
  const double r_bh_d = spectral_efficiency(s.sinr_bh_d);
  const double r_bh_u = spectral_efficiency(s.sinr_bh_u);
  const int dl_ext = p.d - p.k_d2d - p.k_an;
  const int ul_ext = p.u - p.k_d2d - p.k_an;

  // Time share of the DL-transmitting slot and of the UL-receiving slot.
  double t_dl = 1.0, t_ul = 1.0;
  if (scheme_ != Scheme::FullDuplex) {
    t_dl = a.eta;
    t_ul = 1.0 - a.eta;
  }

  RateTerms t;
  t.c_d = t_dl * dl_ext * r_d;
  t.c_u = t_ul * ul_ext * r_u;
  t.c_d2d = t_ul * p.k_d2d * r_d2d;
  t.relay_dl = t_dl * r_d;
  t.relay_ul = t_ul * r_u;
  switch (scheme_) {
    case Scheme::FullDuplex:
      t.c_bh_d = p.m_bh_r * r_bh_d;
      t.c_bh_u = p.m_bh_t * r_bh_u;
      break;
    case Scheme::HalfDuplex:
      // AN transmits backhaul alongside DL and receives it in the UL slot.
      t.c_bh_u = t_dl * p.m_bh_t * r_bh_u;
      t.c_bh_d = t_ul * p.m_bh_r * r_bh_d;
      break;
    case Scheme::HybridRelay:
      // Relay hops: backhaul-in with DL, backhaul-out with UL.
      t.c_bh_d = t_dl * p.m_bh_r * r_bh_d;
      t.c_bh_u = t_ul * p.m_bh_t * r_bh_u;
      break;
  }
  return t;
}

RateBreakdown RateModel::rates(const PowerAllocation& a) const {
  const RateTerms t = terms(a);
  RateBreakdown r;
  r.scheme = scheme_;
  r.alloc = a;
  r.c_d = t.c_d;
  r.c_u = t.c_u;
  r.c_ic = t.c_ic(params_.k_an);
  r.c_s = r.c_d + r.c_u + r.c_ic;
  r.c_bh_d = t.c_bh_d;
  r.c_bh_u = t.c_bh_u;
  return r;
}

void require_valid_allocation(const PowerAllocation& a) {
  for (double power : {a.p_d, a.p_u, a.p_bh_d, a.p_bh_u, a.p_u_d2d}) {
    if (!std::isfinite(power) || power < 0.0) {
      throw std::invalid_argument("transmit powers must be finite and >= 0");
    }
  }
  if (!(a.eta >= 0.0 && a.eta <= 1.0)) {
    throw std::invalid_argument("eta must lie in [0, 1]");
  }
}

SinrSet sinr_set(Scheme scheme, const SystemParams& params,
                 const PowerAllocation& alloc) {
  require_valid_allocation(alloc);
  return RateModel(scheme, params).sinr(alloc);
}

RateBreakdown rates(Scheme scheme, const SystemParams& params,
                    const PowerAllocation& alloc) {
  require_valid_allocation(alloc);
  return RateModel(scheme, params).rates(alloc);
}

}  // namespace selfbh
