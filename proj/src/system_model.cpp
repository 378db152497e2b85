#include "selfbh/system_model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace selfbh {

std::string_view to_string(Scheme scheme) {
  switch (scheme) {
    case Scheme::FullDuplex:
      return "fd";
    case Scheme::HalfDuplex:
      return "hd";
    case Scheme::HybridRelay:
      return "rl";
  }
  return "?";
}

std::optional<Scheme> parse_scheme(std::string_view tag) {
  for (Scheme s : kAllSchemes) {
    if (to_string(s) == tag) return s;
  }
  return std::nullopt;
}

SystemParams SystemParams::reference() {
  SystemParams p;
  p.n_t = 200;
  p.n_r = 100;
  p.m_bh_t = 6;
  p.m_bh_r = 12;
  p.d = 10;
  p.u = 10;
  p.k_d2d = 0;
  p.k_an = 0;
  p.sigma_n2 = dbm_to_mw(-90.0);
  p.l_ue = loss_db_to_gain(80.0);
  p.l_ud = loss_db_to_gain(70.0);
  p.l_bh = loss_db_to_gain(80.0);
  p.p_an_max = dbm_to_mw(30.0);
  p.p_ue_max = dbm_to_mw(25.0);
  p.p_bh_d_max = dbm_to_mw(40.0);
  p.alpha = loss_db_to_gain(120.0);
  p.rho_min = 0.15;
  p.rho_max = 0.30;
  return p;
}

double dbm_to_mw(double dbm) { return std::pow(10.0, dbm / 10.0); }
double mw_to_dbm(double mw) { return 10.0 * std::log10(mw); }
double loss_db_to_gain(double db) { return std::pow(10.0, -db / 10.0); }
double gain_to_loss_db(double gain) { return -10.0 * std::log10(gain); }

namespace {

void add(std::vector<Violation>& out, std::string code, std::string message) {
  out.push_back({std::move(code), std::move(message)});
}

bool in_unit_interval(double g) { return g > 0.0 && g <= 1.0; }

}  // namespace

std::vector<Violation> validate(const SystemParams& p, Scheme scheme) {
  std::vector<Violation> v;

  if (p.n_t <= 0) add(v, "n_t", "N_t must be positive");
  if (p.n_r <= 0) add(v, "n_r", "N_r must be positive");
  if (p.d <= 0) add(v, "d", "D must be positive");
  if (p.u <= 0) add(v, "u", "U must be positive");
  if (p.m_bh_t < 0) add(v, "m_bh_t", "M_t^BH must be non-negative");
  if (p.m_bh_r < 0) add(v, "m_bh_r", "M_r^BH must be non-negative");
  if (p.k_d2d < 0) add(v, "k_d2d", "K_D2D must be non-negative");
  if (p.k_an < 0) add(v, "k_an", "K_AN must be non-negative");
  if (p.k_d2d + p.k_an > p.d) add(v, "pairs_dl", "K_D2D + K_AN > D");
  if (p.k_d2d + p.k_an > p.u) add(v, "pairs_ul", "K_D2D + K_AN > U");

  if (!in_unit_interval(p.l_ue)) add(v, "l_ue", "L_UE must lie in (0, 1]");
  if (!in_unit_interval(p.l_ud)) add(v, "l_ud", "L_UD must lie in (0, 1]");
  if (!in_unit_interval(p.l_bh)) add(v, "l_bh", "L_BH must lie in (0, 1]");
  if (!in_unit_interval(p.alpha)) add(v, "alpha", "alpha must lie in (0, 1]");

  if (!(p.sigma_n2 > 0.0)) add(v, "sigma_n2", "noise power must be positive");
  if (!(p.p_an_max > 0.0)) add(v, "p_an_max", "P_AN must be positive");
  if (!(p.p_ue_max > 0.0)) add(v, "p_ue_max", "P_UE must be positive");
  if (!(p.p_bh_d_max > 0.0)) add(v, "p_bh_d_max", "P_d,max^BH must be positive");
  if (!(p.rho_min > 0.0 && p.rho_min <= p.rho_max)) {
    add(v, "rho", "require 0 < rho_min <= rho_max");
  }

  const int nt = p.n_t, nr = p.n_r, mt = p.m_bh_t, mr = p.m_bh_r;
  const int d = p.d, u = p.u, k = p.k_d2d;
  switch (scheme) {
    case Scheme::FullDuplex:
      if (nt - d - mt - nr <= 0) add(v, "dof_fd_tx", "FD transmit DoF <= 0");
      if (nr - u - mr <= 0) add(v, "dof_fd_rx", "FD receive DoF <= 0");
      break;
    case Scheme::HalfDuplex:
      if (nt - d + k - mt <= 0) add(v, "dof_hd_tx", "HD transmit DoF <= 0");
      if (nr - u - mr <= 0) add(v, "dof_hd_rx", "HD receive DoF <= 0");
      break;
    case Scheme::HybridRelay:
      if (nt - d + k - nr <= 0) add(v, "dof_rl_dl", "RL DL transmit DoF <= 0");
      if (nt - mt - k - nr <= 0) {
        add(v, "dof_rl_bh_tx", "RL backhaul transmit DoF <= 0");
      }
      if (nr - u <= 0) add(v, "dof_rl_ul", "RL UL receive DoF <= 0");
      if (nr - mr <= 0) add(v, "dof_rl_bh_rx", "RL backhaul receive DoF <= 0");
      break;
  }
  return v;
}

void require_valid(const SystemParams& params, Scheme scheme) {
  const auto violations = validate(params, scheme);
  if (violations.empty()) return;
  std::ostringstream os;
  os << "invalid parameters for scheme " << to_string(scheme) << ":";
  for (const auto& item : violations) os << " [" << item.message << "]";
  throw ConfigError(os.str());
}

namespace {

double require_key(const DbConfig& raw, std::string_view key) {
  const auto it = raw.find(key);
  if (it == raw.end()) {
    throw ConfigError("missing configuration key '" + std::string(key) + "'");
  }
  if (!std::isfinite(it->second)) {
    throw ConfigError("non-finite value for '" + std::string(key) + "'");
  }
  return it->second;
}

int require_count(const DbConfig& raw, std::string_view key) {
  const double value = require_key(raw, key);
  if (value < 0.0) {
    throw ConfigError("negative count for '" + std::string(key) + "'");
  }
  if (value != std::floor(value) || value > 1e9) {
    throw ConfigError("count '" + std::string(key) + "' is not an integer");
  }
  return static_cast<int>(value);
}

}  // namespace

const std::array<std::string_view, 18>& config_keys() {
  static constexpr std::array<std::string_view, 18> keys{
      "n_t",     "n_r",      "m_bh_t",  "m_bh_r",   "d",        "u",
      "k_d2d",   "k_an",     "noise_dbm", "l_ue_db", "l_ud_db",  "l_bh_db",
      "p_an_dbm", "p_ue_dbm", "p_bh_dbm", "si_cancellation_db", "rho_min", "rho_max"};
  return keys;
}

SystemParams params_from_db(const DbConfig& raw) {
  for (const auto& [key, value] : raw) {
    if (std::find(config_keys().begin(), config_keys().end(), key) == config_keys().end()) {
      throw ConfigError("unknown configuration key '" + key + "'");
    }
  }
  SystemParams p;
  p.n_t = require_count(raw, "n_t");
  p.n_r = require_count(raw, "n_r");
  p.m_bh_t = require_count(raw, "m_bh_t");
  p.m_bh_r = require_count(raw, "m_bh_r");
  p.d = require_count(raw, "d");
  p.u = require_count(raw, "u");
  p.k_d2d = require_count(raw, "k_d2d");
  p.k_an = require_count(raw, "k_an");

  p.sigma_n2 = dbm_to_mw(require_key(raw, "noise_dbm"));
  p.l_ue = loss_db_to_gain(require_key(raw, "l_ue_db"));
  p.l_ud = loss_db_to_gain(require_key(raw, "l_ud_db"));
  p.l_bh = loss_db_to_gain(require_key(raw, "l_bh_db"));
  p.p_an_max = dbm_to_mw(require_key(raw, "p_an_dbm"));
  p.p_ue_max = dbm_to_mw(require_key(raw, "p_ue_dbm"));
  p.p_bh_d_max = dbm_to_mw(require_key(raw, "p_bh_dbm"));
  p.alpha = loss_db_to_gain(require_key(raw, "si_cancellation_db"));
  p.rho_min = require_key(raw, "rho_min");
  p.rho_max = require_key(raw, "rho_max");
  return p;
}

DbConfig params_to_db(const SystemParams& p) {
  DbConfig out;
  out["n_t"] = p.n_t;
  out["n_r"] = p.n_r;
  out["m_bh_t"] = p.m_bh_t;
  out["m_bh_r"] = p.m_bh_r;
  out["d"] = p.d;
  out["u"] = p.u;
  out["k_d2d"] = p.k_d2d;
  out["k_an"] = p.k_an;
  out["noise_dbm"] = mw_to_dbm(p.sigma_n2);
  out["l_ue_db"] = gain_to_loss_db(p.l_ue);
  out["l_ud_db"] = gain_to_loss_db(p.l_ud);
  out["l_bh_db"] = gain_to_loss_db(p.l_bh);
  out["p_an_dbm"] = mw_to_dbm(p.p_an_max);
  out["p_ue_dbm"] = mw_to_dbm(p.p_ue_max);
  out["p_bh_dbm"] = mw_to_dbm(p.p_bh_d_max);
  out["si_cancellation_db"] = gain_to_loss_db(p.alpha);
  out["rho_min"] = p.rho_min;
  out["rho_max"] = p.rho_max;
  return out;
}

}  // namespace selfbh
