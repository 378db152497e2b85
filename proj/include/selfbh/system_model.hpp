#pragma once

#include <array>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace selfbh {

/// Operating scheme of the access node (AN).
enum class Scheme { FullDuplex, HalfDuplex, HybridRelay };

inline constexpr std::array<Scheme, 3> kAllSchemes = {
    Scheme::FullDuplex, Scheme::HalfDuplex, Scheme::HybridRelay};

/// Short lowercase tag used by the CLI and CSV output: "fd", "hd", "rl".
std::string_view to_string(Scheme scheme);
std::optional<Scheme> parse_scheme(std::string_view tag);

/// Static cell parameters. Powers are in mW, gains are linear and
/// dimensionless (a path loss of 80 dB is stored as 1e-8).
struct SystemParams {
  int n_t = 0;     // AN transmit antennas
  int n_r = 0;     // AN receive antennas
  int m_bh_t = 0;  // backhaul streams transmitted by the AN
  int m_bh_r = 0;  // backhaul streams received by the AN
  int d = 0;       // DL UEs
  int u = 0;       // UL UEs
  int k_d2d = 0;   // intra-cell pairs communicating directly
  int k_an = 0;    // intra-cell pairs relayed by the AN

  double sigma_n2 = 0.0;  // noise floor, identical at every receiver
  double l_ue = 0.0;      // AN <-> UE
  double l_ud = 0.0;      // UL UE <-> DL UE
  double l_bh = 0.0;      // AN <-> backhaul node
  double p_an_max = 0.0;
  double p_ue_max = 0.0;
  double p_bh_d_max = 0.0;
  double alpha = 0.0;  // residual self-interference attenuation
  double rho_min = 0.0;
  double rho_max = 0.0;

  /// Reference cell: 200x100 array, 6/12 backhaul streams, 10+10 UEs,
  /// 120 dB SI cancellation.
  static SystemParams reference();

  bool operator==(const SystemParams&) const = default;
};

/// Optimization vector [P_d, P_u, P_d^BH, P_u^BH, P_u^D2D, eta].
struct PowerAllocation {
  double p_d = 0.0;
  double p_u = 0.0;
  double p_bh_d = 0.0;
  double p_bh_u = 0.0;
  double p_u_d2d = 0.0;
  double eta = 0.5;  // ignored by every FD expression

  bool operator==(const PowerAllocation&) const = default;
};

struct Violation {
  std::string code;
  std::string message;
  bool operator==(const Violation&) const = default;
};

/// Every violated structural or degrees-of-freedom invariant of `params`
/// for `scheme`. Empty means the configuration is usable.
std::vector<Violation> validate(const SystemParams& params, Scheme scheme);

/// Thrown for malformed configuration input and for operations invoked on
/// parameters that fail validate().
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Throws ConfigError listing all violations when validate() is non-empty.
void require_valid(const SystemParams& params, Scheme scheme);

double dbm_to_mw(double dbm);
double mw_to_dbm(double mw);
/// Attenuation in dB to a linear gain in (0, 1]: 80 dB -> 1e-8.
double loss_db_to_gain(double db);
double gain_to_loss_db(double gain);

/// Named dB-scale values and counts, keyed by the configuration-file names
/// (n_t, noise_dbm, l_ue_db, si_cancellation_db, rho_min, ...).
using DbConfig = std::map<std::string, double, std::less<>>;

/// Every key params_from_db() reads; any other key is rejected.
const std::array<std::string_view, 18>& config_keys();

SystemParams params_from_db(const DbConfig& raw);
DbConfig params_to_db(const SystemParams& params);

/// One `name = value` line of a flat configuration file.
struct KeyValueLine {
  std::size_t line = 0;
  std::string name;
  std::string value;
};

/// Splits text into `name = value` lines. Blank lines and `#` comments are
/// skipped; a line without '=', an empty name or a repeated name raises
/// ConfigError.
std::vector<KeyValueLine> parse_key_value_lines(std::string_view text);

/// Whole file as text; ConfigError if it cannot be opened.
std::string read_text_file(const std::string& path);

/// Parses a numeric double, ConfigError naming `what` otherwise.
double parse_number(std::string_view text, const std::string& what);

/// Like parse_key_value_lines with every value a finite number.
DbConfig parse_config_text(std::string_view text);
DbConfig load_config_file(const std::string& path);

}  // namespace selfbh
