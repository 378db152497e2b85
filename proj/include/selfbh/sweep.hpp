#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "selfbh/optimizer.hpp"

namespace selfbh {

enum class SweepKind { SiCancellation, IntraCellPairs, BackhaulStreams, CustomGrid };
enum class Routing { D2d, ViaAn };

std::string_view to_string(SweepKind kind);
std::string_view to_string(Routing routing);

struct SweepSpec {
  SweepKind kind = SweepKind::SiCancellation;
  std::vector<double> axis;  // strictly increasing
  Routing routing = Routing::ViaAn;  // intra-cell sweeps only
  std::string parameter;     // configuration key swept by a custom grid
  std::vector<Scheme> schemes{kAllSchemes.begin(), kAllSchemes.end()};
  bool include_baseline = true;
  DbConfig base = params_to_db(SystemParams::reference());
  OptimizerOptions optimizer;
};

/// Parses a sweep description. Keys:
///   kind = si_cancellation | intra_cell_pairs | backhaul_streams | custom_grid
///   axis = first:last:step  or  v1, v2, ...
///   routing = d2d | via_an          (intra_cell_pairs)
///   parameter = <config key>        (custom_grid)
///   schemes = fd, hd, rl
///   include_baseline = true | false
///   base_config = <file>            (relative to base_dir; default reference)
///   n_starts = N, seed = N
/// Any other key must be a configuration key and overrides the base value.
/// Throws ConfigError on any problem, including a failed validate_spec().
SweepSpec parse_sweep_spec(std::string_view text, const std::string& base_dir = ".");
SweepSpec load_sweep_spec(const std::string& path);

/// Structural checks: non-empty strictly increasing axis, integer axis for
/// count sweeps, K within min(D, U), known custom parameter, distinct schemes.
void validate_spec(const SweepSpec& spec);

enum class RowStatus {
  Ok,
  Skipped,     // the grid point's parameters fail validate()
  Infeasible,  // no optimizer start reached a feasible point
};

struct SweepRow {
  double axis = 0.0;
  Scheme scheme = Scheme::FullDuplex;
  bool optimized = true;
  bool clamped = false;
  RowStatus status = RowStatus::Ok;
  RateBreakdown rates;  // alloc holds the reported powers
  int converged = 0;    // optimized rows: converged starts; baseline rows: 0
};

/// Parameters of one grid point after the axis override.
SystemParams point_params(const SweepSpec& spec, double axis_value);

/// Runs every (axis value, scheme) job, optimized and optionally baseline,
/// and returns rows sorted by (axis, scheme, optimized). Jobs run
/// concurrently under Execution::Parallel; the result does not depend on it.
std::vector<SweepRow> run_sweep(const SweepSpec& spec, Execution exec = Execution::Parallel);

inline constexpr std::string_view kCsvHeader =
    "axis,scheme,optimized,clamped,c_d,c_u,c_ic,c_s,c_bh_d,c_bh_u,p_d_mw,p_u_mw,"
    "p_bh_d_mw,p_bh_u_mw,p_u_d2d_mw,eta,converged";

/// CSV text with kCsvHeader, 9 significant digits. Skipped and infeasible
/// rows carry "nan" in every numeric column and "skip" / "infeasible" in
/// the converged column. Rows are sorted by (axis, scheme, optimized).
std::string format_csv(std::vector<SweepRow> rows);

/// Writes format_csv(rows) to path. Throws std::invalid_argument for empty
/// rows and std::runtime_error on I/O failure.
void emit_csv(const std::vector<SweepRow>& rows, const std::string& path);

}  // namespace selfbh
