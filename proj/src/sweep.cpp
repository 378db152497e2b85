#include "selfbh/sweep.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

namespace selfbh {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split(std::string_view text, char sep) {
  std::vector<std::string_view> parts;
  while (true) {
    const auto pos = text.find(sep);
    parts.push_back(trim(text.substr(0, pos)));
    if (pos == std::string_view::npos) break;
    text = text.substr(pos + 1);
  }
  return parts;
}

std::vector<double> parse_axis(std::string_view text, const std::string& where) {
  std::vector<double> axis;
  if (text.find(':') != std::string_view::npos) {
    const auto parts = split(text, ':');
    if (parts.size() != 3) throw ConfigError(where + ": range must be first:last:step");
    const double first = parse_number(parts[0], where);
    const double last = parse_number(parts[1], where);
    const double step = parse_number(parts[2], where);
    if (step <= 0.0 || last < first) {
      throw ConfigError(where + ": range needs step > 0 and last >= first");
    }
    const double span = (last - first) / step;
    const auto count = static_cast<long long>(std::floor(span + 1e-9)) + 1;
    if (count > 100000) throw ConfigError(where + ": range has too many points");
    for (long long i = 0; i < count; ++i) axis.push_back(first + static_cast<double>(i) * step);
    return axis;
  }
  for (std::string_view item : split(text, ',')) axis.push_back(parse_number(item, where));
  return axis;
}

bool parse_bool(std::string_view text, const std::string& where) {
  if (text == "true" || text == "1") return true;
  if (text == "false" || text == "0") return false;
  throw ConfigError(where + ": expected true or false");
}

long long parse_integer(std::string_view text, const std::string& where, double min_value) {
  const double v = parse_number(text, where);
  if (v != std::floor(v) || v < min_value || v > 9.0e15) {
    throw ConfigError(where + ": expected an integer >= " + std::to_string(static_cast<long long>(min_value)));
  }
  return static_cast<long long>(v);
}

SweepKind parse_kind(std::string_view text, const std::string& where) {
  for (SweepKind k : {SweepKind::SiCancellation, SweepKind::IntraCellPairs,
                      SweepKind::BackhaulStreams, SweepKind::CustomGrid}) {
    if (to_string(k) == text) return k;
  }
  throw ConfigError(where + ": unknown sweep kind '" + std::string(text) + "'");
}

bool is_config_key(std::string_view key) {
  const auto& keys = config_keys();
  return std::find(keys.begin(), keys.end(), key) != keys.end();
}

std::string format_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

}  // namespace

std::string_view to_string(SweepKind kind) {
  switch (kind) {
    case SweepKind::SiCancellation:
      return "si_cancellation";
    case SweepKind::IntraCellPairs:
      return "intra_cell_pairs";
    case SweepKind::BackhaulStreams:
      return "backhaul_streams";
    case SweepKind::CustomGrid:
      return "custom_grid";
  }
  return "?";
}

std::string_view to_string(Routing routing) {
  return routing == Routing::D2d ? "d2d" : "via_an";
}

SweepSpec parse_sweep_spec(std::string_view text, const std::string& base_dir) {
  SweepSpec spec;
  DbConfig overrides;
  std::optional<std::string> base_config;
  bool have_kind = false, have_axis = false, have_routing = false;

  for (const KeyValueLine& kv : parse_key_value_lines(text)) {
    const std::string where = "line " + std::to_string(kv.line) + " '" + kv.name + "'";
    const std::string_view value = kv.value;
    if (kv.name == "kind") {
      spec.kind = parse_kind(value, where);
      have_kind = true;
    } else if (kv.name == "axis") {
      spec.axis = parse_axis(value, where);
      have_axis = true;
    } else if (kv.name == "routing") {
      if (value == "d2d") {
        spec.routing = Routing::D2d;
      } else if (value == "via_an") {
        spec.routing = Routing::ViaAn;
      } else {
        throw ConfigError(where + ": expected d2d or via_an");
      }
      have_routing = true;
    } else if (kv.name == "parameter") {
      spec.parameter = kv.value;
    } else if (kv.name == "schemes") {
      spec.schemes.clear();
      for (std::string_view tag : split(value, ',')) {
        const auto scheme = parse_scheme(tag);
        if (!scheme) throw ConfigError(where + ": unknown scheme '" + std::string(tag) + "'");
        spec.schemes.push_back(*scheme);
      }
    } else if (kv.name == "include_baseline") {
      spec.include_baseline = parse_bool(value, where);
    } else if (kv.name == "base_config") {
      base_config = kv.value;
    } else if (kv.name == "n_starts") {
      spec.optimizer.n_starts = static_cast<int>(parse_integer(value, where, 1));
    } else if (kv.name == "seed") {
      spec.optimizer.rng_seed = static_cast<std::uint64_t>(parse_integer(value, where, 0));
    } else if (is_config_key(kv.name)) {
      overrides[kv.name] = parse_number(value, where);
    } else {
      throw ConfigError(where + ": unknown key");
    }
  }
  if (!have_kind) throw ConfigError("sweep spec: missing 'kind'");
  if (!have_axis) throw ConfigError("sweep spec: missing 'axis'");
  if (spec.kind == SweepKind::IntraCellPairs && !have_routing) {
    throw ConfigError("sweep spec: intra_cell_pairs needs 'routing'");
  }

  if (base_config) {
    std::filesystem::path path(*base_config);
    if (path.is_relative()) path = std::filesystem::path(base_dir) / path;
    spec.base = load_config_file(path.string());
    params_from_db(spec.base);  // complete and well-formed
  }
  for (const auto& [key, value] : overrides) spec.base[key] = value;

  validate_spec(spec);
  return spec;
}

SweepSpec load_sweep_spec(const std::string& path) {
  const std::string dir = std::filesystem::path(path).parent_path().string();
  return parse_sweep_spec(read_text_file(path), dir.empty() ? "." : dir);
}

void validate_spec(const SweepSpec& spec) {
  if (spec.axis.empty()) throw ConfigError("sweep spec: empty axis");
  for (std::size_t i = 1; i < spec.axis.size(); ++i) {
    if (!(spec.axis[i] > spec.axis[i - 1])) {
      throw ConfigError("sweep spec: axis must be strictly increasing");
    }
  }
  if (spec.schemes.empty()) throw ConfigError("sweep spec: no schemes");
  const std::set<Scheme> distinct(spec.schemes.begin(), spec.schemes.end());
  if (distinct.size() != spec.schemes.size()) {
    throw ConfigError("sweep spec: repeated scheme");
  }
  if (spec.optimizer.n_starts < 1) throw ConfigError("sweep spec: n_starts must be >= 1");

  const bool counts = spec.kind == SweepKind::IntraCellPairs ||
                      spec.kind == SweepKind::BackhaulStreams;
  if (counts) {
    for (double v : spec.axis) {
      if (v < 0.0 || v != std::floor(v)) {
        throw ConfigError("sweep spec: count axis must hold non-negative integers");
      }
    }
  }
  if (spec.kind == SweepKind::CustomGrid && !is_config_key(spec.parameter)) {
    throw ConfigError("sweep spec: custom_grid needs a configuration key as 'parameter'");
  }

  const SystemParams base = params_from_db(spec.base);
  if (spec.kind == SweepKind::IntraCellPairs &&
      spec.axis.back() > static_cast<double>(std::min(base.d, base.u))) {
    throw ConfigError("sweep spec: intra-cell pair count exceeds min(D, U)");
  }
  for (double v : spec.axis) point_params(spec, v);
}

SystemParams point_params(const SweepSpec& spec, double axis_value) {
  DbConfig db = spec.base;
  switch (spec.kind) {
    case SweepKind::SiCancellation:
      db["si_cancellation_db"] = axis_value;
      break;
    case SweepKind::IntraCellPairs:
      db["k_d2d"] = spec.routing == Routing::D2d ? axis_value : 0.0;
      db["k_an"] = spec.routing == Routing::ViaAn ? axis_value : 0.0;
      break;
    case SweepKind::BackhaulStreams:
      db["m_bh_t"] = axis_value;
      db["m_bh_r"] = 2.0 * axis_value;
      break;
    case SweepKind::CustomGrid:
      db[spec.parameter] = axis_value;
      break;
  }
  return params_from_db(db);
}

std::vector<SweepRow> run_sweep(const SweepSpec& spec, Execution exec) {
  validate_spec(spec);
  const std::size_t n_schemes = spec.schemes.size();
  const std::size_t jobs = spec.axis.size() * n_schemes;
  std::vector<std::vector<SweepRow>> out(jobs);

  // Each job optimizes serially; the parallelism lives at the job level.
  OptimizerOptions opts = spec.optimizer;
  opts.execution = Execution::Serial;

  for_each_index(jobs, exec, [&](std::size_t j) {
    const double x = spec.axis[j / n_schemes];
    const Scheme scheme = spec.schemes[j % n_schemes];
    const SystemParams params = point_params(spec, x);

    SweepRow opt_row;
    opt_row.axis = x;
    opt_row.scheme = scheme;
    opt_row.optimized = true;
    SweepRow base_row = opt_row;
    base_row.optimized = false;

    if (!validate(params, scheme).empty()) {
      opt_row.status = base_row.status = RowStatus::Skipped;
    } else {
      try {
        const OptResult r = optimize(scheme, params, opts);
        opt_row.rates = r.best_rates;
        opt_row.converged = r.converged_count;
      } catch (const InfeasibleError&) {
        opt_row.status = RowStatus::Infeasible;
      }
      if (spec.include_baseline) {
        const BaselineResult b = baseline(scheme, params);
        base_row.rates = b.rates;
        base_row.clamped = b.clamped;
      }
    }
    if (spec.include_baseline) out[j].push_back(base_row);
    out[j].push_back(opt_row);
  });

  std::vector<SweepRow> rows;
  for (auto& group : out) {
    for (auto& row : group) rows.push_back(std::move(row));
  }
  return rows;
}

std::string format_csv(std::vector<SweepRow> rows) {
  std::stable_sort(rows.begin(), rows.end(), [](const SweepRow& a, const SweepRow& b) {
    if (a.axis != b.axis) return a.axis < b.axis;
    if (a.scheme != b.scheme) return a.scheme < b.scheme;
    return a.optimized < b.optimized;
  });
  std::ostringstream os;
  os << kCsvHeader << '\n';
  for (const SweepRow& row : rows) {
    os << format_number(row.axis) << ',' << to_string(row.scheme) << ','
       << (row.optimized ? "true" : "false") << ',' << (row.clamped ? "true" : "false");
    const RateBreakdown& r = row.rates;
    const PowerAllocation& a = r.alloc;
    const double numbers[] = {r.c_d,      r.c_u,      r.c_ic,      r.c_s,
                              r.c_bh_d,   r.c_bh_u,   a.p_d,       a.p_u,
                              a.p_bh_d,   a.p_bh_u,   a.p_u_d2d,   a.eta};
    for (double v : numbers) {
      os << ',' << (row.status == RowStatus::Ok ? format_number(v) : "nan");
    }
    switch (row.status) {
      case RowStatus::Ok:
        os << ',' << row.converged;
        break;
      case RowStatus::Skipped:
        os << ",skip";
        break;
      case RowStatus::Infeasible:
        os << ",infeasible";
        break;
    }
    os << '\n';
  }
  return os.str();
}

void emit_csv(const std::vector<SweepRow>& rows, const std::string& path) {
  if (rows.empty()) throw std::invalid_argument("emit_csv: no rows");
  const std::string text = format_csv(rows);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  out << text;
  out.flush();
  if (!out) throw std::runtime_error("write to '" + path + "' failed");
}

}  // namespace selfbh
