// Command-line front end: optimize one configuration, run a sweep, or run
// the zero-forcing validation suite.
//
// Exit codes: 0 success, 1 configuration or usage error, 2 infeasible.

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>

#include "selfbh/constraints.hpp"
#include "selfbh/optimizer.hpp"
#include "selfbh/sweep.hpp"
#include "selfbh/zf_validator.hpp"

namespace {

using namespace selfbh;

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitInfeasible = 2;

void print_rates(const char* title, const RateBreakdown& r) {
  const PowerAllocation& a = r.alloc;
  std::printf("%s\n", title);
  std::printf("  c_s    %12.6f bits/s/Hz\n", r.c_s);
  std::printf("  c_d    %12.6f   c_u    %12.6f   c_ic   %12.6f\n", r.c_d, r.c_u, r.c_ic);
  std::printf("  c_bh_d %12.6f   c_bh_u %12.6f\n", r.c_bh_d, r.c_bh_u);
  std::printf("  p_d    %12.6g mW   p_u %12.6g mW   p_u_d2d %12.6g mW\n", a.p_d, a.p_u,
              a.p_u_d2d);
  std::printf("  p_bh_d %12.6g mW   p_bh_u %12.6g mW   eta %.6f\n", a.p_bh_d, a.p_bh_u, a.eta);
}

void print_report(const ConstraintReport& report) {
  std::printf("  constraints (<= 0):");
  for (const ConstraintValue& c : report.values) {
    std::printf(" %s=%.3g", std::string(label(c.id)).c_str(), c.value);
  }
  std::printf("\n  max violation %.3g (%s)\n", report.max_violation,
              report.feasible ? "feasible" : "infeasible");
}

int run_optimize(const std::string& scheme_tag, const std::string& config_path,
                 bool with_baseline, std::uint64_t seed, int starts) {
  const auto scheme = parse_scheme(scheme_tag);
  if (!scheme) throw ConfigError("unknown scheme '" + scheme_tag + "'");
  const SystemParams params = params_from_db(load_config_file(config_path));
  require_valid(params, *scheme);

  OptimizerOptions opts;
  opts.rng_seed = seed;
  opts.n_starts = starts;
  try {
    const OptResult r = optimize(*scheme, params, opts);
    std::printf("scheme %s: %d of %d starts converged, best start %d\n",
                std::string(to_string(*scheme)).c_str(), r.converged_count,
                static_cast<int>(r.starts.size()), r.best_start);
    print_rates("optimized", r.best_rates);
    print_report(r.best_report);
  } catch (const InfeasibleError& e) {
    std::fprintf(stderr, "infeasible: %s\n", e.what());
    return kExitInfeasible;
  }
  if (with_baseline) {
    const BaselineResult b = baseline(*scheme, params);
    print_rates(b.clamped ? "baseline (clamped)" : "baseline", b.rates);
    print_report(b.report);
  }
  return kExitOk;
}

int run_sweep_command(const std::string& spec_path, const std::string& out_path) {
  const SweepSpec spec = load_sweep_spec(spec_path);
  const std::vector<SweepRow> rows = run_sweep(spec);
  emit_csv(rows, out_path);
  int skipped = 0, infeasible = 0;
  for (const SweepRow& row : rows) {
    skipped += row.status == RowStatus::Skipped;
    infeasible += row.status == RowStatus::Infeasible;
  }
  std::printf("%s sweep: %zu rows written to %s (%d skipped, %d infeasible)\n",
              std::string(to_string(spec.kind)).c_str(), rows.size(), out_path.c_str(),
              skipped, infeasible);
  return kExitOk;
}

int run_validate(int trials, std::uint64_t seed, const std::string& out_path) {
  if (trials < 1000) throw ConfigError("--trials must be at least 1000");
  const std::vector<ValidationRow> rows = run_validation_suite(trials, seed);
  std::printf("%-28s %16s %16s %12s\n", "check", "empirical", "closed_form", "rel_error");
  for (const ValidationRow& r : rows) {
    std::printf("%-28s %16.9g %16.9g %12.3g\n", r.check.c_str(), r.empirical, r.closed_form,
                r.relative_error);
  }
  if (!out_path.empty()) {
    std::ofstream out(out_path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open '" + out_path + "' for writing");
    out << "check,empirical,closed_form,relative_error\n";
    char buf[160];
    for (const ValidationRow& r : rows) {
      std::snprintf(buf, sizeof buf, "%s,%.9g,%.9g,%.9g\n", r.check.c_str(), r.empirical,
                    r.closed_form, r.relative_error);
      out << buf;
    }
    if (!out) throw std::runtime_error("write to '" + out_path + "' failed");
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Self-backhauling full-duplex access node: rates, optimization, validation"};
  app.require_subcommand(1);

  std::string scheme, config, spec, out, zf_out;
  bool with_baseline = false;
  std::uint64_t seed = 42, zf_seed = 1;
  int starts = 50, trials = 10000;

  CLI::App* opt = app.add_subcommand("optimize", "Maximize the sum-rate for one configuration");
  opt->add_option("--scheme", scheme, "fd, hd or rl")->required();
  opt->add_option("--config", config, "key = value configuration file")->required();
  opt->add_flag("--baseline", with_baseline, "Also report the max-power baseline");
  opt->add_option("--seed", seed, "Multi-start seed")->capture_default_str();
  opt->add_option("--starts", starts, "Number of starts")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);

  CLI::App* sw = app.add_subcommand("sweep", "Run a parameter sweep and write CSV");
  sw->add_option("--spec", spec, "Sweep specification file")->required();
  sw->add_option("--out", out, "Output CSV path")->required();

  CLI::App* zf = app.add_subcommand("validate-zf", "Monte-Carlo check of the ZF model");
  zf->add_option("--trials", trials, "Draws per check (>= 1000)")->required();
  zf->add_option("--seed", zf_seed, "Random seed")->required();
  zf->add_option("--out", zf_out, "Optional CSV report");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (*opt) return run_optimize(scheme, config, with_baseline, seed, starts);
    if (*sw) return run_sweep_command(spec, out);
    return run_validate(trials, zf_seed, zf_out);
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "configuration error: %s\n", e.what());
    return kExitConfig;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "invalid input: %s\n", e.what());
    return kExitConfig;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitConfig;
  }
}
