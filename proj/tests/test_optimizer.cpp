#include <doctest.h>

#include <algorithm>

#include "selfbh/optimizer.hpp"

using namespace selfbh;

namespace {

SystemParams with_si(double db) {
  SystemParams p = SystemParams::reference();
  p.alpha = loss_db_to_gain(db);
  return p;
}

OptimizerOptions serial_options(int starts = 50) {
  OptimizerOptions o;
  o.n_starts = starts;
  o.execution = Execution::Serial;
  return o;
}

}  // namespace

TEST_SUITE("optimizer") {
  TEST_CASE("HD optimum does not depend on SI cancellation") {
    SystemParams p = SystemParams::reference();
    p.alpha = 1e-6;
    const double a = optimize(Scheme::HalfDuplex, p, serial_options()).best_rates.c_s;
    p.alpha = 1e-12;
    const double b = optimize(Scheme::HalfDuplex, p, serial_options()).best_rates.c_s;
    CHECK(std::abs(a - b) <= 2e-9 * std::max(1.0, std::abs(a)));
  }

  TEST_CASE("HD beats FD with weak SI cancellation") {
    const SystemParams p = with_si(60.0);
    const double fd = optimize(Scheme::FullDuplex, p, serial_options()).best_rates.c_s;
    const double hd = optimize(Scheme::HalfDuplex, p, serial_options()).best_rates.c_s;
    CHECK(fd < hd);
  }

  TEST_CASE("FD beats RL and HD with strong SI cancellation") {
    const SystemParams p = with_si(130.0);
    const double fd = optimize(Scheme::FullDuplex, p, serial_options()).best_rates.c_s;
    const double hd = optimize(Scheme::HalfDuplex, p, serial_options()).best_rates.c_s;
    const double rl = optimize(Scheme::HybridRelay, p, serial_options()).best_rates.c_s;
    CHECK(fd > rl);
    CHECK(fd > hd);
  }

  TEST_CASE("result is feasible and the best feasible start") {
    SystemParams p = SystemParams::reference();
    p.k_d2d = 1;
    p.k_an = 1;
    for (Scheme s : kAllSchemes) {
      const OptResult r = optimize(s, p, serial_options(20));
      CHECK(r.best_report.feasible);
      CHECK(constraints(s, p, r.best_alloc).feasible);
      CHECK(r.best_rates.c_s == rates(s, p, r.best_alloc).c_s);
      REQUIRE(r.best_start >= 0);
      for (const StartSummary& st : r.starts) {
        if (st.feasible && st.converged) CHECK(st.objective <= r.best_rates.c_s);
      }
      if (s == Scheme::FullDuplex) CHECK(r.best_alloc.eta == 0.5);
    }
  }

  TEST_CASE("deterministic, and serial equals parallel") {
    SystemParams p = with_si(100.0);
    p.k_an = 2;
    for (Scheme s : kAllSchemes) {
      OptimizerOptions o = serial_options(12);
      const OptResult a = optimize(s, p, o);
      const OptResult b = optimize(s, p, o);
      o.execution = Execution::Parallel;
      const OptResult c = optimize(s, p, o);
      CHECK(a.best_alloc == b.best_alloc);
      CHECK(a.best_alloc == c.best_alloc);
      CHECK(a.best_rates.c_s == c.best_rates.c_s);
      CHECK(a.best_start == c.best_start);
      REQUIRE(a.starts.size() == c.starts.size());
      for (std::size_t i = 0; i < a.starts.size(); ++i) {
        CHECK(a.starts[i].objective == c.starts[i].objective);
      }
    }
  }

  TEST_CASE("different seeds still agree on the optimum") {
    const SystemParams p = with_si(110.0);
    OptimizerOptions o = serial_options();
    const double a = optimize(Scheme::HybridRelay, p, o).best_rates.c_s;
    o.rng_seed = 1234;
    const double b = optimize(Scheme::HybridRelay, p, o).best_rates.c_s;
    CHECK(a == doctest::Approx(b).epsilon(1e-4));
  }

  TEST_CASE("epigraph form matches direct min-form maximization") {
    struct Point {
      Scheme scheme;
      int k_an;
      double si_db;
    };
    for (const Point& pt : {Point{Scheme::FullDuplex, 1, 120.0}, Point{Scheme::HalfDuplex, 3, 120.0},
                            Point{Scheme::HybridRelay, 2, 100.0}}) {
      SystemParams p = with_si(pt.si_db);
      p.k_an = pt.k_an;
      p.m_bh_t = 2;
      p.m_bh_r = 4;
      OptimizerOptions o = serial_options(20);
      const double epi = optimize(pt.scheme, p, o).best_rates.c_s;
      o.epigraph_enabled = false;
      const double direct = optimize(pt.scheme, p, o).best_rates.c_s;
      CHECK(epi == doctest::Approx(direct).epsilon(1e-3));
    }
  }

  TEST_CASE("optimum is non-decreasing in SI cancellation for FD and RL") {
    for (Scheme s : {Scheme::FullDuplex, Scheme::HybridRelay}) {
      double previous = 0.0;
      for (double db : {70.0, 90.0, 110.0, 130.0}) {
        const double c = optimize(s, with_si(db), serial_options(20)).best_rates.c_s;
        CHECK(c >= previous * (1.0 - 1e-3));
        previous = c;
      }
    }
  }

  TEST_CASE("invalid parameters raise ConfigError") {
    SystemParams p = SystemParams::reference();
    p.n_r = 10;
    CHECK_THROWS_AS(optimize(Scheme::FullDuplex, p), ConfigError);
    CHECK_THROWS_AS(baseline(Scheme::FullDuplex, p), ConfigError);
  }

  TEST_CASE("no converged start raises InfeasibleError with every summary") {
    OptimizerOptions opts = serial_options(3);
    opts.max_iterations = 1;
    opts.feasibility_tol = 1e-300;
    try {
      optimize(Scheme::FullDuplex, SystemParams::reference(), opts);
      FAIL("expected InfeasibleError");
    } catch (const InfeasibleError& e) {
      CHECK(e.starts().size() == 3);
    }
  }
}

TEST_SUITE("baseline") {
  TEST_CASE("max-power allocation") {
    const SystemParams p = SystemParams::reference();
    const PowerAllocation fd = baseline_allocation(Scheme::FullDuplex, p);
    CHECK(fd.p_d == 500.0);
    CHECK(fd.p_bh_u == 500.0);
    CHECK(fd.p_u == p.p_ue_max);
    CHECK(fd.p_bh_d == p.p_bh_d_max);
    CHECK(fd.eta == 0.5);
    const PowerAllocation rl = baseline_allocation(Scheme::HybridRelay, p);
    CHECK(rl.p_d == 1000.0);
    CHECK(rl.p_bh_u == 1000.0);
  }

  TEST_CASE("FD baseline delivers almost nothing") {
    const SystemParams p = SystemParams::reference();
    const BaselineResult b = baseline(Scheme::FullDuplex, p);
    const double opt = optimize(Scheme::FullDuplex, p, serial_options()).best_rates.c_s;
    CHECK(b.clamped);
    CHECK(b.rates.c_s < 0.05 * opt);
  }

  TEST_CASE("clamped rates respect backhaul capacity and the ratio window") {
    SystemParams p = SystemParams::reference();
    for (int k_an : {0, 3}) {
      p.k_an = k_an;
      for (Scheme s : kAllSchemes) {
        const BaselineResult b = baseline(s, p);
        CHECK(b.rates.c_d <= b.raw.c_bh_d);
        CHECK(b.rates.c_u <= b.raw.c_bh_u);
        CHECK(b.rates.c_u <= p.rho_max * b.rates.c_d * (1 + 1e-12));
        CHECK(b.rates.c_u >= p.rho_min * b.rates.c_d * (1 - 1e-12));
        CHECK(b.rates.c_ic <= b.raw.c_ic);
        CHECK(b.rates.c_s == b.rates.c_d + b.rates.c_u + b.rates.c_ic);
      }
    }
  }

  TEST_CASE("optimized dominates the clamped baseline") {
    for (int k_an : {0, 2, 5}) {
      for (double db : {80.0, 120.0}) {
        SystemParams p = with_si(db);
        p.k_an = k_an;
        p.m_bh_t = 2;
        p.m_bh_r = 4;
        for (Scheme s : kAllSchemes) {
          const double opt = optimize(s, p, serial_options(20)).best_rates.c_s;
          CHECK(opt >= baseline(s, p).rates.c_s - 1e-6);
        }
      }
    }
  }

  TEST_CASE("RL baseline versus vanishing SI") {
    // 50-digit reference: raw UL rate drops 5.52% between the two cases
    // because alpha * P_AN equals the noise floor at 120 dB.
    SystemParams p = SystemParams::reference();
    p.alpha = 1e-300;
    const BaselineResult b0 = baseline(Scheme::HybridRelay, p);
    p.alpha = 1e-12;
    const BaselineResult b1 = baseline(Scheme::HybridRelay, p);
    CHECK(b0.raw.c_u == doctest::Approx(90.593032487701011).epsilon(1e-12));
    CHECK(b1.raw.c_u == doctest::Approx(85.593057833135752).epsilon(1e-12));
    // Delivered UL rate is capped below both raw values, so it is unchanged.
    CHECK(std::abs(b0.rates.c_u - b1.rates.c_u) <= 1e-3 * b0.rates.c_u);
  }
}
