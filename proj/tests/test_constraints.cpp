#include <doctest.h>

#include <cmath>

#include "selfbh/constraints.hpp"

using namespace selfbh;

namespace {

std::vector<std::string_view> labels(const ConstraintReport& r) {
  std::vector<std::string_view> out;
  for (const auto& c : r.values) out.push_back(label(c.id));
  return out;
}

}  // namespace

TEST_SUITE("constraints") {
  TEST_CASE("AN budget in sum form") {
    PowerAllocation a;
    a.p_d = 600.0;
    a.p_bh_u = 401.0;
    for (Scheme s : {Scheme::FullDuplex, Scheme::HalfDuplex}) {
      const ConstraintReport r = constraints(s, SystemParams::reference(), a);
      REQUIRE(r.find(ConstraintId::PwrAn) != nullptr);
      CHECK(r.find(ConstraintId::PwrAn)->value == doctest::Approx(1.0).epsilon(1e-12));
      CHECK_FALSE(r.feasible);
    }
  }

  TEST_CASE("AN budget in max form for the hybrid relay") {
    PowerAllocation a;
    a.p_d = 900.0;
    a.p_bh_u = 950.0;
    const ConstraintReport r = constraints(Scheme::HybridRelay, SystemParams::reference(), a);
    CHECK(r.find(ConstraintId::PwrAn)->value == doctest::Approx(-50.0).epsilon(1e-12));
  }

  TEST_CASE("HD UL backhaul violation matches high-precision value") {
    PowerAllocation a;
    a.p_d = 500.0;
    a.p_bh_u = 500.0;
    a.p_u = 316.2278;
    a.p_bh_d = 10000.0;
    a.eta = 0.5;
    const ConstraintReport r = constraints(Scheme::HalfDuplex, SystemParams::reference(), a);
    CHECK(r.find(ConstraintId::BhUl)->value ==
          doctest::Approx(37.881819043648464).epsilon(1e-11));
    const RateBreakdown q = rates(Scheme::HalfDuplex, SystemParams::reference(), a);
    CHECK(q.c_u == doctest::Approx(89.560782774854444).epsilon(1e-12));
    CHECK(q.c_bh_u == doctest::Approx(51.67896373120598).epsilon(1e-12));
  }

  TEST_CASE("zero powers are feasible") {
    SystemParams p = SystemParams::reference();
    p.k_d2d = 1;
    for (Scheme s : kAllSchemes) {
      for (double eta : {0.0, 0.5, 1.0}) {
        PowerAllocation a;
        a.eta = eta;
        const ConstraintReport r = constraints(s, p, a);
        CHECK(r.feasible);
        CHECK(r.max_violation == 0.0);
      }
    }
  }

  TEST_CASE("labels per scheme and configuration") {
    const SystemParams p = SystemParams::reference();
    const PowerAllocation a;
    using V = std::vector<std::string_view>;
    CHECK(labels(constraints(Scheme::FullDuplex, p, a)) ==
          V{"bh_dl", "bh_ul", "pwr_an", "pwr_ue_ul", "pwr_bn", "rho_lo", "rho_hi"});
    CHECK(labels(constraints(Scheme::HalfDuplex, p, a)) ==
          V{"bh_dl", "bh_ul", "pwr_an", "pwr_ue_ul", "pwr_bn", "rho_lo", "rho_hi", "eta_lo",
            "eta_hi"});

    SystemParams d2d = p;
    d2d.k_d2d = 2;
    CHECK(constraints(Scheme::HybridRelay, d2d, a).find(ConstraintId::PwrUeD2d) != nullptr);

    SystemParams all_intra = p;
    all_intra.k_an = 10;
    const ConstraintReport r = constraints(Scheme::HybridRelay, all_intra, a);
    CHECK(r.find(ConstraintId::RhoLo) == nullptr);
    CHECK(r.find(ConstraintId::RhoHi) == nullptr);
  }

  TEST_CASE("more BN power never raises the DL backhaul constraint") {
    for (Scheme s : kAllSchemes) {
      PowerAllocation a;
      a.p_d = 300.0;
      a.p_bh_u = 300.0;
      a.p_u = 100.0;
      double previous = INFINITY;
      for (double p_bd : {0.0, 1.0, 100.0, 1e4}) {
        a.p_bh_d = p_bd;
        const double g = constraints(s, SystemParams::reference(), a)
                             .find(ConstraintId::BhDl)
                             ->value;
        CHECK(g <= previous);
        previous = g;
      }
    }
  }

  TEST_CASE("tolerance decides feasibility") {
    PowerAllocation a;
    a.p_bh_u = 1000.0 + 5e-7;
    const SystemParams p = SystemParams::reference();
    CHECK(constraints(Scheme::FullDuplex, p, a, 1e-6).feasible);
    CHECK_FALSE(constraints(Scheme::FullDuplex, p, a, 1e-7).feasible);
  }

  TEST_CASE("report is deterministic") {
    PowerAllocation a;
    a.p_d = 123.0;
    a.p_u = 45.0;
    const auto r1 = constraints(Scheme::FullDuplex, SystemParams::reference(), a);
    const auto r2 = constraints(Scheme::FullDuplex, SystemParams::reference(), a);
    REQUIRE(r1.values.size() == r2.values.size());
    for (std::size_t i = 0; i < r1.values.size(); ++i) {
      CHECK(r1.values[i].id == r2.values[i].id);
      CHECK(r1.values[i].value == r2.values[i].value);
    }
  }

  TEST_CASE("evaluator agrees with the report") {
    SystemParams p = SystemParams::reference();
    p.k_an = 2;
    p.k_d2d = 1;
    PowerAllocation a;
    a.p_d = 200.0;
    a.p_u = 50.0;
    a.p_bh_d = 30.0;
    a.p_bh_u = 7.0;
    a.p_u_d2d = 3.0;
    a.eta = 0.4;
    for (Scheme s : kAllSchemes) {
      const RateModel model(s, p);
      const ConstraintSet set(model);
      std::vector<double> g(set.size());
      set.evaluate(a, model.terms(a), g);
      const ConstraintReport r = set.report(a, 1e-6);
      for (std::size_t i = 0; i < g.size(); ++i) CHECK(g[i] == r.values[i].value);
    }
  }
}
