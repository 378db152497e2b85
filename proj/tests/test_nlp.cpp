#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "selfbh/nlp.hpp"

using namespace selfbh;

namespace {

// min (x-2)^2 + (y-1)^2  s.t.  x + y <= 1, x*x - y <= 3; optimum (1, 0).
nlp::Problem disc_problem() {
  nlp::Problem p;
  p.lower = {-5.0, -5.0};
  p.upper = {5.0, 5.0};
  p.num_constraints = 2;
  p.evaluate = [](std::span<const double> x, std::span<double> g) {
    g[0] = x[0] + x[1] - 1.0;
    g[1] = x[0] * x[0] - x[1] - 3.0;
    return (x[0] - 2.0) * (x[0] - 2.0) + (x[1] - 1.0) * (x[1] - 1.0);
  };
  return p;
}

}  // namespace

TEST_SUITE("nlp") {
  TEST_CASE("active linear constraint, both inner methods") {
    for (auto inner : {nlp::InnerMethod::QuasiNewton, nlp::InnerMethod::NelderMead}) {
      nlp::Options opt;
      opt.inner = inner;
      const std::vector<double> start{-4.0, 4.0};
      const nlp::Result r = nlp::minimize(disc_problem(), start, opt);
      CHECK(r.converged);
      CHECK(r.x[0] == doctest::Approx(1.0).epsilon(1e-4));
      CHECK(r.x[1] == doctest::Approx(0.0).scale(1.0).epsilon(1e-4));
      CHECK(r.objective == doctest::Approx(2.0).epsilon(1e-5));
      CHECK(r.max_violation <= 1e-6);
    }
  }

  TEST_CASE("box bound active, no constraints") {
    nlp::Problem p;
    p.lower = {0.0};
    p.upper = {3.0};
    p.evaluate = [](std::span<const double> x, std::span<double>) { return -x[0]; };
    const nlp::Result r = nlp::minimize(p, std::vector<double>{0.5});
    CHECK(r.x[0] == 3.0);
    CHECK(r.converged);
  }

  TEST_CASE("start outside the box is projected") {
    nlp::Problem p;
    p.lower = {0.0, 0.0};
    p.upper = {1.0, 1.0};
    p.evaluate = [](std::span<const double> x, std::span<double>) {
      return (x[0] - 0.25) * (x[0] - 0.25) + (x[1] - 0.75) * (x[1] - 0.75);
    };
    const nlp::Result r = nlp::minimize(p, std::vector<double>{7.0, -3.0});
    CHECK(r.x[0] == doctest::Approx(0.25).epsilon(1e-5));
    CHECK(r.x[1] == doctest::Approx(0.75).epsilon(1e-5));
  }

  TEST_CASE("deterministic for a fixed start") {
    const std::vector<double> start{0.3, -2.0};
    const nlp::Result a = nlp::minimize(disc_problem(), start);
    const nlp::Result b = nlp::minimize(disc_problem(), start);
    CHECK(a.x == b.x);
    CHECK(a.objective == b.objective);
  }

  TEST_CASE("dimension mismatch") {
    CHECK_THROWS_AS(nlp::minimize(disc_problem(), std::vector<double>{1.0}),
                    std::invalid_argument);
  }
}
