#include "doctest.h"

#include "surfint/common.hpp"
#include "surfint/oracles.hpp"

using namespace surfint;

TEST_CASE("1D delta oracle matches the closed form") {
  for (double alpha : {2.0, 4.0, 0.7}) {
    const auto r = point_delta_1d(alpha);
    REQUIRE(r.eigenvalues.size() == 1);
    CHECK(std::abs(r.eigenvalues[0] - delta_1d_closed_form(alpha)) <= 1e-8);
  }
  CHECK(point_delta_1d(2.0).eigenvalues[0] == doctest::Approx(-1.0).epsilon(1e-8));
}

TEST_CASE("1D delta oracle tends to zero from below as alpha vanishes") {
  double prev = -1.0;
  for (double alpha : {0.4, 0.1, 0.02}) {
    const auto r = point_delta_1d(alpha);
    REQUIRE(r.eigenvalues.size() == 1);
    CHECK(r.eigenvalues[0] < 0.0);
    CHECK(r.eigenvalues[0] > prev);
    prev = r.eigenvalues[0];
  }
  CHECK(point_delta_1d(0.0).eigenvalues.empty());
  CHECK(point_delta_1d(-1.0).eigenvalues.empty());
}

TEST_CASE("1D delta prime oracle matches the closed form") {
  for (double beta : {2.0, 4.0, 1.3}) {
    const auto r = point_deltaprime_1d(beta);
    REQUIRE(r.eigenvalues.size() == 1);
    CHECK(std::abs(r.eigenvalues[0] - deltaprime_1d_closed_form(beta)) <= 1e-8);
  }
  CHECK(point_deltaprime_1d(0.0).eigenvalues.empty());
}

TEST_CASE("1D models are degenerate at the borderline coupling") {
  const double alpha = 2.0;
  const auto d = point_delta_1d(alpha);
  const auto p = point_deltaprime_1d(4.0 / alpha);
  CHECK(std::abs(d.eigenvalues[0] - p.eigenvalues[0]) <= 2e-8);
  CHECK(d.eigenvalues[0] == doctest::Approx(-1.0).epsilon(1e-8));
}

TEST_CASE("oracles are resolution convergent") {
  OracleOptions coarse, fine;
  coarse.step = 4e-3;
  fine.step = 2e-3;
  CHECK(std::abs(point_delta_1d(3.0, coarse).eigenvalues[0] - point_delta_1d(3.0, fine).eigenvalues[0]) < 1e-7);
  CHECK(std::abs(point_deltaprime_1d(1.5, coarse).eigenvalues[0] - point_deltaprime_1d(1.5, fine).eigenvalues[0]) <
        1e-7);
  const auto a = circle_delta_radial(1.0, 5.0, 2, coarse);
  const auto b = circle_delta_radial(1.0, 5.0, 2, fine);
  for (std::size_t m = 0; m < a.modes.size(); ++m) {
    REQUIRE(a.modes[m].eigenvalues.size() == b.modes[m].eigenvalues.size());
    for (std::size_t i = 0; i < a.modes[m].eigenvalues.size(); ++i) {
      CHECK(std::abs(a.modes[m].eigenvalues[i] - b.modes[m].eigenvalues[i]) < 1e-7);
    }
  }
}

TEST_CASE("radial delta oracle") {
  const double alpha = 5.0;
  const auto s = circle_delta_radial(1.0, alpha, 6);
  REQUIRE_FALSE(s.modes[0].eigenvalues.empty());
  for (std::size_t m = 1; m < s.modes.size(); ++m) {
    CHECK(s.modes[m].eigenvalues.size() <= s.modes[m - 1].eigenvalues.size());
  }
  for (double v : s.with_multiplicity()) {
    CHECK(v < 0.0);
    CHECK(v > -alpha * alpha / 4 - 0.5);
  }
  CHECK_THROWS_AS(circle_delta_radial(1.0, 0.0, 2), DomainError);
  CHECK_THROWS_AS(circle_delta_radial(-1.0, 1.0, 2), DomainError);
}

TEST_CASE("radial delta oracle approaches the straight line limit") {
  const double alpha = 2.0;
  double prev_gap = 1e9;
  for (double R : {10.0, 20.0, 40.0}) {
    const double gap = std::abs(circle_delta_radial(R, alpha, 0).modes[0].eigenvalues[0] + alpha * alpha / 4);
    CHECK(gap < prev_gap);
    prev_gap = gap;
  }
  CHECK(prev_gap < 0.01);
}

TEST_CASE("radial oracles agree with Bessel matching") {
  const double R = 1.0, alpha = 5.0, beta = 0.8;
  const auto fd = circle_delta_radial(R, alpha, 4);
  const auto bs = circle_delta_bessel(R, alpha, 4);
  const auto fdp = circle_deltaprime_radial(R, beta, 4);
  const auto bsp = circle_deltaprime_bessel(R, beta, 4);
  for (std::size_t m = 0; m <= 4; ++m) {
    CAPTURE(m);
    REQUIRE(fd.modes[m].eigenvalues.size() == bs.modes[m].eigenvalues.size());
    REQUIRE(fdp.modes[m].eigenvalues.size() == bsp.modes[m].eigenvalues.size());
    for (std::size_t i = 0; i < fd.modes[m].eigenvalues.size(); ++i) {
      CHECK(std::abs(fd.modes[m].eigenvalues[i] - bs.modes[m].eigenvalues[i]) < 1e-7);
    }
    for (std::size_t i = 0; i < fdp.modes[m].eigenvalues.size(); ++i) {
      CHECK(std::abs(fdp.modes[m].eigenvalues[i] - bsp.modes[m].eigenvalues[i]) < 1e-7);
    }
  }
}

TEST_CASE("radial delta prime lies below the paired delta") {
  const double R = 1.0, alpha = 5.0;
  const auto d = circle_delta_radial(R, alpha, 5).with_multiplicity();
  const auto p = circle_deltaprime_radial(R, 4.0 / alpha, 5).with_multiplicity();
  REQUIRE(p.size() >= d.size());
  for (std::size_t i = 0; i < d.size(); ++i) CHECK(p[i] <= d[i] + 1e-9);
  CHECK_THROWS_AS(circle_deltaprime_radial(1.0, 0.0, 1), DomainError);
  CHECK_THROWS_AS(circle_deltaprime_radial(1.0, -2.0, 1), DomainError);
}
