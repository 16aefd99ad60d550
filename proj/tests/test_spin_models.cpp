#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "glab/exact_dist.hpp"
#include "glab/spin_system.hpp"

using namespace glab;

TEST_CASE("named model constructors") {
  auto hc = hardcore(1.0);
  CHECK(hc.interaction(0, 0) == 1.0);
  CHECK(hc.interaction(0, 1) == 1.0);
  CHECK(hc.interaction(1, 1) == 0.0);
  CHECK(hc.field(0) == 1.0);
  CHECK(hc.field(1) == 1.0);
  CHECK_FALSE(hc.soft());
  CHECK(hc.hard_pairs() == std::vector<std::pair<int, int>>{{1, 1}});

  auto c3 = colorings(3);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) CHECK(c3.interaction(i, j) == (i == j ? 0.0 : 1.0));
  CHECK(c3.field == Eigen::VectorXd::Ones(3));

  auto is = ising(0.5, 1.0);
  CHECK(is.interaction(0, 0) == 0.5);
  CHECK(is.interaction(1, 1) == 0.5);
  CHECK(is.interaction(0, 1) == 1.0);
  CHECK(is.soft());

  CHECK_THROWS_AS(hardcore(0.0), error);
  CHECK_THROWS_AS(ising(0.0, 1.0), error);
  CHECK_THROWS_AS(colorings(1), error);
}

TEST_CASE("two-spin conversion is exact") {
  TwoSpinParams p{0.25, 0.75, 2.0};
  CHECK(p.antiferromagnetic());
  auto s = p.to_system();
  CHECK(s.interaction(0, 0) == 0.25);
  CHECK(s.interaction(1, 1) == 0.75);
  CHECK(s.field(0) == 2.0);
  CHECK(s.field(1) == 1.0);
}

TEST_CASE("critical thresholds in rational arithmetic") {
  CHECK(critical_fugacity(3) == Rational(4, 1));
  CHECK(critical_fugacity(4) == Rational(27, 16));
  CHECK(critical_fugacity(5) == Rational(256, 243));
  CHECK_THROWS_AS(critical_fugacity(2), error);

  CHECK(ising_critical(3) == std::pair(Rational(1, 3), Rational(3, 1)));
  CHECK(ising_critical(4) == std::pair(Rational(1, 2), Rational(2, 1)));
  CHECK(ising_critical(6) == std::pair(Rational(2, 3), Rational(3, 2)));
  CHECK_THROWS_AS(ising_critical(2), error);

  // lambda_c decreases with Delta lambda_c(Delta) -> e from above; beta_c
  // increases toward 1.
  double prev = critical_fugacity(3).value();
  double prev_scaled = 3 * prev;
  for (int d = 4; d <= 14; ++d) {
    double cur = critical_fugacity(d).value();
    CHECK(cur < prev);
    CHECK(d * cur > std::exp(1.0));
    CHECK(d * cur < prev_scaled);
    prev = cur;
    prev_scaled = d * cur;
  }
  double prev_b = ising_critical(3).first.value();
  for (int d = 4; d <= 20; ++d) {
    double cur = ising_critical(d).first.value();
    CHECK(cur > prev_b);
    CHECK(cur < 1.0);
    prev_b = cur;
  }
}

TEST_CASE("uniqueness gap of the tree recursion") {
  // Hard-core at lambda = lambda_c(3): fixed point R = 1 solves R(R+1)^2 = 4,
  // where |f_2'(1)| = 2 lambda / (1+1)^3 = 1.
  auto at_critical = uniqueness_gap(TwoSpinParams::hardcore(4.0), 3);
  CHECK(at_critical.fixed_points[1] == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(at_critical.derivative_magnitudes[1] == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(std::abs(at_critical.gap) < 1e-9);

  CHECK(uniqueness_gap(TwoSpinParams::hardcore(1.0), 3).gap > 0.0);
  CHECK(uniqueness_gap(TwoSpinParams::hardcore(8.0), 3).gap < 0.0);

  // Fixed-point residual sanity at 1e-12.
  for (double lam : {0.3, 1.0, 2.5}) {
    auto rep = uniqueness_gap(TwoSpinParams::hardcore(lam), 5);
    for (int d = 1; d < 5; ++d) {
      double r = rep.fixed_points[d - 1];
      CHECK(std::abs(two_spin_recursion(TwoSpinParams::hardcore(lam), d, r) - r) <= 1e-12);
    }
  }

  // Antiferromagnetic Ising at unit field: the fixed point is R* = 1 by
  // symmetry and |f_d'(1)| = d (1-beta)/(1+beta), so up-to-Delta uniqueness
  // flips exactly at beta_c(Delta) = (Delta-2)/Delta.
  for (int delta : {3, 4, 6}) {
    double bc = double(delta - 2) / delta;
    auto above = uniqueness_gap(TwoSpinParams{bc + 0.1, bc + 0.1, 1.0}, delta);
    auto below = uniqueness_gap(TwoSpinParams{bc - 0.1, bc - 0.1, 1.0}, delta);
    auto at = uniqueness_gap(TwoSpinParams{bc, bc, 1.0}, delta);
    CHECK(above.gap > 0.0);
    CHECK(below.gap < 0.0);
    CHECK(std::abs(at.gap) <= 1e-9);
    for (int d = 1; d < delta; ++d) {
      CHECK(at.fixed_points[d - 1] == doctest::Approx(1.0).epsilon(1e-10));
      CHECK(at.derivative_magnitudes[d - 1] ==
            doctest::Approx(d * (1 - bc) / (1 + bc)).epsilon(1e-10));
    }
  }

  CHECK_THROWS_AS(uniqueness_gap(TwoSpinParams{1.0, 1.5, 1.0}, 3), error);
}

TEST_CASE("dobrushin condition") {
  // K2 hard-core: R(u,v) = lambda/(1+lambda) exactly.
  auto k2 = Graph::build(2, {{0, 1}});
  auto rep = dobrushin_check(hardcore(0.1), k2);
  CHECK(rep.dependence(0, 1) == doctest::Approx(0.1 / 1.1).epsilon(1e-12));
  CHECK(rep.c == doctest::Approx(1.0 / 1.1).epsilon(1e-12));
  CHECK(rep.holds);

  // No edges: every dependence vanishes.
  auto empty = dobrushin_check(ising(2.0, 1.0), Graph::empty(3));
  CHECK(empty.dependence.norm() == 0.0);
  CHECK(empty.c == 1.0);

  // lambda <= 1/(2 Delta) gives c >= 1/2 (checked exactly on small graphs).
  for (const Graph& g : {Graph::path(4), Graph::cycle(5), Graph::star(4), Graph::complete(4)}) {
    double lam = 1.0 / (2.0 * g.max_degree());
    auto r = dobrushin_check(hardcore(lam), g);
    CHECK(r.holds);
    CHECK(r.c >= 0.5 - 1e-12);
  }
}

TEST_CASE("monomer-dimer equals matching enumeration") {
  // Cross-module: enumerate the line-graph hard-core system and compare with
  // direct matching enumeration, weight lambda^|M|.
  for (const Graph& g : {Graph::path(3), Graph::cycle(4), Graph::star(3)}) {
    double lambda = 0.7;
    auto md = monomer_dimer(g, lambda);
    auto dist = ExactDistribution::enumerate(md.system, md.line.graph);
    const int m = g.num_edges();
    double z = 0.0;
    int matchings = 0;
    for (int mask = 0; mask < (1 << m); ++mask) {
      bool ok = true;
      for (int i = 0; i < m && ok; ++i)
        for (int j = i + 1; j < m && ok; ++j)
          if ((mask >> i & 1) && (mask >> j & 1)) ok = !md.line.graph.adjacent(i, j);
      if (!ok) continue;
      ++matchings;
      z += std::pow(lambda, __builtin_popcount(mask));
    }
    CHECK(int(dist.support().size()) == matchings);
    CHECK(dist.z() == doctest::Approx(z).epsilon(1e-12));
  }
}
