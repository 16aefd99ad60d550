#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <set>

#include "glab/exact_dist.hpp"
#include "glab/rng.hpp"

using namespace glab;

namespace {

Eigen::VectorXd random_positive(int n, CounterRng& rng) {
  Eigen::VectorXd f(n);
  for (int i = 0; i < n; ++i) f(i) = std::exp(rng.normal());
  return f;
}

Eigen::VectorXd random_distribution(int n, CounterRng& rng) {
  Eigen::VectorXd nu(n);
  for (int i = 0; i < n; ++i) nu(i) = -std::log(1.0 - rng.uniform());
  return nu / nu.sum();
}


}  // namespace

TEST_CASE("enumeration of small systems") {
  auto k2 = Graph::build(2, {{0, 1}});
  auto d = ExactDistribution::enumerate(hardcore(1.0), k2);
  CHECK(d.support().size() == 3);
  CHECK(d.z() == doctest::Approx(3.0));
  std::set<std::string> found;
  for (int i = 0; i < 3; ++i) {
    found.insert(d.config_string(i));
    CHECK(d.probs()(i) == doctest::Approx(1.0 / 3));
  }
  CHECK(found == std::set<std::string>{"00", "10", "01"});

  // Single vertex: occupied with probability lambda / (1 + lambda).
  auto one = ExactDistribution::enumerate(hardcore(2.5), Graph::empty(1));
  CHECK(one.marginal(0)(1) == doctest::Approx(2.5 / 3.5));

  // 3-colorings of K2: six configurations, uniform.
  auto col = ExactDistribution::enumerate(colorings(3), k2);
  CHECK(col.support().size() == 6);
  CHECK(col.probs().maxCoeff() == doctest::Approx(1.0 / 6));

  CHECK_THROWS_AS(ExactDistribution::enumerate(colorings(3), Graph::empty(20)), error);
}

TEST_CASE("conditioning") {
  auto k2 = Graph::build(2, {{0, 1}});
  auto d = ExactDistribution::enumerate(hardcore(1.0), k2);

  auto pinned = d.condition(Pinning::single(0, 1));
  CHECK(pinned.num_vertices() == 1);
  CHECK(pinned.marginal(0)(0) == doctest::Approx(1.0));

  CHECK(d.condition(Pinning{}).support().size() == 3);

  // P3 with the middle pinned unoccupied: endpoints independent fair coins.
  auto p3 = ExactDistribution::enumerate(hardcore(1.0), Graph::path(3));
  auto mid0 = p3.condition(Pinning::single(1, 0));
  CHECK(mid0.support().size() == 4);
  CHECK(mid0.marginal(0)(1) == doctest::Approx(0.5));
  CHECK(mid0.marginal(1)(1) == doctest::Approx(0.5));

  // Law of total probability across a pinning.
  auto m1 = p3.marginal(2);
  double recomposed = 0.0;
  for (int spin : p3.feasible_spins(1)) {
    auto c = p3.condition(Pinning::single(1, spin));
    recomposed += p3.marginal(1)(spin) * c.marginal(c.scope_index(2))(1);
  }
  CHECK(recomposed == doctest::Approx(m1(1)).epsilon(1e-12));

  CHECK_THROWS_AS(p3.condition(Pinning{{0, 1}, {1, 1}}), error);  // infeasible
}

TEST_CASE("entropy, variance, KL") {
  auto p3 = ExactDistribution::enumerate(hardcore(1.0), Graph::path(3));
  Eigen::VectorXd c = Eigen::VectorXd::Constant(p3.support().size(), 3.7);
  CHECK(entropy(p3, c) == doctest::Approx(0.0));
  CHECK(variance(p3, c) == doctest::Approx(0.0));
  CHECK(kl_divergence(p3.probs(), p3) == doctest::Approx(0.0));

  // Uniform on 3 states, f = (3, 0, 0): Ent = log 3.
  auto u3 = make_distribution(2, {0, 1, 2},
                              {Config{0, 0, 0}, Config{0, 0, 1}, Config{0, 1, 0}},
                              {1.0, 1.0, 1.0});
  Eigen::VectorXd f(3);
  f << 3, 0, 0;
  CHECK(entropy(u3, f) == doctest::Approx(std::log(3.0)).epsilon(1e-12));

  Eigen::VectorXd bad(3);
  bad << 1, -1, 0;
  CHECK_THROWS_AS(entropy(u3, bad), error);

  // Entropy decomposition Ent(f) = mu[Ent_S(f)] + Ent[mu_S(f)] for every S.
  CounterRng rng(3);
  for (int rep = 0; rep < 20; ++rep) {
    auto f2 = random_positive(int(p3.support().size()), rng);
    for (std::uint32_t mask = 0; mask < 8; ++mask) {
      std::vector<int> s;
      for (int i = 0; i < 3; ++i)
        if ((mask >> i) & 1) s.push_back(i);
      double lhs = entropy(p3, f2);
      double rhs = expected_conditional_entropy(p3, s, f2) +
                   entropy_of_conditional_means(p3, s, f2);
      CHECK(lhs == doctest::Approx(rhs).epsilon(1e-10));
    }
  }

  // Donsker-Varadhan: nu(f) - log mu(e^f) <= KL(nu || mu).
  for (int rep = 0; rep < 50; ++rep) {
    int m = int(p3.support().size());
    auto nu = random_distribution(m, rng);
    Eigen::VectorXd g(m);
    for (int i = 0; i < m; ++i) g(i) = rng.normal();
    double lhs = nu.dot(g) - std::log(p3.probs().dot(g.array().exp().matrix()));
    CHECK(lhs <= kl_divergence(nu, p3) + 1e-10);
  }

  // Ent-Var comparison: f <= c mu(f) pointwise gives Var/mu(f) <= 4 c^2 Ent.
  for (int rep = 0; rep < 50; ++rep) {
    auto f3 = random_positive(int(p3.support().size()), rng);
    double mean = expectation(p3, f3);
    double c_ratio = (f3 / mean).maxCoeff();
    CHECK(variance(p3, f3) / mean <= 4.0 * c_ratio * c_ratio * entropy(p3, f3) + 1e-10);
    CHECK(entropy(p3, f3) <= variance(p3, f3) / mean + 1e-10);
  }
}

TEST_CASE("product factorization over components, per boundary condition") {
  auto d = ExactDistribution::enumerate(hardcore(0.8), Graph::cycle(5));
  auto g = Graph::cycle(5);
  CounterRng rng(17);
  // Per-tau form: Ent_S^tau(f) <= sum_U mu_S^tau[Ent_U(f)] for every feasible
  // boundary condition tau on V-minus-S.
  for (int rep = 0; rep < 5; ++rep) {
    auto f = random_positive(int(d.support().size()), rng);
    for (std::uint32_t mask = 1; mask < 31; ++mask) {
      std::vector<int> s, comp;
      for (int i = 0; i < 5; ++i)
        if ((mask >> i) & 1) s.push_back(i);
        else comp.push_back(i);
      auto cs = components_within(g, s);
      std::set<Config> taus;
      for (const auto& cfg : d.support()) {
        Config tau;
        for (int v : comp) tau.push_back(cfg[v]);
        taus.insert(tau);
      }
      for (const auto& tau : taus) {
        auto cond = d.condition(Pinning{comp, tau});
        // Restrict f to the conditioned support (condition() preserves order).
        Eigen::VectorXd fr(cond.support().size());
        int at = 0;
        for (int i = 0; i < int(d.support().size()); ++i) {
          bool match = true;
          for (int j = 0; j < int(comp.size()) && match; ++j)
            match = d.support()[i][comp[j]] == tau[j];
          if (match) fr(at++) = f(i);
        }
        REQUIRE(at == int(cond.support().size()));
        double lhs = entropy(cond, fr);
        double rhs = 0;
        for (const auto& block : cs.blocks) {
          std::vector<int> pos;
          for (int v : block) pos.push_back(cond.scope_index(v));
          rhs += expected_conditional_entropy(cond, pos, fr);
        }
        CHECK(lhs <= rhs + 1e-10);
      }
    }
  }
  // Averaged form over the boundary.
  for (int rep = 0; rep < 10; ++rep) {
    auto f = random_positive(int(d.support().size()), rng);
    for (std::uint32_t mask = 1; mask < 31; ++mask) {
      std::vector<int> s;
      for (int i = 0; i < 5; ++i)
        if ((mask >> i) & 1) s.push_back(i);
      auto cs = components_within(g, s);
      double lhs = expected_conditional_entropy(d, s, f);  // mu[Ent_S(f)]
      double rhs = 0.0;
      for (const auto& block : cs.blocks) rhs += expected_conditional_entropy(d, block, f);
      CHECK(lhs <= rhs + 1e-10);
    }
  }
}

TEST_CASE("influence matrices") {
  auto k2 = Graph::build(2, {{0, 1}});
  auto d = ExactDistribution::enumerate(hardcore(1.0), k2);
  auto im = influence_matrix(d);
  CHECK(im.index.size() == 4);
  CHECK(im.lambda1 == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(im.max_imag <= 1e-10);

  // Product system: zero influence.
  auto prod = ExactDistribution::enumerate(ising(2.0, 1.5), Graph::empty(3));
  CHECK(influence_matrix(prod).psi.norm() == doctest::Approx(0.0));
  CHECK(influence_matrix(prod).lambda1 == doctest::Approx(0.0));

  // Monomer-dimer on P3 = hard-core on K2 after relabeling.
  auto md = monomer_dimer(Graph::path(3), 1.0);
  auto mdd = ExactDistribution::enumerate(md.system, md.line.graph);
  CHECK(influence_matrix(mdd).lambda1 == doctest::Approx(0.5).epsilon(1e-12));

  CHECK_THROWS_AS(influence_matrix(d, Pinning::single(0, 1)), error);

  // Signed 2-spin form shares the whole nonzero spectrum with the pairwise
  // matrix (as multisets), hence the same lambda_1.
  for (const Graph& g : {Graph::path(4), Graph::cycle(4)}) {
    for (double lam : {0.7, 1.5}) {
      auto dist = ExactDistribution::enumerate(hardcore(lam), g);
      auto full = influence_matrix(dist);
      Eigen::MatrixXd signed_m = signed_influence_2spin(dist);
      Eigen::EigenSolver<Eigen::MatrixXd> small(signed_m);
      Eigen::EigenSolver<Eigen::MatrixXd> big(full.psi);
      std::vector<double> nz_small, nz_big;
      for (int i = 0; i < small.eigenvalues().size(); ++i)
        if (std::abs(small.eigenvalues()(i)) > 1e-9)
          nz_small.push_back(small.eigenvalues()(i).real());
      for (int i = 0; i < big.eigenvalues().size(); ++i)
        if (std::abs(big.eigenvalues()(i)) > 1e-9)
          nz_big.push_back(big.eigenvalues()(i).real());
      std::sort(nz_small.begin(), nz_small.end());
      std::sort(nz_big.begin(), nz_big.end());
      REQUIRE(nz_small.size() == nz_big.size());
      for (size_t i = 0; i < nz_small.size(); ++i)
        CHECK(nz_small[i] == doctest::Approx(nz_big[i]).epsilon(1e-9));
      CHECK(full.lambda1 ==
            doctest::Approx(small.eigenvalues().real().maxCoeff()).epsilon(1e-10));
    }
  }
}

TEST_CASE("TV influence matrix") {
  auto k2 = Graph::build(2, {{0, 1}});
  auto d = ExactDistribution::enumerate(hardcore(1.0), k2);
  auto r = influence_matrix_tv(d);
  CHECK(r(0, 1) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(r(1, 0) == doctest::Approx(0.5).epsilon(1e-12));

  auto prod = ExactDistribution::enumerate(hardcore(1.0), Graph::empty(3));
  CHECK(influence_matrix_tv(prod).norm() == doctest::Approx(0.0));

  // Far endpoint influence is strictly weaker than the middle one on P3.
  auto p3 = ExactDistribution::enumerate(hardcore(1.0), Graph::path(3));
  auto rp = influence_matrix_tv(p3);
  CHECK(rp(0, 2) < rp(0, 1));
}

TEST_CASE("pinning sweeps: eta, marginal bound, total connectivity") {
  auto k2 = Graph::build(2, {{0, 1}});
  auto d = ExactDistribution::enumerate(hardcore(1.0), k2);
  CHECK(spectral_independence(d) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(marginal_bound(d) == doctest::Approx(1.0 / 3).epsilon(1e-12));
  CHECK(totally_connected(d));

  auto prod = ExactDistribution::enumerate(ising(3.0, 1.0), Graph::empty(3));
  CHECK(spectral_independence(prod) == doctest::Approx(0.0));

  auto single = ExactDistribution::enumerate(hardcore(0.5), Graph::empty(1));
  CHECK(marginal_bound(single) == doctest::Approx(0.5 / 1.5).epsilon(1e-12));

  auto col_empty = ExactDistribution::enumerate(colorings(3), Graph::empty(2));
  CHECK(marginal_bound(col_empty) == doctest::Approx(1.0 / 3).epsilon(1e-12));

  // Proper 2-colorings of K2 sit on a Hamming-disconnected pair.
  auto col2 = ExactDistribution::enumerate(colorings(2), k2);
  CHECK_FALSE(totally_connected(col2));

  // Hard-core is totally connected on small graphs.
  for (const Graph& g : {Graph::path(4), Graph::cycle(5), Graph::star(3)})
    CHECK(totally_connected(ExactDistribution::enumerate(hardcore(2.0), g)));

  // Monomer-dimer eta bound from the star K_{1,3} (Delta = 3, lambda = 1).
  auto md = monomer_dimer(Graph::star(3), 1.0);
  auto mdd = ExactDistribution::enumerate(md.system, md.line.graph);
  double eta = spectral_independence(mdd);
  CHECK(eta <= std::min(2.0 * 1 * 3, 2.0 * std::sqrt(4.0)) + 1e-12);

  SweepOptions tight;
  tight.max_pinnings = 2;
  CHECK_THROWS_AS(spectral_independence(d, tight), error);
}

TEST_CASE("influence eigenvalues stay real under pinnings") {
  for (const Graph& g : {Graph::path(4), Graph::cycle(4), Graph::star(3)}) {
    auto d = ExactDistribution::enumerate(hardcore(1.0), g);
    CHECK(max_influence_imag(d) <= 1e-8);
    auto di = ExactDistribution::enumerate(ising(0.5, 1.0), g);
    CHECK(max_influence_imag(di) <= 1e-8);
  }
  auto dc = ExactDistribution::enumerate(colorings(3), Graph::cycle(4));
  CHECK(max_influence_imag(dc) <= 1e-8);
}

TEST_CASE("json and csv export") {
  auto d = ExactDistribution::enumerate(hardcore(1.0), Graph::build(2, {{0, 1}}));
  auto js = distribution_to_json(d);
  CHECK(js.find("\"support\"") != std::string::npos);
  CHECK(js.find("\"10\"") != std::string::npos);
  auto csv = matrix_to_csv(influence_matrix(d).psi);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 4);
}
