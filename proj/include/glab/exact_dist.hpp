#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "glab/errors.hpp"
#include "glab/graph.hpp"
#include "glab/spin_system.hpp"

namespace glab {

using Config = std::vector<std::uint8_t>;  // spins aligned with a scope

// Boundary condition: spins[i] pins vertices[i].  Vertices are global ids.
struct Pinning {
  std::vector<int> vertices;
  Config spins;

  bool empty() const { return vertices.empty(); }
  static Pinning single(int v, int spin) { return {{v}, {std::uint8_t(spin)}}; }
};

// Exact finite distribution over feasible configurations on a vertex scope.
// Built by full enumeration; conditioning produces the renormalized
// restriction on the remaining vertices.
class ExactDistribution {
 public:
  static ExactDistribution enumerate(const SpinSystem& s, const Graph& g,
                                     std::int64_t state_cap = 20000000);

  ExactDistribution condition(const Pinning& p) const;

  int q() const { return q_; }
  int num_vertices() const { return int(scope_.size()); }
  const std::vector<int>& scope() const { return scope_; }
  const std::vector<Config>& support() const { return support_; }
  const Eigen::VectorXd& probs() const { return probs_; }
  const std::vector<double>& weights() const { return weights_; }
  double z() const { return z_; }

  int scope_index(int vertex) const;  // -1 if not in scope
  // Feasible spins of scope position i (from the support, not from A).
  std::vector<int> feasible_spins(int pos) const;
  Eigen::VectorXd marginal(int pos) const;  // length q
  int find_config(const Config& c) const;   // support index or -1

  std::string config_string(int support_index) const;

 private:
  int q_ = 2;
  std::vector<int> scope_;
  std::vector<Config> support_;
  std::vector<double> weights_;
  Eigen::VectorXd probs_;
  double z_ = 0;

  friend ExactDistribution make_distribution(int q, std::vector<int> scope,
                                             std::vector<Config> support,
                                             std::vector<double> weights);
};

// Assembles a distribution from explicit weights (used by conditioning,
// tests, and the matching module).
ExactDistribution make_distribution(int q, std::vector<int> scope, std::vector<Config> support,
                                    std::vector<double> weights);

// Functionals; f is indexed by support order.  Natural logarithm, 0 log 0 = 0.
double expectation(const ExactDistribution& d, const Eigen::VectorXd& f);
double entropy(const ExactDistribution& d, const Eigen::VectorXd& f);
double variance(const ExactDistribution& d, const Eigen::VectorXd& f);
// KL(nu || mu) where nu is a distribution over the same support.
double kl_divergence(const Eigen::VectorXd& nu, const ExactDistribution& d);

// mu[Ent_U(f)] and mu[Var_U(f)] for U given as scope positions.
double expected_conditional_entropy(const ExactDistribution& d, const std::vector<int>& u_pos,
                                    const Eigen::VectorXd& f);
double expected_conditional_variance(const ExactDistribution& d, const std::vector<int>& u_pos,
                                     const Eigen::VectorXd& f);
// Ent[mu_U(f)] companion of the decomposition Ent = mu[Ent_U] + Ent[mu_U].
double entropy_of_conditional_means(const ExactDistribution& d, const std::vector<int>& u_pos,
                                    const Eigen::VectorXd& f);

// Pairwise influence matrix over (vertex, feasible spin) pairs.
struct InfluenceMatrix {
  std::vector<std::pair<int, int>> index;  // (global vertex, spin)
  Eigen::MatrixXd psi;
  double lambda1;   // largest eigenvalue (real part)
  double max_imag;  // largest |Im| across the spectrum
};
InfluenceMatrix influence_matrix(const ExactDistribution& d);
InfluenceMatrix influence_matrix(const ExactDistribution& d, const Pinning& p);

// TV-variant influence (FGYZ): vertex-by-vertex matrix of worst-case total
// variation shifts.
Eigen::MatrixXd influence_matrix_tv(const ExactDistribution& d);

// Signed single-spin influence matrix for 2-spin systems (ALO20 form); its
// nonzero spectrum matches the pairwise matrix.
Eigen::MatrixXd signed_influence_2spin(const ExactDistribution& d);

struct SweepOptions {
  std::int64_t max_pinnings = 1000000;
};

// Visits every pinning (Lambda, tau) with Lambda a proper subset of the scope
// (including the empty pinning) and feasible tau; the callback receives the
// conditioned distribution.
void for_each_pinning(const ExactDistribution& d,
                      const std::function<void(const Pinning&, const ExactDistribution&)>& fn,
                      const SweepOptions& opts = {});

// eta: max over pinnings with >= 2 free vertices of lambda_1(Psi).
double spectral_independence(const ExactDistribution& d, const SweepOptions& opts = {});
// b: min conditional marginal of a feasible spin over all pinnings.
double marginal_bound(const ExactDistribution& d, const SweepOptions& opts = {});
// Hamming-graph connectivity of every conditional support.
bool totally_connected(const ExactDistribution& d, const SweepOptions& opts = {});
// Largest |Im| of any influence eigenvalue across the full pinning sweep.
double max_influence_imag(const ExactDistribution& d, const SweepOptions& opts = {});

std::string distribution_to_json(const ExactDistribution& d);
std::string matrix_to_csv(const Eigen::MatrixXd& m);

}  // namespace glab
