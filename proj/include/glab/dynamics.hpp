#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "glab/exact_dist.hpp"
#include "glab/rng.hpp"

namespace glab {

// Explicit transition matrix of a heat-bath chain on the support of an exact
// distribution.  Reversible with respect to pi by construction.
struct ChainMatrix {
  std::vector<Config> states;  // aligned with the distribution's support
  Eigen::MatrixXd transition;
  Eigen::VectorXd pi;

  int size() const { return int(states.size()); }
  double spectral_gap() const;  // 1 - lambda_2
  bool ergodic() const;         // transition graph connectivity
};

ChainMatrix glauber_matrix(const ExactDistribution& d);
ChainMatrix block_matrix(const ExactDistribution& d, int ell);

// Dirichlet form E_P(f, g).
double dirichlet_form(const ChainMatrix& c, const Eigen::VectorXd& f, const Eigen::VectorXd& g);

struct MixingReport {
  double epsilon = 0.25;
  std::vector<double> tv_by_t;  // d(t) = max_x TV(P^t(x,.), pi), t = 1, 2, ...
  int t_mix = 0;                // first t with d(t) <= epsilon
  double gap = 0;
};
MixingReport exact_mixing_time(const ChainMatrix& c, double epsilon, int state_cap = 4096);

// Worst-case relative entropy decay over distributions: upper estimate of the
// true rate alpha (minimum of 1 - KL(nu P || pi) / KL(nu || pi)).
double entropy_decay_estimate(const ChainMatrix& c, int trials, CounterRng& rng,
                              int restarts = 20, int iterations = 500);
// Modified log-Sobolev constant estimate: min E(f, log f) / Ent(f).
double mlsi_estimate(const ChainMatrix& c, int trials, CounterRng& rng, int restarts = 20,
                     int iterations = 500);
// Standard log-Sobolev constant estimate: min E(sqrt f, sqrt f) / Ent(f).
double lsi_estimate(const ChainMatrix& c, CounterRng& rng, int restarts = 20,
                    int iterations = 500);

// ceil((1/kappa)(log log 1/pi_min + log 1/(2 eps^2))): mixing bound from any
// valid entropy contraction rate.
long mixing_bound_from_kappa(double kappa, double pi_min, double epsilon);
// ceil(C1 n (log log 1/mu_min + log 1/(2 eps^2))): mixing bound from an
// approximate tensorization constant.
long mixing_bound_from_tensorization(double c1, int n, double mu_min, double epsilon);

// Single heat-bath update at a uniformly random coordinate.  The conditional
// is computed from the neighborhood only, so sampling never touches the
// enumerator.
void glauber_step(const SpinSystem& s, const Graph& g, Config& state, CounterRng& rng);

// T steps from `init`; returns the trajectory including the initial state.
std::vector<Config> run_chain(const SpinSystem& s, const Graph& g, Config init, int steps,
                              CounterRng& rng);

// Heat-bath conditional at v given the rest of `state` (length q, sums to 1).
Eigen::VectorXd local_conditional(const SpinSystem& s, const Graph& g, const Config& state,
                                  int v);

std::string trajectory_to_csv(const std::vector<Config>& traj);

}  // namespace glab
