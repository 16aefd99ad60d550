#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

#include "glab/dynamics.hpp"
#include "glab/exact_dist.hpp"
#include "glab/rng.hpp"

namespace glab {

enum class FactorizationKind { entropy, variance };

struct InequalityCheck {
  std::string name;
  double lhs = 0;
  double rhs = 0;
  bool holds = false;
};

struct FactorizationReport {
  FactorizationKind kind = FactorizationKind::entropy;
  int ell = 1;
  double measured = 0;  // sup-ratio estimate from the adversarial search (lower bound)
  std::optional<double> exact;      // variance kind: 1 / (n gap), the true constant
  std::optional<double> certified;  // theory upper bound when available
  Eigen::VectorXd witness;
  std::vector<InequalityCheck> chain;
};

// Approximate tensorization ratio sup_f Ent(f) / sum_v mu[Ent_v(f)] (or the
// variance analog).  For variance the exact optimum 1/(n gap) is also
// reported and used to seed the search.
FactorizationReport tensorization_ratio(const ExactDistribution& d, FactorizationKind kind,
                                        int trials, CounterRng& rng, int restarts = 20,
                                        int iterations = 500);

// ell-uniform block factorization ratio
// sup_f (ell/n) Ent(f) / ((1/C(n,ell)) sum_S mu[Ent_S(f)]).
FactorizationReport block_factorization_ratio(const ExactDistribution& d, int ell,
                                              FactorizationKind kind, int trials,
                                              CounterRng& rng, int restarts = 20,
                                              int iterations = 500);

// Denominators shared with the reports: sum over blocks of expected
// conditional entropy/variance.
double sum_conditional_entropy_blocks(const ExactDistribution& d, int ell,
                                      const Eigen::VectorXd& f);
double sum_conditional_variance_blocks(const ExactDistribution& d, int ell,
                                       const Eigen::VectorXd& f);

// Crude tensorization bound 3 |U|^2 log(1/b) / (2 b^{2|U|+2}) for the
// conditional distribution mu_U^xi, with the spectral-gap/conductance chain
// it is proved through.
struct CrudeBoundReport {
  int block_size = 0;
  double b = 0;             // global marginal bound
  double bound = 0;         // the closed-form constant
  double measured = 0;      // tensorization ratio estimate on mu_U^xi
  double gap = 0;           // exact Glauber gap of the conditional
  double gap_route_bound = 0;          // 3 log(1/b) / gap
  double conductance = -1;             // exact, when the support is small; else -1
  double conductance_lower = 0;        // 2 b^{k+1} / k
  double gap_lower = 0;                // 2 b^{2k+2} / k^2
  std::vector<InequalityCheck> chain;
};
CrudeBoundReport crude_bound(const ExactDistribution& d, const std::vector<int>& u_vertices,
                             const Pinning& xi, CounterRng& rng, int trials = 10);

// Tensorization constant from block factorization:
// C1 = 18 log(1/b) / b^4 * C for theta <= b^2 / (12 Delta), ell = ceil(theta n).
struct ComparisonReport {
  double theta = 0;
  int ell = 1;
  double b = 0;
  double block_constant_certified = 0;  // C from the simplicial certificate
  double c1_bound = 0;                  // 18 log(1/b)/b^4 * C
  double c1_measured = 0;
  bool degenerate_single_site = false;  // ell == 1
  std::optional<double> c1_closed_form;  // gated on the n threshold
  std::vector<InequalityCheck> chain;
};
ComparisonReport comparison_pipeline(const ExactDistribution& d, const Graph& g, double theta,
                                     int trials, CounterRng& rng);

// The closed-form constant 18 log(1/b)/b^4 (24 Delta / b^2)^{4 eta/b^2 + 1}
// and its validity threshold n >= (24 Delta / b^2)(4 eta / b^2 + 1).
double closed_form_c1(double b, double eta, int max_degree);
double closed_form_c1_threshold(double b, double eta, int max_degree);

std::string factorization_report_to_json(const FactorizationReport& rep);

}  // namespace glab
