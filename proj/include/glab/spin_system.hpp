#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <utility>
#include <vector>

#include "glab/errors.hpp"
#include "glab/graph.hpp"

namespace glab {

// q-spin system: symmetric nonnegative interaction matrix A and positive
// field vector h.  Hard constraints are exact zeros in A.
struct SpinSystem {
  int q = 2;
  Eigen::MatrixXd interaction;  // q x q
  Eigen::VectorXd field;        // q

  void validate() const;
  bool hard_pair(int i, int j) const { return interaction(i, j) == 0.0; }
  bool soft() const;
  std::vector<std::pair<int, int>> hard_pairs() const;
};

// Named models.  Spin 1 is "occupied" for the hard-core model.
SpinSystem hardcore(double lambda);
SpinSystem ising(double beta, double lambda);
SpinSystem colorings(int q);

struct MonomerDimer {
  SpinSystem system;  // hard-core system on the line graph; spin 1 = edge in matching
  LineGraph line;
};
MonomerDimer monomer_dimer(const Graph& g, double lambda);

// General 2-spin parameters (beta, gamma, lambda), convention beta <= gamma.
// Weight beta^{m_1} gamma^{m_0} lambda^{n_1}; spin 0 of the SpinSystem carries
// the field lambda and self-interaction beta.
struct TwoSpinParams {
  double beta = 0;
  double gamma = 1;
  double lambda = 1;

  bool antiferromagnetic() const { return beta * gamma < 1.0; }
  bool ferromagnetic() const { return beta * gamma > 1.0; }
  SpinSystem to_system() const;
  static TwoSpinParams hardcore(double lambda) { return {0.0, 1.0, lambda}; }
};

// Exact rational with overflow-checked arithmetic, for threshold formulas.
struct Rational {
  long long num = 0;
  long long den = 1;

  Rational() = default;
  Rational(long long n, long long d);
  double value() const { return double(num) / double(den); }
  bool operator==(const Rational& o) const { return num == o.num && den == o.den; }
};

// lambda_c(D) = (D-1)^{D-1} / (D-2)^D, the hard-core uniqueness threshold on
// the D-regular tree.
Rational critical_fugacity(int degree);

// Ising uniqueness window endpoints ((D-2)/D, D/(D-2)).
std::pair<Rational, Rational> ising_critical(int degree);

// Tree recursion f_d(R) = lambda ((beta R + 1) / (R + gamma))^d and the
// up-to-Delta uniqueness gap delta = 1 - max_d |f_d'(R*_d)|.
struct UniquenessReport {
  int delta_max;                            // Delta
  std::vector<double> fixed_points;         // R*_d for d = 1..Delta-1
  std::vector<double> derivative_magnitudes;
  double gap;                               // negative when non-unique
};
UniquenessReport uniqueness_gap(const TwoSpinParams& p, int degree_bound,
                                double tol = 1e-12, int max_iter = 200);

double two_spin_recursion(const TwoSpinParams& p, int d, double r);
double two_spin_recursion_derivative(const TwoSpinParams& p, int d, double r);

// Dobrushin dependence matrix R(u, v) (exact TV over single-site boundary
// discrepancies) and the condition max_v sum_u R(u,v) <= 1 - c.
struct DobrushinReport {
  Eigen::MatrixXd dependence;  // R(u, v)
  double c;                    // 1 - max column sum
  bool holds;                  // c > 0
};
DobrushinReport dobrushin_check(const SpinSystem& s, const Graph& g,
                                std::int64_t enumeration_cap = 20000000);

}  // namespace glab
