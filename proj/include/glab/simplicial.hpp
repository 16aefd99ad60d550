#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <vector>

#include "glab/exact_dist.hpp"
#include "glab/optimize.hpp"
#include "glab/rng.hpp"

namespace glab {

// Face (U, tau): U as a bitmask over scope positions, spins listed for the
// set bits in ascending position order.
struct Face {
  std::uint32_t mask = 0;
  Config spins;
  bool operator==(const Face&) const = default;
};

// Pure weighted simplicial complex of a distribution: levels X(0)..X(n) of
// feasible partial configurations with pi_k(U, tau) = mu(sigma_U = tau) /
// C(n, k), plus the up/down operators between levels.
class SimplicialComplex {
 public:
  explicit SimplicialComplex(const ExactDistribution& d);

  int n() const { return n_; }
  int level_size(int k) const { return int(faces_[k].size()); }
  const std::vector<Face>& faces(int k) const { return faces_[k]; }
  const Eigen::VectorXd& pi(int k) const { return pi_[k]; }
  int face_index(int k, const Face& f) const;

  // Row-stochastic operators: up(k) is X(k) x X(k+1), down(k) is X(k) x X(k-1).
  const Eigen::MatrixXd& up(int k) const { return up_[k]; }
  const Eigen::MatrixXd& down(int k) const { return down_[k]; }
  Eigen::MatrixXd down_up(int s, int r) const;  // walk on X(s)
  Eigen::MatrixXd up_down(int r, int s) const;  // walk on X(r)

  // f^{(r)} = P_r^ ... P_{s-1}^ f^{(s)}.
  Eigen::VectorXd project_down(const Eigen::VectorXd& f_s, int s, int r) const;

  double level_entropy(int k, const Eigen::VectorXd& f_k) const;
  double level_variance(int k, const Eigen::VectorXd& f_k) const;
  double level_mean(int k, const Eigen::VectorXd& f_k) const;

  struct LocalWalk {
    std::vector<std::pair<int, int>> elements;  // (scope position, spin)
    Eigen::VectorXd pi1;                        // stationary pi_{tau,1}
    Eigen::MatrixXd transition;
    double lambda2;
  };
  // Local walk at faces_[k][idx]; requires k <= n-2.
  LocalWalk local_walk(int k, int idx) const;

  // zeta_k = max over tau in X(k) of lambda_2(P_tau), for k = 0..n-2.
  std::vector<double> local_expansion() const;

  // Measured b_k = min over tau in X(k), i in X_tau(1) of pi_{tau,1}(i),
  // for k = 0..n-1.
  std::vector<double> measured_marginal_bounds() const;

  // Restriction f_tau^{(j)} of a level-(k+j) function to the link of tau.
  Eigen::VectorXd link_restriction(int k, int idx, int j, const Eigen::VectorXd& f_kj) const;
  // pi_{tau,j} as a vector over the level-(k+j) faces containing tau
  // (returned along with their indices).
  std::vector<int> link_faces(int k, int idx, int j) const;

 private:
  int n_ = 0;
  int q_ = 2;
  std::vector<std::vector<Face>> faces_;
  std::vector<Eigen::VectorXd> pi_;
  std::vector<std::vector<std::pair<Face, int>>> index_;  // sorted per level
  std::vector<Eigen::MatrixXd> up_;
  std::vector<Eigen::MatrixXd> down_;
};

// alpha_k of the local-to-global theorem; negative measured zeta is clamped
// to zero in the first branch (contraction can only improve).
double local_contraction_alpha(double zeta, double b_k, double b_k1, int s, int k);

// Certificate of entropy contraction: per-level quantities and the derived
// rate kappa(r, s) plus the block factorization constant.
struct ComplexCertificate {
  int n = 0;
  int s = 0;
  std::vector<double> b_k;      // 0..s-1
  std::vector<double> zeta_k;   // 0..s-2
  std::vector<double> alpha_k;  // 0..s-2
  std::vector<double> gamma_k;  // 0..s-1

  double kappa(int r) const;            // order-(r, s) contraction rate
  double block_constant(int ell) const;  // C(ell) = (ell/n) / kappa(n-ell); s == n
};

ComplexCertificate certificate_from_levels(int n, int s, std::vector<double> b_k,
                                           std::vector<double> zeta_k);

// Closed-form side of the certificate: R = ceil(4 eta / b^2), the clamped
// alpha_k = max{1 - R/(n-k-1), 0} products, and the factorial-ratio lower
// bound on kappa.
struct HatCertificate {
  int n = 0;
  int radius = 0;  // R
  double b = 0;
  double eta = 0;
  std::vector<double> gamma_hat;  // 0..n-1

  double kappa_hat(int r) const;
  double kappa_product_lower(int ell) const;  // ell(ell-1)...(ell-R)/(n...(n-R))
  double block_constant_bound(double theta) const;  // (2/theta)^{4 eta/b^2 + 1}
};

struct CertificateReport {
  double b = 0;
  double eta = 0;
  std::optional<ComplexCertificate> measured;  // from measured zeta_k
  ComplexCertificate closed_form;              // b_k = b/(n-k), zeta_k = eta/(n-k-1)
  HatCertificate hat;
};

CertificateReport certificate(double b, double eta, int n, int s,
                              const std::vector<double>* measured_zeta = nullptr);

// Observed order-(r, s) entropy contraction: minimum ratio
// 1 - Ent_{pi_r}(f^{(r)}) / Ent_{pi_s}(f^{(s)}) over random functions plus an
// adversarial descent; any valid certificate kappa must lower-bound it.
struct ContractionReport {
  double min_ratio = 1.0;
  int random_trials = 0;
  int adversarial_restarts = 0;
};
ContractionReport measured_entropy_contraction(const SimplicialComplex& sc, int r, int s,
                                               int trials, CounterRng& rng,
                                               int adversarial_restarts = 20,
                                               int adversarial_iterations = 500);

// Exact spectral gap of the order-(s, r) down-up walk against the variance
// certificate alpha_k = (1 - zeta_k) / (1 + zeta_k), and the one-step product
// bound (1/s) prod (1 - zeta_k) for r = s - 1.
struct VarianceCertificateReport {
  double exact_gap = 0;
  double kappa_var = 0;
  double product_bound = 0;  // NaN unless r == s-1
};
VarianceCertificateReport variance_certificate(const SimplicialComplex& sc, int s, int r);

// Standard log-Sobolev constant of a reversible chain by ratio minimization;
// an upper estimate of the true infimum.
double log_sobolev_estimate(const Eigen::MatrixXd& transition, const Eigen::VectorXd& pi,
                            CounterRng& rng, int restarts = 20, int iterations = 500);

}  // namespace glab
