#include "glab/simplicial.hpp"

#include <Eigen/Eigenvalues>
#include <bit>
#include <algorithm>
#include <cmath>
#include <limits>

namespace glab {

namespace {

double xlogx(double x) { return x > 0.0 ? x * std::log(x) : 0.0; }

bool face_less(const Face& a, const Face& b) {
  if (a.mask != b.mask) return a.mask < b.mask;
  return a.spins < b.spins;
}

// Spectral gap quantities of a reversible row-stochastic matrix via the
// diag(pi)^{1/2} similarity transform.
Eigen::VectorXd reversible_spectrum(const Eigen::MatrixXd& p, const Eigen::VectorXd& pi) {
  const int m = int(p.rows());
  Eigen::VectorXd sq = pi.array().sqrt();
  Eigen::MatrixXd sym(m, m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) sym(i, j) = sq(i) * p(i, j) / sq(j);
  sym = 0.5 * (sym + sym.transpose());  // strip asymmetric rounding noise
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sym);
  return es.eigenvalues();  // ascending
}

}  // namespace

SimplicialComplex::SimplicialComplex(const ExactDistribution& d) {
  n_ = d.num_vertices();
  q_ = d.q();
  require(n_ <= 20, errc::instance_too_large, "simplicial complex needs n <= 20");
  faces_.resize(n_ + 1);
  pi_.resize(n_ + 1);
  index_.resize(n_ + 1);

  // Accumulate mu(sigma_U = tau) for every subset U of every support config.
  const std::uint32_t full = (std::uint32_t(1) << n_) - 1;
  std::vector<std::vector<std::pair<Face, double>>> acc(n_ + 1);
  for (int idx = 0; idx < int(d.support().size()); ++idx) {
    const Config& c = d.support()[idx];
    const double p = d.probs()(idx);
    for (std::uint32_t mask = 0;; ++mask) {
      Face f;
      f.mask = mask;
      for (int v = 0; v < n_; ++v)
        if ((mask >> v) & 1) f.spins.push_back(c[v]);
      acc[std::popcount(mask)].push_back({std::move(f), p});
      if (mask == full) break;
    }
  }
  for (int k = 0; k <= n_; ++k) {
    auto& bucket = acc[k];
    std::sort(bucket.begin(), bucket.end(),
              [](const auto& a, const auto& b) { return face_less(a.first, b.first); });
    const double denom = double(binomial(n_, k));
    std::vector<double> mass;
    for (auto& [face, p] : bucket) {
      if (!faces_[k].empty() && faces_[k].back() == face) {
        mass.back() += p;
      } else {
        faces_[k].push_back(face);
        mass.push_back(p);
      }
    }
    pi_[k].resize(faces_[k].size());
    for (int i = 0; i < int(faces_[k].size()); ++i) {
      pi_[k](i) = mass[i] / denom;
      index_[k].push_back({faces_[k][i], i});
    }
    pi_[k] /= pi_[k].sum();  // absorb accumulation rounding
  }

  // Up and down operators.
  up_.resize(n_);
  down_.resize(n_ + 1);
  for (int k = 0; k < n_; ++k) {
    up_[k] = Eigen::MatrixXd::Zero(level_size(k), level_size(k + 1));
    down_[k + 1] = Eigen::MatrixXd::Zero(level_size(k + 1), level_size(k));
    for (int si = 0; si < level_size(k + 1); ++si) {
      const Face& sigma = faces_[k + 1][si];
      int pos = 0;
      for (int v = 0; v < n_; ++v) {
        if (!((sigma.mask >> v) & 1)) continue;
        Face tau;
        tau.mask = sigma.mask & ~(std::uint32_t(1) << v);
        tau.spins = sigma.spins;
        tau.spins.erase(tau.spins.begin() + pos);
        int ti = face_index(k, tau);
        up_[k](ti, si) = pi_[k + 1](si) / ((k + 1) * pi_[k](ti));
        down_[k + 1](si, ti) = 1.0 / (k + 1);
        ++pos;
      }
    }
  }
}

int SimplicialComplex::face_index(int k, const Face& f) const {
  const auto& idx = index_[k];
  auto it = std::lower_bound(idx.begin(), idx.end(), f, [](const auto& a, const Face& b) {
    return face_less(a.first, b);
  });
  if (it == idx.end() || !(it->first == f)) return -1;
  return it->second;
}

Eigen::MatrixXd SimplicialComplex::down_up(int s, int r) const {
  require(0 <= r && r < s && s <= n_, errc::parameter_out_of_range, "need 0 <= r < s <= n");
  Eigen::MatrixXd m = down_[s];
  for (int k = s - 1; k > r; --k) m = m * down_[k];
  for (int k = r; k < s; ++k) m = m * up_[k];
  return m;
}

Eigen::MatrixXd SimplicialComplex::up_down(int r, int s) const {
  require(0 <= r && r < s && s <= n_, errc::parameter_out_of_range, "need 0 <= r < s <= n");
  Eigen::MatrixXd m = up_[r];
  for (int k = r + 1; k < s; ++k) m = m * up_[k];
  for (int k = s; k > r + 1; --k) m = m * down_[k];
  return m * down_[r + 1];
}

Eigen::VectorXd SimplicialComplex::project_down(const Eigen::VectorXd& f_s, int s, int r) const {
  require(0 <= r && r <= s && s <= n_, errc::parameter_out_of_range, "levels");
  Eigen::VectorXd f = f_s;
  for (int k = s - 1; k >= r; --k) f = up_[k] * f;
  return f;
}

double SimplicialComplex::level_entropy(int k, const Eigen::VectorXd& f_k) const {
  double mean = 0, flogf = 0;
  for (int i = 0; i < f_k.size(); ++i) {
    require(f_k(i) >= 0.0, errc::negative_function_value, "level entropy needs f >= 0");
    mean += pi_[k](i) * f_k(i);
    flogf += pi_[k](i) * xlogx(f_k(i));
  }
  return flogf - xlogx(mean);
}

double SimplicialComplex::level_variance(int k, const Eigen::VectorXd& f_k) const {
  double mean = pi_[k].dot(f_k);
  return pi_[k].dot(f_k.cwiseProduct(f_k).matrix()) - mean * mean;
}

double SimplicialComplex::level_mean(int k, const Eigen::VectorXd& f_k) const {
  return pi_[k].dot(f_k);
}

std::vector<int> SimplicialComplex::link_faces(int k, int idx, int j) const {
  const Face& tau = faces_[k][idx];
  std::vector<int> out;
  for (int fi = 0; fi < level_size(k + j); ++fi) {
    const Face& sigma = faces_[k + j][fi];
    if ((sigma.mask & tau.mask) != tau.mask) continue;
    bool extends = true;
    int pos_sigma = 0, pos_tau = 0;
    for (int v = 0; v < n_ && extends; ++v) {
      bool in_sigma = (sigma.mask >> v) & 1, in_tau = (tau.mask >> v) & 1;
      if (in_sigma && in_tau && sigma.spins[pos_sigma] != tau.spins[pos_tau]) extends = false;
      pos_sigma += in_sigma;
      pos_tau += in_tau;
    }
    if (extends) out.push_back(fi);
  }
  return out;
}

Eigen::VectorXd SimplicialComplex::link_restriction(int k, int idx, int j,
                                                    const Eigen::VectorXd& f_kj) const {
  auto faces = link_faces(k, idx, j);
  Eigen::VectorXd out(faces.size());
  for (int i = 0; i < int(faces.size()); ++i) out(i) = f_kj(faces[i]);
  return out;
}

SimplicialComplex::LocalWalk SimplicialComplex::local_walk(int k, int idx) const {
  require(k <= n_ - 2, errc::level_too_high, "local walk needs k <= n-2");
  require(idx >= 0 && idx < level_size(k), errc::infeasible_face, "face index");
  const Face& tau = faces_[k][idx];
  LocalWalk w;
  auto exts = link_faces(k, idx, 1);  // level k+1 faces containing tau
  std::vector<int> ext_index(exts.size());
  const double pk = pi_[k](idx);
  w.pi1.resize(exts.size());
  for (int i = 0; i < int(exts.size()); ++i) {
    const Face& sigma = faces_[k + 1][exts[i]];
    std::uint32_t added = sigma.mask & ~tau.mask;
    int v = std::countr_zero(added);
    int pos = std::popcount(sigma.mask & ((std::uint32_t(1) << v) - 1));
    w.elements.push_back({v, sigma.spins[pos]});
    w.pi1(i) = pi_[k + 1](exts[i]) / ((k + 1) * pk);
    ext_index[i] = exts[i];
  }
  const int m = int(exts.size());
  w.transition = Eigen::MatrixXd::Zero(m, m);
  for (int a = 0; a < m; ++a) {
    const Face& sa = faces_[k + 1][ext_index[a]];
    for (int b = 0; b < m; ++b) {
      if (w.elements[a].first == w.elements[b].first) continue;  // partite
      // pi_{tau u a, 1}(b) = pi_{k+2}(tau u a u b) / ((k+2) pi_{k+1}(tau u a))
      Face joint;
      joint.mask = sa.mask | (std::uint32_t(1) << w.elements[b].first);
      int pos = 0;
      for (int v = 0; v < n_; ++v) {
        if (!((joint.mask >> v) & 1)) continue;
        if (v == w.elements[b].first) {
          joint.spins.push_back(std::uint8_t(w.elements[b].second));
        } else {
          int pa = std::popcount(sa.mask & ((std::uint32_t(1) << v) - 1));
          joint.spins.push_back(sa.spins[pa]);
        }
        ++pos;
      }
      int ji = face_index(k + 2, joint);
      if (ji >= 0)
        w.transition(a, b) = pi_[k + 2](ji) / ((k + 2) * pi_[k + 1](ext_index[a]));
    }
  }
  auto spectrum = reversible_spectrum(w.transition, w.pi1);
  w.lambda2 = m >= 2 ? spectrum(m - 2) : -1.0;
  return w;
}

std::vector<double> SimplicialComplex::local_expansion() const {
  std::vector<double> zeta(std::max(n_ - 1, 0),
                           -std::numeric_limits<double>::infinity());
  for (int k = 0; k <= n_ - 2; ++k)
    for (int idx = 0; idx < level_size(k); ++idx)
      zeta[k] = std::max(zeta[k], local_walk(k, idx).lambda2);
  return zeta;
}

std::vector<double> SimplicialComplex::measured_marginal_bounds() const {
  std::vector<double> b(n_, 1.0);
  for (int k = 0; k <= n_ - 1; ++k) {
    for (int idx = 0; idx < level_size(k); ++idx) {
      const double pk = pi_[k](idx);
      for (int fi : link_faces(k, idx, 1))
        b[k] = std::min(b[k], pi_[k + 1](fi) / ((k + 1) * pk));
    }
  }
  return b;
}

double local_contraction_alpha(double zeta, double b_k, double b_k1, int s, int k) {
  double span = double(s - k);
  double first = 1.0 - 4.0 * std::max(zeta, 0.0) / (b_k * b_k * span * span);
  double second = (1.0 - zeta) / (4.0 + 2.0 * std::log(1.0 / (2.0 * b_k * b_k1)));
  return std::max({first, second, 0.0});
}

double ComplexCertificate::kappa(int r) const {
  require(0 <= r && r < s, errc::parameter_out_of_range, "kappa needs 0 <= r < s");
  double num = 0, den = 0;
  for (int k = 0; k < s; ++k) {
    den += gamma_k[k];
    if (k >= r) num += gamma_k[k];
  }
  return num / den;
}

double ComplexCertificate::block_constant(int ell) const {
  require(s == n, errc::parameter_out_of_range, "block constant defined for s = n");
  require(1 <= ell && ell <= n, errc::parameter_out_of_range, "ell in [1, n]");
  return (double(ell) / n) / kappa(n - ell);
}

ComplexCertificate certificate_from_levels(int n, int s, std::vector<double> b_k,
                                           std::vector<double> zeta_k) {
  require(1 <= s && s <= n, errc::parameter_out_of_range, "1 <= s <= n");
  require(int(b_k.size()) >= s, errc::parameter_out_of_range, "need b_0..b_{s-1}");
  require(int(zeta_k.size()) >= s - 1, errc::parameter_out_of_range, "need zeta_0..zeta_{s-2}");
  ComplexCertificate c;
  c.n = n;
  c.s = s;
  c.b_k.assign(b_k.begin(), b_k.begin() + s);
  c.zeta_k.assign(zeta_k.begin(), zeta_k.begin() + std::max(s - 1, 0));
  for (int k = 0; k <= s - 2; ++k)
    c.alpha_k.push_back(local_contraction_alpha(c.zeta_k[k], c.b_k[k], c.b_k[k + 1], s, k));
  c.gamma_k.assign(s, 1.0);
  for (int k = 1; k < s; ++k) c.gamma_k[k] = c.gamma_k[k - 1] * c.alpha_k[k - 1];
  return c;
}

double HatCertificate::kappa_hat(int r) const {
  double num = 0, den = 0;
  for (int k = 0; k < n; ++k) {
    den += gamma_hat[k];
    if (k >= r) num += gamma_hat[k];
  }
  return den > 0 ? num / den : 0.0;
}

double HatCertificate::kappa_product_lower(int ell) const {
  double num = 1, den = 1;
  for (int j = 0; j <= radius; ++j) {
    num *= std::max(double(ell - j), 0.0);
    den *= double(n - j);
  }
  return den > 0 ? num / den : 0.0;
}

double HatCertificate::block_constant_bound(double theta) const {
  require(theta > 0 && theta <= 1, errc::parameter_out_of_range, "theta in (0, 1]");
  return std::pow(2.0 / theta, 4.0 * eta / (b * b) + 1.0);
}

CertificateReport certificate(double b, double eta, int n, int s,
                              const std::vector<double>* measured_zeta) {
  require(b > 0 && b <= 1, errc::parameter_out_of_range, "b in (0, 1]");
  require(eta >= 0, errc::parameter_out_of_range, "eta >= 0");
  require(1 <= s && s <= n, errc::parameter_out_of_range, "1 <= s <= n");
  CertificateReport rep;
  rep.b = b;
  rep.eta = eta;

  std::vector<double> b_claim(n), zeta_claim(std::max(n - 1, 0));
  for (int k = 0; k < n; ++k) b_claim[k] = b / double(n - k);
  for (int k = 0; k + 1 < n; ++k) zeta_claim[k] = eta / double(n - k - 1);
  rep.closed_form = certificate_from_levels(n, s, b_claim, zeta_claim);

  if (measured_zeta) rep.measured = certificate_from_levels(n, s, b_claim, *measured_zeta);

  rep.hat.n = n;
  rep.hat.b = b;
  rep.hat.eta = eta;
  rep.hat.radius = int(std::ceil(4.0 * eta / (b * b) - 1e-12));
  rep.hat.gamma_hat.assign(n, 1.0);
  for (int k = 0; k < n; ++k) {
    double g = 1.0;
    for (int j = 1; j <= rep.hat.radius; ++j)
      g *= std::max(double(n - k - j), 0.0) / double(n - j);
    rep.hat.gamma_hat[k] = g;
  }
  return rep;
}

ContractionReport measured_entropy_contraction(const SimplicialComplex& sc, int r, int s,
                                               int trials, CounterRng& rng,
                                               int adversarial_restarts,
                                               int adversarial_iterations) {
  require(0 <= r && r < s && s <= sc.n(), errc::parameter_out_of_range, "0 <= r < s <= n");
  require(trials >= 1, errc::parameter_out_of_range, "trials >= 1");
  const int dim = sc.level_size(s);
  // Precompose the up-operator chain once.
  Eigen::MatrixXd chain = Eigen::MatrixXd::Identity(sc.level_size(r), sc.level_size(r));
  for (int k = r; k < s; ++k) chain = chain * sc.up(k);

  ContractionReport rep;
  rep.random_trials = trials;
  rep.adversarial_restarts = adversarial_restarts;
  auto ratio_of = [&](const Eigen::VectorXd& f) {
    double ent_s = sc.level_entropy(s, f);
    if (ent_s < 1e-12) fail(errc::degenerate_entropy, "constant f rejected");
    double ent_r = sc.level_entropy(r, chain * f);
    return 1.0 - ent_r / ent_s;
  };
  for (int t = 0; t < trials; ++t) {
    Eigen::VectorXd f = random_positive_vector(dim, rng);
    if (sc.level_entropy(s, f) < 1e-9) {
      --t;
      continue;
    }
    rep.min_ratio = std::min(rep.min_ratio, ratio_of(f));
  }

  // Adversarial search: maximize Ent_r(Uf) / Ent_s(f), i.e. minimize the
  // contraction ratio.
  RatioObjective obj;
  obj.numerator = [&](const Eigen::VectorXd& f) { return sc.level_entropy(r, chain * f); };
  obj.denominator = [&](const Eigen::VectorXd& f) { return sc.level_entropy(s, f); };
  obj.numerator_grad = [&](const Eigen::VectorXd& f) {
    Eigen::VectorXd g = chain * f;
    double mean = sc.level_mean(r, g);
    Eigen::VectorXd inner(g.size());
    for (int i = 0; i < g.size(); ++i)
      inner(i) = sc.pi(r)(i) * std::log(std::max(g(i), 1e-300) / mean);
    return Eigen::VectorXd(chain.transpose() * inner);
  };
  obj.denominator_grad = [&](const Eigen::VectorXd& f) {
    double mean = sc.level_mean(s, f);
    Eigen::VectorXd out(f.size());
    for (int i = 0; i < f.size(); ++i)
      out(i) = sc.pi(s)(i) * std::log(std::max(f(i), 1e-300) / mean);
    return out;
  };
  SearchOptions opts;
  opts.restarts = adversarial_restarts;
  opts.iterations = adversarial_iterations;
  // Entropies of interest are O(1); near-constant f makes the ratio pure
  // rounding noise, so the search rejects tiny denominators.
  opts.degenerate_denominator = 1e-9;
  auto found = search_ratio(obj, dim, /*maximize=*/true, opts, rng);
  if (std::isfinite(found.value)) rep.min_ratio = std::min(rep.min_ratio, 1.0 - found.value);
  return rep;
}

VarianceCertificateReport variance_certificate(const SimplicialComplex& sc, int s, int r) {
  require(0 <= r && r < s && s <= sc.n(), errc::parameter_out_of_range, "0 <= r < s <= n");
  VarianceCertificateReport rep;
  Eigen::MatrixXd walk = sc.down_up(s, r);
  auto spectrum = reversible_spectrum(walk, sc.pi(s));
  rep.exact_gap = sc.level_size(s) >= 2 ? 1.0 - spectrum(sc.level_size(s) - 2) : 1.0;

  auto zeta = sc.local_expansion();
  std::vector<double> alpha;
  for (int k = 0; k <= s - 2; ++k) alpha.push_back((1.0 - zeta[k]) / (1.0 + zeta[k]));
  double num = 0, den = 0, gamma = 1.0;
  for (int k = 0; k < s; ++k) {
    if (k > 0) gamma *= alpha[k - 1];
    den += gamma;
    if (k >= r) num += gamma;
  }
  rep.kappa_var = num / den;

  if (r == s - 1) {
    double prod = 1.0;
    for (int k = 0; k <= s - 2; ++k) prod *= (1.0 - zeta[k]);
    rep.product_bound = prod / s;
  } else {
    rep.product_bound = std::numeric_limits<double>::quiet_NaN();
  }
  return rep;
}

double log_sobolev_estimate(const Eigen::MatrixXd& transition, const Eigen::VectorXd& pi,
                            CounterRng& rng, int restarts, int iterations) {
  const int m = int(pi.size());
  auto dirichlet_sqrt = [&](const Eigen::VectorXd& f) {
    double total = 0;
    for (int x = 0; x < m; ++x)
      for (int y = 0; y < m; ++y) {
        if (transition(x, y) == 0.0) continue;
        double dx = std::sqrt(f(x)) - std::sqrt(f(y));
        total += 0.5 * pi(x) * transition(x, y) * dx * dx;
      }
    return total;
  };
  auto ent = [&](const Eigen::VectorXd& f) {
    double mean = 0, flogf = 0;
    for (int i = 0; i < m; ++i) {
      mean += pi(i) * f(i);
      flogf += pi(i) * xlogx(f(i));
    }
    return flogf - xlogx(mean);
  };
  RatioObjective obj;
  obj.numerator = dirichlet_sqrt;
  obj.denominator = ent;
  obj.numerator_grad = [&](const Eigen::VectorXd& f) {
    Eigen::VectorXd g = Eigen::VectorXd::Zero(m);
    for (int x = 0; x < m; ++x) {
      double sx = std::sqrt(std::max(f(x), 1e-300));
      for (int y = 0; y < m; ++y) {
        if (transition(x, y) == 0.0) continue;
        g(x) += pi(x) * transition(x, y) * (sx - std::sqrt(f(y))) / sx;
      }
    }
    return g;
  };
  obj.denominator_grad = [&](const Eigen::VectorXd& f) {
    double mean = pi.dot(f);
    Eigen::VectorXd g(m);
    for (int i = 0; i < m; ++i) g(i) = pi(i) * std::log(std::max(f(i), 1e-300) / mean);
    return g;
  };
  SearchOptions opts;
  opts.restarts = restarts;
  opts.iterations = iterations;
  opts.degenerate_denominator = 1e-9;
  // Indicator-like seeds: the log-Sobolev optimizer often sits near the
  // boundary of the orthant.
  for (int x = 0; x < std::min(m, 8); ++x) {
    Eigen::VectorXd seed = Eigen::VectorXd::Constant(m, 1e-6);
    seed(x) = 1.0;
    opts.seeds.push_back(seed);
  }
  auto found = search_ratio(obj, m, /*maximize=*/false, opts, rng);
  return found.value;
}

}  // namespace glab
