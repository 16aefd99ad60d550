#include "glab/spin_system.hpp"

#include <cmath>
#include <numeric>

#include "glab/exact_dist.hpp"

namespace glab {

void SpinSystem::validate() const {
  require(q >= 2, errc::non_positive_parameter, "q >= 2 required");
  require(interaction.rows() == q && interaction.cols() == q, errc::parameter_out_of_range,
          "interaction matrix must be q x q");
  require(field.size() == q, errc::parameter_out_of_range, "field must have length q");
  for (int i = 0; i < q; ++i) {
    require(field(i) > 0.0, errc::non_positive_parameter, "field entries must be positive");
    for (int j = 0; j < q; ++j) {
      require(interaction(i, j) >= 0.0, errc::non_positive_parameter,
              "interaction entries must be nonnegative");
      require(interaction(i, j) == interaction(j, i), errc::parameter_out_of_range,
              "interaction matrix must be symmetric");
    }
  }
}

bool SpinSystem::soft() const {
  for (int i = 0; i < q; ++i)
    for (int j = 0; j < q; ++j)
      if (interaction(i, j) == 0.0) return false;
  return true;
}

std::vector<std::pair<int, int>> SpinSystem::hard_pairs() const {
  std::vector<std::pair<int, int>> out;
  for (int i = 0; i < q; ++i)
    for (int j = i; j < q; ++j)
      if (interaction(i, j) == 0.0) out.push_back({i, j});
  return out;
}

SpinSystem hardcore(double lambda) {
  require(lambda > 0.0, errc::non_positive_parameter, "hardcore fugacity");
  SpinSystem s;
  s.q = 2;
  s.interaction.resize(2, 2);
  s.interaction << 1, 1, 1, 0;
  s.field.resize(2);
  s.field << 1, lambda;
  s.validate();
  return s;
}

SpinSystem ising(double beta, double lambda) {
  require(beta > 0.0, errc::non_positive_parameter, "ising edge weight");
  require(lambda > 0.0, errc::non_positive_parameter, "ising field");
  SpinSystem s;
  s.q = 2;
  s.interaction.resize(2, 2);
  s.interaction << beta, 1, 1, beta;
  s.field.resize(2);
  s.field << lambda, 1;
  s.validate();
  return s;
}

SpinSystem colorings(int q) {
  require(q >= 2, errc::non_positive_parameter, "colorings need q >= 2");
  SpinSystem s;
  s.q = q;
  s.interaction = Eigen::MatrixXd::Ones(q, q) - Eigen::MatrixXd::Identity(q, q);
  s.field = Eigen::VectorXd::Ones(q);
  s.validate();
  return s;
}

MonomerDimer monomer_dimer(const Graph& g, double lambda) {
  require(lambda > 0.0, errc::non_positive_parameter, "monomer-dimer fugacity");
  MonomerDimer md{hardcore(lambda), line_graph(g)};
  return md;
}

SpinSystem TwoSpinParams::to_system() const {
  require(beta >= 0.0 && gamma > 0.0 && lambda > 0.0, errc::non_positive_parameter,
          "two-spin parameters");
  SpinSystem s;
  s.q = 2;
  s.interaction.resize(2, 2);
  s.interaction << beta, 1, 1, gamma;
  s.field.resize(2);
  s.field << lambda, 1;
  s.validate();
  return s;
}

namespace {

long long gcd_ll(long long a, long long b) { return std::gcd(a, b); }

long long checked_mul(long long a, long long b) {
  long long r;
  require(!__builtin_mul_overflow(a, b, &r), errc::parameter_out_of_range,
          "rational overflow");
  return r;
}

long long checked_pow(long long base, int exp) {
  long long r = 1;
  for (int i = 0; i < exp; ++i) r = checked_mul(r, base);
  return r;
}

}  // namespace

Rational::Rational(long long n, long long d) {
  require(d != 0, errc::parameter_out_of_range, "zero denominator");
  if (d < 0) {
    n = -n;
    d = -d;
  }
  long long g = gcd_ll(n < 0 ? -n : n, d);
  if (g == 0) g = 1;
  num = n / g;
  den = d / g;
}

Rational critical_fugacity(int degree) {
  require(degree >= 3, errc::degree_too_small, "critical fugacity needs Delta >= 3");
  return Rational(checked_pow(degree - 1, degree - 1), checked_pow(degree - 2, degree));
}

std::pair<Rational, Rational> ising_critical(int degree) {
  require(degree >= 3, errc::degree_too_small, "ising critical needs Delta >= 3");
  return {Rational(degree - 2, degree), Rational(degree, degree - 2)};
}

double two_spin_recursion(const TwoSpinParams& p, int d, double r) {
  return p.lambda * std::pow((p.beta * r + 1.0) / (r + p.gamma), d);
}

double two_spin_recursion_derivative(const TwoSpinParams& p, int d, double r) {
  // f_d'(R) = d lambda (beta R + 1)^{d-1} (beta gamma - 1) / (R + gamma)^{d+1}
  return d * p.lambda * std::pow(p.beta * r + 1.0, d - 1) * (p.beta * p.gamma - 1.0) /
         std::pow(r + p.gamma, d + 1);
}

UniquenessReport uniqueness_gap(const TwoSpinParams& p, int degree_bound, double tol,
                                int max_iter) {
  require(p.antiferromagnetic(), errc::not_antiferromagnetic,
          "uniqueness gap defined for beta*gamma < 1");
  require(degree_bound >= 2, errc::degree_too_small, "Delta >= 2 required");
  UniquenessReport rep;
  rep.delta_max = degree_bound;
  double worst = 0.0;
  for (int d = 1; d < degree_bound; ++d) {
    // f_d is strictly decreasing for beta*gamma < 1, so g(R) = f_d(R) - R has
    // a unique root bracketed by (0, f_d(0)].
    double lo = 0.0, hi = two_spin_recursion(p, d, 0.0);
    double mid = 0.5 * (lo + hi);
    bool converged = false;
    for (int it = 0; it < max_iter; ++it) {
      mid = 0.5 * (lo + hi);
      double gap = two_spin_recursion(p, d, mid) - mid;
      if (std::abs(hi - lo) <= tol) {
        converged = true;
        break;
      }
      if (gap > 0)
        lo = mid;
      else
        hi = mid;
    }
    require(converged, errc::fixed_point_no_converge,
            "bisection for d = " + std::to_string(d));
    // Newton polish: g(R) = f(R) - R has g' <= -1 in the antiferromagnetic
    // regime, so the step is well conditioned near the root.
    for (int it = 0; it < 4; ++it) {
      double gap = two_spin_recursion(p, d, mid) - mid;
      double slope = two_spin_recursion_derivative(p, d, mid) - 1.0;
      double next = mid - gap / slope;
      if (!(next > 0.0) || !std::isfinite(next)) break;
      mid = next;
    }
    rep.fixed_points.push_back(mid);
    double deriv = std::abs(two_spin_recursion_derivative(p, d, mid));
    rep.derivative_magnitudes.push_back(deriv);
    worst = std::max(worst, deriv);
  }
  rep.gap = 1.0 - worst;
  return rep;
}

DobrushinReport dobrushin_check(const SpinSystem& s, const Graph& g,
                                std::int64_t enumeration_cap) {
  s.validate();
  const int n = g.num_vertices();
  auto d = ExactDistribution::enumerate(s, g, enumeration_cap);
  DobrushinReport rep;
  rep.dependence = Eigen::MatrixXd::Zero(n, n);
  // Nearest-neighbor system: R(u, v) = 0 for non-adjacent u, v, so only
  // adjacent pairs are scanned.  For each v we enumerate feasible boundary
  // configurations on V \ {v} and compare pairs differing exactly at u.
  for (int v = 0; v < n; ++v) {
    // Group boundary configs by their restriction off {u, v}.
    for (int u : g.neighbors(v)) {
      double worst = 0.0;
      const auto& supp = d.support();
      // tau -> conditional law of sigma_v given the boundary; boundaries keyed
      // by the full off-v configuration.
      std::vector<Config> boundaries;
      std::vector<Eigen::VectorXd> laws;
      std::vector<double> mass;
      std::vector<long long> keys;
      auto key_of = [&](const Config& c) {
        long long k = 0;
        for (int w = 0; w < n; ++w)
          if (w != v) k = k * s.q + c[w];
        return k;
      };
      std::vector<std::pair<long long, int>> lookup;
      for (int idx = 0; idx < int(supp.size()); ++idx) {
        long long k = key_of(supp[idx]);
        int slot = -1;
        for (auto& [kk, si] : lookup)
          if (kk == k) slot = si;
        if (slot < 0) {
          slot = int(boundaries.size());
          lookup.push_back({k, slot});
          boundaries.push_back(supp[idx]);
          laws.push_back(Eigen::VectorXd::Zero(s.q));
          mass.push_back(0.0);
        }
        laws[slot](supp[idx][v]) += d.probs()(idx);
        mass[slot] += d.probs()(idx);
      }
      for (auto& lw : laws) lw /= lw.sum();
      for (int a = 0; a < int(boundaries.size()); ++a)
        for (int b = a + 1; b < int(boundaries.size()); ++b) {
          bool differ_only_u = boundaries[a][u] != boundaries[b][u];
          for (int w = 0; w < n && differ_only_u; ++w)
            if (w != u && w != v && boundaries[a][w] != boundaries[b][w]) differ_only_u = false;
          if (!differ_only_u) continue;
          worst = std::max(worst, 0.5 * (laws[a] - laws[b]).cwiseAbs().sum());
        }
      rep.dependence(u, v) = worst;
    }
  }
  double max_col = 0.0;
  for (int v = 0; v < n; ++v) max_col = std::max(max_col, rep.dependence.col(v).sum());
  rep.c = 1.0 - max_col;
  rep.holds = rep.c > 0.0;
  return rep;
}

}  // namespace glab
