#include "glab/dynamics.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <sstream>

#include "glab/optimize.hpp"

namespace glab {

namespace {

double xlogx(double x) { return x > 0.0 ? x * std::log(x) : 0.0; }

}  // namespace

double ChainMatrix::spectral_gap() const {
  const int m = size();
  if (m < 2) return 1.0;
  Eigen::VectorXd sq = pi.array().sqrt();
  Eigen::MatrixXd sym(m, m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) sym(i, j) = sq(i) * transition(i, j) / sq(j);
  sym = 0.5 * (sym + sym.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sym);
  return 1.0 - es.eigenvalues()(m - 2);
}

bool ChainMatrix::ergodic() const {
  const int m = size();
  std::vector<char> seen(m, 0);
  std::vector<int> stack{0};
  seen[0] = 1;
  int reached = 1;
  while (!stack.empty()) {
    int x = stack.back();
    stack.pop_back();
    for (int y = 0; y < m; ++y)
      if (!seen[y] && transition(x, y) > 0.0) {
        seen[y] = 1;
        ++reached;
        stack.push_back(y);
      }
  }
  return reached == m;
}

ChainMatrix glauber_matrix(const ExactDistribution& d) { return block_matrix(d, 1); }

ChainMatrix block_matrix(const ExactDistribution& d, int ell) {
  const int n = d.num_vertices();
  require(1 <= ell && ell <= n, errc::parameter_out_of_range, "block size in [1, n]");
  require(n <= 25, errc::instance_too_large, "block matrix needs n <= 25");
  const auto& supp = d.support();
  const int m = int(supp.size());
  ChainMatrix c;
  c.states = supp;
  c.pi = d.probs();
  c.transition = Eigen::MatrixXd::Zero(m, m);
  const double blocks = double(binomial(n, ell));
  // Average over all blocks S of the exact conditional resampling on S.
  std::uint32_t mask = (std::uint32_t(1) << ell) - 1;
  const std::uint32_t limit = std::uint32_t(1) << n;
  while (mask < limit) {
    // Group states by their configuration off S; within a group the chain
    // resamples proportionally to pi.
    std::vector<int> order(m);
    for (int i = 0; i < m; ++i) order[i] = i;
    auto off_key = [&](int idx) {
      std::uint64_t key = 0;
      for (int v = 0; v < n; ++v)
        if (!((mask >> v) & 1)) key = key * d.q() + supp[idx][v];
      return key;
    };
    std::vector<std::uint64_t> keys(m);
    for (int i = 0; i < m; ++i) keys[i] = off_key(i);
    std::sort(order.begin(), order.end(), [&](int a, int b) { return keys[a] < keys[b]; });
    for (int lo = 0; lo < m;) {
      int hi = lo;
      while (hi < m && keys[order[hi]] == keys[order[lo]]) ++hi;
      double group_mass = 0;
      for (int i = lo; i < hi; ++i) group_mass += c.pi(order[i]);
      for (int i = lo; i < hi; ++i)
        for (int j = lo; j < hi; ++j)
          c.transition(order[i], order[j]) += c.pi(order[j]) / (group_mass * blocks);
      lo = hi;
    }
    if (ell == n) break;
    std::uint32_t carry = mask & -mask, ripple = mask + carry;
    mask = (((ripple ^ mask) >> 2) / carry) | ripple;
  }
  return c;
}

double dirichlet_form(const ChainMatrix& c, const Eigen::VectorXd& f, const Eigen::VectorXd& g) {
  double total = 0;
  for (int x = 0; x < c.size(); ++x)
    for (int y = 0; y < c.size(); ++y) {
      if (c.transition(x, y) == 0.0) continue;
      total += 0.5 * c.pi(x) * c.transition(x, y) * (f(x) - f(y)) * (g(x) - g(y));
    }
  return total;
}

MixingReport exact_mixing_time(const ChainMatrix& c, double epsilon, int state_cap) {
  require(c.size() <= state_cap, errc::instance_too_large,
          "state space exceeds matrix-power cap");
  require(c.ergodic(), errc::not_ergodic, "support is disconnected under the chain's moves");
  MixingReport rep;
  rep.epsilon = epsilon;
  rep.gap = c.spectral_gap();
  const int m = c.size();
  Eigen::MatrixXd power = c.transition;
  // d(t) is nonincreasing; a crude geometric-decay cap guards the loop.
  const long t_cap = 1000 + long(100.0 / std::max(rep.gap, 1e-6) *
                                 (std::log(1.0 / epsilon) + std::log(1.0 / c.pi.minCoeff())));
  for (long t = 1; t <= t_cap; ++t) {
    double worst = 0;
    for (int x = 0; x < m; ++x)
      worst = std::max(worst, 0.5 * (power.row(x).transpose() - c.pi).cwiseAbs().sum());
    rep.tv_by_t.push_back(worst);
    if (worst <= epsilon) {
      rep.t_mix = int(t);
      return rep;
    }
    power = power * c.transition;
  }
  fail(errc::not_ergodic, "mixing time exceeded the iteration cap");
}

double entropy_decay_estimate(const ChainMatrix& c, int trials, CounterRng& rng, int restarts,
                              int iterations) {
  const int m = c.size();
  auto kl = [&](const Eigen::VectorXd& nu) {
    double total = 0;
    for (int i = 0; i < m; ++i)
      if (nu(i) > 0) total += nu(i) * std::log(nu(i) / c.pi(i));
    return total;
  };
  auto ratio = [&](const Eigen::VectorXd& nu) {
    double before = kl(nu);
    if (before < 1e-13) fail(errc::degenerate_kl, "nu too close to stationarity");
    Eigen::VectorXd after = c.transition.transpose() * nu;
    return 1.0 - kl(after) / before;
  };
  double best = 1.0;
  for (int t = 0; t < trials; ++t) {
    Eigen::VectorXd nu = random_positive_vector(m, rng);
    nu /= nu.sum();
    if (kl(nu) < 1e-13) {
      continue;
    }
    best = std::min(best, ratio(nu));
  }
  // Adversarial: maximize KL(nu P || pi) / KL(nu || pi) over the simplex.
  SimplexObjective obj;
  obj.value = [&](const Eigen::VectorXd& nu) {
    double before = kl(nu);
    if (before < 1e-9) return 0.0;
    return kl(Eigen::VectorXd(c.transition.transpose() * nu)) / before;
  };
  obj.grad = [&](const Eigen::VectorXd& nu) {
    double before = kl(nu);
    Eigen::VectorXd after = c.transition.transpose() * nu;
    double after_kl = kl(after);
    Eigen::VectorXd grad_before(m), grad_after(m);
    for (int i = 0; i < m; ++i) {
      grad_before(i) = std::log(std::max(nu(i), 1e-300) / c.pi(i)) + 1.0;
      double acc = 0;
      for (int j = 0; j < m; ++j) {
        if (c.transition(i, j) == 0.0) continue;
        acc += c.transition(i, j) * (std::log(std::max(after(j), 1e-300) / c.pi(j)) + 1.0);
      }
      grad_after(i) = acc;
    }
    if (before < 1e-9) return Eigen::VectorXd(Eigen::VectorXd::Zero(m));
    return Eigen::VectorXd((grad_after * before - after_kl * grad_before) / (before * before));
  };
  SearchOptions opts;
  opts.restarts = restarts;
  opts.iterations = iterations;
  for (int x = 0; x < std::min(m, 6); ++x) {
    Eigen::VectorXd seed = Eigen::VectorXd::Constant(m, 1e-8);
    seed(x) = 1.0;
    opts.seeds.push_back(seed / seed.sum());
  }
  auto found = search_simplex(obj, m, /*maximize=*/true, opts, rng);
  if (std::isfinite(found.value)) best = std::min(best, 1.0 - found.value);
  return best;
}

double mlsi_estimate(const ChainMatrix& c, int trials, CounterRng& rng, int restarts,
                     int iterations) {
  const int m = c.size();
  auto ent = [&](const Eigen::VectorXd& f) {
    double mean = 0, flogf = 0;
    for (int i = 0; i < m; ++i) {
      mean += c.pi(i) * f(i);
      flogf += c.pi(i) * xlogx(f(i));
    }
    return flogf - xlogx(mean);
  };
  auto log_floor = [](const Eigen::VectorXd& f) {
    return Eigen::VectorXd(f.array().max(1e-300).log());
  };
  RatioObjective obj;
  obj.numerator = [&](const Eigen::VectorXd& f) { return dirichlet_form(c, f, log_floor(f)); };
  obj.denominator = ent;
  obj.numerator_grad = [&](const Eigen::VectorXd& f) {
    Eigen::VectorXd g = Eigen::VectorXd::Zero(m);
    Eigen::VectorXd lf = log_floor(f);
    for (int x = 0; x < m; ++x)
      for (int y = 0; y < m; ++y) {
        if (c.transition(x, y) == 0.0) continue;
        g(x) += c.pi(x) * c.transition(x, y) *
                ((lf(x) - lf(y)) + (f(x) - f(y)) / std::max(f(x), 1e-300));
      }
    return g;
  };
  obj.denominator_grad = [&](const Eigen::VectorXd& f) {
    double mean = c.pi.dot(f);
    Eigen::VectorXd g(m);
    for (int i = 0; i < m; ++i) g(i) = c.pi(i) * std::log(std::max(f(i), 1e-300) / mean);
    return g;
  };
  SearchOptions opts;
  opts.restarts = restarts;
  opts.iterations = iterations;
  opts.degenerate_denominator = 1e-9;
  CounterRng seed_rng = rng.split(101);
  for (int t = 0; t < trials; ++t) opts.seeds.push_back(random_positive_vector(m, seed_rng));
  for (int x = 0; x < std::min(m, 6); ++x) {
    Eigen::VectorXd seed = Eigen::VectorXd::Constant(m, 1e-6);
    seed(x) = 1.0;
    opts.seeds.push_back(seed);
  }
  auto found = search_ratio(obj, m, /*maximize=*/false, opts, rng);
  return found.value;
}

double lsi_estimate(const ChainMatrix& c, CounterRng& rng, int restarts, int iterations) {
  const int m = c.size();
  auto ent = [&](const Eigen::VectorXd& f) {
    double mean = 0, flogf = 0;
    for (int i = 0; i < m; ++i) {
      mean += c.pi(i) * f(i);
      flogf += c.pi(i) * xlogx(f(i));
    }
    return flogf - xlogx(mean);
  };
  RatioObjective obj;
  obj.numerator = [&](const Eigen::VectorXd& f) {
    Eigen::VectorXd s = f.array().sqrt();
    return dirichlet_form(c, s, s);
  };
  obj.denominator = ent;
  obj.numerator_grad = [&](const Eigen::VectorXd& f) {
    Eigen::VectorXd g = Eigen::VectorXd::Zero(m);
    for (int x = 0; x < m; ++x) {
      double sx = std::sqrt(std::max(f(x), 1e-300));
      for (int y = 0; y < m; ++y) {
        if (c.transition(x, y) == 0.0) continue;
        g(x) += c.pi(x) * c.transition(x, y) * (sx - std::sqrt(f(y))) / sx;
      }
    }
    return g;
  };
  obj.denominator_grad = [&](const Eigen::VectorXd& f) {
    double mean = c.pi.dot(f);
    Eigen::VectorXd g(m);
    for (int i = 0; i < m; ++i) g(i) = c.pi(i) * std::log(std::max(f(i), 1e-300) / mean);
    return g;
  };
  SearchOptions opts;
  opts.restarts = restarts;
  opts.iterations = iterations;
  opts.degenerate_denominator = 1e-9;
  for (int x = 0; x < std::min(m, 8); ++x) {
    Eigen::VectorXd seed = Eigen::VectorXd::Constant(m, 1e-6);
    seed(x) = 1.0;
    opts.seeds.push_back(seed);
  }
  auto found = search_ratio(obj, m, /*maximize=*/false, opts, rng);
  return found.value;
}

long mixing_bound_from_kappa(double kappa, double pi_min, double epsilon) {
  require(kappa > 0 && kappa <= 1, errc::parameter_out_of_range, "kappa in (0, 1]");
  require(pi_min > 0 && pi_min < 1, errc::parameter_out_of_range, "pi_min in (0, 1)");
  require(epsilon > 0 && epsilon < 1, errc::parameter_out_of_range, "epsilon in (0, 1)");
  double inner = std::log(1.0 / pi_min);
  double loglog = std::log(std::max(inner, 1e-300));
  return long(std::ceil((loglog + std::log(1.0 / (2.0 * epsilon * epsilon))) / kappa));
}

long mixing_bound_from_tensorization(double c1, int n, double mu_min, double epsilon) {
  require(c1 > 0, errc::parameter_out_of_range, "C1 > 0");
  return mixing_bound_from_kappa(1.0 / (c1 * n), mu_min, epsilon);
}

Eigen::VectorXd local_conditional(const SpinSystem& s, const Graph& g, const Config& state,
                                  int v) {
  Eigen::VectorXd w(s.q);
  for (int i = 0; i < s.q; ++i) {
    double wi = s.field(i);
    for (int u : g.neighbors(v)) wi *= s.interaction(i, state[u]);
    w(i) = wi;
  }
  double total = w.sum();
  require(total > 0.0, errc::infeasible_state, "no feasible spin at the update site");
  return w / total;
}

void glauber_step(const SpinSystem& s, const Graph& g, Config& state, CounterRng& rng) {
  int v = rng.below(g.num_vertices());
  Eigen::VectorXd p = local_conditional(s, g, state, v);
  double u = rng.uniform(), acc = 0;
  for (int i = 0; i < s.q; ++i) {
    acc += p(i);
    if (u < acc || i == s.q - 1) {
      state[v] = std::uint8_t(i);
      break;
    }
  }
}

std::vector<Config> run_chain(const SpinSystem& s, const Graph& g, Config init, int steps,
                              CounterRng& rng) {
  require(int(init.size()) == g.num_vertices(), errc::infeasible_state, "state size");
  std::vector<Config> traj;
  traj.reserve(steps + 1);
  traj.push_back(init);
  Config state = std::move(init);
  for (int t = 0; t < steps; ++t) {
    glauber_step(s, g, state, rng);
    traj.push_back(state);
  }
  return traj;
}

std::string trajectory_to_csv(const std::vector<Config>& traj) {
  std::ostringstream out;
  out << "t,state\n";
  for (int t = 0; t < int(traj.size()); ++t) {
    out << t << ",";
    for (auto spin : traj[t]) out << char('0' + spin);
    out << "\n";
  }
  return out.str();
}

}  // namespace glab
