#include "glab/exact_dist.hpp"

#include <Eigen/Eigenvalues>
#include <bit>
#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>
#include <unordered_map>

namespace glab {

namespace {

double xlogx(double x) { return x > 0.0 ? x * std::log(x) : 0.0; }

// Packs a configuration restricted to selected positions into an integer key.
std::uint64_t pack_key(const Config& c, const std::vector<int>& positions, int q) {
  std::uint64_t k = 0;
  for (int p : positions) k = k * std::uint64_t(q) + c[p];
  return k;
}

}  // namespace

ExactDistribution make_distribution(int q, std::vector<int> scope, std::vector<Config> support,
                                    std::vector<double> weights) {
  require(support.size() == weights.size(), errc::support_mismatch, "support/weight size");
  require(!support.empty(), errc::empty_support, "no feasible configurations");
  ExactDistribution d;
  d.q_ = q;
  d.scope_ = std::move(scope);
  d.support_ = std::move(support);
  d.weights_ = std::move(weights);
  d.z_ = 0;
  for (double w : d.weights_) {
    require(w > 0.0, errc::negative_function_value, "weights must be positive");
    d.z_ += w;
  }
  d.probs_.resize(d.support_.size());
  for (int i = 0; i < int(d.support_.size()); ++i) d.probs_(i) = d.weights_[i] / d.z_;
  return d;
}

ExactDistribution ExactDistribution::enumerate(const SpinSystem& s, const Graph& g,
                                               std::int64_t state_cap) {
  s.validate();
  const int n = g.num_vertices();
  double states = std::pow(double(s.q), double(n));
  require(states <= double(state_cap), errc::instance_too_large,
          "q^n = " + std::to_string(states) + " exceeds enumeration cap");
  std::vector<Config> support;
  std::vector<double> weights;
  Config c(n, 0);
  while (true) {
    double w = 1.0;
    for (int v = 0; v < n && w > 0.0; ++v) {
      w *= s.field(c[v]);
      for (int u : g.neighbors(v)) {
        if (u > v) break;  // neighbors sorted; count each edge once
        w *= s.interaction(c[u], c[v]);
        if (w == 0.0) break;
      }
    }
    if (w > 0.0) {
      support.push_back(c);
      weights.push_back(w);
    }
    int pos = n - 1;
    while (pos >= 0 && c[pos] == s.q - 1) c[pos--] = 0;
    if (pos < 0) break;
    ++c[pos];
  }
  require(!support.empty(), errc::empty_support, "partition function is zero");
  std::vector<int> scope(n);
  for (int v = 0; v < n; ++v) scope[v] = v;
  return make_distribution(s.q, std::move(scope), std::move(support), std::move(weights));
}

int ExactDistribution::scope_index(int vertex) const {
  auto it = std::lower_bound(scope_.begin(), scope_.end(), vertex);
  if (it == scope_.end() || *it != vertex) return -1;
  return int(it - scope_.begin());
}

ExactDistribution ExactDistribution::condition(const Pinning& p) const {
  if (p.empty()) return *this;
  require(p.vertices.size() == p.spins.size(), errc::infeasible_pinning,
          "pinning vertex/spin size mismatch");
  std::vector<int> pos(p.vertices.size());
  for (int i = 0; i < int(p.vertices.size()); ++i) {
    pos[i] = scope_index(p.vertices[i]);
    require(pos[i] >= 0, errc::infeasible_pinning,
            "pinned vertex " + std::to_string(p.vertices[i]) + " not in scope");
    require(p.spins[i] < q_, errc::infeasible_pinning, "pinned spin out of range");
    for (int j = 0; j < i; ++j)
      require(pos[j] != pos[i], errc::infeasible_pinning,
              "vertex " + std::to_string(p.vertices[i]) + " pinned twice");
  }
  std::vector<bool> keep_pos(scope_.size(), true);
  for (int i : pos) keep_pos[i] = false;
  std::vector<int> new_scope;
  for (int i = 0; i < int(scope_.size()); ++i)
    if (keep_pos[i]) new_scope.push_back(scope_[i]);
  std::vector<Config> support;
  std::vector<double> weights;
  for (int idx = 0; idx < int(support_.size()); ++idx) {
    bool match = true;
    for (int i = 0; i < int(pos.size()) && match; ++i)
      match = support_[idx][pos[i]] == p.spins[i];
    if (!match) continue;
    Config c;
    c.reserve(new_scope.size());
    for (int i = 0; i < int(scope_.size()); ++i)
      if (keep_pos[i]) c.push_back(support_[idx][i]);
    support.push_back(std::move(c));
    weights.push_back(weights_[idx]);
  }
  require(!support.empty(), errc::infeasible_pinning, "pinning has zero probability");
  return make_distribution(q_, std::move(new_scope), std::move(support), std::move(weights));
}

std::vector<int> ExactDistribution::feasible_spins(int pos) const {
  std::vector<bool> seen(q_, false);
  for (const auto& c : support_) seen[c[pos]] = true;
  std::vector<int> out;
  for (int i = 0; i < q_; ++i)
    if (seen[i]) out.push_back(i);
  return out;
}

Eigen::VectorXd ExactDistribution::marginal(int pos) const {
  Eigen::VectorXd m = Eigen::VectorXd::Zero(q_);
  for (int i = 0; i < int(support_.size()); ++i) m(support_[i][pos]) += probs_(i);
  return m;
}

int ExactDistribution::find_config(const Config& c) const {
  for (int i = 0; i < int(support_.size()); ++i)
    if (support_[i] == c) return i;
  return -1;
}

std::string ExactDistribution::config_string(int support_index) const {
  std::string s;
  for (auto spin : support_[support_index]) s += char('0' + spin);
  return s;
}

double expectation(const ExactDistribution& d, const Eigen::VectorXd& f) {
  require(f.size() == d.probs().size(), errc::support_mismatch, "f size");
  return d.probs().dot(f);
}

double entropy(const ExactDistribution& d, const Eigen::VectorXd& f) {
  require(f.size() == d.probs().size(), errc::support_mismatch, "f size");
  double mean = 0.0, flogf = 0.0;
  for (int i = 0; i < f.size(); ++i) {
    require(f(i) >= 0.0, errc::negative_function_value, "entropy needs f >= 0");
    mean += d.probs()(i) * f(i);
    flogf += d.probs()(i) * xlogx(f(i));
  }
  return flogf - xlogx(mean);
}

double variance(const ExactDistribution& d, const Eigen::VectorXd& f) {
  require(f.size() == d.probs().size(), errc::support_mismatch, "f size");
  double mean = d.probs().dot(f);
  double sq = 0.0;
  for (int i = 0; i < f.size(); ++i) sq += d.probs()(i) * f(i) * f(i);
  return sq - mean * mean;
}

double kl_divergence(const Eigen::VectorXd& nu, const ExactDistribution& d) {
  require(nu.size() == d.probs().size(), errc::support_mismatch, "nu size");
  double kl = 0.0;
  for (int i = 0; i < nu.size(); ++i) {
    require(nu(i) >= 0.0, errc::negative_function_value, "nu must be a distribution");
    if (nu(i) > 0.0) kl += nu(i) * std::log(nu(i) / d.probs()(i));
  }
  return kl;
}

namespace {

// Groups support indices by the configuration outside u_pos.
std::vector<std::vector<int>> fibers_off(const ExactDistribution& d,
                                         const std::vector<int>& u_pos) {
  std::vector<int> off;
  std::vector<bool> in_u(d.num_vertices(), false);
  for (int p : u_pos) in_u[p] = true;
  for (int p = 0; p < d.num_vertices(); ++p)
    if (!in_u[p]) off.push_back(p);
  std::unordered_map<std::uint64_t, int> slot;
  std::vector<std::vector<int>> groups;
  for (int i = 0; i < int(d.support().size()); ++i) {
    std::uint64_t k = pack_key(d.support()[i], off, d.q());
    auto [it, fresh] = slot.try_emplace(k, int(groups.size()));
    if (fresh) groups.push_back({});
    groups[it->second].push_back(i);
  }
  return groups;
}

}  // namespace

double expected_conditional_entropy(const ExactDistribution& d, const std::vector<int>& u_pos,
                                    const Eigen::VectorXd& f) {
  double total = 0.0;
  for (const auto& grp : fibers_off(d, u_pos)) {
    double p_grp = 0.0, s = 0.0, flogf = 0.0;
    for (int i : grp) {
      double p = d.probs()(i);
      p_grp += p;
      s += p * f(i);
      flogf += p * xlogx(f(i));
    }
    if (s > 0.0) total += flogf - s * std::log(s / p_grp);
  }
  return total;
}

double expected_conditional_variance(const ExactDistribution& d, const std::vector<int>& u_pos,
                                     const Eigen::VectorXd& f) {
  double total = 0.0;
  for (const auto& grp : fibers_off(d, u_pos)) {
    double p_grp = 0.0, s = 0.0, sq = 0.0;
    for (int i : grp) {
      double p = d.probs()(i);
      p_grp += p;
      s += p * f(i);
      sq += p * f(i) * f(i);
    }
    total += sq - s * s / p_grp;
  }
  return total;
}

double entropy_of_conditional_means(const ExactDistribution& d, const std::vector<int>& u_pos,
                                    const Eigen::VectorXd& f) {
  double mean = d.probs().dot(f);
  double total = -xlogx(mean);
  for (const auto& grp : fibers_off(d, u_pos)) {
    double p_grp = 0.0, s = 0.0;
    for (int i : grp) {
      p_grp += d.probs()(i);
      s += d.probs()(i) * f(i);
    }
    total += p_grp * xlogx(s / p_grp);
  }
  return total;
}

InfluenceMatrix influence_matrix(const ExactDistribution& d) {
  const int n = d.num_vertices();
  require(n >= 2, errc::too_few_free_vertices, "influence matrix needs >= 2 free vertices");
  InfluenceMatrix im;
  std::vector<int> first_row(n, 0);
  for (int p = 0; p < n; ++p) {
    first_row[p] = int(im.index.size());
    for (int spin : d.feasible_spins(p)) im.index.push_back({d.scope()[p], spin});
  }
  const int dim = int(im.index.size());
  im.psi = Eigen::MatrixXd::Zero(dim, dim);
  // Unconditional marginals and, per (u, i), the conditioned marginals.
  std::vector<Eigen::VectorXd> base(n);
  for (int p = 0; p < n; ++p) base[p] = d.marginal(p);
  int row = 0;
  for (int u = 0; u < n; ++u) {
    for (int i : d.feasible_spins(u)) {
      Eigen::MatrixXd cond = Eigen::MatrixXd::Zero(n, d.q());
      double mass = 0.0;
      for (int idx = 0; idx < int(d.support().size()); ++idx) {
        if (d.support()[idx][u] != i) continue;
        mass += d.probs()(idx);
        for (int v = 0; v < n; ++v) cond(v, d.support()[idx][v]) += d.probs()(idx);
      }
      cond /= mass;
      int col = 0;
      for (int v = 0; v < n; ++v) {
        for (int j : d.feasible_spins(v)) {
          if (v != u) im.psi(row, col) = cond(v, j) - base[v](j);
          ++col;
        }
      }
      ++row;
    }
  }
  Eigen::EigenSolver<Eigen::MatrixXd> es(im.psi, /*computeEigenvectors=*/false);
  im.lambda1 = -std::numeric_limits<double>::infinity();
  im.max_imag = 0.0;
  for (int k = 0; k < es.eigenvalues().size(); ++k) {
    im.lambda1 = std::max(im.lambda1, es.eigenvalues()(k).real());
    im.max_imag = std::max(im.max_imag, std::abs(es.eigenvalues()(k).imag()));
  }
  return im;
}

InfluenceMatrix influence_matrix(const ExactDistribution& d, const Pinning& p) {
  return influence_matrix(d.condition(p));
}

Eigen::MatrixXd influence_matrix_tv(const ExactDistribution& d) {
  const int n = d.num_vertices();
  Eigen::MatrixXd r = Eigen::MatrixXd::Zero(n, n);
  for (int u = 0; u < n; ++u) {
    auto spins = d.feasible_spins(u);
    std::vector<Eigen::MatrixXd> cond;
    for (int i : spins) {
      Eigen::MatrixXd c = Eigen::MatrixXd::Zero(n, d.q());
      double mass = 0.0;
      for (int idx = 0; idx < int(d.support().size()); ++idx) {
        if (d.support()[idx][u] != i) continue;
        mass += d.probs()(idx);
        for (int v = 0; v < n; ++v) c(v, d.support()[idx][v]) += d.probs()(idx);
      }
      cond.push_back(c / mass);
    }
    for (int v = 0; v < n; ++v) {
      if (v == u) continue;
      double worst = 0.0;
      for (int a = 0; a < int(spins.size()); ++a)
        for (int b = a + 1; b < int(spins.size()); ++b)
          worst = std::max(worst, 0.5 * (cond[a].row(v) - cond[b].row(v)).cwiseAbs().sum());
      r(u, v) = worst;
    }
  }
  return r;
}

Eigen::MatrixXd signed_influence_2spin(const ExactDistribution& d) {
  require(d.q() == 2, errc::parameter_out_of_range, "2-spin systems only");
  const int n = d.num_vertices();
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
  for (int u = 0; u < n; ++u) {
    if (d.feasible_spins(u).size() < 2) continue;  // conditioning is trivial
    Eigen::VectorXd p1 = Eigen::VectorXd::Zero(n), p0 = Eigen::VectorXd::Zero(n);
    double m1 = 0.0, m0 = 0.0;
    for (int idx = 0; idx < int(d.support().size()); ++idx) {
      double p = d.probs()(idx);
      if (d.support()[idx][u] == 1) {
        m1 += p;
        for (int v = 0; v < n; ++v) p1(v) += p * (d.support()[idx][v] == 1);
      } else {
        m0 += p;
        for (int v = 0; v < n; ++v) p0(v) += p * (d.support()[idx][v] == 1);
      }
    }
    for (int v = 0; v < n; ++v)
      if (v != u) m(u, v) = p1(v) / m1 - p0(v) / m0;
  }
  return m;
}

void for_each_pinning(const ExactDistribution& d,
                      const std::function<void(const Pinning&, const ExactDistribution&)>& fn,
                      const SweepOptions& opts) {
  const int n = d.num_vertices();
  require(n <= 30, errc::instance_too_large, "pinning sweep needs n <= 30");
  std::int64_t visited = 0;
  // Visit pinned sets in increasing size (then numeric order).
  std::vector<std::uint32_t> masks;
  for (std::uint32_t mask = 0; mask < (std::uint32_t(1) << n) - 1; ++mask) masks.push_back(mask);
  std::stable_sort(masks.begin(), masks.end(), [](std::uint32_t a, std::uint32_t b) {
    return std::popcount(a) < std::popcount(b);
  });
  for (std::uint32_t mask : masks) {
    std::vector<int> pos;
    for (int p = 0; p < n; ++p)
      if ((mask >> p) & 1) pos.push_back(p);
    // Feasible taus are the distinct projections of the support onto Lambda.
    std::map<std::vector<std::uint8_t>, char> taus;
    for (const auto& c : d.support()) {
      std::vector<std::uint8_t> t;
      t.reserve(pos.size());
      for (int p : pos) t.push_back(c[p]);
      taus.emplace(std::move(t), 0);
    }
    for (const auto& [tau, unused] : taus) {
      (void)unused;
      visited += 1;
      require(visited <= opts.max_pinnings, errc::instance_too_large,
              "pinning sweep exceeds cap " + std::to_string(opts.max_pinnings));
      Pinning p;
      for (int i = 0; i < int(pos.size()); ++i) p.vertices.push_back(d.scope()[pos[i]]);
      p.spins = tau;
      fn(p, d.condition(p));
    }
  }
}

double spectral_independence(const ExactDistribution& d, const SweepOptions& opts) {
  double eta = 0.0;
  for_each_pinning(
      d,
      [&](const Pinning&, const ExactDistribution& cond) {
        if (cond.num_vertices() < 2) return;
        eta = std::max(eta, influence_matrix(cond).lambda1);
      },
      opts);
  return eta;
}

double marginal_bound(const ExactDistribution& d, const SweepOptions& opts) {
  double b = 1.0;
  for_each_pinning(
      d,
      [&](const Pinning&, const ExactDistribution& cond) {
        for (int p = 0; p < cond.num_vertices(); ++p) {
          auto m = cond.marginal(p);
          for (int i = 0; i < cond.q(); ++i)
            if (m(i) > 0.0) b = std::min(b, m(i));
        }
      },
      opts);
  return b;
}

double max_influence_imag(const ExactDistribution& d, const SweepOptions& opts) {
  double worst = 0.0;
  for_each_pinning(
      d,
      [&](const Pinning&, const ExactDistribution& cond) {
        if (cond.num_vertices() < 2) return;
        worst = std::max(worst, influence_matrix(cond).max_imag);
      },
      opts);
  return worst;
}

bool totally_connected(const ExactDistribution& d, const SweepOptions& opts) {
  bool ok = true;
  for_each_pinning(
      d,
      [&](const Pinning&, const ExactDistribution& cond) {
        if (!ok) return;
        // BFS over the support with single-coordinate moves.
        const auto& supp = cond.support();
        const int m = int(supp.size());
        std::vector<char> seen(m, 0);
        std::vector<int> queue{0};
        seen[0] = 1;
        int reached = 1;
        while (!queue.empty()) {
          int cur = queue.back();
          queue.pop_back();
          for (int other = 0; other < m; ++other) {
            if (seen[other]) continue;
            int diff = 0;
            for (int p = 0; p < cond.num_vertices() && diff <= 1; ++p)
              diff += supp[cur][p] != supp[other][p];
            if (diff == 1) {
              seen[other] = 1;
              ++reached;
              queue.push_back(other);
            }
          }
        }
        if (reached != m) ok = false;
      },
      opts);
  return ok;
}

std::string distribution_to_json(const ExactDistribution& d) {
  std::ostringstream out;
  out.precision(17);
  out << "{\"q\":" << d.q() << ",\"scope\":[";
  for (int i = 0; i < int(d.scope().size()); ++i)
    out << (i ? "," : "") << d.scope()[i];
  out << "],\"z\":" << d.z() << ",\"support\":[";
  for (int i = 0; i < int(d.support().size()); ++i)
    out << (i ? "," : "") << '"' << d.config_string(i) << '"';
  out << "],\"probs\":[";
  for (int i = 0; i < d.probs().size(); ++i) out << (i ? "," : "") << d.probs()(i);
  out << "]}";
  return out.str();
}

std::string matrix_to_csv(const Eigen::MatrixXd& m) {
  std::ostringstream out;
  out.precision(17);
  for (int i = 0; i < m.rows(); ++i) {
    for (int j = 0; j < m.cols(); ++j) out << (j ? "," : "") << m(i, j);
    out << "\n";
  }
  return out.str();
}

}  // namespace glab
