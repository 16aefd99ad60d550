#pragma once

#include <bit>
#include <cmath>
#include <cstdint>
#include <vector>

#include "glab/exact_dist.hpp"
#include "glab/graph.hpp"
#include "glab/rng.hpp"
#include "glab/spin_system.hpp"

namespace glab::testing {

inline Eigen::VectorXd random_positive(int n, CounterRng& rng) {
  Eigen::VectorXd f(n);
  for (int i = 0; i < n; ++i) f(i) = std::exp(rng.normal());
  return f;
}

// Brute-force matching enumeration oracle: weight lambda^|M| per matching.
struct MatchingEnumeration {
  double z = 0;
  std::vector<std::uint32_t> matchings;  // edge masks
  std::vector<double> weights;
};

inline MatchingEnumeration enumerate_matchings(const Graph& g, double lambda) {
  MatchingEnumeration out;
  const int m = g.num_edges();
  for (std::uint32_t mask = 0; mask < (std::uint32_t(1) << m); ++mask) {
    bool ok = true;
    std::uint64_t used = 0;
    for (int e = 0; e < m && ok; ++e) {
      if (!((mask >> e) & 1)) continue;
      auto [u, v] = g.edges()[e];
      std::uint64_t bits = (std::uint64_t(1) << u) | (std::uint64_t(1) << v);
      ok = !(used & bits);
      used |= bits;
    }
    if (!ok) continue;
    out.matchings.push_back(mask);
    out.weights.push_back(std::pow(lambda, std::popcount(mask)));
    out.z += out.weights.back();
  }
  return out;
}

// P(f in M) by brute force.
inline double brute_edge_in_prob(const Graph& g, double lambda, int edge) {
  auto en = enumerate_matchings(g, lambda);
  double mass = 0;
  for (int i = 0; i < int(en.matchings.size()); ++i)
    if ((en.matchings[i] >> edge) & 1) mass += en.weights[i];
  return mass / en.z;
}

// P(f in M | e in M) - P(f in M | e out) by brute force.
inline double brute_edge_influence(const Graph& g, double lambda, int e, int f) {
  auto en = enumerate_matchings(g, lambda);
  double in_e = 0, in_both = 0, out_e = 0, out_e_in_f = 0;
  for (int i = 0; i < int(en.matchings.size()); ++i) {
    bool has_e = (en.matchings[i] >> e) & 1, has_f = (en.matchings[i] >> f) & 1;
    if (has_e) {
      in_e += en.weights[i];
      if (has_f) in_both += en.weights[i];
    } else {
      out_e += en.weights[i];
      if (has_f) out_e_in_f += en.weights[i];
    }
  }
  return in_both / in_e - out_e_in_f / out_e;
}

// Small instance battery used across the suites: (system, graph) pairs with
// n <= 5 and enumerable support.
struct Instance {
  const char* name;
  SpinSystem system;
  Graph graph;
};

inline std::vector<Instance> small_instances() {
  std::vector<Instance> out;
  auto k2 = Graph::build(2, {{0, 1}});
  out.push_back({"hardcore1-K2", hardcore(1.0), k2});
  out.push_back({"hardcore2-P3", hardcore(2.0), Graph::path(3)});
  out.push_back({"hardcore0.5-C4", hardcore(0.5), Graph::cycle(4)});
  out.push_back({"hardcore1-star3", hardcore(1.0), Graph::star(3)});
  out.push_back({"ising0.5-P3", ising(0.5, 1.0), Graph::path(3)});
  out.push_back({"ising2-C4", ising(2.0, 1.0), Graph::cycle(4)});
  out.push_back({"colorings3-P3", colorings(3), Graph::path(3)});
  out.push_back({"colorings3-C4", colorings(3), Graph::cycle(4)});
  out.push_back({"product-binary3", ising(1.0, 2.0), Graph::empty(3)});
  out.push_back({"hardcore1-P5", hardcore(1.0), Graph::path(5)});
  return out;
}

}  // namespace glab::testing
