#include "glab/graph_enum.hpp"

#include <algorithm>
#include <bit>
#include <numeric>
#include <set>

namespace glab {

namespace {

// Edge bit layout: pair (i, j), i < j, at index j*(j-1)/2 + i.
int edge_bit(int i, int j) {
  if (i > j) std::swap(i, j);
  return j * (j - 1) / 2 + i;
}

bool mask_connected_graph(int n, std::uint32_t edge_mask) {
  std::vector<std::uint32_t> adj(n, 0);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < j; ++i)
      if ((edge_mask >> edge_bit(i, j)) & 1) {
        adj[i] |= std::uint32_t(1) << j;
        adj[j] |= std::uint32_t(1) << i;
      }
  std::uint32_t seen = 1, frontier = 1;
  while (frontier) {
    std::uint32_t grow = 0;
    for (int v = 0; v < n; ++v)
      if ((frontier >> v) & 1) grow |= adj[v];
    frontier = grow & ~seen;
    seen |= grow;
  }
  return seen == (std::uint32_t(1) << n) - 1;
}

}  // namespace

std::vector<Graph> connected_graph_classes(int n) {
  require(2 <= n && n <= 7, errc::size_out_of_range, "class enumeration for 2 <= n <= 7");
  const int bits = n * (n - 1) / 2;
  // Precompute, for every permutation, where each edge bit goes.
  std::vector<int> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  std::vector<std::vector<int>> moves;  // per permutation: edge bit map
  do {
    std::vector<int> map(bits);
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < j; ++i) map[edge_bit(i, j)] = edge_bit(perm[i], perm[j]);
    moves.push_back(std::move(map));
  } while (std::next_permutation(perm.begin(), perm.end()));

  std::set<std::uint32_t> canonical;
  for (std::uint32_t mask = 1; mask < (std::uint32_t(1) << bits); ++mask) {
    if (!mask_connected_graph(n, mask)) continue;
    std::uint32_t best = mask;
    for (const auto& map : moves) {
      std::uint32_t image = 0;
      std::uint32_t m = mask;
      while (m) {
        int b = std::countr_zero(m);
        m &= m - 1;
        image |= std::uint32_t(1) << map[b];
      }
      best = std::min(best, image);
    }
    canonical.insert(best);
  }
  std::vector<Graph> out;
  for (std::uint32_t mask : canonical) {
    std::vector<std::pair<int, int>> edges;
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < j; ++i)
        if ((mask >> edge_bit(i, j)) & 1) edges.push_back({i, j});
    out.push_back(Graph::build(n, edges));
  }
  return out;
}

std::vector<Graph> connected_graph_classes_up_to(int max_n) {
  std::vector<Graph> out;
  for (int n = 2; n <= max_n; ++n) {
    auto cls = connected_graph_classes(n);
    out.insert(out.end(), cls.begin(), cls.end());
  }
  return out;
}

void for_each_labeled_graph(int n, int degree_cap,
                            const std::function<void(const Graph&)>& fn) {
  require(1 <= n && n <= 7, errc::size_out_of_range, "labeled enumeration for n <= 7");
  const int bits = n * (n - 1) / 2;
  std::vector<std::pair<int, int>> bit_edge(bits);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < j; ++i) bit_edge[edge_bit(i, j)] = {i, j};
  for (std::uint32_t mask = 0; mask < (std::uint32_t(1) << bits); ++mask) {
    int degree[7] = {0, 0, 0, 0, 0, 0, 0};
    bool ok = true;
    std::uint32_t m = mask;
    while (m && ok) {
      int b = std::countr_zero(m);
      m &= m - 1;
      auto [i, j] = bit_edge[b];
      ok = ++degree[i] <= degree_cap && ++degree[j] <= degree_cap;
    }
    if (!ok) continue;
    std::vector<std::pair<int, int>> edges;
    m = mask;
    while (m) {
      int b = std::countr_zero(m);
      m &= m - 1;
      edges.push_back(bit_edge[b]);
    }
    fn(Graph::build(n, edges));
  }
}

Graph random_connected_graph(int n, double edge_prob, CounterRng& rng) {
  require(n >= 2, errc::size_out_of_range, "need n >= 2");
  for (int attempt = 0; attempt < 10000; ++attempt) {
    std::vector<std::pair<int, int>> edges;
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < j; ++i)
        if (rng.uniform() < edge_prob) edges.push_back({i, j});
    auto g = Graph::build(n, edges);
    std::vector<int> all(n);
    std::iota(all.begin(), all.end(), 0);
    if (int(components_within(g, all).blocks.size()) == 1) return g;
  }
  fail(errc::size_out_of_range, "random connected graph: too many rejections");
}

}  // namespace glab
