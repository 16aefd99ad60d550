#include "glab/graph.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <queue>
#include <set>
#include <sstream>

namespace glab {

const char* errc_name(errc code) {
  switch (code) {
    case errc::duplicate_edge: return "DuplicateEdge";
    case errc::self_loop: return "SelfLoop";
    case errc::vertex_out_of_range: return "VertexOutOfRange";
    case errc::empty_edge_set: return "EmptyEdgeSet";
    case errc::size_out_of_range: return "SizeOutOfRange";
    case errc::instance_too_large: return "InstanceTooLarge";
    case errc::non_positive_parameter: return "NonPositiveParameter";
    case errc::degree_too_small: return "DegreeTooSmall";
    case errc::not_antiferromagnetic: return "NotAntiferromagnetic";
    case errc::fixed_point_no_converge: return "FixedPointNoConverge";
    case errc::empty_support: return "EmptySupport";
    case errc::infeasible_pinning: return "InfeasiblePinning";
    case errc::negative_function_value: return "NegativeFunctionValue";
    case errc::support_mismatch: return "SupportMismatch";
    case errc::too_few_free_vertices: return "TooFewFreeVertices";
    case errc::infeasible_face: return "InfeasibleFace";
    case errc::level_too_high: return "LevelTooHigh";
    case errc::parameter_out_of_range: return "ParameterOutOfRange";
    case errc::degenerate_entropy: return "DegenerateEntropy";
    case errc::infeasible_state: return "InfeasibleState";
    case errc::not_ergodic: return "NotErgodic";
    case errc::degenerate_kl: return "DegenerateKL";
    case errc::degenerate_denominator: return "DegenerateDenominator";
    case errc::theta_too_large: return "ThetaTooLarge";
    case errc::n_too_small: return "NTooSmall";
    case errc::not_a_tree: return "NotATree";
    case errc::path_tree_too_large: return "PathTreeTooLarge";
    case errc::config_parse: return "ConfigParse";
  }
  return "UnknownError";
}

std::int64_t binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  k = std::min(k, n - k);
  std::int64_t r = 1;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

void Graph::check_vertex(int v) const {
  require(v >= 0 && v < n_, errc::vertex_out_of_range,
          "vertex " + std::to_string(v) + " not in [0, " + std::to_string(n_) + ")");
}

Graph Graph::build(int n, std::vector<std::pair<int, int>> edges) {
  require(n >= 0, errc::vertex_out_of_range, "negative vertex count");
  Graph g;
  g.n_ = n;
  g.adj_.assign(n, {});
  g.adj_mask_.assign(n, 0);
  std::set<std::pair<int, int>> seen;
  for (auto [u, v] : edges) {
    g.check_vertex(u);
    g.check_vertex(v);
    require(u != v, errc::self_loop, "self-loop at vertex " + std::to_string(u));
    auto e = std::minmax(u, v);
    require(seen.insert({e.first, e.second}).second, errc::duplicate_edge,
            "duplicate edge (" + std::to_string(e.first) + "," + std::to_string(e.second) + ")");
  }
  g.edges_.assign(seen.begin(), seen.end());
  for (auto [u, v] : g.edges_) {
    g.adj_[u].push_back(v);
    g.adj_[v].push_back(u);
    if (n <= 64) {
      g.adj_mask_[u] |= std::uint64_t(1) << v;
      g.adj_mask_[v] |= std::uint64_t(1) << u;
    }
  }
  for (auto& a : g.adj_) {
    std::sort(a.begin(), a.end());
    g.max_degree_ = std::max(g.max_degree_, int(a.size()));
  }
  return g;
}

Graph Graph::path(int n) {
  std::vector<std::pair<int, int>> e;
  for (int i = 0; i + 1 < n; ++i) e.push_back({i, i + 1});
  return build(n, e);
}

Graph Graph::cycle(int n) {
  require(n >= 3, errc::size_out_of_range, "cycle needs >= 3 vertices");
  std::vector<std::pair<int, int>> e;
  for (int i = 0; i < n; ++i) e.push_back({i, (i + 1) % n});
  return build(n, e);
}

Graph Graph::complete(int n) {
  std::vector<std::pair<int, int>> e;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) e.push_back({i, j});
  return build(n, e);
}

Graph Graph::star(int leaves) {
  std::vector<std::pair<int, int>> e;
  for (int i = 1; i <= leaves; ++i) e.push_back({0, i});
  return build(leaves + 1, e);
}

Graph Graph::random_regular(int n, int degree, CounterRng& rng) {
  require(degree >= 0 && degree < n, errc::size_out_of_range, "degree out of range");
  require(n * degree % 2 == 0, errc::size_out_of_range, "n*degree must be even");
  // Pairing model with rejection of loops and repeats.
  for (int attempt = 0; attempt < 10000; ++attempt) {
    std::vector<int> stubs;
    stubs.reserve(n * degree);
    for (int v = 0; v < n; ++v)
      for (int i = 0; i < degree; ++i) stubs.push_back(v);
    for (int i = int(stubs.size()) - 1; i > 0; --i)
      std::swap(stubs[i], stubs[rng.below(i + 1)]);
    std::set<std::pair<int, int>> es;
    bool ok = true;
    for (size_t i = 0; i + 1 < stubs.size() && ok; i += 2) {
      int u = stubs[i], v = stubs[i + 1];
      if (u == v) ok = false;
      else ok = es.insert(std::minmax(u, v)).second;
    }
    if (ok) return build(n, {es.begin(), es.end()});
  }
  fail(errc::size_out_of_range, "random_regular: no simple pairing found");
}

const std::vector<int>& Graph::neighbors(int v) const {
  check_vertex(v);
  return adj_[v];
}

std::uint64_t Graph::neighbor_mask(int v) const {
  check_vertex(v);
  return adj_mask_[v];
}

bool Graph::adjacent(int u, int v) const {
  check_vertex(u);
  check_vertex(v);
  if (n_ <= 64) return (adj_mask_[u] >> v) & 1;
  return std::binary_search(adj_[u].begin(), adj_[u].end(), v);
}

int Graph::degree(int v) const {
  check_vertex(v);
  return int(adj_[v].size());
}

int Graph::edge_index(int u, int v) const {
  auto e = std::minmax(u, v);
  auto it = std::lower_bound(edges_.begin(), edges_.end(), std::make_pair(e.first, e.second));
  if (it == edges_.end() || *it != std::make_pair(e.first, e.second)) return -1;
  return int(it - edges_.begin());
}

Graph read_graph(std::istream& in) {
  std::string line;
  int lineno = 0;
  auto next_line = [&]() -> bool {
    while (std::getline(in, line)) {
      ++lineno;
      return true;
    }
    return false;
  };
  require(next_line(), errc::config_parse, "line 1: missing header \"n m\"");
  std::istringstream head(line);
  int n = 0, m = 0;
  std::string extra;
  require(bool(head >> n >> m) && !(head >> extra), errc::config_parse,
          "line " + std::to_string(lineno) + ": expected header \"n m\"");
  require(n >= 0 && m >= 0, errc::config_parse,
          "line " + std::to_string(lineno) + ": negative count");
  std::vector<std::pair<int, int>> edges;
  for (int i = 0; i < m; ++i) {
    require(next_line(), errc::config_parse,
            "line " + std::to_string(lineno + 1) + ": expected edge " + std::to_string(i + 1) +
                " of " + std::to_string(m));
    std::istringstream row(line);
    int u = 0, v = 0;
    require(bool(row >> u >> v) && !(row >> extra), errc::config_parse,
            "line " + std::to_string(lineno) + ": expected \"u v\"");
    try {
      edges.push_back({u, v});
      Graph::build(n, {{u, v}});
    } catch (const error& e) {
      fail(errc::config_parse, "line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  while (std::getline(in, line)) {
    ++lineno;
    require(line.find_first_not_of(" \t\r") == std::string::npos, errc::config_parse,
            "line " + std::to_string(lineno) + ": unexpected content after " +
                std::to_string(m) + " edges");
  }
  try {
    return Graph::build(n, edges);
  } catch (const error& e) {
    fail(errc::config_parse, std::string("graph file: ") + e.what());
  }
}

Graph read_graph_file(const std::string& path) {
  std::ifstream in(path);
  require(in.good(), errc::config_parse, "cannot open graph file " + path);
  return read_graph(in);
}

void write_graph(std::ostream& out, const Graph& g) {
  out << g.num_vertices() << " " << g.num_edges() << "\n";
  for (auto [u, v] : g.edges()) out << u << " " << v << "\n";
}

LineGraph line_graph(const Graph& g) {
  require(g.num_edges() >= 1, errc::empty_edge_set, "line graph of an edgeless graph");
  std::vector<std::pair<int, int>> le;
  const auto& es = g.edges();
  for (int i = 0; i < int(es.size()); ++i)
    for (int j = i + 1; j < int(es.size()); ++j) {
      auto [a, b] = es[i];
      auto [c, d] = es[j];
      if (a == c || a == d || b == c || b == d) le.push_back({i, j});
    }
  return LineGraph{Graph::build(int(es.size()), le), es};
}

int RootedTree::max_degree() const {
  int best = 0;
  for (int i = 0; i < size(); ++i) {
    int d = int(nodes[i].children.size()) + (nodes[i].parent >= 0 ? 1 : 0);
    best = std::max(best, d);
  }
  return best;
}

RootedTree root_tree(const Graph& g, int root) {
  require(root >= 0 && root < g.num_vertices(), errc::vertex_out_of_range, "root");
  require(g.num_edges() == g.num_vertices() - 1, errc::not_a_tree, "edge count");
  RootedTree t;
  t.nodes.resize(g.num_vertices());
  std::vector<int> vertex_node(g.num_vertices(), -1);
  std::queue<int> bfs;
  t.nodes[0].origin_vertex = root;
  vertex_node[root] = 0;
  bfs.push(root);
  int made = 1;
  while (!bfs.empty()) {
    int v = bfs.front();
    bfs.pop();
    int vn = vertex_node[v];
    for (int u : g.neighbors(v)) {
      if (vertex_node[u] >= 0) continue;
      require(made < int(t.nodes.size()), errc::not_a_tree, "cycle detected");
      int un = made++;
      vertex_node[u] = un;
      t.nodes[un].parent = vn;
      t.nodes[un].origin_vertex = u;
      t.nodes[un].origin_edge = g.edge_index(v, u);
      t.nodes[vn].children.push_back(un);
      bfs.push(u);
    }
  }
  require(made == g.num_vertices(), errc::not_a_tree, "graph is disconnected");
  return t;
}

RootedTree path_tree(const Graph& g, int r, std::int64_t max_nodes) {
  require(r >= 0 && r < g.num_vertices(), errc::vertex_out_of_range, "root");
  require(g.num_vertices() <= 64, errc::instance_too_large, "path tree needs n <= 64");
  RootedTree t;
  t.nodes.push_back({});
  t.nodes[0].origin_vertex = r;
  // BFS over self-avoiding walks; the visited set of the walk to each node
  // determines its feasible extensions.
  std::vector<std::uint64_t> visited{std::uint64_t(1) << r};
  std::queue<int> bfs;
  bfs.push(0);
  while (!bfs.empty()) {
    int node = bfs.front();
    bfs.pop();
    int v = t.nodes[node].origin_vertex;
    for (int u : g.neighbors(v)) {
      if ((visited[node] >> u) & 1) continue;
      require(std::int64_t(t.nodes.size()) < max_nodes, errc::path_tree_too_large,
              "path tree exceeds " + std::to_string(max_nodes) + " nodes");
      int child = int(t.nodes.size());
      t.nodes.push_back({});
      t.nodes[child].parent = node;
      t.nodes[child].origin_vertex = u;
      t.nodes[child].origin_edge = g.edge_index(v, u);
      t.nodes[node].children.push_back(child);
      visited.push_back(visited[node] | (std::uint64_t(1) << u));
      bfs.push(child);
    }
  }
  return t;
}

namespace {

// Component labels within a vertex mask, n <= 64.
void mask_components(const Graph& g, std::uint64_t mask, std::vector<int>& label) {
  label.assign(g.num_vertices(), -1);
  int next = 0;
  for (int v = 0; v < g.num_vertices(); ++v) {
    if (!((mask >> v) & 1) || label[v] >= 0) continue;
    std::uint64_t frontier = std::uint64_t(1) << v, comp = 0;
    while (frontier) {
      comp |= frontier;
      std::uint64_t grow = 0;
      std::uint64_t f = frontier;
      while (f) {
        int u = std::countr_zero(f);
        f &= f - 1;
        grow |= g.neighbor_mask(u) & mask;
      }
      frontier = grow & ~comp;
    }
    std::uint64_t c = comp;
    while (c) {
      int u = std::countr_zero(c);
      c &= c - 1;
      label[u] = next;
    }
    ++next;
  }
}

bool mask_connected(const Graph& g, std::uint64_t mask) {
  if (mask == 0) return true;
  int v = std::countr_zero(mask);
  std::uint64_t frontier = std::uint64_t(1) << v, comp = 0;
  while (frontier) {
    comp |= frontier;
    std::uint64_t grow = 0;
    std::uint64_t f = frontier;
    while (f) {
      int u = std::countr_zero(f);
      f &= f - 1;
      grow |= g.neighbor_mask(u) & mask;
    }
    frontier = grow & ~comp;
  }
  return comp == mask;
}

}  // namespace

ComponentStructure components_within(const Graph& g, const std::vector<int>& s) {
  require(g.num_vertices() <= 64, errc::instance_too_large, "components need n <= 64");
  std::uint64_t mask = 0;
  for (int v : s) {
    require(v >= 0 && v < g.num_vertices(), errc::vertex_out_of_range,
            "subset vertex " + std::to_string(v));
    mask |= std::uint64_t(1) << v;
  }
  ComponentStructure cs;
  std::vector<int> label;
  mask_components(g, mask, label);
  cs.block_of = label;
  int blocks = 0;
  for (int v = 0; v < g.num_vertices(); ++v) blocks = std::max(blocks, label[v] + 1);
  cs.blocks.resize(blocks);
  for (int v = 0; v < g.num_vertices(); ++v)
    if (label[v] >= 0) cs.blocks[label[v]].push_back(v);
  return cs;
}

std::int64_t count_connected_supersets(const Graph& g, int v, int k) {
  const int n = g.num_vertices();
  require(v >= 0 && v < n, errc::vertex_out_of_range, "vertex");
  require(k >= 1 && k <= n, errc::size_out_of_range, "k must be in [1, n]");
  require(n <= 62, errc::instance_too_large, "count needs n <= 62");
  if (k == 1) return 1;
  std::int64_t count = 0;
  // Iterate size-(k-1) subsets of V \ {v} via Gosper's hack over compacted ids.
  std::vector<int> others;
  for (int u = 0; u < n; ++u)
    if (u != v) others.push_back(u);
  const int m = int(others.size());
  if (k - 1 > m) return 0;
  std::uint64_t sub = (std::uint64_t(1) << (k - 1)) - 1;
  const std::uint64_t limit = std::uint64_t(1) << m;
  while (sub < limit) {
    std::uint64_t mask = std::uint64_t(1) << v;
    std::uint64_t s = sub;
    while (s) {
      int b = std::countr_zero(s);
      s &= s - 1;
      mask |= std::uint64_t(1) << others[b];
    }
    if (mask_connected(g, mask)) ++count;
    std::uint64_t c = sub & -sub, r = sub + c;
    sub = (((r ^ sub) >> 2) / c) | r;
  }
  return count;
}

std::vector<std::vector<double>> component_size_distribution(const Graph& g, int ell,
                                                             std::int64_t subset_cap) {
  const int n = g.num_vertices();
  require(ell >= 1 && ell <= n, errc::size_out_of_range, "ell must be in [1, n]");
  require(n <= 62, errc::instance_too_large, "n <= 62 required");
  const std::int64_t total = binomial(n, ell);
  require(total <= subset_cap, errc::instance_too_large,
          "C(n, ell) = " + std::to_string(total) + " exceeds subset cap");
  std::vector<std::vector<std::int64_t>> tally(n, std::vector<std::int64_t>(n + 1, 0));
  std::vector<int> label;
  std::uint64_t sub = (std::uint64_t(1) << ell) - 1;
  const std::uint64_t limit = n == 62 ? ~std::uint64_t(0) : (std::uint64_t(1) << n);
  std::vector<int> comp_size(n, 0);
  while (sub < limit) {
    mask_components(g, sub, label);
    std::fill(comp_size.begin(), comp_size.end(), 0);
    for (int u = 0; u < n; ++u)
      if (label[u] >= 0) ++comp_size[label[u]];
    std::uint64_t s = sub;
    while (s) {
      int u = std::countr_zero(s);
      s &= s - 1;
      ++tally[u][comp_size[label[u]]];
    }
    if (ell == n) break;
    std::uint64_t c = sub & -sub, r = sub + c;
    sub = (((r ^ sub) >> 2) / c) | r;
  }
  std::vector<std::vector<double>> dist(n, std::vector<double>(n + 1, 0.0));
  for (int u = 0; u < n; ++u) {
    for (int k = 1; k <= n; ++k) dist[u][k] = double(tally[u][k]) / double(total);
    double in_s = 0;
    for (int k = 1; k <= n; ++k) in_s += dist[u][k];
    dist[u][0] = 1.0 - in_s;  // P(v not in S), so rows sum to 1
  }
  return dist;
}

double component_size_probability(const Graph& g, int v, int ell, int k,
                                  std::int64_t subset_cap) {
  const int n = g.num_vertices();
  require(v >= 0 && v < n, errc::vertex_out_of_range, "vertex");
  require(k >= 1 && k <= ell && ell <= n, errc::size_out_of_range, "need 1 <= k <= ell <= n");
  return component_size_distribution(g, ell, subset_cap)[v][k];
}

}  // namespace glab
