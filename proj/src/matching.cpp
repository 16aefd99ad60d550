#include "glab/matching.hpp"

#include <Eigen/Eigenvalues>
#include <bit>
#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace glab {

namespace {

// Kahan-compensated accumulator for influence row totals.
struct Compensated {
  double sum = 0, c = 0;
  void add(double x) {
    double y = x - c;
    double t = sum + y;
    c = (t - sum) - y;
    sum = t;
  }
};

}  // namespace

MatchingOracle::MatchingOracle(const Graph& g, std::vector<double> edge_activities)
    : g_(&g), x_(std::move(edge_activities)) {
  require(g.num_vertices() <= 31, errc::instance_too_large, "matching oracle needs n <= 31");
  require(int(x_.size()) == g.num_edges(), errc::parameter_out_of_range,
          "one activity per edge");
  for (double a : x_)
    require(a >= 0.0, errc::non_positive_parameter, "activities must be nonnegative");
}

std::uint32_t MatchingOracle::full_mask() const {
  return g_->num_vertices() == 31 ? 0x7FFFFFFFu
                                  : (std::uint32_t(1) << g_->num_vertices()) - 1;
}

double MatchingOracle::value(std::uint32_t mask) const {
  if (mask == 0) return 1.0;
  auto it = memo_.find(mask);
  if (it != memo_.end()) return it->second;
  // Delete the lowest vertex r: matchings avoiding r, plus matchings using
  // one of its live incident edges.
  int r = std::countr_zero(mask);
  std::uint32_t rest = mask & ~(std::uint32_t(1) << r);
  double total = value(rest);
  for (int v : g_->neighbors(r)) {
    if (!((mask >> v) & 1)) continue;
    double a = x_[g_->edge_index(r, v)];
    if (a == 0.0) continue;
    total += a * value(rest & ~(std::uint32_t(1) << v));
  }
  memo_.emplace(mask, total);
  return total;
}

double MatchingOracle::full() const { return value(full_mask()); }

double MatchingOracle::edge_in_probability(int edge, std::uint32_t mask) const {
  auto [u, v] = g_->edges()[edge];
  require(((mask >> u) & 1) && ((mask >> v) & 1), errc::parameter_out_of_range,
          "edge endpoints outside the mask");
  double denom = value(mask);
  std::uint32_t both = (std::uint32_t(1) << u) | (std::uint32_t(1) << v);
  return x_[edge] * value(mask & ~both) / denom;
}

double matching_poly(const Graph& g, const std::vector<double>& x) {
  return MatchingOracle(g, x).full();
}

double matching_poly(const Graph& g, double lambda) {
  return matching_poly(g, std::vector<double>(g.num_edges(), lambda));
}

PinnedHost apply_edge_pinning(const Graph& g, double lambda, const EdgePinning& pin) {
  require(pin.edges.size() == pin.values.size(), errc::infeasible_pinning, "pinning shape");
  PinnedHost host;
  host.activities.assign(g.num_edges(), lambda);
  host.edge_present.assign(g.num_edges(), 1);
  std::vector<char> saturated(g.num_vertices(), 0);
  for (int i = 0; i < int(pin.edges.size()); ++i) {
    int e = pin.edges[i];
    require(e >= 0 && e < g.num_edges(), errc::infeasible_pinning, "pinned edge id");
    if (pin.values[i] == 1) {  // out of the matching: delete the edge
      host.edge_present[e] = 0;
    } else {  // in the matching: both endpoints saturated
      auto [u, v] = g.edges()[e];
      require(!saturated[u] && !saturated[v], errc::infeasible_pinning,
              "pinned-in edges must form a matching");
      saturated[u] = saturated[v] = 1;
      host.edge_present[e] = 0;
    }
  }
  for (int e = 0; e < g.num_edges(); ++e) {
    auto [u, v] = g.edges()[e];
    if (saturated[u] || saturated[v]) host.edge_present[e] = 0;
    if (!host.edge_present[e]) host.activities[e] = 0.0;
  }
  return host;
}

double edge_influence(const Graph& g, const std::vector<double>& x, int e, int f) {
  require(e != f, errc::parameter_out_of_range, "influence needs distinct edges");
  auto [eu, ev] = g.edges()[e];
  auto [fu, fv] = g.edges()[f];
  MatchingOracle base(g, x);
  const std::uint32_t full = base.full_mask();
  const std::uint32_t e_ends = (std::uint32_t(1) << eu) | (std::uint32_t(1) << ev);
  // P(f in M | e in M): 0 when the edges share an endpoint.
  double in_in = 0.0;
  if (eu != fu && eu != fv && ev != fu && ev != fv)
    in_in = base.edge_in_probability(f, full & ~e_ends);
  // P(f in M | e out): condition by deleting the edge e.
  std::vector<double> x_del = x;
  x_del[e] = 0.0;
  double in_out = MatchingOracle(g, x_del).edge_in_probability(f, full);
  return in_in - in_out;
}

EdgeInfluenceTable edge_influence_table(const Graph& g, double lambda, int e,
                                        const EdgePinning& pin) {
  auto host = apply_edge_pinning(g, lambda, pin);
  require(e >= 0 && e < g.num_edges(), errc::parameter_out_of_range, "edge id");
  require(host.edge_present[e], errc::infeasible_pinning,
          "source edge must be free and feasible both ways");
  EdgeInfluenceTable table;
  table.source_edge = e;
  Compensated total;
  for (int f = 0; f < g.num_edges(); ++f) {
    if (f == e || !host.edge_present[f]) continue;
    double val = edge_influence(g, host.activities, e, f);
    table.entries.push_back({f, val});
    total.add(std::abs(val));
  }
  table.row_total = total.sum;
  return table;
}

EdgeInfluenceMatrix edge_influence_matrix(const Graph& g, double lambda) {
  return edge_influence_matrix(g, lambda, EdgePinning{});
}

EdgeInfluenceMatrix edge_influence_matrix(const Graph& g, double lambda,
                                          const EdgePinning& pin) {
  auto host = apply_edge_pinning(g, lambda, pin);
  std::vector<int> live;
  for (int e = 0; e < g.num_edges(); ++e)
    if (host.edge_present[e]) live.push_back(e);
  EdgeInfluenceMatrix out;
  const int m = int(live.size());
  out.influence = Eigen::MatrixXd::Zero(m, m);
  for (int a = 0; a < m; ++a) {
    Compensated row;
    for (int b = 0; b < m; ++b) {
      if (a == b) continue;
      out.influence(a, b) = edge_influence(g, host.activities, live[a], live[b]);
      row.add(std::abs(out.influence(a, b)));
    }
    out.max_row_total = std::max(out.max_row_total, row.sum);
  }
  if (m >= 1) {
    Eigen::EigenSolver<Eigen::MatrixXd> es(out.influence, false);
    out.lambda1 = es.eigenvalues().real().maxCoeff();
    out.max_imag = es.eigenvalues().imag().cwiseAbs().maxCoeff();
  }
  return out;
}

TreeRecursionState tree_recursion(const RootedTree& t, double lambda) {
  require(lambda > 0, errc::non_positive_parameter, "lambda");
  TreeRecursionState st;
  st.lambda = lambda;
  st.unmatched.assign(t.size(), 1.0);
  // Nodes are BFS-ordered (parents precede children), so one reverse pass is
  // a valid bottom-up order.
  for (int u = t.size() - 1; u >= 0; --u) {
    double s = 0;
    for (int c : t.nodes[u].children) s += st.unmatched[c];
    st.unmatched[u] = 1.0 / (1.0 + lambda * s);
  }
  return st;
}

namespace {

// Unmatched probability of `vertex` in its component of the tree, walking
// away from `blocked` (treated as absent), skipping one deleted edge and up
// to two deleted nodes.  Iterative bottom-up over a BFS order.
double component_unmatched(const RootedTree& t, double lambda, int vertex, int blocked,
                           int deleted_edge, int dead_a, int dead_b) {
  auto alive = [&](int u) { return u != dead_a && u != dead_b; };
  auto edge_ok = [&](int child_node) { return child_node != deleted_edge; };
  // Collect the reachable side with parent pointers relative to `vertex`.
  std::vector<int> order{vertex};
  std::vector<int> parent_of{blocked};
  std::vector<std::pair<int, int>> stack{{vertex, blocked}};
  std::vector<double> p;
  std::vector<std::vector<int>> kids;
  std::vector<int> slot(t.size(), -1);
  slot[vertex] = 0;
  kids.push_back({});
  while (!stack.empty()) {
    auto [u, par] = stack.back();
    stack.pop_back();
    // Tree neighbors: parent link and children; the connecting edge of node w
    // (w != root) has id w.
    auto visit = [&](int w, int edge_id) {
      if (w < 0 || w == par || !alive(w) || !edge_ok(edge_id)) return;
      int s = int(order.size());
      slot[w] = s;
      order.push_back(w);
      parent_of.push_back(u);
      kids.push_back({});
      kids[slot[u]].push_back(s);
      stack.push_back({w, u});
    };
    if (alive(u)) {
      visit(t.nodes[u].parent, u);
      for (int c : t.nodes[u].children) visit(c, c);
    }
  }
  p.assign(order.size(), 1.0);
  for (int i = int(order.size()) - 1; i >= 0; --i) {
    double s = 0;
    for (int k : kids[i]) s += p[k];
    p[i] = 1.0 / (1.0 + lambda * s);
  }
  return p[0];
}

}  // namespace

double tree_edge_in_probability(const RootedTree& t, double lambda, int f, int deleted_edge,
                                int dead_a, int dead_b) {
  auto [a, b] = t.edge_endpoints(f);
  if (a == dead_a || a == dead_b || b == dead_a || b == dead_b || f == deleted_edge) return 0.0;
  double pa = component_unmatched(t, lambda, a, b, deleted_edge, dead_a, dead_b);
  double pb = component_unmatched(t, lambda, b, a, deleted_edge, dead_a, dead_b);
  double w = lambda * pa * pb;
  return w / (1.0 + w);
}

double tree_edge_influence(const RootedTree& t, double lambda, int e, int f) {
  require(e != f, errc::parameter_out_of_range, "influence needs distinct edges");
  require(e >= 1 && e < t.size() && f >= 1 && f < t.size(), errc::parameter_out_of_range,
          "tree edges are node ids 1..size-1");
  auto [eu, ev] = t.edge_endpoints(e);
  auto [fu, fv] = t.edge_endpoints(f);
  // P(f in M | e in M): delete e's endpoints.
  double in_in = 0.0;
  if (eu != fu && eu != fv && ev != fu && ev != fv)
    in_in = tree_edge_in_probability(t, lambda, f, -1, eu, ev);
  double in_out = tree_edge_in_probability(t, lambda, f, e);
  return in_in - in_out;
}

namespace {

int node_depth(const RootedTree& t, int u) {
  int d = 0;
  while (t.nodes[u].parent >= 0) {
    u = t.nodes[u].parent;
    ++d;
  }
  return d;
}

// Edge ids (node ids stepped from) along the vertex path x -> y.
std::vector<int> vertex_path_edges(const RootedTree& t, int x, int y) {
  std::vector<int> up, down;
  int dx = node_depth(t, x), dy = node_depth(t, y);
  while (dx > dy) {
    up.push_back(x);
    x = t.nodes[x].parent;
    --dx;
  }
  while (dy > dx) {
    down.push_back(y);
    y = t.nodes[y].parent;
    --dy;
  }
  while (x != y) {
    up.push_back(x);
    down.push_back(y);
    x = t.nodes[x].parent;
    y = t.nodes[y].parent;
  }
  up.insert(up.end(), down.rbegin(), down.rend());
  return up;
}

}  // namespace

FactorizationCheck influence_factorization_check(const RootedTree& t, double lambda, int e,
                                                 int f) {
  FactorizationCheck check;
  check.direct = tree_edge_influence(t, lambda, e, f);
  // Connecting segment: the vertex path between the endpoints of e and f that
  // uses neither edge; pick the endpoint pair at minimum distance.
  auto [eu, ev] = t.edge_endpoints(e);
  auto [fu, fv] = t.edge_endpoints(f);
  std::vector<int> best;
  bool have = false;
  for (int s : {eu, ev})
    for (int g2 : {fu, fv}) {
      auto seg = vertex_path_edges(t, s, g2);
      if (std::find(seg.begin(), seg.end(), e) != seg.end()) continue;
      if (std::find(seg.begin(), seg.end(), f) != seg.end()) continue;
      if (!have || seg.size() < best.size()) {
        best = seg;
        have = true;
      }
    }
  std::vector<int> edge_path{e};
  edge_path.insert(edge_path.end(), best.begin(), best.end());
  edge_path.push_back(f);
  check.path_length = int(edge_path.size()) - 1;
  double prod = 1.0;
  for (int i = 0; i + 1 < int(edge_path.size()); ++i)
    prod *= tree_edge_influence(t, lambda, edge_path[i], edge_path[i + 1]);
  check.path_product = prod;
  return check;
}

GraphTreeCheck graph_to_tree_check(const Graph& g, int r, double lambda, int e,
                                   std::int64_t path_tree_cap) {
  require(e >= 0 && e < g.num_edges(), errc::parameter_out_of_range, "edge id");
  auto [u, v] = g.edges()[e];
  require(u == r || v == r, errc::parameter_out_of_range, "edge must be incident to the root");
  auto t = path_tree(g, r, path_tree_cap);
  // The root copy of e is the root child whose origin edge is e.
  int e_copy = -1;
  for (int c : t.nodes[t.root].children)
    if (t.nodes[c].origin_edge == e) e_copy = c;
  require(e_copy >= 0, errc::parameter_out_of_range, "no root copy of the edge");

  GraphTreeCheck check;
  check.graph_influence.assign(g.num_edges(), 0.0);
  check.tree_copy_sums.assign(g.num_edges(), 0.0);
  std::vector<double> x(g.num_edges(), lambda);
  std::vector<Compensated> sums(g.num_edges());
  for (int node = 1; node < t.size(); ++node) {
    if (node == e_copy) continue;
    sums[t.nodes[node].origin_edge].add(tree_edge_influence(t, lambda, e_copy, node));
  }
  for (int f = 0; f < g.num_edges(); ++f) {
    check.tree_copy_sums[f] = sums[f].sum;
    if (f != e) check.graph_influence[f] = edge_influence(g, x, e, f);
    check.max_abs_diff =
        std::max(check.max_abs_diff,
                 std::abs(check.graph_influence[f] - check.tree_copy_sums[f]));
  }
  return check;
}

TreeTotalInfluence tree_total_influence(const RootedTree& t, double lambda, int e) {
  require(e >= 1 && e < t.size(), errc::parameter_out_of_range, "tree edge id");
  TreeTotalInfluence out;
  Compensated total;
  for (int f = 1; f < t.size(); ++f) {
    if (f == e) continue;
    total.add(std::abs(tree_edge_influence(t, lambda, e, f)));
  }
  out.total = total.sum;

  const int delta = std::max(t.max_degree(), 1);
  const double ld = lambda * delta;
  out.bound = std::min(2.0 * ld, 2.0 * std::sqrt(1.0 + ld));
  const double decay = 1.0 - 2.0 / (std::sqrt(1.0 + ld) + 1.0);

  // Saturation products along paths leaving either endpoint of e: BFS away
  // from the deleted edge, carrying per-depth maxima of prod (1 - p(u_i)).
  auto [r1, r2] = t.edge_endpoints(e);
  std::vector<double> max_prod;  // per depth k (1-based)
  for (int side = 0; side < 2; ++side) {
    int start = side == 0 ? r1 : r2;
    int blocked = side == 0 ? r2 : r1;
    // Saturation probability of u in the subtree hanging at u away from e.
    // component_unmatched with the parent direction blocked gives mu_{T(u)}(u-bar).
    std::vector<std::tuple<int, int, double, int>> stack{{start, blocked, 1.0, 0}};
    while (!stack.empty()) {
      auto [node, par, prod, depth] = stack.back();
      stack.pop_back();
      // mu_{T(node)}(node): saturation inside the subtree hanging away from e.
      double sat = 1.0 - component_unmatched(t, lambda, node, par, -1, -1, -1);
      double here = prod * sat;
      int k = depth + 1;
      if (int(max_prod.size()) < k) max_prod.resize(k, 0.0);
      max_prod[k - 1] = std::max(max_prod[k - 1], here);
      auto push = [&](int w) {
        if (w >= 0 && w != par) stack.push_back({w, node, here, depth + 1});
      };
      push(t.nodes[node].parent);
      for (int c : t.nodes[node].children) push(c);
    }
  }
  Compensated majorant, trunc;
  out.worst_path_excess = -std::numeric_limits<double>::infinity();
  for (int k = 1; k <= int(max_prod.size()); ++k) {
    majorant.add(2.0 * max_prod[k - 1]);
    double per_path =
        std::min(std::pow(ld / (1.0 + ld), k), std::pow(decay, k / 2));
    trunc.add(2.0 * per_path);
    out.worst_path_excess = std::max(out.worst_path_excess, max_prod[k - 1] - per_path);
  }
  out.majorant = majorant.sum;
  out.truncated_bound_sum = trunc.sum;
  return out;
}

std::string influence_table_to_csv(const EdgeInfluenceTable& table) {
  std::ostringstream out;
  out.precision(17);
  out << "edge,target,influence\n";
  for (auto [target, value] : table.entries)
    out << table.source_edge << "," << target << "," << value << "\n";
  return out.str();
}

double tree_ratio_at_root(const RootedTree& t, const std::vector<double>& graph_edge_x) {
  std::vector<double> p(t.size(), 1.0);
  for (int u = t.size() - 1; u >= 0; --u) {
    double s = 0;
    for (int c : t.nodes[u].children) s += graph_edge_x[t.nodes[c].origin_edge] * p[c];
    p[u] = 1.0 / (1.0 + s);
  }
  return 1.0 / p[t.root];
}

double log_tree_matching_poly(const RootedTree& t, const std::vector<double>& graph_edge_x) {
  std::vector<double> p(t.size(), 1.0);
  double log_total = 0;
  for (int u = t.size() - 1; u >= 0; --u) {
    double s = 0;
    for (int c : t.nodes[u].children) s += graph_edge_x[t.nodes[c].origin_edge] * p[c];
    p[u] = 1.0 / (1.0 + s);
    log_total += std::log1p(s);
  }
  return log_total;
}

}  // namespace glab
