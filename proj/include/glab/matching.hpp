#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <unordered_map>
#include <vector>

#include "glab/graph.hpp"

namespace glab {

// Multivariate edge-matching polynomial M_G(x) = sum over matchings of
// prod x_e, evaluated on vertex-induced subgraphs with memoization.  Edge
// deletion is activity zero; vertex deletion drops the bit from the mask.
class MatchingOracle {
 public:
  MatchingOracle(const Graph& g, std::vector<double> edge_activities);

  double value(std::uint32_t vertex_mask) const;
  double full() const;
  std::uint32_t full_mask() const;
  // P(e in M) on the induced subgraph (mask must contain both endpoints).
  double edge_in_probability(int edge, std::uint32_t vertex_mask) const;

  const Graph& graph() const { return *g_; }
  const std::vector<double>& activities() const { return x_; }

 private:
  const Graph* g_;
  std::vector<double> x_;
  mutable std::unordered_map<std::uint32_t, double> memo_;
};

double matching_poly(const Graph& g, const std::vector<double>& x);
double matching_poly(const Graph& g, double lambda);

// Boundary condition on edges; value 0 = edge in the matching, 1 = out.
struct EdgePinning {
  std::vector<int> edges;
  std::vector<std::uint8_t> values;

  bool empty() const { return edges.empty(); }
};

// The conditional monomer-dimer distribution given an edge pinning equals the
// unconditioned model on a subgraph H: edges pinned out are deleted, edges
// pinned in are deleted along with every incident edge.
struct PinnedHost {
  std::vector<double> activities;   // zeroed on deleted edges
  std::vector<char> edge_present;   // per edge of g
};
PinnedHost apply_edge_pinning(const Graph& g, double lambda, const EdgePinning& pin);

// Pairwise influence I(e -> f) = P(f in M | e in M) - P(f in M | e out of M).
double edge_influence(const Graph& g, const std::vector<double>& x, int e, int f);

struct EdgeInfluenceTable {
  int source_edge = 0;
  std::vector<std::pair<int, double>> entries;  // (target edge, influence)
  double row_total = 0;                         // compensated sum of |I|
};
EdgeInfluenceTable edge_influence_table(const Graph& g, double lambda, int e,
                                        const EdgePinning& pin = {});

// Full influence matrix over edges (empty pinning) with its top eigenvalue.
struct EdgeInfluenceMatrix {
  Eigen::MatrixXd influence;
  double lambda1 = 0;
  double max_imag = 0;
  double max_row_total = 0;
};
EdgeInfluenceMatrix edge_influence_matrix(const Graph& g, double lambda);
EdgeInfluenceMatrix edge_influence_matrix(const Graph& g, double lambda, const EdgePinning& pin);

// Bottom-up unmatched probabilities mu_{T(u)}(u-bar) for every node.
struct TreeRecursionState {
  double lambda = 1;
  std::vector<double> unmatched;  // per tree node
};
TreeRecursionState tree_recursion(const RootedTree& t, double lambda);

// Exact pairwise influence between tree edges (edges named by their non-root
// endpoint node), computed by splitting the tree at conditioned edges.
double tree_edge_influence(const RootedTree& t, double lambda, int e, int f);
// P(f in M) in the tree with an optional deleted edge and up to two deleted
// vertices (pass -1 for unused slots).
double tree_edge_in_probability(const RootedTree& t, double lambda, int f, int deleted_edge,
                                int dead_a = -1, int dead_b = -1);

struct FactorizationCheck {
  double direct = 0;       // I_T(e -> f)
  double path_product = 0; // prod of consecutive influences along the path
  int path_length = 0;
};
FactorizationCheck influence_factorization_check(const RootedTree& t, double lambda, int e,
                                                 int f);

// Graph influence of e (incident to r) vs copy sums over the path tree.
struct GraphTreeCheck {
  std::vector<double> graph_influence;   // per edge f of g
  std::vector<double> tree_copy_sums;    // sum over copies f' in C(f)
  double max_abs_diff = 0;
};
GraphTreeCheck graph_to_tree_check(const Graph& g, int r, double lambda, int e,
                                   std::int64_t path_tree_cap = 100000);

// Total influence of a tree edge against the closed-form bound, with the
// intermediate path-product majorant and per-path bounds.  The per-path
// excess is a diagnostic only: trees that mix a high-degree node with leaf
// siblings push a single saturation pair above the two-step decay constant
// even though the summed bounds hold.
struct TreeTotalInfluence {
  double total = 0;                    // sum_{f != e} |I(e -> f)|
  double majorant = 0;                 // 2 sum_k max-path saturation products
  double truncated_bound_sum = 0;      // 2 sum_k min{(lD/(1+lD))^k, decay^{k/2}}
  double bound = 0;                    // min{2 lambda Delta, 2 sqrt(1 + lambda Delta)}
  double worst_path_excess = 0;        // max over k of maxprod_k - per-path bound_k
};
TreeTotalInfluence tree_total_influence(const RootedTree& t, double lambda, int e);

// CSV rows "edge,target,influence" for a computed influence table.
std::string influence_table_to_csv(const EdgeInfluenceTable& table);

// M-bar_T / M-bar_{T-r} for a path tree with graph-edge activities; equals
// M_G / M_{G-r}.
double tree_ratio_at_root(const RootedTree& t, const std::vector<double>& graph_edge_x);
// log M-bar_T(x) with graph-edge activities.
double log_tree_matching_poly(const RootedTree& t, const std::vector<double>& graph_edge_x);

}  // namespace glab
