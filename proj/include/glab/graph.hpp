#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "glab/errors.hpp"
#include "glab/rng.hpp"

namespace glab {

// Undirected simple graph on dense vertex ids 0..n-1.  Edges are stored in
// canonical (min,max) order; adjacency lists are sorted ascending.  Immutable
// after construction.
class Graph {
 public:
  Graph() = default;

  // Validates endpoints, rejects self-loops and duplicates.
  static Graph build(int n, std::vector<std::pair<int, int>> edges);

  // Named generators.
  static Graph path(int n);
  static Graph cycle(int n);
  static Graph complete(int n);
  static Graph star(int leaves);  // vertex 0 is the hub
  static Graph random_regular(int n, int degree, CounterRng& rng);
  static Graph empty(int n) { return build(n, {}); }

  int num_vertices() const { return n_; }
  int num_edges() const { return int(edges_.size()); }
  const std::vector<std::pair<int, int>>& edges() const { return edges_; }
  const std::vector<int>& neighbors(int v) const;
  std::uint64_t neighbor_mask(int v) const;
  bool adjacent(int u, int v) const;
  int degree(int v) const;
  int max_degree() const { return max_degree_; }
  // Index of canonical edge {u,v}, or -1.
  int edge_index(int u, int v) const;

 private:
  void check_vertex(int v) const;

  int n_ = 0;
  int max_degree_ = 0;
  std::vector<std::pair<int, int>> edges_;
  std::vector<std::vector<int>> adj_;
  std::vector<std::uint64_t> adj_mask_;
};

// Plain-text graph file: first line "n m", then m lines "u v" (0-based).
// Malformed input raises config_parse with the offending line number.
Graph read_graph(std::istream& in);
Graph read_graph_file(const std::string& path);
void write_graph(std::ostream& out, const Graph& g);

// Line graph plus the edge <-> vertex correspondence: vertex i of the line
// graph is edges()[i] of the source graph.
struct LineGraph {
  Graph graph;
  std::vector<std::pair<int, int>> source_edge;  // per line-graph vertex
};
LineGraph line_graph(const Graph& g);

// Rooted tree with per-node copy maps back to the source graph: origin_vertex
// is C(u); origin_edge is C(e) for the edge (parent, node), -1 at the root.
struct RootedTree {
  struct Node {
    int parent = -1;
    std::vector<int> children;
    int origin_vertex = -1;
    int origin_edge = -1;
  };
  std::vector<Node> nodes;
  int root = 0;

  int size() const { return int(nodes.size()); }
  int num_edges() const { return int(nodes.size()) - 1; }
  int max_degree() const;
  // Tree edge ids are 1..size()-1, identified with the non-root endpoint.
  std::pair<int, int> edge_endpoints(int edge_node) const {
    return {nodes[edge_node].parent, edge_node};
  }
};

// Converts a tree-shaped graph into a RootedTree (origin maps are identities).
RootedTree root_tree(const Graph& g, int root);

// Path tree (tree of self-avoiding walks) from r, built breadth-first with
// children in ascending neighbor order so copy maps are reproducible.
RootedTree path_tree(const Graph& g, int r, std::int64_t max_nodes = 100000);

// Connected components of the induced subgraph G[S].
struct ComponentStructure {
  std::vector<std::vector<int>> blocks;  // sorted vertex lists, disjoint
  std::vector<int> block_of;             // per graph vertex; -1 if outside S

  int component_size(int v) const {
    return (v >= 0 && v < int(block_of.size()) && block_of[v] >= 0)
               ? int(blocks[block_of[v]].size())
               : 0;
  }
};
ComponentStructure components_within(const Graph& g, const std::vector<int>& s);

// Number of vertex subsets U with |U| = k, v in U and G[U] connected.
std::int64_t count_connected_supersets(const Graph& g, int v, int k);

// P(|S_v| = k) over a uniformly random subset S of size ell, by exhaustive
// enumeration of all C(n, ell) subsets.
double component_size_probability(const Graph& g, int v, int ell, int k,
                                  std::int64_t subset_cap = 10000000);

// One enumeration pass shared by all (v, k): dist[v][k] = P(|S_v| = k).
std::vector<std::vector<double>> component_size_distribution(const Graph& g, int ell,
                                                             std::int64_t subset_cap = 10000000);

std::int64_t binomial(int n, int k);

}  // namespace glab
