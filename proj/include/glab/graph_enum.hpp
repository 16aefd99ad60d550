#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "glab/graph.hpp"

namespace glab {

// Representatives of the isomorphism classes of connected graphs on exactly
// n labeled vertices (canonical form = minimum edge mask over vertex
// permutations).  n <= 7.
std::vector<Graph> connected_graph_classes(int n);

// All classes with 2..max_n vertices and at least one edge.
std::vector<Graph> connected_graph_classes_up_to(int max_n);

// Visits every labeled graph on n vertices with max degree <= degree_cap.
// The callback receives per-vertex neighbor masks.
void for_each_labeled_graph(int n, int degree_cap,
                            const std::function<void(const Graph&)>& fn);

// Deterministic pseudo-random connected graph with n vertices (used by
// randomized acceptance batteries).
Graph random_connected_graph(int n, double edge_prob, CounterRng& rng);

}  // namespace glab
