#pragma once

#include <Eigen/Dense>
#include <functional>
#include <vector>

#include "glab/rng.hpp"

namespace glab {

// Ratio objective N(f)/D(f) on the positive orthant.  Callers supply value
// and gradient callbacks; the objective must be scale invariant (all ours
// are), which lets the search renormalize freely.
struct RatioObjective {
  std::function<double(const Eigen::VectorXd&)> numerator;
  std::function<double(const Eigen::VectorXd&)> denominator;
  std::function<Eigen::VectorXd(const Eigen::VectorXd&)> numerator_grad;
  std::function<Eigen::VectorXd(const Eigen::VectorXd&)> denominator_grad;
};

struct SearchOptions {
  int restarts = 20;
  int iterations = 500;
  double floor = 1e-12;            // projection f >= floor
  double degenerate_denominator = 1e-13;
  std::vector<Eigen::VectorXd> seeds;  // tried before random restarts
};

struct SearchResult {
  double value = 0.0;        // best ratio seen
  Eigen::VectorXd argbest;
};

// Projected gradient ascent (maximize = true) or descent on the ratio, with
// adaptive step, floor projection and mean-1 renormalization.  The returned
// value is a one-sided estimate: a lower bound of the supremum when
// maximizing, an upper bound of the infimum when minimizing.
SearchResult search_ratio(const RatioObjective& obj, int dim, bool maximize,
                          const SearchOptions& opts, CounterRng& rng);

// Same search over probability vectors via softmax reparameterization.
struct SimplexObjective {
  std::function<double(const Eigen::VectorXd&)> value;     // of a distribution
  std::function<Eigen::VectorXd(const Eigen::VectorXd&)> grad;
};
SearchResult search_simplex(const SimplexObjective& obj, int dim, bool maximize,
                            const SearchOptions& opts, CounterRng& rng);

Eigen::VectorXd random_positive_vector(int dim, CounterRng& rng);

}  // namespace glab
