#include "glab/optimize.hpp"

#include <cmath>
#include <limits>

namespace glab {

Eigen::VectorXd random_positive_vector(int dim, CounterRng& rng) {
  Eigen::VectorXd f(dim);
  for (int i = 0; i < dim; ++i) f(i) = std::exp(rng.normal());
  return f;
}

namespace {

Eigen::VectorXd project(Eigen::VectorXd f, double floor) {
  for (int i = 0; i < f.size(); ++i) f(i) = std::max(f(i), floor);
  double mean = f.mean();
  return mean > 0 ? Eigen::VectorXd(f / mean) : f;
}

double ratio_at(const RatioObjective& obj, const Eigen::VectorXd& f, double dmin, bool* ok) {
  double den = obj.denominator(f);
  if (std::abs(den) < dmin || !std::isfinite(den)) {
    *ok = false;
    return 0.0;
  }
  double num = obj.numerator(f);
  if (!std::isfinite(num)) {
    *ok = false;
    return 0.0;
  }
  *ok = true;
  return num / den;
}

}  // namespace

SearchResult search_ratio(const RatioObjective& obj, int dim, bool maximize,
                          const SearchOptions& opts, CounterRng& rng) {
  const double sign = maximize ? 1.0 : -1.0;
  SearchResult best;
  bool have_best = false;
  auto consider = [&](double v, const Eigen::VectorXd& f) {
    if (!have_best || sign * v > sign * best.value) {
      best.value = v;
      best.argbest = f;
      have_best = true;
    }
  };
  for (int restart = 0; restart < opts.restarts + int(opts.seeds.size()); ++restart) {
    Eigen::VectorXd f = restart < int(opts.seeds.size())
                            ? project(opts.seeds[restart], opts.floor)
                            : project(random_positive_vector(dim, rng), opts.floor);
    bool ok = false;
    double value = ratio_at(obj, f, opts.degenerate_denominator, &ok);
    if (!ok) continue;
    consider(value, f);
    double step = 0.1;
    for (int it = 0; it < opts.iterations; ++it) {
      double den = obj.denominator(f);
      if (std::abs(den) < opts.degenerate_denominator) break;
      double num = obj.numerator(f);
      Eigen::VectorXd grad =
          (obj.numerator_grad(f) - (num / den) * obj.denominator_grad(f)) / den;
      double gnorm = grad.norm();
      if (!std::isfinite(gnorm) || gnorm < 1e-15) break;
      // Backtrack until the step improves the signed ratio.
      bool moved = false;
      for (int bt = 0; bt < 30; ++bt) {
        Eigen::VectorXd cand = project(f + sign * step * grad / gnorm, opts.floor);
        bool cok = false;
        double cval = ratio_at(obj, cand, opts.degenerate_denominator, &cok);
        if (cok && sign * cval > sign * value + 1e-16) {
          f = cand;
          value = cval;
          consider(value, f);
          step *= 1.5;
          moved = true;
          break;
        }
        step *= 0.5;
      }
      if (!moved) break;
    }
  }
  if (!have_best) {
    best.value = std::numeric_limits<double>::quiet_NaN();
    best.argbest = Eigen::VectorXd::Ones(dim);
  }
  return best;
}

SearchResult search_simplex(const SimplexObjective& obj, int dim, bool maximize,
                            const SearchOptions& opts, CounterRng& rng) {
  auto softmax = [](const Eigen::VectorXd& g) {
    Eigen::VectorXd e = (g.array() - g.maxCoeff()).exp();
    return Eigen::VectorXd(e / e.sum());
  };
  const double sign = maximize ? 1.0 : -1.0;
  SearchResult best;
  bool have_best = false;
  auto consider = [&](double v, const Eigen::VectorXd& nu) {
    if (!have_best || sign * v > sign * best.value) {
      best.value = v;
      best.argbest = nu;
      have_best = true;
    }
  };
  for (int restart = 0; restart < opts.restarts + int(opts.seeds.size()); ++restart) {
    Eigen::VectorXd g(dim);
    if (restart < int(opts.seeds.size())) {
      g = opts.seeds[restart].array().max(1e-300).log();
    } else {
      for (int i = 0; i < dim; ++i) g(i) = rng.normal();
    }
    Eigen::VectorXd nu = softmax(g);
    double value = obj.value(nu);
    if (!std::isfinite(value)) continue;
    consider(value, nu);
    double step = 0.1;
    for (int it = 0; it < opts.iterations; ++it) {
      Eigen::VectorXd gv = obj.grad(nu);
      // Chain rule through softmax: dv/dg_i = nu_i (gv_i - nu . gv).
      Eigen::VectorXd gg = nu.array() * (gv.array() - nu.dot(gv));
      double gnorm = gg.norm();
      if (!std::isfinite(gnorm) || gnorm < 1e-15) break;
      bool moved = false;
      for (int bt = 0; bt < 30; ++bt) {
        Eigen::VectorXd gcand = g + sign * step * gg / gnorm;
        Eigen::VectorXd cand = softmax(gcand);
        double cval = obj.value(cand);
        if (std::isfinite(cval) && sign * cval > sign * value + 1e-16) {
          g = gcand;
          nu = cand;
          value = cval;
          consider(value, nu);
          step *= 1.5;
          moved = true;
          break;
        }
        step *= 0.5;
      }
      if (!moved) break;
    }
  }
  if (!have_best) {
    best.value = std::numeric_limits<double>::quiet_NaN();
    best.argbest = Eigen::VectorXd::Constant(dim, 1.0 / dim);
  }
  return best;
}

}  // namespace glab
