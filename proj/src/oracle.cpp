#include "moreau/oracle.hpp"

#include <algorithm>
#include <cmath>

namespace moreau {

OracleConvexFunction make_univariate_oracle(std::string name, std::function<double(double)> f,
                                            double radius_hint, bool convex) {
  OracleConvexFunction o;
  o.dimension = 1;
  o.name = std::move(name);
  o.evaluate = [fn = std::move(f)](const std::vector<double>& x) { return fn(x.at(0)); };
  o.domain_radius_hint = radius_hint;
  o.convexity_declared = convex;
  return o;
}

MidpointCheckResult spot_check_convexity(const OracleConvexFunction& f, unsigned seed, int samples,
                                         double tol) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> coord(-f.domain_radius_hint, f.domain_radius_hint);
  std::uniform_real_distribution<double> lam(0.0, 1.0);
  MidpointCheckResult result;
  const int n = f.dimension;
  std::vector<double> x(n), y(n), mid(n);
  for (int s = 0; s < samples; ++s) {
    for (int i = 0; i < n; ++i) {
      x[i] = coord(rng);
      y[i] = coord(rng);
    }
    double l = lam(rng);
    for (int i = 0; i < n; ++i) mid[i] = l * x[i] + (1.0 - l) * y[i];
    double fx = f.evaluate(x), fy = f.evaluate(y), fm = f.evaluate(mid);
    if (fx == kInf || fy == kInf) continue;
    double rhs = l * fx + (1.0 - l) * fy;
    if (fm > rhs + tol) {
      result.ok = false;
      result.x = x[0];
      result.y = y[0];
      result.lambda = l;
      result.violation = fm - rhs;
      return result;
    }
  }
  return result;
}

ScanMinimum scan_minimize(const OracleConvexFunction& f, int grid_points) {
  if (f.dimension != 1)
    throw ValidationError("scan_minimize: only univariate oracles are supported");
  const double R = f.domain_radius_hint;
  const double step = 2.0 * R / (grid_points - 1);
  double best_x = -R, best_v = kInf;
  for (int i = 0; i < grid_points; ++i) {
    double x = -R + i * step;
    double v = f(x);
    if (v < best_v) {
      best_v = v;
      best_x = x;
    }
  }
  // Local golden-section refinement around the best grid cell.
  double lo = std::max(-R, best_x - step), hi = std::min(R, best_x + step);
  const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
  double m1 = hi - phi * (hi - lo), m2 = lo + phi * (hi - lo);
  double f1 = f(m1), f2 = f(m2);
  for (int it = 0; it < 120 && hi - lo > 1e-13 * std::max(1.0, std::abs(best_x)); ++it) {
    if (f1 <= f2) {
      hi = m2;
      m2 = m1;
      f2 = f1;
      m1 = hi - phi * (hi - lo);
      f1 = f(m1);
    } else {
      lo = m1;
      m1 = m2;
      f1 = f2;
      m2 = lo + phi * (hi - lo);
      f2 = f(m2);
    }
  }
  double x = 0.5 * (lo + hi);
  double v = f(x);
  if (v > best_v) {
    x = best_x;
    v = best_v;
  }
  return {x, v, step};
}

}  // namespace moreau
