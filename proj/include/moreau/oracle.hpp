#pragma once

#include <functional>
#include <random>
#include <string>
#include <vector>

#include "moreau/core.hpp"

namespace moreau {

/// Black-box convex function on R^n: evaluation plus the metadata the
/// numeric tier needs.  Values of +inf are allowed.
struct OracleConvexFunction {
  int dimension = 1;
  std::function<double(const std::vector<double>&)> evaluate;
  double domain_radius_hint = 1.0;  // some minimizer lies in the closed ball B_R[0]
  bool convexity_declared = true;   // trusted, spot-checked by midpoint tests
  std::string name;

  double operator()(double x) const { return evaluate({x}); }
};

OracleConvexFunction make_univariate_oracle(std::string name, std::function<double(double)> f,
                                            double radius_hint, bool convex = true);

struct MidpointCheckResult {
  bool ok = true;
  // First violating triple when not ok, in f(l*x + (1-l)*y) <= l f(x) + (1-l) f(y) + tol.
  double x = 0.0, y = 0.0, lambda = 0.5;
  double violation = 0.0;
};

/// Sampled midpoint convexity spot-check over [-R, R]^n.
MidpointCheckResult spot_check_convexity(const OracleConvexFunction& f, unsigned seed,
                                         int samples = 2000, double tol = 1e-9);

struct ScanMinimum {
  double arg = 0.0;
  double value = kInf;
  double grid_step = 0.0;  // resolution of the verdict
};

/// Grid scan over [-R, R] with local golden-section refinement.  Verdicts
/// derived from this carry a scan-scale qualifier: nothing global is
/// certified for a black box.
ScanMinimum scan_minimize(const OracleConvexFunction& f, int grid_points = 100001);

}  // namespace moreau
