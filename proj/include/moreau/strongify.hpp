#pragma once

#include <json.hpp>

#include "moreau/analysis.hpp"

namespace moreau {

/// The density construction: given f and 0 < eps < 1, a strongly convex h
/// with d(h, f) < eps, every intermediate exposed.
struct StrongifyPlan {
  PlqFunction input;
  double epsilon = 0.0;
  int truncation = 0;      // N: smallest integer with 2^(1-N) <= eps/2
  double sigma = 0.0;      // half of the admissible upper bound
  double prox_f_at_zero = 0.0;
  MonotonePiecewiseLinearMap prox_g;  // (1 - sigma) Prox_f
  PlqFunction g;                      // prox_inverse(prox_g)
  double shift = 0.0;                 // e_1 f(0) - e_1 g(0)
  PlqFunction h;                      // g + shift
  MetricEstimate distance;            // certified d(h, f)
  StrongConvexityReport modulus_h;

  StrongifyPlan(PlqFunction in, MonotonePiecewiseLinearMap pg, PlqFunction g_, PlqFunction h_)
      : input(std::move(in)), prox_g(std::move(pg)), g(std::move(g_)), h(std::move(h_)) {}
};

/// Runs the construction and verifies d(h, f) < eps numerically; a verify
/// failure is a hard error since the theory guarantees success.
StrongifyPlan strongify(const PlqFunction& f, double eps);

/// Exact sup of |e_1 h - e_1 f| on [-i, i] together with the mean-value
/// bound sigma * i * (i + |Prox_f(0)|); the exact sup never exceeds the bound.
struct MvtBoundCheck {
  double exact_sup = 0.0;
  double analytic_bound = 0.0;
};
MvtBoundCheck verify_mvt_bound(const StrongifyPlan& plan, int i);

/// Membership of e_1 f in F_m = {envelopes g : g - (1/2m)|.|^2 convex}, with
/// a violating midpoint triple on the way out.
struct MeagreFamilyReport {
  int m = 1;
  bool in_family = false;
  // Violating triple for the "out" case: convexity of e_1 f - (1/2m) x^2
  // fails between x and y at lambda.
  double x = 0.0, y = 0.0, lambda = 0.5;
  double margin = 0.0;  // lambda*phi(x) + (1-lambda)*phi(y) - phi(mid); negative when out
};
MeagreFamilyReport meagre_family_member(const PlqFunction& f, int m);

nlohmann::ordered_json to_json(const StrongifyPlan& p);
nlohmann::ordered_json to_json(const MeagreFamilyReport& r);

/// Rebuilds a plan from its payload (the input function is not part of the
/// payload and is supplied by the caller).
StrongifyPlan strongify_plan_from_json(const nlohmann::json& j, const PlqFunction& input);
MeagreFamilyReport meagre_family_report_from_json(const nlohmann::json& j);

}  // namespace moreau
