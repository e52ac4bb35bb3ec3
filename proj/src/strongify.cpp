#include "moreau/strongify.hpp"

#include <algorithm>
#include <cmath>

namespace moreau {

StrongifyPlan strongify(const PlqFunction& f, double eps) {
  if (!(eps > 0.0 && eps < 1.0)) throw ValidationError("strongify: eps must lie in (0,1)");
  require_convex(f, "strongify");

  // Tail: sum_{i>=N} 2^-i = 2^(1-N) <= eps/2.  The head bound below is
  // strict, so the total stays strictly below eps.
  int N = 1;
  while (std::ldexp(1.0, 1 - N) > eps / 2.0) ++N;

  double p0 = prox_plq(f)(0.0);
  double bound = (eps / (2.0 - eps)) / (N * (N + std::abs(p0)));
  double sigma = 0.5 * bound;

  MonotonePiecewiseLinearMap prox_g = prox_plq(f).scaled(1.0 - sigma);
  PlqFunction g = prox_inverse(prox_g);

  double ef0 = envelope_plq(f)(0.0);
  PlqFunction h = g;
  double shift = 0.0;
  // One correction is normally enough; iterate until the envelope of h
  // reproduces e_1 f(0) to the last bit or stops moving.
  for (int round = 0; round < 4; ++round) {
    double delta = ef0 - envelope_plq(h)(0.0);
    if (delta == 0.0) break;
    shift += delta;
    h = g + shift;
  }
  h = h.normalized();

  StrongifyPlan plan(f.normalized(), std::move(prox_g), std::move(g), std::move(h));
  plan.epsilon = eps;
  plan.truncation = N;
  plan.sigma = sigma;
  plan.prox_f_at_zero = p0;
  plan.shift = shift;
  plan.modulus_h = strong_convexity_report(plan.h);

  DistanceOptions opts;
  opts.accuracy = std::min(1e-6, eps / 20.0);
  plan.distance = aw_distance(FunctionHandle(plan.h), FunctionHandle(plan.input), opts);

  if (!(plan.distance.upper < eps))
    throw VerificationFailure("strongify: certified distance bound " +
                              std::to_string(plan.distance.upper) + " is not below eps = " +
                              std::to_string(eps));
  if (!plan.modulus_h.strongly_convex())
    throw VerificationFailure("strongify: output failed the strong convexity check");
  return plan;
}

MvtBoundCheck verify_mvt_bound(const StrongifyPlan& plan, int i) {
  if (i < 1 || i > plan.truncation)
    throw ValidationError("verify_mvt_bound: need 1 <= i <= N");
  MvtBoundCheck check;
  check.exact_sup =
      plq_sup_diff(envelope_plq(plan.h), envelope_plq(plan.input), static_cast<double>(i));
  check.analytic_bound = plan.sigma * i * (i + std::abs(plan.prox_f_at_zero));
  return check;
}

MeagreFamilyReport meagre_family_member(const PlqFunction& f, int m) {
  if (m < 1) throw ValidationError("meagre_family_member: m must be >= 1");
  require_convex(f, "meagre_family_member");
  MeagreFamilyReport report;
  report.m = m;

  PlqFunction env = envelope_plq(f);
  PlqFunction candidate = add_quadratic(env, -1.0 / m);
  ConvexityReport conv = check_convexity(candidate);
  report.in_family = conv.ok;
  if (conv.ok) return report;

  // Build a concrete violating triple around the reported failure.
  PlqFunction cand = candidate.normalized();
  const auto& bps = cand.breakpoints();
  double x, y;
  if (conv.reason == "piece has negative curvature") {
    std::size_t j = *conv.piece_index;
    double lo = j == 0 ? -kInf : bps[j - 1];
    double hi = j < bps.size() ? bps[j] : kInf;
    double center = is_finite(lo) && is_finite(hi) ? lo + (hi - lo) / 2.0
                    : is_finite(lo)                ? lo + 1.0
                    : is_finite(hi)                ? hi - 1.0
                                                   : 0.0;
    double half = 0.5;
    if (is_finite(lo) && is_finite(hi)) half = std::min(half, (hi - lo) / 4.0);
    x = center - half;
    y = center + half;
  } else {
    double b = *conv.location;
    double room = 1.0;
    for (double bp : bps)
      if (bp != b) room = std::min(room, std::abs(bp - b) / 2.0);
    x = b - room;
    y = b + room;
  }
  // Shrink toward the failure point until the midpoint inequality visibly
  // fails (curvature of the neighbours can mask a small slope drop).
  double margin = 0.0;
  for (int it = 0; it < 60; ++it) {
    double mid = 0.5 * (x + y);
    margin = 0.5 * cand(x) + 0.5 * cand(y) - cand(mid);
    if (margin < 0.0) break;
    x = mid - (mid - x) / 2.0;
    y = mid + (y - mid) / 2.0;
  }
  report.x = x;
  report.y = y;
  report.lambda = 0.5;
  report.margin = margin;
  return report;
}

nlohmann::ordered_json to_json(const StrongifyPlan& p) {
  nlohmann::ordered_json j;
  j["epsilon"] = p.epsilon;
  j["N"] = p.truncation;
  j["sigma"] = p.sigma;
  j["prox_f_at_zero"] = p.prox_f_at_zero;
  j["prox_g"] = to_json(p.prox_g);
  j["g"] = to_json(p.g);
  j["shift"] = p.shift;
  j["h"] = to_json(p.h);
  j["distance"] = to_json(p.distance);
  j["modulus_h"] = to_json(p.modulus_h);
  return j;
}

nlohmann::ordered_json to_json(const MeagreFamilyReport& r) {
  nlohmann::ordered_json j;
  j["m"] = r.m;
  j["in_family"] = r.in_family;
  if (!r.in_family) {
    j["x"] = r.x;
    j["y"] = r.y;
    j["lambda"] = r.lambda;
    j["margin"] = r.margin;
  }
  return j;
}

StrongifyPlan strongify_plan_from_json(const nlohmann::json& j, const PlqFunction& input) {
  StrongifyPlan p(input, pwl_map_from_json(j.at("prox_g")), plq_from_json(j.at("g")),
                  plq_from_json(j.at("h")));
  p.epsilon = j.at("epsilon").get<double>();
  p.truncation = j.at("N").get<int>();
  p.sigma = j.at("sigma").get<double>();
  p.prox_f_at_zero = j.at("prox_f_at_zero").get<double>();
  p.shift = j.at("shift").get<double>();
  p.distance = metric_estimate_from_json(j.at("distance"));
  p.modulus_h = strong_convexity_report_from_json(j.at("modulus_h"));
  return p;
}

MeagreFamilyReport meagre_family_report_from_json(const nlohmann::json& j) {
  MeagreFamilyReport r;
  r.m = j.at("m").get<int>();
  r.in_family = j.at("in_family").get<bool>();
  if (!r.in_family) {
    r.x = j.at("x").get<double>();
    r.y = j.at("y").get<double>();
    r.lambda = j.at("lambda").get<double>();
    r.margin = j.at("margin").get<double>();
  }
  return r;
}

}  // namespace moreau
