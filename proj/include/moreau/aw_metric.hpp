#pragma once

#include <optional>
#include <variant>
#include <vector>

#include <json.hpp>

#include "moreau/envelope.hpp"

namespace moreau {

/// A function from either tier; the metric operations pick the exact path
/// whenever both arguments are PLQ.
struct FunctionHandle {
  std::variant<PlqFunction, OracleConvexFunction> value;

  FunctionHandle(PlqFunction f) : value(std::move(f)) {}
  FunctionHandle(OracleConvexFunction f) : value(std::move(f)) {}

  bool is_plq() const { return std::holds_alternative<PlqFunction>(value); }
  const PlqFunction& plq() const { return std::get<PlqFunction>(value); }
  const OracleConvexFunction& oracle() const { return std::get<OracleConvexFunction>(value); }
};

/// sup over the ball of radius i of |e_1 f - e_1 g|.
struct BallSupNorm {
  int i = 0;
  double sup = 0.0;
  bool exact = true;
  double error_bound = 0.0;  // 0 on the exact path
};

struct MetricEstimate {
  double value = 0.0;
  double lower = 0.0;
  double upper = 0.0;
  int truncation = 0;
  double accuracy = 0.0;  // certified: upper - lower <= accuracy
  std::vector<BallSupNorm> terms;
};

/// Exact sup of |p - q| over [-radius, radius] for two full-domain PLQ
/// functions: per merged cell the difference is one quadratic, so the
/// maximum sits at a cell endpoint or interior vertex.
double plq_sup_diff(const PlqFunction& p, const PlqFunction& q, double radius);

BallSupNorm ball_sup_norm(const PlqFunction& f, const PlqFunction& g, int i);

/// Grid/branch-and-bound sup with a certified error bound.  The envelope
/// difference is Lipschitz on the ball with constant
/// L_i = 2 (2i + |Prox_f(0)| + |Prox_g(0)|), which certifies interval upper
/// bounds between evaluation points.
BallSupNorm ball_sup_norm_oracle(const FunctionHandle& f, const FunctionHandle& g, int i,
                                 double accuracy, int budget = 200000);

struct DistanceOptions {
  double accuracy = 1e-6;
  std::optional<int> truncation;  // overrides the tail-driven default
};

/// Attouch-Wets distance  d(f,g) = sum_i 2^-i s_i/(1+s_i) with
/// s_i = ||e_1 f - e_1 g||_i, truncated so the tail is below accuracy/2.
MetricEstimate aw_distance(const FunctionHandle& f, const FunctionHandle& g,
                           const DistanceOptions& opts = {});

/// Same series applied to functions that are already envelopes.  Inputs
/// must pass the envelope characterization (full domain, convex, C^1,
/// curvature at most 1).
MetricEstimate envelope_distance(const PlqFunction& ef, const PlqFunction& eg,
                                 const DistanceOptions& opts = {});

bool is_envelope(const PlqFunction& f, std::string* why = nullptr);

/// |d(f,g) - d(f*,g*)|; the identity is exact, so the residual stays within
/// the two estimates' certified error bounds.
double conjugation_isometry_residual(const PlqFunction& f, const PlqFunction& g, double accuracy);

nlohmann::ordered_json to_json(const MetricEstimate& e);
MetricEstimate metric_estimate_from_json(const nlohmann::json& j);

}  // namespace moreau
