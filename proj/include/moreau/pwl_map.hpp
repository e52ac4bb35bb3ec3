#pragma once

#include <vector>

#include <json.hpp>

#include "moreau/core.hpp"

namespace moreau {

/// Nondecreasing continuous piecewise-linear map of the real line.
/// Segment j applies slope*x + intercept between consecutive breakpoints.
/// Proximal mappings of convex PLQ functions live here; for those the map
/// is additionally nonexpansive (all slopes <= 1).
class MonotonePiecewiseLinearMap {
 public:
  struct Segment {
    double slope = 0.0;
    double intercept = 0.0;
    friend bool operator==(const Segment&, const Segment&) = default;
  };

  static MonotonePiecewiseLinearMap create(std::vector<double> breakpoints,
                                           std::vector<Segment> segments);

  static MonotonePiecewiseLinearMap identity();
  static MonotonePiecewiseLinearMap constant(double value);

  const std::vector<double>& breakpoints() const { return breakpoints_; }
  const std::vector<Segment>& segments() const { return segments_; }

  double operator()(double x) const;
  std::size_t segment_index_at(double x) const;

  double max_slope() const;
  bool is_nonexpansive(double tol = kSlopeTol) const;

  /// Closure of the range (an interval; entries may be infinite).
  std::pair<double, double> range() const;

  /// this scaled pointwise by t >= 0 (slopes and intercepts scale).
  MonotonePiecewiseLinearMap scaled(double t) const;

  /// Merges adjacent segments with identical coefficients.
  MonotonePiecewiseLinearMap normalized() const;

  friend bool operator==(const MonotonePiecewiseLinearMap& p,
                         const MonotonePiecewiseLinearMap& q);

 private:
  MonotonePiecewiseLinearMap() = default;
  std::vector<double> breakpoints_;
  std::vector<Segment> segments_;
};

/// Pointwise combination s*p + t*q (s, t >= 0), again monotone PWL.
MonotonePiecewiseLinearMap affine_combination(double s, const MonotonePiecewiseLinearMap& p,
                                              double t, const MonotonePiecewiseLinearMap& q);

bool approx_equal(const MonotonePiecewiseLinearMap& p, const MonotonePiecewiseLinearMap& q,
                  double tol, double lo = -20.0, double hi = 20.0, int samples = 401);

nlohmann::ordered_json to_json(const MonotonePiecewiseLinearMap& m);
MonotonePiecewiseLinearMap pwl_map_from_json(const nlohmann::json& j);

}  // namespace moreau
