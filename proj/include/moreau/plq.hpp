#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "moreau/core.hpp"

namespace moreau {

/// One quadratic piece a*x^2 + c*x + d.
struct Piece {
  double a = 0.0;
  double c = 0.0;
  double d = 0.0;

  friend bool operator==(const Piece&, const Piece&) = default;
};

/// Evaluates a piece.  Every value of a PLQ function anywhere in the
/// library flows through this single expression so that equal inputs give
/// bit-equal outputs.
inline double piece_value(const Piece& p, double x) {
  return (p.a * x) * x + p.c * x + p.d;
}

inline double piece_slope(const Piece& p, double x) { return 2.0 * p.a * x + p.c; }

struct ConvexityReport {
  bool ok = true;
  std::string reason;                  // empty when ok
  std::optional<double> location;      // breakpoint or piece sample where it fails
  std::optional<double> left_slope;
  std::optional<double> right_slope;
  std::optional<std::size_t> piece_index;
};

/// Result of exact minimization of a PLQ function over its domain.
struct PlqMinimum {
  bool attained = false;   // false: unbounded below
  double value = -kInf;
  double arg_lo = 0.0;     // minimizer set is the interval [arg_lo, arg_hi]
  double arg_hi = 0.0;     // (may be +-inf for flat tails)
};

/// Proper lsc convex univariate piecewise linear-quadratic function.
///
/// Pieces tile the real line between consecutive breakpoints; the value is
/// +inf outside the closed domain [lower, upper].  Construction checks
/// structure (ordering, continuity, properness); convexity is a separate
/// candidate check so that e.g. add_quadratic with a negative shift can
/// produce a candidate for check_convexity to reject.
class PlqFunction {
 public:
  static PlqFunction create(std::vector<double> breakpoints, std::vector<Piece> pieces,
                            double lower = -kInf, double upper = kInf);

  /// Single quadratic piece on the given domain.
  static PlqFunction quadratic(double a, double c, double d, double lower = -kInf,
                               double upper = kInf);

  /// Indicator of [lower, upper] plus a constant.
  static PlqFunction indicator(double lower, double upper, double constant = 0.0);

  const std::vector<double>& breakpoints() const { return breakpoints_; }
  const std::vector<Piece>& pieces() const { return pieces_; }
  double lower() const { return lower_; }
  double upper() const { return upper_; }

  bool has_full_domain() const { return lower_ == -kInf && upper_ == kInf; }
  bool is_point_domain() const { return lower_ == upper_; }

  /// Extended-real evaluation: +inf outside [lower, upper].
  double operator()(double x) const;

  std::size_t piece_index_at(double x) const;

  /// One-sided slopes just inside the domain endpoints.
  double slope_at_lower() const;
  double slope_at_upper() const;

  /// Merges identical adjacent pieces and drops pieces outside the domain,
  /// giving the canonical representation used for structural equality.
  PlqFunction normalized() const;

  /// Shifts every piece by t (value shift by a constant).
  PlqFunction operator+(double t) const;

  PlqFunction restricted(double lo, double hi) const;

  friend bool operator==(const PlqFunction& f, const PlqFunction& g);

 private:
  PlqFunction() = default;
  std::vector<double> breakpoints_;
  std::vector<Piece> pieces_;
  double lower_ = -kInf;
  double upper_ = kInf;
};

// -- function-model operations ----------------------------------------------

double evaluate(const PlqFunction& f, double x);

ConvexityReport check_convexity(const PlqFunction& f);

inline bool is_convex(const PlqFunction& f) { return check_convexity(f).ok; }

/// Throws ValidationError unless f passes check_convexity.
void require_convex(const PlqFunction& f, const char* op);

/// f + (sigma/2) x^2 on the same domain.  Negative sigma is allowed and may
/// produce a non-convex candidate; callers probe it with check_convexity.
PlqFunction add_quadratic(const PlqFunction& f, double sigma);

/// Exact Legendre-Fenchel conjugate.  The conjugate of a valid PLQ function
/// is again PLQ; this walks the monotone derivative graph of f and inverts
/// it piece by piece.
PlqFunction conjugate(const PlqFunction& f);

/// Exact minimum and argmin interval over the domain.
PlqMinimum plq_minimum(const PlqFunction& f);

/// Exact infimum over [lo, hi] (intersected with the domain); +inf when the
/// intersection is empty.
double plq_infimum_on(const PlqFunction& f, double lo, double hi);

bool approx_equal(const PlqFunction& f, const PlqFunction& g, double tol,
                  double lo = -20.0, double hi = 20.0, int samples = 401);

// -- JSON (schema: {"breakpoints":[...],"pieces":[[a,c,d],...],
//                   "domain":[l|"-inf", u|"inf"]}) --------------------------

nlohmann::ordered_json to_json(const PlqFunction& f);
PlqFunction plq_from_json(const nlohmann::json& j);

}  // namespace moreau
