#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace moreau {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// Absolute tolerance for slope/value comparisons on constructed
// (non-catalog) functions.  Closed-form piece arithmetic keeps errors
// near machine epsilon, so this is generous.
inline constexpr double kSlopeTol = 1e-9;
inline constexpr double kValueTol = 1e-9;

inline bool is_finite(double x) { return std::isfinite(x); }

/// Input failed a structural or mathematical precondition.
struct ValidationError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// An iterative solver ran out of its evaluation budget.
struct BudgetExhausted : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A result that the theory guarantees failed its numerical check;
/// indicates an implementation defect rather than a math failure.
struct VerificationFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Minimal double-double arithmetic (Dekker/Knuth), used where a value must
// be produced with one correctly rounded result instead of an accumulated
// expression, e.g. the vertex value d - c^2/(4a) of a quadratic piece.

struct DoubleDouble {
  double hi = 0.0;
  double lo = 0.0;
};

inline DoubleDouble two_sum(double a, double b) {
  double s = a + b;
  double bb = s - a;
  double err = (a - (s - bb)) + (b - bb);
  return {s, err};
}

inline DoubleDouble two_prod(double a, double b) {
  double p = a * b;
  double err = std::fma(a, b, -p);
  return {p, err};
}

inline DoubleDouble dd_add(DoubleDouble a, double b) {
  DoubleDouble s = two_sum(a.hi, b);
  s.lo += a.lo;
  DoubleDouble r = two_sum(s.hi, s.lo);
  return r;
}

inline DoubleDouble dd_sub(double a, DoubleDouble b) {
  DoubleDouble s = two_sum(a, -b.hi);
  s.lo -= b.lo;
  DoubleDouble r = two_sum(s.hi, s.lo);
  return r;
}

inline DoubleDouble dd_div(DoubleDouble a, double b) {
  double q1 = a.hi / b;
  DoubleDouble p = two_prod(q1, b);
  double r = ((a.hi - p.hi) - p.lo) + a.lo;
  double q2 = r / b;
  return two_sum(q1, q2);
}

/// Correctly rounded d - c^2 / (4a), assuming a > 0.
inline double quadratic_vertex_value(double a, double c, double d) {
  DoubleDouble c2 = two_prod(c, c);
  DoubleDouble q = dd_div(c2, 4.0 * a);
  DoubleDouble v = dd_sub(d, q);
  return v.hi;
}

}  // namespace moreau
