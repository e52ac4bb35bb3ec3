#pragma once

#include <optional>
#include <string>
#include <vector>

#include "moreau/oracle.hpp"
#include "moreau/plq.hpp"

namespace moreau {
namespace catalog {

// Exact tier ------------------------------------------------------------

PlqFunction zero();
PlqFunction half_square();         // q = x^2/2
PlqFunction triple_half_square();  // 3q = (3/2) x^2
PlqFunction abs();
PlqFunction huber();  // e_1 |x|: x^2/2 on [-1,1], |x|-1/2 outside
PlqFunction hinge();  // max(0, x)
PlqFunction indicator_box();    // iota_[-1,1]
PlqFunction indicator_point();  // iota_{0}
PlqFunction truncated_quadratic();  // (x+1)^2 / 0 / (x-1)^2

// Oracle tier -----------------------------------------------------------

OracleConvexFunction quartic();              // x^4
OracleConvexFunction square_over_quartic();  // x^2/(x^4+1), nonconvex

// Lookup ------------------------------------------------------------------

inline const std::vector<std::string>& plq_names() {
  static const std::vector<std::string> names = {
      "zero",          "half_square",     "triple_half_square",
      "abs",           "huber",           "hinge",
      "indicator_box", "indicator_point", "truncated_quadratic"};
  return names;
}

inline const std::vector<std::string>& oracle_names() {
  static const std::vector<std::string> names = {"quartic", "square_over_quartic"};
  return names;
}

/// Resolves "name", "paper.name", or "catalog:name"; "indicator_origin" is
/// an alias for indicator_point.
std::optional<PlqFunction> find_plq(const std::string& name);
std::optional<OracleConvexFunction> find_oracle(const std::string& name);

}  // namespace catalog
}  // namespace moreau
