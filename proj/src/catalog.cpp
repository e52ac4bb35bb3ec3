#include "moreau/catalog.hpp"

namespace moreau {
namespace catalog {

PlqFunction zero() { return PlqFunction::quadratic(0.0, 0.0, 0.0); }

PlqFunction half_square() { return PlqFunction::quadratic(0.5, 0.0, 0.0); }

PlqFunction triple_half_square() { return PlqFunction::quadratic(1.5, 0.0, 0.0); }

PlqFunction abs() {
  return PlqFunction::create({0.0}, {Piece{0.0, -1.0, 0.0}, Piece{0.0, 1.0, 0.0}});
}

PlqFunction huber() {
  return PlqFunction::create({-1.0, 1.0}, {Piece{0.0, -1.0, -0.5}, Piece{0.5, 0.0, 0.0},
                                           Piece{0.0, 1.0, -0.5}});
}

PlqFunction hinge() {
  return PlqFunction::create({0.0}, {Piece{0.0, 0.0, 0.0}, Piece{0.0, 1.0, 0.0}});
}

PlqFunction indicator_box() { return PlqFunction::indicator(-1.0, 1.0); }

PlqFunction indicator_point() { return PlqFunction::indicator(0.0, 0.0); }

PlqFunction truncated_quadratic() {
  return PlqFunction::create({-1.0, 1.0}, {Piece{1.0, 2.0, 1.0}, Piece{0.0, 0.0, 0.0},
                                           Piece{1.0, -2.0, 1.0}});
}

OracleConvexFunction quartic() {
  return make_univariate_oracle("quartic", [](double x) { return (x * x) * (x * x); }, 2.0);
}

OracleConvexFunction square_over_quartic() {
  return make_univariate_oracle(
      "square_over_quartic", [](double x) { return x * x / ((x * x) * (x * x) + 1.0); }, 10.0,
      /*convex=*/false);
}

namespace {

std::string strip(const std::string& name) {
  std::string s = name;
  if (s.rfind("catalog:", 0) == 0) s = s.substr(8);
  if (s.rfind("paper.", 0) == 0) s = s.substr(6);
  if (s == "indicator_origin") s = "indicator_point";
  return s;
}

}  // namespace

std::optional<PlqFunction> find_plq(const std::string& name) {
  std::string s = strip(name);
  if (s == "zero") return zero();
  if (s == "half_square") return half_square();
  if (s == "triple_half_square") return triple_half_square();
  if (s == "abs") return abs();
  if (s == "huber") return huber();
  if (s == "hinge") return hinge();
  if (s == "indicator_box") return indicator_box();
  if (s == "indicator_point") return indicator_point();
  if (s == "truncated_quadratic") return truncated_quadratic();
  return std::nullopt;
}

std::optional<OracleConvexFunction> find_oracle(const std::string& name) {
  std::string s = strip(name);
  if (s == "quartic") return quartic();
  if (s == "square_over_quartic") return square_over_quartic();
  return std::nullopt;
}

}  // namespace catalog
}  // namespace moreau
