#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "moreau/catalog.hpp"
#include "moreau/plq.hpp"
#include "support.hpp"

using namespace moreau;
using Catch::Approx;

namespace {

// Brute-force Fenchel conjugate: sup over a dense grid of v*x - f(x).
// Independent of the event-walk implementation.
double conjugate_by_grid(const PlqFunction& f, double v, double lo = -50.0, double hi = 50.0,
                         int n = 200001) {
  double best = -kInf;
  for (int i = 0; i < n; ++i) {
    double x = lo + (hi - lo) * i / (n - 1);
    double fx = f(x);
    if (fx == kInf) continue;
    best = std::max(best, v * x - fx);
  }
  return best;
}

std::vector<PlqFunction> catalog_plq() {
  std::vector<PlqFunction> fs;
  for (const std::string& name : catalog::plq_names()) fs.push_back(*catalog::find_plq(name));
  return fs;
}

}  // namespace

TEST_CASE("evaluate on catalog entries", "[plq]") {
  CHECK(catalog::abs()(0.0) == 0.0);
  CHECK(catalog::truncated_quadratic()(2.0) == 1.0);
  CHECK(catalog::indicator_box()(2.0) == kInf);
  CHECK(catalog::indicator_box()(1.0) == 0.0);
  CHECK(catalog::truncated_quadratic()(-3.0) == 4.0);
  CHECK(catalog::truncated_quadratic()(0.5) == 0.0);
  CHECK(catalog::huber()(2.0) == 1.5);
  CHECK(catalog::hinge()(-5.0) == 0.0);
  // Both pieces agree at a breakpoint.
  CHECK(catalog::abs()(0.0) == catalog::abs()(-0.0));
}

TEST_CASE("construction rejects malformed input", "[plq]") {
  CHECK_THROWS_AS(PlqFunction::create({1.0, 1.0}, {Piece{}, Piece{}, Piece{}}), ValidationError);
  CHECK_THROWS_AS(PlqFunction::create({}, {Piece{}}, 2.0, 1.0), ValidationError);
  CHECK_THROWS_AS(PlqFunction::create({}, {Piece{kInf, 0, 0}}), ValidationError);
  CHECK_THROWS_AS(PlqFunction::create({0.0}, {Piece{0, 0, 0}, Piece{0, 0, 5.0}}), ValidationError);
  CHECK_THROWS_AS(PlqFunction::create({}, {Piece{}}, kInf, kInf), ValidationError);
}

TEST_CASE("check_convexity", "[plq]") {
  CHECK(check_convexity(catalog::half_square()).ok);
  CHECK(check_convexity(catalog::truncated_quadratic()).ok);

  // x^2 left of 0, -x right of 0: slopes drop from 0 to -1.
  PlqFunction bad = PlqFunction::create({0.0}, {Piece{1, 0, 0}, Piece{0, -1, 0}});
  ConvexityReport r = check_convexity(bad);
  REQUIRE_FALSE(r.ok);
  CHECK(*r.location == 0.0);
  CHECK(*r.left_slope == 0.0);
  CHECK(*r.right_slope == -1.0);

  PlqFunction negcurv = PlqFunction::create({}, {Piece{-1, 0, 0}});
  CHECK_FALSE(check_convexity(negcurv).ok);
}

TEST_CASE("add_quadratic", "[plq]") {
  CHECK(add_quadratic(catalog::zero(), 1.0) == catalog::half_square());
  CHECK(add_quadratic(catalog::half_square(), 1.0) == PlqFunction::quadratic(1.0, 0.0, 0.0));
  CHECK(add_quadratic(catalog::half_square(), 2.0) == PlqFunction::quadratic(1.5, 0.0, 0.0));

  // The sigma < 0 path surfaces non-strong-convexity of the flat piece.
  PlqFunction shifted = add_quadratic(catalog::truncated_quadratic(), -0.1);
  CHECK_FALSE(check_convexity(shifted).ok);

  // Breakpoints and domain are untouched.
  PlqFunction g = add_quadratic(catalog::huber(), 3.0);
  CHECK(g.breakpoints() == catalog::huber().breakpoints());
  CHECK(g.lower() == -kInf);
}

TEST_CASE("conjugate of catalog entries", "[plq][conjugate]") {
  // q is self-conjugate.
  CHECK(conjugate(catalog::half_square()) == catalog::half_square());
  // |x|* = indicator of [-1,1].
  CHECK(conjugate(catalog::abs()) == catalog::indicator_box());
  // iota_{0}* = zero.
  CHECK(conjugate(catalog::indicator_point()) == catalog::zero());
  CHECK(conjugate(catalog::zero()) == catalog::indicator_point());
  // Support function of a box is |.|.
  CHECK(conjugate(catalog::indicator_box()) == catalog::abs());
  // hinge* = indicator of [0,1].
  CHECK(conjugate(catalog::hinge()) == PlqFunction::indicator(0.0, 1.0));
}

TEST_CASE("conjugate against the grid oracle", "[plq][conjugate]") {
  std::mt19937_64 rng(101);
  std::vector<PlqFunction> fs = catalog_plq();
  for (int t = 0; t < 10; ++t) fs.push_back(moreau::testing::random_plq(rng));
  for (const PlqFunction& f : fs) {
    PlqFunction star = conjugate(f);
    for (double v : {-2.0, -0.5, 0.0, 0.75, 1.0, 3.0}) {
      double exact = star(v);
      if (exact == kInf) continue;
      double brute = conjugate_by_grid(f, v);
      CHECK(exact == Approx(brute).margin(2e-3));  // grid resolution limits the oracle
      CHECK(exact >= brute - 1e-9);                // sup over a subset can only be smaller
    }
  }
}

TEST_CASE("biconjugation is the identity on the catalog, exactly", "[plq][conjugate]") {
  for (const PlqFunction& f : catalog_plq()) {
    PlqFunction back = conjugate(conjugate(f));
    for (int i = 0; i <= 400; ++i) {
      double x = -10.0 + i * 0.05;
      double a = f(x), b = back(x);
      if (a == kInf)
        CHECK(b == kInf);
      else
        CHECK(a == b);
    }
  }
}

TEST_CASE("biconjugation on random instances", "[plq][conjugate]") {
  std::mt19937_64 rng(202);
  for (int t = 0; t < 40; ++t) {
    PlqFunction f = moreau::testing::random_plq(rng);
    PlqFunction back = conjugate(conjugate(f));
    for (int i = 0; i <= 200; ++i) {
      double x = -10.0 + i * 0.1;
      double a = f(x), b = back(x);
      if (a == kInf) {
        CHECK(b == kInf);
      } else {
        CHECK(b == Approx(a).margin(1e-9));
      }
    }
  }
}

TEST_CASE("Young-Fenchel inequality with equality at subgradients", "[plq][conjugate]") {
  std::mt19937_64 rng(303);
  std::uniform_real_distribution<double> xs(-8.0, 8.0);
  for (int t = 0; t < 25; ++t) {
    PlqFunction f = moreau::testing::random_plq(rng);
    PlqFunction star = conjugate(f);
    for (int s = 0; s < 40; ++s) {
      double x = xs(rng), v = xs(rng);
      double lhs = f(x) + star(v);
      if (lhs == kInf) continue;
      CHECK(lhs >= x * v - 1e-9);
    }
    // Equality where v is the derivative at an interior point of a piece.
    for (std::size_t j = 0; j < f.pieces().size(); ++j) {
      double lo = std::max(j == 0 ? -kInf : f.breakpoints()[j - 1], f.lower());
      double hi = std::min(j + 1 == f.pieces().size() ? kInf : f.breakpoints()[j], f.upper());
      if (!(lo < hi)) continue;
      double x = is_finite(lo) && is_finite(hi) ? lo + (hi - lo) / 2
                 : is_finite(lo)                ? lo + 1.0
                 : is_finite(hi)                ? hi - 1.0
                                                : 0.0;
      double v = piece_slope(f.pieces()[j], x);
      CHECK(f(x) + star(v) - x * v == Approx(0.0).margin(1e-8));
    }
  }
}

TEST_CASE("add_quadratic then conjugate matches the analytic identity", "[plq][conjugate]") {
  // (q + sigma q)* = v^2 / (2 (1+sigma)).
  PlqFunction sum = add_quadratic(catalog::half_square(), 1.0);  // x^2
  CHECK(conjugate(sum) == PlqFunction::quadratic(0.25, 0.0, 0.0));

  PlqFunction sum3 = add_quadratic(catalog::triple_half_square(), 1.0);  // 2x^2
  CHECK(conjugate(sum3) == PlqFunction::quadratic(0.125, 0.0, 0.0));
}

TEST_CASE("coercivity shows up as full conjugate domain", "[plq][conjugate]") {
  CHECK(conjugate(catalog::truncated_quadratic()).has_full_domain());
  CHECK(conjugate(catalog::indicator_box()).has_full_domain());
  CHECK_FALSE(conjugate(catalog::abs()).has_full_domain());
}

TEST_CASE("normalization merges identical pieces", "[plq]") {
  PlqFunction f = PlqFunction::create({0.0}, {Piece{0, 1, 0}, Piece{0, 1, 0}});
  CHECK(f.normalized().pieces().size() == 1);
  CHECK(f.normalized().breakpoints().empty());
  CHECK(f == PlqFunction::create({}, {Piece{0, 1, 0}}));
}

TEST_CASE("minimization", "[plq]") {
  PlqMinimum m = plq_minimum(catalog::half_square());
  CHECK(m.attained);
  CHECK(m.value == 0.0);
  CHECK(m.arg_lo == 0.0);
  CHECK(m.arg_hi == 0.0);

  m = plq_minimum(catalog::truncated_quadratic());
  CHECK(m.value == 0.0);
  CHECK(m.arg_lo == -1.0);
  CHECK(m.arg_hi == 1.0);

  m = plq_minimum(PlqFunction::create({}, {Piece{0, -1, 0}}));  // -x, unbounded below
  CHECK_FALSE(m.attained);

  m = plq_minimum(catalog::hinge());
  CHECK(m.attained);
  CHECK(m.arg_lo == -kInf);
  CHECK(m.arg_hi == 0.0);
}

TEST_CASE("json round trip", "[plq][json]") {
  std::mt19937_64 rng(404);
  for (int t = 0; t < 30; ++t) {
    PlqFunction f = moreau::testing::random_plq(rng);
    PlqFunction back = plq_from_json(nlohmann::json::parse(to_json(f).dump()));
    CHECK(back == f);
  }
  // Infinity tokens.
  PlqFunction box = catalog::indicator_box();
  auto j = to_json(catalog::abs());
  CHECK(j["domain"][0] == "-inf");
  CHECK(j["domain"][1] == "inf");
  CHECK(plq_from_json(nlohmann::json::parse(to_json(box).dump())) == box);
  CHECK_THROWS_AS(plq_from_json(nlohmann::json::parse(R"({"pieces":[[0,0]]})")), ValidationError);
}

TEST_CASE("catalog lookup accepts spec prefixes", "[plq][catalog]") {
  CHECK(catalog::find_plq("paper.truncated_quadratic").has_value());
  CHECK(catalog::find_plq("catalog:zero").has_value());
  CHECK(catalog::find_plq("indicator_origin").has_value());
  CHECK(*catalog::find_plq("indicator_origin") == catalog::indicator_point());
  CHECK_FALSE(catalog::find_plq("nope").has_value());
  CHECK(catalog::find_oracle("quartic").has_value());
  CHECK(catalog::plq_names().size() == 9);
}

TEST_CASE("random generator produces valid convex instances", "[plq][generator]") {
  std::mt19937_64 rng(505);
  for (int t = 0; t < 200; ++t) {
    PlqFunction f = moreau::testing::random_plq(rng);
    CHECK(check_convexity(f).ok);
  }
}
