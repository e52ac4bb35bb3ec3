#pragma once

#include <random>
#include <vector>

#include "moreau/plq.hpp"

namespace moreau::testing {

// Random convex PLQ instances over dyadic grids.  Breakpoints, slopes and
// values are multiples of 2^-5 and curvatures come from {0, 1/2, 3/2, 7/2},
// so 1/(1+2a) is a power of two and every envelope/prox coefficient is an
// exact double.  That keeps the exact-arithmetic identities (min
// preservation, modulus relations) true in floating point, not just in
// theory, while the instances stay genuinely random.
struct RandomPlqOptions {
  int min_pieces = 1;
  int max_pieces = 5;
  bool force_strongly_convex = false;
  bool allow_bounded_domain = true;
};

inline double dyadic(std::mt19937_64& rng, double lo, double hi) {
  const double scale = 32.0;  // 2^5
  long lo_i = static_cast<long>(lo * scale);
  long hi_i = static_cast<long>(hi * scale);
  std::uniform_int_distribution<long> dist(lo_i, hi_i);
  return static_cast<double>(dist(rng)) / scale;
}

inline moreau::PlqFunction random_plq(std::mt19937_64& rng, const RandomPlqOptions& opt = {}) {
  std::uniform_int_distribution<int> piece_count(opt.min_pieces, opt.max_pieces);
  std::uniform_int_distribution<int> coin(0, 3);
  const double curvatures[] = {0.5, 1.5, 3.5};
  std::uniform_int_distribution<int> curv_pick(0, 2);

  const int K = piece_count(rng);
  std::vector<double> bps;
  double b = dyadic(rng, -6.0, -2.0);
  for (int i = 0; i + 1 < K; ++i) {
    bps.push_back(b);
    b += std::max(dyadic(rng, 0.25, 3.0), 0.25);
  }

  auto pick_a = [&]() {
    if (opt.force_strongly_convex) return curvatures[curv_pick(rng)];
    return coin(rng) == 0 ? 0.0 : curvatures[curv_pick(rng)];
  };

  std::vector<moreau::Piece> pieces(K);
  pieces[0].a = pick_a();
  double t0 = dyadic(rng, -4.0, 4.0);  // derivative entering the first breakpoint
  double anchor = bps.empty() ? 0.0 : bps.front();
  pieces[0].c = t0 - 2.0 * pieces[0].a * anchor;
  pieces[0].d = dyadic(rng, -3.0, 3.0);

  for (int j = 1; j < K; ++j) {
    double bj = bps[j - 1];
    double left_slope = moreau::piece_slope(pieces[j - 1], bj);
    double jump = coin(rng) == 0 ? dyadic(rng, 0.0, 2.0) : 0.0;
    pieces[j].a = pick_a();
    pieces[j].c = (left_slope + jump) - 2.0 * pieces[j].a * bj;
    double left_value = moreau::piece_value(pieces[j - 1], bj);
    pieces[j].d = left_value - ((pieces[j].a * bj) * bj + pieces[j].c * bj);
  }

  double lo = -moreau::kInf, hi = moreau::kInf;
  if (opt.allow_bounded_domain && coin(rng) == 0) {
    double first = bps.empty() ? -1.0 : bps.front();
    double last = bps.empty() ? 1.0 : bps.back();
    lo = first - std::max(dyadic(rng, 0.25, 3.0), 0.25);
    hi = last + std::max(dyadic(rng, 0.25, 3.0), 0.25);
  }
  return moreau::PlqFunction::create(std::move(bps), std::move(pieces), lo, hi).normalized();
}

/// A random instance guaranteed to be bounded below (coercive right tail
/// handling): strongly convex or bounded domain.
inline moreau::PlqFunction random_bounded_below_plq(std::mt19937_64& rng) {
  RandomPlqOptions opt;
  opt.force_strongly_convex = true;
  return random_plq(rng, opt);
}

}  // namespace moreau::testing
