#include "moreau/envelope.hpp"

#include <algorithm>
#include <cmath>

namespace moreau {

namespace {

double canon0(double x) { return x + 0.0; }  // folds -0.0 into +0.0

// One stretch of the resolvent walk: on [x_lo, x_hi] the prox is an affine
// segment and the envelope is one quadratic piece.
struct ProxEvent {
  double x_lo, x_hi;
  MonotonePiecewiseLinearMap::Segment seg;
  Piece env;
};

double prox_input(const Piece& p, double y) { return y + piece_slope(p, y); }

// Shared walk over x in (Id + df)(y): quadratic pieces of f give segments
// with slope 1/(1+2a), kinks and finite domain endpoints give flat segments.
std::vector<ProxEvent> prox_events(const PlqFunction& f0) {
  require_convex(f0, "prox");
  PlqFunction f = f0.normalized();
  std::vector<ProxEvent> events;

  auto flat_event = [&](double x_lo, double x_hi, double y) {
    events.push_back({x_lo, x_hi, {0.0, y}, Piece{0.5, -y, f(y) + 0.5 * (y * y)}});
  };

  if (f.is_point_domain()) {
    flat_event(-kInf, kInf, f.lower());
    return events;
  }

  const auto& ps = f.pieces();
  const auto& bps = f.breakpoints();
  const std::size_t n = ps.size();

  if (is_finite(f.lower())) flat_event(-kInf, prox_input(ps.front(), f.lower()), f.lower());

  for (std::size_t j = 0; j < n; ++j) {
    double y0 = std::max(j == 0 ? -kInf : bps[j - 1], f.lower());
    double y1 = std::min(j == n - 1 ? kInf : bps[j], f.upper());
    if (y0 < y1) {
      const Piece& p = ps[j];
      double t = 1.0 + 2.0 * p.a;
      double s = 1.0 / t;
      double q = canon0(-p.c * s);
      double x0 = is_finite(y0) ? prox_input(p, y0) : -kInf;
      double x1 = is_finite(y1) ? prox_input(p, y1) : kInf;
      double sm1 = s - 1.0;
      Piece env{p.a * s * s + 0.5 * sm1 * sm1,
                canon0(2.0 * p.a * s * q + p.c * s + sm1 * q),
                ((p.a * q) * q + p.c * q + p.d) + 0.5 * (q * q)};
      if (x0 < x1) events.push_back({x0, x1, {s, q}, env});
    }
    if (j + 1 < n) {
      double b = bps[j];
      if (b <= f.lower() || b >= f.upper()) continue;
      double sl = piece_slope(ps[j], b);
      double sr = piece_slope(ps[j + 1], b);
      if (sr > sl && b + sl < b + sr) flat_event(b + sl, b + sr, b);
    }
  }

  if (is_finite(f.upper())) flat_event(prox_input(ps.back(), f.upper()), kInf, f.upper());
  return events;
}

}  // namespace

MonotonePiecewiseLinearMap prox_plq(const PlqFunction& f) {
  std::vector<ProxEvent> events = prox_events(f);
  std::vector<double> bps;
  std::vector<MonotonePiecewiseLinearMap::Segment> segs;
  for (std::size_t k = 0; k < events.size(); ++k) {
    if (k > 0) bps.push_back(events[k].x_lo);
    segs.push_back(events[k].seg);
  }
  return MonotonePiecewiseLinearMap::create(std::move(bps), std::move(segs)).normalized();
}

PlqFunction envelope_plq(const PlqFunction& f) {
  std::vector<ProxEvent> events = prox_events(f);
  std::vector<double> bps;
  std::vector<Piece> pieces;
  for (std::size_t k = 0; k < events.size(); ++k) {
    if (k > 0) bps.push_back(events[k].x_lo);
    pieces.push_back(events[k].env);
  }
  return PlqFunction::create(std::move(bps), std::move(pieces)).normalized();
}

double envelope_gradient(const PlqFunction& f, double x) { return x - prox_plq(f)(x); }

double moreau_decomposition_residual(const PlqFunction& f, double x) {
  PlqFunction ef = envelope_plq(f);
  PlqFunction efs = envelope_plq(conjugate(f));
  return (ef(x) + efs(x)) - 0.5 * (x * x);
}

PlqFunction prox_inverse(const MonotonePiecewiseLinearMap& P0) {
  if (!P0.is_nonexpansive())
    throw ValidationError(
        "prox_inverse: map has a slope above 1, so it is not the prox of any convex function");
  MonotonePiecewiseLinearMap P = P0.normalized();
  const auto& segs = P.segments();
  const auto& ts = P.breakpoints();
  const std::size_t K = segs.size();

  if (K == 1 && segs[0].slope == 0.0) {
    // Constant map: the indicator of its value.
    double y = segs[0].intercept;
    return PlqFunction::create({}, {Piece{0.0, 0.0, 0.0}}, y, y);
  }

  // y-coordinates at segment junctions; flats pin the junction to their value.
  std::vector<double> ys(K + 1);
  ys[0] = -kInf;
  ys[K] = kInf;
  for (std::size_t k = 1; k < K; ++k) {
    if (segs[k - 1].slope == 0.0)
      ys[k] = segs[k - 1].intercept;
    else if (segs[k].slope == 0.0)
      ys[k] = segs[k].intercept;
    else
      ys[k] = segs[k - 1].slope * ts[k - 1] + segs[k - 1].intercept;
  }

  double dom_lo = -kInf, dom_hi = kInf;
  std::vector<double> bps;
  std::vector<Piece> pieces;
  bool have_prev = false;
  double prev_right_y = 0.0, prev_right_value = 0.0;

  for (std::size_t k = 0; k < K; ++k) {
    double s = std::min(segs[k].slope, 1.0);
    if (s <= 0.0) {
      // Flat stretch: leftmost/rightmost flats bound the domain of g,
      // interior flats become kinks (the derivative jump is already encoded
      // in the neighbouring pieces' coefficients).
      if (k == 0) dom_lo = segs[k].intercept;
      if (k == K - 1) dom_hi = segs[k].intercept;
      continue;
    }
    double a = canon0((1.0 - s) / (2.0 * s));
    double c = canon0(-segs[k].intercept / s);
    double d = 0.0;
    double y0 = ys[k];
    if (have_prev) {
      double w = (a * y0) * y0 + c * y0;
      d = prev_right_value - w;
      bps.push_back(y0);
    }
    Piece piece{a, c, d};
    pieces.push_back(piece);
    have_prev = true;
    prev_right_y = ys[k + 1];
    if (is_finite(prev_right_y)) prev_right_value = piece_value(piece, prev_right_y);
  }

  PlqFunction g = PlqFunction::create(std::move(bps), std::move(pieces), dom_lo, dom_hi);
  double shift = g(P(0.0));
  if (shift != 0.0) g = g + (-shift);
  return g.normalized();
}

PlqFunction proximal_average(const PlqFunction& f1, const PlqFunction& f2, double lambda) {
  if (!(lambda >= 0.0 && lambda <= 1.0))
    throw ValidationError("proximal_average: lambda must lie in [0,1]");
  require_convex(f1, "proximal_average");
  require_convex(f2, "proximal_average");
  MonotonePiecewiseLinearMap P =
      affine_combination(lambda, prox_plq(f1), 1.0 - lambda, prox_plq(f2));
  PlqFunction g = prox_inverse(P);
  double target0 = lambda * envelope_plq(f1)(0.0) + (1.0 - lambda) * envelope_plq(f2)(0.0);
  double kappa = target0 - envelope_plq(g)(0.0);
  return (g + kappa).normalized();
}

// -- oracle-tier prox --------------------------------------------------------

ProxSolveReport prox_oracle(const OracleConvexFunction& f, double x, double tol,
                            int max_iterations) {
  if (f.dimension != 1) throw ValidationError("prox_oracle: only univariate oracles are supported");
  if (!f.convexity_declared)
    throw ValidationError("prox_oracle: function is not declared convex; the subproblem solver "
                          "certifies nothing for it");
  if (!is_finite(x)) throw ValidationError("prox_oracle: query point must be finite");
  if (!(tol > 0.0)) throw ValidationError("prox_oracle: tol must be positive");

  auto phi = [&](double y) { return f(y) + 0.5 * (y - x) * (y - x); };

  const double R = f.domain_radius_hint;
  double lo = std::min(x, -R);
  double hi = std::max(x, R);

  ProxSolveReport report;
  report.query = x;

  const double phi_ratio = 0.5 * (std::sqrt(5.0) - 1.0);
  double m1 = hi - phi_ratio * (hi - lo);
  double m2 = lo + phi_ratio * (hi - lo);
  double f1 = phi(m1), f2 = phi(m2);
  int it = 0;
  while (hi - lo > tol && it < max_iterations) {
    ++it;
    if (f1 == kInf && f2 == kInf) {
      // No finite value seen yet; locate the domain with a coarse sweep.
      double best = kInf, best_y = 0.5 * (lo + hi);
      for (int i = 0; i <= 64; ++i) {
        double y = lo + (hi - lo) * i / 64.0;
        double v = phi(y);
        if (v < best) {
          best = v;
          best_y = y;
        }
      }
      if (best == kInf) break;
      double w = (hi - lo) / 64.0;
      lo = std::max(lo, best_y - w);
      hi = std::min(hi, best_y + w);
    } else if (f1 <= f2) {
      hi = m2;
      m2 = m1;
      f2 = f1;
      m1 = hi - phi_ratio * (hi - lo);
      f1 = phi(m1);
    } else {
      lo = m1;
      m1 = m2;
      f1 = f2;
      m2 = lo + phi_ratio * (hi - lo);
      f2 = phi(m2);
    }
  }

  double width = hi - lo;
  double y_hat = 0.5 * (lo + hi);
  double v_hat = phi(y_hat);
  if (f1 < v_hat) {
    y_hat = m1;
    v_hat = f1;
  }
  if (f2 < v_hat) {
    y_hat = m2;
    v_hat = f2;
  }

  report.minimizer = y_hat;
  report.envelope_value = v_hat;
  report.iterations = it;
  report.residual = width;
  report.converged = width <= tol;

  // Value certificate: phi(y*) lies within |subgradient| * width of the best
  // evaluation, and one-sided chords bound any subgradient at y_hat.
  double probe = std::max(width, 1e-12 * std::max(1.0, std::abs(y_hat)));
  double right = phi(y_hat + probe), left = phi(y_hat - probe);
  double chord = 0.0;
  if (right != kInf) chord = std::max(chord, std::abs(right - v_hat) / probe);
  if (left != kInf) chord = std::max(chord, std::abs(v_hat - left) / probe);
  if (right == kInf && left == kInf) chord = kInf;
  report.value_residual = chord * width;
  return report;
}

ProxSolveReport prox_solve_report_from_json(const nlohmann::json& j) {
  ProxSolveReport r;
  r.query = j.at("x").get<double>();
  r.minimizer = j.at("minimizer").get<double>();
  r.envelope_value = j.at("envelope_value").get<double>();
  r.iterations = j.at("iterations").get<int>();
  r.residual = j.at("residual").get<double>();
  r.value_residual = j.at("value_residual").get<double>();
  r.converged = j.at("converged").get<bool>();
  return r;
}

nlohmann::ordered_json to_json(const ProxSolveReport& r) {
  nlohmann::ordered_json j;
  j["x"] = r.query;
  j["minimizer"] = r.minimizer;
  j["envelope_value"] = r.envelope_value;
  j["iterations"] = r.iterations;
  j["residual"] = r.residual;
  j["value_residual"] = r.value_residual;
  j["converged"] = r.converged;
  return j;
}

}  // namespace moreau
