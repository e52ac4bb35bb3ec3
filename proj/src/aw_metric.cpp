#include "moreau/aw_metric.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "moreau/parallel.hpp"

namespace moreau {

namespace {

double metric_term(double t) { return t / (1.0 + t); }  // the bounded transform a(t)

int default_truncation(double accuracy) {
  // Tail of sum 2^-i past N is 2^-N; put it below accuracy/4.
  int n = static_cast<int>(std::ceil(std::log2(2.0 / accuracy))) + 1;
  return std::max(n, 1);
}

// Per-point envelope evaluation with a certified error bound.
struct EnvelopeEval {
  const PlqFunction* exact = nullptr;
  const OracleConvexFunction* oracle = nullptr;
  double prox_tol = 1e-9;

  std::pair<double, double> operator()(double x) const {
    if (exact) return {(*exact)(x), 0.0};
    ProxSolveReport r = prox_oracle(*oracle, x, prox_tol);
    if (!r.converged) throw BudgetExhausted("envelope evaluation: prox solve did not converge");
    return {r.envelope_value, r.value_residual};
  }
};

double prox_at_zero(const FunctionHandle& f) {
  if (f.is_plq()) return prox_plq(f.plq())(0.0);
  ProxSolveReport r = prox_oracle(f.oracle(), 0.0, 1e-10);
  return r.minimizer;
}

}  // namespace

double plq_sup_diff(const PlqFunction& p, const PlqFunction& q, double radius) {
  if (!p.has_full_domain() || !q.has_full_domain())
    throw ValidationError("plq_sup_diff: arguments must have full domain");
  std::vector<double> cuts;
  cuts.push_back(-radius);
  for (double b : p.breakpoints())
    if (b > -radius && b < radius) cuts.push_back(b);
  for (double b : q.breakpoints())
    if (b > -radius && b < radius) cuts.push_back(b);
  cuts.push_back(radius);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  double sup = 0.0;
  for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
    double lo = cuts[k], hi = cuts[k + 1];
    double mid = lo + (hi - lo) / 2.0;
    const Piece& a = p.pieces()[p.piece_index_at(mid)];
    const Piece& b = q.pieces()[q.piece_index_at(mid)];
    Piece diff{a.a - b.a, a.c - b.c, a.d - b.d};
    sup = std::max(sup, std::abs(piece_value(diff, lo)));
    sup = std::max(sup, std::abs(piece_value(diff, hi)));
    if (diff.a != 0.0) {
      double v = -diff.c / (2.0 * diff.a);
      if (v > lo && v < hi) sup = std::max(sup, std::abs(piece_value(diff, v)));
    }
  }
  return sup;
}

BallSupNorm ball_sup_norm(const PlqFunction& f, const PlqFunction& g, int i) {
  if (i < 1) throw ValidationError("ball_sup_norm: ball index must be >= 1");
  PlqFunction ef = envelope_plq(f);
  PlqFunction eg = envelope_plq(g);
  return {i, plq_sup_diff(ef, eg, static_cast<double>(i)), true, 0.0};
}

namespace {

BallSupNorm sup_via_branch_and_bound(const EnvelopeEval& ef, const EnvelopeEval& eg, double L,
                                     int i, double accuracy, int budget) {
  const double radius = static_cast<double>(i);
  struct Point {
    double h;    // evaluated |e_f - e_g|
    double err;  // certified bound on that evaluation
  };
  auto eval = [&](double x) -> Point {
    auto [vf, rf] = ef(x);
    auto [vg, rg] = eg(x);
    return {std::abs(vf - vg), rf + rg};
  };

  // Cells keyed by certified upper bound; refine the loosest cell first.
  struct Cell {
    double lo, hi;
    Point plo, phi;
    double upper(double L_) const {
      return 0.5 * (plo.h + phi.h) + 0.5 * L_ * (hi - lo) + std::max(plo.err, phi.err);
    }
  };
  std::multimap<double, Cell, std::greater<double>> cells;
  double lower = 0.0;
  int evals = 0;

  auto push = [&](Cell c) {
    lower = std::max(lower, std::max(c.plo.h - c.plo.err, c.phi.h - c.phi.err));
    cells.emplace(c.upper(L), std::move(c));
  };

  const int kInit = 33;
  std::vector<Point> init(kInit);
  std::vector<double> xs(kInit);
  parallel_for(kInit, [&](std::size_t k) {
    xs[k] = -radius + 2.0 * radius * static_cast<double>(k) / (kInit - 1);
    init[k] = eval(xs[k]);
  });
  evals += kInit;
  for (int k = 0; k + 1 < kInit; ++k) push({xs[k], xs[k + 1], init[k], init[k + 1]});

  while (!cells.empty()) {
    double upper = cells.begin()->first;
    if (upper - lower <= accuracy)
      return {i, 0.5 * (upper + lower), false, 0.5 * (upper - lower)};
    if (evals >= budget) break;
    Cell c = cells.begin()->second;
    cells.erase(cells.begin());
    double mid = 0.5 * (c.lo + c.hi);
    Point pm = eval(mid);
    ++evals;
    push({c.lo, mid, c.plo, pm});
    push({mid, c.hi, pm, c.phi});
  }
  double upper = cells.empty() ? lower : cells.begin()->first;
  throw BudgetExhausted("ball_sup_norm_oracle: budget exhausted on ball " + std::to_string(i) +
                        " with sup in [" + std::to_string(lower) + ", " + std::to_string(upper) +
                        "]");
}

EnvelopeEval make_eval(const FunctionHandle& f, const PlqFunction*& storage,
                       std::vector<PlqFunction>& pool, double accuracy) {
  EnvelopeEval e;
  if (f.is_plq()) {
    pool.push_back(envelope_plq(f.plq()));
    storage = &pool.back();
    e.exact = storage;
  } else {
    e.oracle = &f.oracle();
    e.prox_tol = std::clamp(accuracy * 1e-2, 1e-12, 1e-6);
  }
  return e;
}

}  // namespace

BallSupNorm ball_sup_norm_oracle(const FunctionHandle& f, const FunctionHandle& g, int i,
                                 double accuracy, int budget) {
  if (i < 1) throw ValidationError("ball_sup_norm_oracle: ball index must be >= 1");
  if (!(accuracy > 0.0)) throw ValidationError("ball_sup_norm_oracle: accuracy must be positive");
  std::vector<PlqFunction> pool;
  pool.reserve(2);
  const PlqFunction* sf = nullptr;
  const PlqFunction* sg = nullptr;
  EnvelopeEval ef = make_eval(f, sf, pool, accuracy);
  EnvelopeEval eg = make_eval(g, sg, pool, accuracy);
  double L = 2.0 * (2.0 * i + std::abs(prox_at_zero(f)) + std::abs(prox_at_zero(g)));
  return sup_via_branch_and_bound(ef, eg, L, i, accuracy, budget);
}

namespace {

MetricEstimate distance_from_sups(const std::vector<BallSupNorm>& sups, int N, double accuracy) {
  MetricEstimate est;
  est.truncation = N;
  est.terms = sups;
  double value = 0.0, lower = 0.0, upper = 0.0;
  for (const BallSupNorm& t : sups) {
    double w = std::ldexp(1.0, -t.i);  // 2^-i
    value += w * metric_term(t.sup);
    lower += w * metric_term(std::max(0.0, t.sup - t.error_bound));
    upper += w * metric_term(t.sup + t.error_bound);
  }
  double tail = std::ldexp(1.0, -N);
  est.value = value;
  est.lower = lower;
  est.upper = upper + tail;
  est.accuracy = std::max(accuracy, est.upper - est.lower);
  return est;
}

}  // namespace

MetricEstimate aw_distance(const FunctionHandle& f, const FunctionHandle& g,
                           const DistanceOptions& opts) {
  if (!(opts.accuracy > 0.0)) throw ValidationError("aw_distance: accuracy must be positive");
  const int N = opts.truncation.value_or(default_truncation(opts.accuracy));

  std::vector<BallSupNorm> sups(N);
  if (f.is_plq() && g.is_plq()) {
    // The exact path is mandatory for PLQ pairs.
    PlqFunction ef = envelope_plq(f.plq());
    PlqFunction eg = envelope_plq(g.plq());
    parallel_for(static_cast<std::size_t>(N), [&](std::size_t k) {
      int i = static_cast<int>(k) + 1;
      sups[k] = {i, plq_sup_diff(ef, eg, i), true, 0.0};
    });
  } else {
    for (int i = 1; i <= N; ++i)
      sups[i - 1] = ball_sup_norm_oracle(f, g, i, opts.accuracy / 4.0);
  }
  return distance_from_sups(sups, N, opts.accuracy);
}

bool is_envelope(const PlqFunction& f, std::string* why) {
  auto reject = [&](const char* msg) {
    if (why) *why = msg;
    return false;
  };
  if (!f.has_full_domain()) return reject("an envelope has full domain");
  if (!is_convex(f)) return reject("an envelope is convex");
  const auto& ps = f.pieces();
  for (const Piece& p : ps)
    if (p.a > 0.5 + kSlopeTol) return reject("an envelope has curvature at most 1");
  const auto& bps = f.breakpoints();
  for (std::size_t k = 0; k < bps.size(); ++k) {
    double jump = piece_slope(ps[k + 1], bps[k]) - piece_slope(ps[k], bps[k]);
    if (std::abs(jump) > kSlopeTol) return reject("an envelope is continuously differentiable");
  }
  return true;
}

MetricEstimate envelope_distance(const PlqFunction& ef, const PlqFunction& eg,
                                 const DistanceOptions& opts) {
  std::string why;
  if (!is_envelope(ef, &why)) throw ValidationError("envelope_distance: first argument: " + why);
  if (!is_envelope(eg, &why)) throw ValidationError("envelope_distance: second argument: " + why);
  const int N = opts.truncation.value_or(default_truncation(opts.accuracy));
  std::vector<BallSupNorm> sups(N);
  parallel_for(static_cast<std::size_t>(N), [&](std::size_t k) {
    int i = static_cast<int>(k) + 1;
    sups[k] = {i, plq_sup_diff(ef, eg, i), true, 0.0};
  });
  return distance_from_sups(sups, N, opts.accuracy);
}

double conjugation_isometry_residual(const PlqFunction& f, const PlqFunction& g, double accuracy) {
  DistanceOptions opts{accuracy, std::nullopt};
  MetricEstimate primal = aw_distance(FunctionHandle(f), FunctionHandle(g), opts);
  MetricEstimate dual = aw_distance(FunctionHandle(conjugate(f)), FunctionHandle(conjugate(g)), opts);
  return std::abs(primal.value - dual.value);
}

nlohmann::ordered_json to_json(const MetricEstimate& e) {
  nlohmann::ordered_json j;
  j["value"] = e.value;
  j["lower"] = e.lower;
  j["upper"] = e.upper;
  j["N"] = e.truncation;
  j["accuracy"] = e.accuracy;
  auto terms = nlohmann::ordered_json::array();
  for (const BallSupNorm& t : e.terms) {
    nlohmann::ordered_json tj;
    tj["i"] = t.i;
    tj["sup"] = t.sup;
    tj["exact"] = t.exact;
    if (!t.exact) tj["error_bound"] = t.error_bound;
    terms.push_back(tj);
  }
  j["terms"] = terms;
  return j;
}

MetricEstimate metric_estimate_from_json(const nlohmann::json& j) {
  MetricEstimate e;
  e.value = j.at("value").get<double>();
  e.lower = j.at("lower").get<double>();
  e.upper = j.at("upper").get<double>();
  e.truncation = j.at("N").get<int>();
  e.accuracy = j.at("accuracy").get<double>();
  for (const auto& tj : j.at("terms")) {
    BallSupNorm t;
    t.i = tj.at("i").get<int>();
    t.sup = tj.at("sup").get<double>();
    t.exact = tj.at("exact").get<bool>();
    if (tj.contains("error_bound")) t.error_bound = tj.at("error_bound").get<double>();
    e.terms.push_back(t);
  }
  return e;
}

}  // namespace moreau
