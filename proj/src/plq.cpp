#include "moreau/plq.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace moreau {

namespace {

void fail(const std::string& msg) { throw ValidationError("plq: " + msg); }

double canon0(double x) { return x + 0.0; }  // folds -0.0 into +0.0

bool piece_finite(const Piece& p) {
  return is_finite(p.a) && is_finite(p.c) && is_finite(p.d);
}

}  // namespace

PlqFunction PlqFunction::create(std::vector<double> breakpoints, std::vector<Piece> pieces,
                                double lower, double upper) {
  if (pieces.empty()) fail("at least one piece is required");
  if (pieces.size() != breakpoints.size() + 1) fail("need exactly one more piece than breakpoints");
  for (const Piece& p : pieces)
    if (!piece_finite(p)) fail("piece coefficients must be finite");
  for (std::size_t i = 0; i < breakpoints.size(); ++i) {
    if (!is_finite(breakpoints[i])) fail("breakpoints must be finite");
    if (i > 0 && !(breakpoints[i - 1] < breakpoints[i])) fail("breakpoints must be strictly increasing");
  }
  if (std::isnan(lower) || std::isnan(upper)) fail("domain endpoints must not be NaN");
  if (lower == kInf || upper == -kInf) fail("domain must be nonempty");
  if (!(lower <= upper)) fail("domain must satisfy lower <= upper");
  if (lower == upper && !is_finite(lower)) fail("a single-point domain must be finite");

  PlqFunction f;
  f.breakpoints_ = std::move(breakpoints);
  f.pieces_ = std::move(pieces);
  f.lower_ = lower;
  f.upper_ = upper;

  // Continuity across interior breakpoints (closedness at the endpoints is
  // automatic: the value at a finite endpoint is the piece value there).
  for (std::size_t i = 0; i < f.breakpoints_.size(); ++i) {
    double b = f.breakpoints_[i];
    if (b <= f.lower_ || b >= f.upper_) continue;
    double left = piece_value(f.pieces_[i], b);
    double right = piece_value(f.pieces_[i + 1], b);
    if (std::abs(left - right) > kValueTol * std::max(1.0, std::abs(left)))
      fail("pieces disagree at breakpoint " + std::to_string(b));
  }
  return f;
}

PlqFunction PlqFunction::quadratic(double a, double c, double d, double lower, double upper) {
  return create({}, {Piece{a, c, d}}, lower, upper);
}

PlqFunction PlqFunction::indicator(double lower, double upper, double constant) {
  return create({}, {Piece{0.0, 0.0, constant}}, lower, upper);
}

std::size_t PlqFunction::piece_index_at(double x) const {
  auto it = std::upper_bound(breakpoints_.begin(), breakpoints_.end(), x);
  return static_cast<std::size_t>(it - breakpoints_.begin());
}

double PlqFunction::operator()(double x) const {
  if (std::isnan(x)) return kInf;
  if (x < lower_ || x > upper_) return kInf;
  if (!is_finite(x)) return kInf;  // open-ended domain: +-inf is never attained
  return piece_value(pieces_[piece_index_at(x)], x);
}

double PlqFunction::slope_at_lower() const {
  double x = is_finite(lower_) ? lower_ : breakpoints_.empty() ? 0.0 : breakpoints_.front();
  return piece_slope(pieces_.front(), x);
}

double PlqFunction::slope_at_upper() const {
  double x = is_finite(upper_) ? upper_ : breakpoints_.empty() ? 0.0 : breakpoints_.back();
  return piece_slope(pieces_.back(), x);
}

PlqFunction PlqFunction::normalized() const {
  // Drop pieces whose interval does not meet the domain interior, then merge
  // adjacent pieces with identical coefficients.
  std::vector<double> bps;
  std::vector<Piece> ps;
  const std::size_t n = pieces_.size();
  for (std::size_t j = 0; j < n; ++j) {
    double lo = j == 0 ? -kInf : breakpoints_[j - 1];
    double hi = j == n - 1 ? kInf : breakpoints_[j];
    lo = std::max(lo, lower_);
    hi = std::min(hi, upper_);
    bool keep = lower_ == upper_ ? (ps.empty() && lo <= lower_ && lower_ <= hi) : lo < hi;
    if (!keep) continue;
    if (!ps.empty() && ps.back() == pieces_[j]) continue;  // merge
    if (!ps.empty()) bps.push_back(lo);
    ps.push_back(pieces_[j]);
  }
  if (ps.empty()) {  // single-point domain sitting exactly on a breakpoint
    ps.push_back(pieces_[piece_index_at(lower_)]);
  }
  // A merge can strand a breakpoint between identical pieces; rebuild cleanly.
  PlqFunction f;
  f.breakpoints_ = std::move(bps);
  f.pieces_ = std::move(ps);
  f.lower_ = lower_;
  f.upper_ = upper_;
  return f;
}

PlqFunction PlqFunction::operator+(double t) const {
  PlqFunction f = *this;
  for (Piece& p : f.pieces_) p.d += t;
  return f;
}

PlqFunction PlqFunction::restricted(double lo, double hi) const {
  PlqFunction f = *this;
  f.lower_ = std::max(lower_, lo);
  f.upper_ = std::min(upper_, hi);
  if (!(f.lower_ <= f.upper_)) fail("restriction empties the domain");
  return f.normalized();
}

bool operator==(const PlqFunction& f, const PlqFunction& g) {
  PlqFunction a = f.normalized();
  PlqFunction b = g.normalized();
  return a.lower_ == b.lower_ && a.upper_ == b.upper_ && a.breakpoints_ == b.breakpoints_ &&
         a.pieces_ == b.pieces_;
}

double evaluate(const PlqFunction& f, double x) { return f(x); }

ConvexityReport check_convexity(const PlqFunction& f) {
  ConvexityReport r;
  PlqFunction g = f.normalized();
  const auto& ps = g.pieces();
  const auto& bps = g.breakpoints();
  for (std::size_t j = 0; j < ps.size(); ++j) {
    if (ps[j].a < -kSlopeTol) {
      r.ok = false;
      r.reason = "piece has negative curvature";
      r.piece_index = j;
      double where = j < bps.size() ? bps[j] : (j > 0 ? bps[j - 1] : 0.0);
      r.location = where;
      r.left_slope = 2.0 * ps[j].a;
      r.right_slope = 2.0 * ps[j].a;
      return r;
    }
  }
  for (std::size_t i = 0; i < bps.size(); ++i) {
    double b = bps[i];
    double left = piece_slope(ps[i], b);
    double right = piece_slope(ps[i + 1], b);
    if (right < left - kSlopeTol) {
      r.ok = false;
      r.reason = "one-sided derivative decreases across breakpoint";
      r.location = b;
      r.left_slope = left;
      r.right_slope = right;
      r.piece_index = i;
      return r;
    }
  }
  return r;
}

void require_convex(const PlqFunction& f, const char* op) {
  ConvexityReport r = check_convexity(f);
  if (!r.ok) {
    std::ostringstream msg;
    msg << op << ": input is not convex (" << r.reason;
    if (r.location) msg << " at " << *r.location;
    msg << ")";
    throw ValidationError(msg.str());
  }
}

PlqFunction add_quadratic(const PlqFunction& f, double sigma) {
  if (!is_finite(sigma)) throw ValidationError("add_quadratic: sigma must be finite");
  std::vector<Piece> ps = f.pieces();
  for (Piece& p : ps) p.a += sigma / 2.0;
  return PlqFunction::create(f.breakpoints(), std::move(ps), f.lower(), f.upper());
}

// -- conjugate ---------------------------------------------------------------
//
// The derivative graph of f is a maximal monotone polyline in the (x, slope)
// plane.  Its inverse is the derivative graph of f*, so each feature of f
// maps to one feature of f*:
//   quadratic piece on [x0,x1]      -> quadratic piece on the slope range,
//   kink at b with jump [s-,s+]     -> affine piece with slope b on [s-,s+],
//   finite domain endpoint          -> affine tail piece,
//   affine piece (slope c)          -> breakpoint of f* at c,
//   affine piece reaching +-inf     -> domain endpoint of f* at c.
// Values anchor through the Fenchel equality f*(v) = v x - f(x) with
// v in df(x), which makes junctions agree without integration drift.

PlqFunction conjugate(const PlqFunction& f0) {
  require_convex(f0, "conjugate");
  PlqFunction f = f0.normalized();

  if (f.is_point_domain()) {
    double xbar = f.lower();
    return PlqFunction::quadratic(0.0, xbar, -f(xbar));
  }

  struct Event {  // one piece of f* on [v_lo, v_hi]
    double v_lo, v_hi;
    Piece piece;
  };
  std::vector<Event> events;

  const auto& ps = f.pieces();
  const auto& bps = f.breakpoints();
  const std::size_t n = ps.size();

  double dom_lo = -kInf, dom_hi = kInf;  // domain of f*
  // Interval of piece j clipped to the domain.
  auto clip_lo = [&](std::size_t j) {
    return std::max(j == 0 ? -kInf : bps[j - 1], f.lower());
  };
  auto clip_hi = [&](std::size_t j) {
    return std::min(j == n - 1 ? kInf : bps[j], f.upper());
  };

  if (is_finite(f.lower())) {
    double s0 = piece_slope(ps.front(), f.lower());
    events.push_back({-kInf, s0, Piece{0.0, f.lower(), canon0(-f(f.lower()))}});
  } else if (ps.front().a == 0.0) {
    dom_lo = ps.front().c;  // affine tail: slopes below c give +inf
  }

  for (std::size_t j = 0; j < n; ++j) {
    double x0 = clip_lo(j), x1 = clip_hi(j);
    if (!(x0 < x1)) continue;
    const Piece& p = ps[j];
    if (p.a > 0.0) {
      double v0 = is_finite(x0) ? piece_slope(p, x0) : -kInf;
      double v1 = is_finite(x1) ? piece_slope(p, x1) : kInf;
      double inv_a = 1.0 / (4.0 * p.a);
      events.push_back(
          {v0, v1, Piece{inv_a, canon0(-p.c / (2.0 * p.a)), canon0((p.c * p.c) * inv_a - p.d)}});
    }
    if (j + 1 < n) {
      double b = bps[j];
      if (b <= f.lower() || b >= f.upper()) continue;
      double sl = piece_slope(ps[j], b);
      double sr = piece_slope(ps[j + 1], b);
      if (sr > sl) events.push_back({sl, sr, Piece{0.0, b, canon0(-f(b))}});
    }
  }

  if (is_finite(f.upper())) {
    double s1 = piece_slope(ps.back(), f.upper());
    events.push_back({s1, kInf, Piece{0.0, f.upper(), canon0(-f(f.upper()))}});
  } else if (ps.back().a == 0.0) {
    dom_hi = ps.back().c;
  }

  if (events.empty()) {
    // f is affine on an unbounded domain; f* is the indicator of one slope.
    double v = dom_lo;  // == dom_hi
    double anchor = is_finite(f.lower()) ? f.lower() : is_finite(f.upper()) ? f.upper() : 0.0;
    if (!bps.empty()) anchor = bps.front();
    return PlqFunction::create({}, {Piece{0.0, 0.0, v * anchor - f(anchor)}}, v, v);
  }

  std::vector<double> breakpoints;
  std::vector<Piece> pieces;
  for (std::size_t k = 0; k < events.size(); ++k) {
    if (k > 0) breakpoints.push_back(events[k].v_lo);
    pieces.push_back(events[k].piece);
  }
  return PlqFunction::create(std::move(breakpoints), std::move(pieces), dom_lo, dom_hi)
      .normalized();
}

// -- exact minimization ------------------------------------------------------

namespace {

struct PieceMin {
  bool attained = true;
  double value = kInf;
  double lo = 0.0, hi = 0.0;  // argmin interval within this piece
};

// Minimum of one piece over [x0, x1] (endpoints may be infinite).
PieceMin minimize_piece(const Piece& p, double x0, double x1) {
  PieceMin m;
  if (p.a > 0.0) {
    double v = -p.c / (2.0 * p.a);
    if (v <= x0) {
      m.value = piece_value(p, x0);
      m.lo = m.hi = x0;
    } else if (v >= x1) {
      if (!is_finite(x1)) return {false, -kInf, 0, 0};
      m.value = piece_value(p, x1);
      m.lo = m.hi = x1;
    } else {
      m.value = quadratic_vertex_value(p.a, p.c, p.d);
      m.lo = m.hi = v;
    }
    return m;
  }
  if (p.c > 0.0) {
    if (!is_finite(x0)) return {false, -kInf, 0, 0};
    m.value = piece_value(p, x0);
    m.lo = m.hi = x0;
  } else if (p.c < 0.0) {
    if (!is_finite(x1)) return {false, -kInf, 0, 0};
    m.value = piece_value(p, x1);
    m.lo = m.hi = x1;
  } else {
    m.value = p.d;
    m.lo = x0;
    m.hi = x1;
  }
  return m;
}

}  // namespace

PlqMinimum plq_minimum(const PlqFunction& f0) {
  PlqFunction f = f0.normalized();
  const auto& ps = f.pieces();
  const auto& bps = f.breakpoints();
  const std::size_t n = ps.size();

  PlqMinimum result;
  result.value = kInf;
  bool any = false;
  for (std::size_t j = 0; j < n; ++j) {
    double x0 = std::max(j == 0 ? -kInf : bps[j - 1], f.lower());
    double x1 = std::min(j == n - 1 ? kInf : bps[j], f.upper());
    if (x0 > x1) continue;
    PieceMin m = minimize_piece(ps[j], x0, x1);
    if (!m.attained) return PlqMinimum{false, -kInf, 0.0, 0.0};
    if (!any || m.value < result.value) {
      any = true;
      result.value = m.value;
      result.arg_lo = m.lo;
      result.arg_hi = m.hi;
    } else if (m.value == result.value) {
      result.arg_lo = std::min(result.arg_lo, m.lo);
      result.arg_hi = std::max(result.arg_hi, m.hi);
    }
  }
  result.attained = any;
  return result;
}

double plq_infimum_on(const PlqFunction& f0, double lo, double hi) {
  PlqFunction f = f0.normalized();
  lo = std::max(lo, f.lower());
  hi = std::min(hi, f.upper());
  if (lo > hi) return kInf;
  const auto& ps = f.pieces();
  const auto& bps = f.breakpoints();
  const std::size_t n = ps.size();
  double best = kInf;
  for (std::size_t j = 0; j < n; ++j) {
    double x0 = std::max(j == 0 ? -kInf : bps[j - 1], lo);
    double x1 = std::min(j == n - 1 ? kInf : bps[j], hi);
    if (x0 > x1) continue;
    PieceMin m = minimize_piece(ps[j], x0, x1);
    if (!m.attained) return -kInf;
    best = std::min(best, m.value);
  }
  return best;
}

bool approx_equal(const PlqFunction& f, const PlqFunction& g, double tol, double lo, double hi,
                  int samples) {
  for (int i = 0; i < samples; ++i) {
    double x = lo + (hi - lo) * i / (samples - 1);
    double fx = f(x), gx = g(x);
    if (fx == kInf && gx == kInf) continue;
    if (!(std::abs(fx - gx) <= tol)) return false;
  }
  return true;
}

// -- JSON --------------------------------------------------------------------

namespace {

nlohmann::ordered_json domain_endpoint_json(double v) {
  if (v == kInf) return "inf";
  if (v == -kInf) return "-inf";
  return v;
}

double domain_endpoint_from_json(const nlohmann::json& j) {
  if (j.is_string()) {
    std::string s = j.get<std::string>();
    if (s == "inf" || s == "+inf") return kInf;
    if (s == "-inf") return -kInf;
    throw ValidationError("plq json: bad domain token '" + s + "'");
  }
  if (j.is_number()) return j.get<double>();
  throw ValidationError("plq json: domain entries must be numbers or inf tokens");
}

}  // namespace

nlohmann::ordered_json to_json(const PlqFunction& f) {
  nlohmann::ordered_json j;
  j["breakpoints"] = f.breakpoints();
  auto pieces = nlohmann::ordered_json::array();
  for (const Piece& p : f.pieces()) pieces.push_back({p.a, p.c, p.d});
  j["pieces"] = pieces;
  j["domain"] = {domain_endpoint_json(f.lower()), domain_endpoint_json(f.upper())};
  return j;
}

PlqFunction plq_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("pieces")) throw ValidationError("plq json: missing 'pieces'");
  std::vector<double> bps;
  if (j.contains("breakpoints")) bps = j.at("breakpoints").get<std::vector<double>>();
  std::vector<Piece> ps;
  for (const auto& e : j.at("pieces")) {
    if (!e.is_array() || e.size() != 3) throw ValidationError("plq json: each piece is [a,c,d]");
    ps.push_back(Piece{e[0].get<double>(), e[1].get<double>(), e[2].get<double>()});
  }
  double lo = -kInf, hi = kInf;
  if (j.contains("domain")) {
    const auto& d = j.at("domain");
    if (!d.is_array() || d.size() != 2) throw ValidationError("plq json: domain is [l,u]");
    lo = domain_endpoint_from_json(d[0]);
    hi = domain_endpoint_from_json(d[1]);
  }
  return PlqFunction::create(std::move(bps), std::move(ps), lo, hi);
}

}  // namespace moreau
