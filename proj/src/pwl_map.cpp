#include "moreau/pwl_map.hpp"

#include <algorithm>
#include <cmath>

namespace moreau {

namespace {
void fail(const std::string& msg) { throw ValidationError("pwl_map: " + msg); }

double seg_value(const MonotonePiecewiseLinearMap::Segment& s, double x) {
  return s.slope * x + s.intercept;
}
}  // namespace

MonotonePiecewiseLinearMap MonotonePiecewiseLinearMap::create(std::vector<double> breakpoints,
                                                              std::vector<Segment> segments) {
  if (segments.empty()) fail("at least one segment is required");
  if (segments.size() != breakpoints.size() + 1) fail("need one more segment than breakpoints");
  for (std::size_t i = 0; i < breakpoints.size(); ++i) {
    if (!is_finite(breakpoints[i])) fail("breakpoints must be finite");
    if (i > 0 && !(breakpoints[i - 1] < breakpoints[i])) fail("breakpoints must be strictly increasing");
  }
  for (const Segment& s : segments) {
    if (!is_finite(s.slope) || !is_finite(s.intercept)) fail("segment coefficients must be finite");
    if (s.slope < -kSlopeTol) fail("segments must be nondecreasing");
  }
  for (std::size_t i = 0; i < breakpoints.size(); ++i) {
    double b = breakpoints[i];
    double left = seg_value(segments[i], b);
    double right = seg_value(segments[i + 1], b);
    if (std::abs(left - right) > kValueTol * std::max(1.0, std::abs(left)))
      fail("segments disagree at breakpoint " + std::to_string(b));
  }
  MonotonePiecewiseLinearMap m;
  m.breakpoints_ = std::move(breakpoints);
  m.segments_ = std::move(segments);
  return m;
}

MonotonePiecewiseLinearMap MonotonePiecewiseLinearMap::identity() {
  return create({}, {Segment{1.0, 0.0}});
}

MonotonePiecewiseLinearMap MonotonePiecewiseLinearMap::constant(double value) {
  return create({}, {Segment{0.0, value}});
}

std::size_t MonotonePiecewiseLinearMap::segment_index_at(double x) const {
  auto it = std::upper_bound(breakpoints_.begin(), breakpoints_.end(), x);
  return static_cast<std::size_t>(it - breakpoints_.begin());
}

double MonotonePiecewiseLinearMap::operator()(double x) const {
  return seg_value(segments_[segment_index_at(x)], x);
}

double MonotonePiecewiseLinearMap::max_slope() const {
  double k = 0.0;
  for (const Segment& s : segments_) k = std::max(k, s.slope);
  return k;
}

bool MonotonePiecewiseLinearMap::is_nonexpansive(double tol) const {
  return max_slope() <= 1.0 + tol;
}

std::pair<double, double> MonotonePiecewiseLinearMap::range() const {
  double lo, hi;
  const Segment& first = segments_.front();
  const Segment& last = segments_.back();
  if (first.slope > 0.0)
    lo = -kInf;
  else
    lo = breakpoints_.empty() ? first.intercept : seg_value(first, breakpoints_.front());
  if (last.slope > 0.0)
    hi = kInf;
  else
    hi = breakpoints_.empty() ? last.intercept : seg_value(last, breakpoints_.back());
  return {lo, hi};
}

MonotonePiecewiseLinearMap MonotonePiecewiseLinearMap::scaled(double t) const {
  if (!(t >= 0.0) || !is_finite(t)) fail("scale factor must be finite and >= 0");
  MonotonePiecewiseLinearMap m = *this;
  for (Segment& s : m.segments_) {
    s.slope *= t;
    s.intercept *= t;
  }
  return m.normalized();
}

MonotonePiecewiseLinearMap MonotonePiecewiseLinearMap::normalized() const {
  std::vector<double> bps;
  std::vector<Segment> segs;
  for (std::size_t j = 0; j < segments_.size(); ++j) {
    if (!segs.empty() && segs.back() == segments_[j]) continue;
    if (!segs.empty()) bps.push_back(breakpoints_[j - 1]);
    segs.push_back(segments_[j]);
  }
  MonotonePiecewiseLinearMap m;
  m.breakpoints_ = std::move(bps);
  m.segments_ = std::move(segs);
  return m;
}

bool operator==(const MonotonePiecewiseLinearMap& p, const MonotonePiecewiseLinearMap& q) {
  MonotonePiecewiseLinearMap a = p.normalized();
  MonotonePiecewiseLinearMap b = q.normalized();
  return a.breakpoints_ == b.breakpoints_ && a.segments_ == b.segments_;
}

MonotonePiecewiseLinearMap affine_combination(double s, const MonotonePiecewiseLinearMap& p,
                                              double t, const MonotonePiecewiseLinearMap& q) {
  if (s < 0.0 || t < 0.0) throw ValidationError("affine_combination: weights must be >= 0");
  std::vector<double> bps;
  bps.reserve(p.breakpoints().size() + q.breakpoints().size());
  std::merge(p.breakpoints().begin(), p.breakpoints().end(), q.breakpoints().begin(),
             q.breakpoints().end(), std::back_inserter(bps));
  bps.erase(std::unique(bps.begin(), bps.end()), bps.end());

  std::vector<MonotonePiecewiseLinearMap::Segment> segs;
  segs.reserve(bps.size() + 1);
  for (std::size_t j = 0; j <= bps.size(); ++j) {
    // Probe a point interior to the j-th cell to select both segments.
    double probe;
    if (bps.empty())
      probe = 0.0;
    else if (j == 0)
      probe = bps.front() - 1.0;
    else if (j == bps.size())
      probe = bps.back() + 1.0;
    else
      probe = bps[j - 1] + (bps[j] - bps[j - 1]) / 2.0;
    const auto& sp = p.segments()[p.segment_index_at(probe)];
    const auto& sq = q.segments()[q.segment_index_at(probe)];
    segs.push_back({s * sp.slope + t * sq.slope, s * sp.intercept + t * sq.intercept});
  }
  return MonotonePiecewiseLinearMap::create(std::move(bps), std::move(segs)).normalized();
}

bool approx_equal(const MonotonePiecewiseLinearMap& p, const MonotonePiecewiseLinearMap& q,
                  double tol, double lo, double hi, int samples) {
  for (int i = 0; i < samples; ++i) {
    double x = lo + (hi - lo) * i / (samples - 1);
    if (!(std::abs(p(x) - q(x)) <= tol)) return false;
  }
  return true;
}

nlohmann::ordered_json to_json(const MonotonePiecewiseLinearMap& m) {
  nlohmann::ordered_json j;
  j["breakpoints"] = m.breakpoints();
  auto segs = nlohmann::ordered_json::array();
  for (const auto& s : m.segments()) segs.push_back({s.slope, s.intercept});
  j["segments"] = segs;
  return j;
}

MonotonePiecewiseLinearMap pwl_map_from_json(const nlohmann::json& j) {
  std::vector<double> bps;
  if (j.contains("breakpoints")) bps = j.at("breakpoints").get<std::vector<double>>();
  std::vector<MonotonePiecewiseLinearMap::Segment> segs;
  for (const auto& e : j.at("segments")) {
    if (!e.is_array() || e.size() != 2)
      throw ValidationError("pwl_map json: each segment is [slope, intercept]");
    segs.push_back({e[0].get<double>(), e[1].get<double>()});
  }
  return MonotonePiecewiseLinearMap::create(std::move(bps), std::move(segs));
}

}  // namespace moreau
