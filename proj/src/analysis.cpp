#include "moreau/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "moreau/parallel.hpp"

namespace moreau {

namespace {

nlohmann::ordered_json extended(double v) {
  if (v == kInf) return "inf";
  if (v == -kInf) return "-inf";
  return nlohmann::ordered_json(v);
}

double extended_from(const nlohmann::json& j) {
  if (j.is_string()) {
    std::string s = j.get<std::string>();
    if (s == "inf") return kInf;
    if (s == "-inf") return -kInf;
    throw ValidationError("bad extended-real token '" + s + "'");
  }
  return j.get<double>();
}

}  // namespace

StrongConvexityReport strong_convexity_report(const PlqFunction& f0) {
  require_convex(f0, "strong_convexity_report");
  PlqFunction f = f0.normalized();
  StrongConvexityReport r;
  if (f.is_point_domain()) {
    r.point_indicator = true;
    r.modulus = kInf;
    r.prox_contraction = 0.0;
    return r;
  }
  double min_curv = kInf;
  std::size_t min_piece = 0;
  const auto& ps = f.pieces();
  for (std::size_t j = 0; j < ps.size(); ++j) {
    if (ps[j].a < min_curv) {
      min_curv = ps[j].a;
      min_piece = j;
    }
  }
  r.modulus = 2.0 * min_curv;
  r.prox_contraction = prox_plq(f).max_slope();
  if (r.modulus <= 0.0) {
    r.modulus = 0.0;
    r.witness_piece = min_piece;
    r.witness_curvature = 2.0 * min_curv;
  }
  return r;
}

double oracle_modulus_scan(const OracleConvexFunction& f, unsigned seed, int samples) {
  if (f.dimension != 1)
    throw ValidationError("oracle_modulus_scan: only univariate oracles are supported");
  ScanMinimum sm = scan_minimize(f, 20001);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  double sigma = kInf;
  // Probe second differences at several scales around the scan minimizer;
  // the modulus is bounded by every sampled quotient.
  for (double scale : {1.0, 1e-1, 1e-2, 1e-3, 1e-4}) {
    for (int s = 0; s < samples / 5; ++s) {
      double x = sm.arg + scale * unit(rng);
      double y = sm.arg + scale * unit(rng);
      if (x == y) continue;
      double m = 0.5 * (x + y);
      double fx = f(x), fy = f(y), fm = f(m);
      if (fx == kInf || fy == kInf || fm == kInf) continue;
      double quot = 4.0 * (fx + fy - 2.0 * fm) / ((x - y) * (x - y));
      sigma = std::min(sigma, quot);
    }
  }
  return std::max(sigma, 0.0);
}

CoercivityReport coercivity_test(const PlqFunction& f0) {
  require_convex(f0, "coercivity_test");
  PlqFunction f = f0.normalized();
  CoercivityReport r;
  PlqFunction conj = conjugate(f);
  r.conjugate_dom_lo = conj.lower();
  r.conjugate_dom_hi = conj.upper();
  bool fenchel = conj.has_full_domain();

  bool right = is_finite(f.upper()) || f.pieces().back().a > 0.0;
  bool left = is_finite(f.lower()) || f.pieces().front().a > 0.0;
  r.end_slopes_route = left && right;

  if (fenchel != r.end_slopes_route)
    throw VerificationFailure("coercivity_test: Fenchel and end-slope routes disagree");
  r.coercive = fenchel;
  if (r.coercive) {
    r.witness = is_finite(f.upper()) && is_finite(f.lower()) ? "bounded domain"
                                                             : "superlinear end growth";
  } else {
    r.witness = "dom f* = [" + std::to_string(r.conjugate_dom_lo) + ", " +
                std::to_string(r.conjugate_dom_hi) + "]";
  }
  return r;
}

namespace {

MinimizerCertificate annulus_gap_impl(const PlqFunction& f, double z, int m, AnnulusKind which,
                                      bool compact) {
  if (m < 1) throw ValidationError("annulus_gap: m must be >= 1");
  if (!is_finite(z)) throw ValidationError("annulus_gap: z must be finite");
  require_convex(f, "annulus_gap");

  PlqFunction phi = which == AnnulusKind::E ? envelope_plq(f) : f.normalized();
  double phi_z = phi(z);
  if (phi_z == kInf)
    throw ValidationError("annulus_gap: z must lie in the domain of the tested function");

  double r_in = 1.0 / m;
  double outer = compact ? static_cast<double>(m) : kInf;
  double inf_left = plq_infimum_on(phi, z - outer, z - r_in);
  double inf_right = plq_infimum_on(phi, z + r_in, z + outer);
  double inf_annulus = std::min(inf_left, inf_right);

  MinimizerCertificate cert;
  cert.z = z;
  cert.m = m;
  cert.which = which;
  cert.gap = inf_annulus - phi_z;  // +inf when the annulus misses the domain
  if (std::isnan(cert.gap)) cert.gap = kInf;  // inf - inf cannot occur: phi_z is finite
  cert.member = cert.gap > 0.0;
  return cert;
}

}  // namespace

MinimizerCertificate annulus_gap(const PlqFunction& f, double z, int m, AnnulusKind which) {
  return annulus_gap_impl(f, z, m, which, /*compact=*/true);
}

MinimizerCertificate annulus_gap_unrestricted(const PlqFunction& f, double z, int m,
                                              AnnulusKind which) {
  return annulus_gap_impl(f, z, m, which, /*compact=*/false);
}

CertifyMinResult strong_minimizer_certificate(const PlqFunction& f, int M) {
  if (M < 1) throw ValidationError("strong_minimizer_certificate: M must be >= 1");
  require_convex(f, "strong_minimizer_certificate");
  CertifyMinResult result;
  result.depth = M;

  PlqMinimum mn = plq_minimum(f);
  if (!mn.attained) {
    result.verdict = CertifyMinResult::Verdict::no_minimizer;
    return result;
  }
  if (mn.arg_lo < mn.arg_hi) {
    result.verdict = CertifyMinResult::Verdict::refuted;
    double lo = is_finite(mn.arg_lo) ? mn.arg_lo
                                     : (is_finite(mn.arg_hi) ? mn.arg_hi - 1.0 : 0.0);
    double hi = is_finite(mn.arg_hi) ? mn.arg_hi : lo + 1.0;
    result.refutation_witnesses = {lo, hi};
    return result;
  }

  double z = mn.arg_lo;
  result.minimizer = z;
  result.verdict = CertifyMinResult::Verdict::strong_minimizer;
  for (int m = 1; m <= M; ++m) {
    result.u_stack.push_back(annulus_gap(f, z, m, AnnulusKind::U));
    result.e_stack.push_back(annulus_gap(f, z, m, AnnulusKind::E));
    if (!result.u_stack.back().member || !result.e_stack.back().member)
      result.verdict = CertifyMinResult::Verdict::not_certified;
  }
  return result;
}

CertifyMinResult strong_minimizer_certificate_oracle(const OracleConvexFunction& f, int M,
                                                     double gap_floor) {
  if (f.dimension != 1)
    throw ValidationError("strong_minimizer_certificate_oracle: univariate oracles only");
  if (M < 1) throw ValidationError("strong_minimizer_certificate_oracle: M must be >= 1");
  CertifyMinResult result;
  result.depth = M;
  result.scan_scale = true;

  ScanMinimum sm = scan_minimize(f, 100001);
  const double R = f.domain_radius_hint;

  double z = sm.arg;
  result.minimizer = z;
  result.verdict = CertifyMinResult::Verdict::strong_minimizer;

  for (int m = 1; m <= M; ++m) {
    // Probe inf over {|x-z| >= 1/m} out to the widest window we can see.
    double W = std::max(static_cast<double>(m), R);
    double r_in = 1.0 / m;
    double best_v = kInf, best_x = z + r_in;
    const int side_pts = 20001;
    for (int side = 0; side < 2; ++side) {
      double a = side == 0 ? z + r_in : z - W;
      double b = side == 0 ? z + W : z - r_in;
      for (int i = 0; i < side_pts; ++i) {
        double x = a + (b - a) * i / (side_pts - 1);
        double v = f(x);
        if (v < best_v) {
          best_v = v;
          best_x = x;
        }
      }
    }
    double step = (W - r_in) / (side_pts - 1);
    // Tail leak: the infimum sits at the window edge with values still
    // falling outward, so minimizing sequences can escape to infinity.
    bool at_edge = std::abs(std::abs(best_x - z) - W) <= 2.0 * step;
    bool falling = f(z + (best_x > z ? 1.0 : -1.0) * (W + 10.0 * step)) <= best_v;
    bool leak = at_edge && falling;

    MinimizerCertificate cert;
    cert.z = z;
    cert.m = m;
    cert.which = AnnulusKind::U;
    cert.gap = best_v - sm.value;
    cert.member = !leak && cert.gap > gap_floor;
    cert.scan_scale = true;
    result.u_stack.push_back(cert);
    if (!cert.member) {
      // A zero gap attained away from the window edge is a second minimizer,
      // not an escape to infinity: refute instead of merely failing.
      double tol_v = 1e-9 * std::max(1.0, std::abs(sm.value));
      if (!leak && cert.gap <= tol_v &&
          result.verdict != CertifyMinResult::Verdict::refuted) {
        result.verdict = CertifyMinResult::Verdict::refuted;
        result.refutation_witnesses = {z, best_x};
      } else if (result.verdict == CertifyMinResult::Verdict::strong_minimizer) {
        result.verdict = CertifyMinResult::Verdict::not_certified;
      }
    }
  }
  return result;
}

OpennessRadius em_openness_radius(const PlqFunction& f, const MinimizerCertificate& cert) {
  if (cert.which != AnnulusKind::E)
    throw ValidationError("em_openness_radius: certificate must be for the E variant");
  if (!(cert.gap > 0.0)) throw ValidationError("em_openness_radius: gap must be positive");
  (void)f;
  OpennessRadius r;
  r.z = cert.z;
  r.m = cert.m;
  r.gap = cert.gap;
  r.j = std::max(1, static_cast<int>(std::ceil(std::abs(cert.z) + cert.m)));
  double ratio = cert.gap == kInf ? 1.0 : cert.gap / (2.0 + cert.gap);
  r.epsilon = 0.99 * std::ldexp(ratio, -r.j);
  return r;
}

EpiProbeReport epi_convergence_probe(const std::vector<PlqFunction>& members,
                                     const PlqFunction& target, const std::vector<int>& balls,
                                     double tol, std::string description) {
  if (members.empty()) throw ValidationError("epi_convergence_probe: empty member list");
  if (balls.empty()) throw ValidationError("epi_convergence_probe: empty ball list");
  if (!(tol > 0.0)) throw ValidationError("epi_convergence_probe: tol must be positive");
  for (int b : balls)
    if (b < 1) throw ValidationError("epi_convergence_probe: ball indices must be >= 1");

  EpiProbeReport report;
  report.description = std::move(description);
  report.tol = tol;
  report.balls = balls;
  report.deviations.assign(members.size(), std::vector<double>(balls.size(), 0.0));

  PlqFunction target_env = envelope_plq(target);
  std::vector<PlqFunction> member_envs;
  member_envs.reserve(members.size());
  for (const PlqFunction& f : members) member_envs.push_back(envelope_plq(f));

  parallel_for(members.size() * balls.size(), [&](std::size_t idx) {
    std::size_t k = idx / balls.size();
    std::size_t b = idx % balls.size();
    report.deviations[k][b] = plq_sup_diff(member_envs[k], target_env, balls[b]);
  });

  report.thresholds.assign(balls.size(), -1);
  report.converges = true;
  for (std::size_t b = 0; b < balls.size(); ++b) {
    int k0 = -1;
    for (int k = static_cast<int>(members.size()) - 1; k >= 0; --k) {
      if (report.deviations[k][b] <= tol)
        k0 = k;
      else
        break;
    }
    report.thresholds[b] = k0;
    if (k0 < 0) report.converges = false;
  }
  return report;
}

std::pair<StrongConvexityReport, StrongConvexityReport> relate_modulus_envelope(
    const PlqFunction& f) {
  return {strong_convexity_report(f), strong_convexity_report(envelope_plq(f))};
}

// -- JSON --------------------------------------------------------------------

nlohmann::ordered_json to_json(const StrongConvexityReport& r) {
  nlohmann::ordered_json j;
  j["modulus"] = extended(r.modulus);
  j["point_indicator"] = r.point_indicator;
  j["prox_contraction"] = r.prox_contraction;
  if (r.witness_piece) j["witness_piece"] = *r.witness_piece;
  if (r.witness_curvature) j["witness_curvature"] = *r.witness_curvature;
  return j;
}

nlohmann::ordered_json to_json(const CoercivityReport& r) {
  nlohmann::ordered_json j;
  j["coercive"] = r.coercive;
  j["conjugate_domain"] = {extended(r.conjugate_dom_lo), extended(r.conjugate_dom_hi)};
  j["end_slopes_route"] = r.end_slopes_route;
  j["witness"] = r.witness;
  return j;
}

nlohmann::ordered_json to_json(const MinimizerCertificate& c) {
  nlohmann::ordered_json j;
  j["z"] = c.z;
  j["m"] = c.m;
  j["which"] = c.which == AnnulusKind::U ? "U" : "E";
  j["gap"] = extended(c.gap);
  j["member"] = c.member;
  if (c.scan_scale) j["scan_scale"] = true;
  return j;
}

nlohmann::ordered_json to_json(const CertifyMinResult& r) {
  nlohmann::ordered_json j;
  switch (r.verdict) {
    case CertifyMinResult::Verdict::strong_minimizer: j["verdict"] = "strong_minimizer"; break;
    case CertifyMinResult::Verdict::refuted: j["verdict"] = "refuted"; break;
    case CertifyMinResult::Verdict::no_minimizer: j["verdict"] = "no_minimizer"; break;
    case CertifyMinResult::Verdict::not_certified: j["verdict"] = "not_certified"; break;
  }
  j["M"] = r.depth;
  if (r.minimizer) j["minimizer"] = *r.minimizer;
  if (r.refutation_witnesses)
    j["refutation_witnesses"] = {r.refutation_witnesses->first, r.refutation_witnesses->second};
  auto stack = [&](const std::vector<MinimizerCertificate>& cs) {
    auto arr = nlohmann::ordered_json::array();
    for (const auto& c : cs) arr.push_back(to_json(c));
    return arr;
  };
  j["u_certificates"] = stack(r.u_stack);
  j["e_certificates"] = stack(r.e_stack);
  j["scan_scale"] = r.scan_scale;
  return j;
}

nlohmann::ordered_json to_json(const OpennessRadius& r) {
  nlohmann::ordered_json j;
  j["z"] = r.z;
  j["m"] = r.m;
  j["j"] = r.j;
  j["gap"] = extended(r.gap);
  j["epsilon"] = r.epsilon;
  return j;
}

nlohmann::ordered_json to_json(const EpiProbeReport& r) {
  nlohmann::ordered_json j;
  j["description"] = r.description;
  j["tol"] = r.tol;
  j["balls"] = r.balls;
  j["deviations"] = r.deviations;
  j["thresholds"] = r.thresholds;
  j["converges"] = r.converges;
  return j;
}

StrongConvexityReport strong_convexity_report_from_json(const nlohmann::json& j) {
  StrongConvexityReport r;
  r.modulus = extended_from(j.at("modulus"));
  r.point_indicator = j.at("point_indicator").get<bool>();
  r.prox_contraction = j.at("prox_contraction").get<double>();
  if (j.contains("witness_piece")) r.witness_piece = j.at("witness_piece").get<std::size_t>();
  if (j.contains("witness_curvature")) r.witness_curvature = j.at("witness_curvature").get<double>();
  return r;
}

CoercivityReport coercivity_report_from_json(const nlohmann::json& j) {
  CoercivityReport r;
  r.coercive = j.at("coercive").get<bool>();
  r.conjugate_dom_lo = extended_from(j.at("conjugate_domain")[0]);
  r.conjugate_dom_hi = extended_from(j.at("conjugate_domain")[1]);
  r.end_slopes_route = j.at("end_slopes_route").get<bool>();
  r.witness = j.at("witness").get<std::string>();
  return r;
}

MinimizerCertificate minimizer_certificate_from_json(const nlohmann::json& j) {
  MinimizerCertificate c;
  c.z = j.at("z").get<double>();
  c.m = j.at("m").get<int>();
  c.which = j.at("which").get<std::string>() == "U" ? AnnulusKind::U : AnnulusKind::E;
  c.gap = extended_from(j.at("gap"));
  c.member = j.at("member").get<bool>();
  c.scan_scale = j.value("scan_scale", false);
  return c;
}

CertifyMinResult certify_min_result_from_json(const nlohmann::json& j) {
  CertifyMinResult r;
  std::string v = j.at("verdict").get<std::string>();
  if (v == "strong_minimizer")
    r.verdict = CertifyMinResult::Verdict::strong_minimizer;
  else if (v == "refuted")
    r.verdict = CertifyMinResult::Verdict::refuted;
  else if (v == "no_minimizer")
    r.verdict = CertifyMinResult::Verdict::no_minimizer;
  else
    r.verdict = CertifyMinResult::Verdict::not_certified;
  r.depth = j.at("M").get<int>();
  if (j.contains("minimizer")) r.minimizer = j.at("minimizer").get<double>();
  if (j.contains("refutation_witnesses"))
    r.refutation_witnesses = {j.at("refutation_witnesses")[0].get<double>(),
                              j.at("refutation_witnesses")[1].get<double>()};
  for (const auto& cj : j.at("u_certificates")) r.u_stack.push_back(minimizer_certificate_from_json(cj));
  for (const auto& cj : j.at("e_certificates")) r.e_stack.push_back(minimizer_certificate_from_json(cj));
  r.scan_scale = j.at("scan_scale").get<bool>();
  return r;
}

OpennessRadius openness_radius_from_json(const nlohmann::json& j) {
  OpennessRadius r;
  r.z = j.at("z").get<double>();
  r.m = j.at("m").get<int>();
  r.j = j.at("j").get<int>();
  r.gap = extended_from(j.at("gap"));
  r.epsilon = j.at("epsilon").get<double>();
  return r;
}

EpiProbeReport epi_probe_report_from_json(const nlohmann::json& j) {
  EpiProbeReport r;
  r.description = j.at("description").get<std::string>();
  r.tol = j.at("tol").get<double>();
  r.balls = j.at("balls").get<std::vector<int>>();
  r.deviations = j.at("deviations").get<std::vector<std::vector<double>>>();
  r.thresholds = j.at("thresholds").get<std::vector<int>>();
  r.converges = j.at("converges").get<bool>();
  return r;
}

}  // namespace moreau
