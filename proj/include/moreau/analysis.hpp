#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "moreau/aw_metric.hpp"
#include "moreau/envelope.hpp"

namespace moreau {

struct StrongConvexityReport {
  double modulus = 0.0;          // +inf for point indicators
  bool point_indicator = false;  // domain is a single point (Prox = const, k = 0)
  double prox_contraction = 1.0;  // k = max prox slope; k = 1/(1+modulus) when modulus > 0
  // Witness when modulus == 0: the flat or least-curved piece.
  std::optional<std::size_t> witness_piece;
  std::optional<double> witness_curvature;

  bool strongly_convex() const { return point_indicator || modulus > 0.0; }
};

/// Largest sigma with f - (sigma/2)|.|^2 convex, paired with the prox
/// contraction characterization.  On the PLQ tier they agree exactly:
/// sigma = 2 min a_j and k = 1/(1+sigma).
StrongConvexityReport strong_convexity_report(const PlqFunction& f);

/// Scan-scale modulus estimate for an oracle function: the smallest sampled
/// second-difference quotient near the scan minimizer (clamped at zero).
double oracle_modulus_scan(const OracleConvexFunction& f, unsigned seed = 7, int samples = 4000);

struct CoercivityReport {
  bool coercive = false;
  // Route 1: dom f* = R.
  double conjugate_dom_lo = 0.0, conjugate_dom_hi = 0.0;
  // Route 2: end-slope analysis (bounded domain or unbounded end slopes).
  bool end_slopes_route = false;
  std::string witness;
};

/// Fenchel route and end-slope route; both must agree.
CoercivityReport coercivity_test(const PlqFunction& f);

enum class AnnulusKind { U, E };

struct MinimizerCertificate {
  double z = 0.0;
  int m = 1;
  AnnulusKind which = AnnulusKind::U;
  double gap = 0.0;  // inf over the annulus minus phi(z); may be +inf
  bool member = false;
  bool scan_scale = false;  // true when produced from an oracle scan
};

/// Exact gap inf over {1/m <= |x-z| <= m} of phi minus phi(z), with phi = f
/// for the U variant and phi = e_1 f for E.
MinimizerCertificate annulus_gap(const PlqFunction& f, double z, int m, AnnulusKind which);

/// Unrestricted variant: inf over {|x-z| >= 1/m}; for convex f positivity
/// agrees with the compact annulus gap.
MinimizerCertificate annulus_gap_unrestricted(const PlqFunction& f, double z, int m,
                                              AnnulusKind which);

struct CertifyMinResult {
  // not_certified: unique minimizer seen, but some annulus certificate failed
  // (only reachable at scan scale, where nothing rules out escape to infinity).
  enum class Verdict { strong_minimizer, refuted, no_minimizer, not_certified };
  Verdict verdict = Verdict::no_minimizer;
  std::optional<double> minimizer;
  std::optional<std::pair<double, double>> refutation_witnesses;
  int depth = 0;  // certificates run for m = 1..depth
  std::vector<MinimizerCertificate> u_stack;
  std::vector<MinimizerCertificate> e_stack;
  bool scan_scale = false;
};

/// Exact argmin of f: a singleton yields positive-gap U and E certificates
/// for m = 1..M at the minimizer; a nondegenerate argmin interval yields a
/// refutation by two distinct minimizers.
CertifyMinResult strong_minimizer_certificate(const PlqFunction& f, int M);

/// Scan-scale analogue for oracle functions.  A certificate is refused when
/// the annulus infimum leaks to the edge of the scan window with values
/// still falling, the signature of minimizing sequences escaping to
/// infinity.
CertifyMinResult strong_minimizer_certificate_oracle(const OracleConvexFunction& f, int M,
                                                     double gap_floor = 0.0);

struct OpennessRadius {
  double z = 0.0;
  int m = 1;
  int j = 1;       // smallest integer >= |z| + m
  double gap = 0.0;
  double epsilon = 0.0;  // 0.99 * gap / (2^j (2 + gap)); always < 2^-j
};

/// Radius from the E_m openness bound: any g with d(f,g) < epsilon keeps a
/// positive E_m gap at the same z.
OpennessRadius em_openness_radius(const PlqFunction& f, const MinimizerCertificate& cert);

struct EpiProbeReport {
  std::string description;
  double tol = 0.0;
  std::vector<int> balls;
  // deviations[k][b] = sup on ball balls[b] of |e_1 f_k - e_1 target|.
  std::vector<std::vector<double>> deviations;
  // Per ball: smallest member index k0 (0-based) with deviations at or below
  // tol from k0 to the end of the family; -1 if the family never settles.
  std::vector<int> thresholds;
  bool converges = false;
};

EpiProbeReport epi_convergence_probe(const std::vector<PlqFunction>& members,
                                     const PlqFunction& target, const std::vector<int>& balls,
                                     double tol, std::string description = {});

/// (sigma_f, sigma_{e_1 f}); on the PLQ tier the envelope modulus equals
/// sigma_f / (1 + sigma_f).
std::pair<StrongConvexityReport, StrongConvexityReport> relate_modulus_envelope(
    const PlqFunction& f);

nlohmann::ordered_json to_json(const StrongConvexityReport& r);
nlohmann::ordered_json to_json(const CoercivityReport& r);
nlohmann::ordered_json to_json(const MinimizerCertificate& c);
nlohmann::ordered_json to_json(const CertifyMinResult& r);
nlohmann::ordered_json to_json(const OpennessRadius& r);
nlohmann::ordered_json to_json(const EpiProbeReport& r);

StrongConvexityReport strong_convexity_report_from_json(const nlohmann::json& j);
CoercivityReport coercivity_report_from_json(const nlohmann::json& j);
MinimizerCertificate minimizer_certificate_from_json(const nlohmann::json& j);
CertifyMinResult certify_min_result_from_json(const nlohmann::json& j);
OpennessRadius openness_radius_from_json(const nlohmann::json& j);
EpiProbeReport epi_probe_report_from_json(const nlohmann::json& j);

}  // namespace moreau
