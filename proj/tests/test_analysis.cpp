#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "moreau/analysis.hpp"
#include "moreau/catalog.hpp"
#include "support.hpp"

using namespace moreau;
using Catch::Approx;

TEST_CASE("strong convexity report", "[analysis]") {
  StrongConvexityReport r = strong_convexity_report(catalog::half_square());
  CHECK(r.modulus == 1.0);
  CHECK(r.prox_contraction == 0.5);  // 1/(1+sigma)
  CHECK_FALSE(r.point_indicator);

  r = strong_convexity_report(catalog::truncated_quadratic());
  CHECK(r.modulus == 0.0);
  CHECK(r.prox_contraction == 1.0);
  REQUIRE(r.witness_piece.has_value());
  CHECK(*r.witness_piece == 1);  // the flat middle piece

  r = strong_convexity_report(catalog::indicator_point());
  CHECK(r.point_indicator);
  CHECK(r.prox_contraction == 0.0);
  CHECK(r.strongly_convex());

  r = strong_convexity_report(catalog::indicator_box());
  CHECK(r.modulus == 0.0);  // flat on its domain
}

TEST_CASE("prox contraction characterization on random instances", "[analysis]") {
  std::mt19937_64 rng(71);
  for (int t = 0; t < 120; ++t) {
    PlqFunction f = moreau::testing::random_plq(rng);
    StrongConvexityReport r = strong_convexity_report(f);
    if (r.point_indicator) continue;
    CHECK((r.modulus > 0.0) == (r.prox_contraction < 1.0));
    if (r.modulus > 0.0)
      CHECK(r.prox_contraction == Approx(1.0 / (1.0 + r.modulus)).margin(1e-10));
  }
}

TEST_CASE("oracle modulus scan", "[analysis][oracle]") {
  // x^4 has vanishing curvature at its minimizer.
  CHECK(oracle_modulus_scan(catalog::quartic()) <= 1e-6);
  // A genuinely strongly convex oracle keeps a positive scan modulus.
  OracleConvexFunction sq = make_univariate_oracle("sq", [](double x) { return x * x; }, 2.0);
  CHECK(oracle_modulus_scan(sq) == Approx(2.0).margin(1e-6));
}

TEST_CASE("coercivity test", "[analysis]") {
  CHECK(coercivity_test(catalog::truncated_quadratic()).coercive);
  CHECK(coercivity_test(catalog::indicator_box()).coercive);  // bounded domain
  CHECK(coercivity_test(catalog::half_square()).coercive);

  CoercivityReport r = coercivity_test(catalog::abs());
  CHECK_FALSE(r.coercive);
  CHECK(r.conjugate_dom_lo == -1.0);
  CHECK(r.conjugate_dom_hi == 1.0);

  CHECK_FALSE(coercivity_test(catalog::hinge()).coercive);
  CHECK_FALSE(coercivity_test(catalog::zero()).coercive);
}

TEST_CASE("strong convexity implies coercivity on random instances", "[analysis]") {
  std::mt19937_64 rng(81);
  moreau::testing::RandomPlqOptions opt;
  opt.force_strongly_convex = true;
  for (int t = 0; t < 60; ++t) {
    PlqFunction f = moreau::testing::random_plq(rng, opt);
    REQUIRE(strong_convexity_report(f).modulus > 0.0);
    CHECK(coercivity_test(f).coercive);
  }
}

TEST_CASE("annulus gap examples", "[analysis]") {
  // inf of x^2/2 over 1/2 <= |x| <= 2 is 1/8.
  MinimizerCertificate c = annulus_gap(catalog::half_square(), 0.0, 2, AnnulusKind::U);
  CHECK(c.gap == 0.125);
  CHECK(c.member);

  // The constant function has no strong minimizer anywhere.
  c = annulus_gap(catalog::zero(), 0.7, 3, AnnulusKind::U);
  CHECK(c.gap == 0.0);
  CHECK_FALSE(c.member);

  // Flat region of the truncated quadratic.
  c = annulus_gap(catalog::truncated_quadratic(), 0.0, 1, AnnulusKind::U);
  CHECK(c.gap == 0.0);
  CHECK_FALSE(c.member);

  // Point indicator: the annulus misses the domain entirely, gap = +inf.
  c = annulus_gap(catalog::indicator_point(), 0.0, 1, AnnulusKind::U);
  CHECK(c.gap == kInf);
  CHECK(c.member);

  // E variant evaluates the envelope; e_1(q) = x^2/4 gives gap 1/4 at m=1.
  c = annulus_gap(catalog::half_square(), 0.0, 1, AnnulusKind::E);
  CHECK(c.gap == 0.25);

  // z outside dom f is rejected for the U variant.
  CHECK_THROWS_AS(annulus_gap(catalog::indicator_box(), 5.0, 1, AnnulusKind::U), ValidationError);
}

TEST_CASE("annulus equivalence between compact and unrestricted infima", "[analysis]") {
  std::mt19937_64 rng(91);
  for (int t = 0; t < 150; ++t) {
    PlqFunction f = moreau::testing::random_plq(rng);
    PlqMinimum mn = plq_minimum(f);
    double z;
    if (mn.attained && is_finite(mn.arg_lo))
      z = mn.arg_lo;
    else if (is_finite(f.lower()))
      z = f.lower();
    else if (is_finite(f.upper()))
      z = f.upper();
    else
      z = f.breakpoints().empty() ? 0.0 : f.breakpoints().front();
    for (int m : {1, 2, 4, 8}) {
      MinimizerCertificate compact = annulus_gap(f, z, m, AnnulusKind::U);
      MinimizerCertificate full = annulus_gap_unrestricted(f, z, m, AnnulusKind::U);
      CHECK(compact.member == full.member);
      CHECK(full.gap <= compact.gap);
    }
  }
}

TEST_CASE("strong minimizer certificates", "[analysis]") {
  CertifyMinResult r = strong_minimizer_certificate(catalog::half_square(), 6);
  CHECK(r.verdict == CertifyMinResult::Verdict::strong_minimizer);
  CHECK(*r.minimizer == 0.0);
  REQUIRE(r.u_stack.size() == 6);
  REQUIRE(r.e_stack.size() == 6);
  for (const auto& c : r.u_stack) CHECK(c.member);
  for (const auto& c : r.e_stack) CHECK(c.member);
  // Exact annulus infima: gap_m = (1/m)^2/2 for the U stack.
  for (const auto& c : r.u_stack) CHECK(c.gap == Approx(0.5 / (c.m * c.m)).margin(1e-15));

  r = strong_minimizer_certificate(catalog::truncated_quadratic(), 4);
  CHECK(r.verdict == CertifyMinResult::Verdict::refuted);
  REQUIRE(r.refutation_witnesses.has_value());
  CHECK(r.refutation_witnesses->first == -1.0);
  CHECK(r.refutation_witnesses->second == 1.0);

  r = strong_minimizer_certificate(PlqFunction::create({}, {Piece{0, -1, 0}}), 3);
  CHECK(r.verdict == CertifyMinResult::Verdict::no_minimizer);
}

TEST_CASE("unique minimizer equals certificate success on random instances", "[analysis]") {
  std::mt19937_64 rng(101);
  for (int t = 0; t < 80; ++t) {
    PlqFunction f = moreau::testing::random_plq(rng);
    PlqMinimum mn = plq_minimum(f);
    if (!mn.attained) continue;
    CertifyMinResult r = strong_minimizer_certificate(f, 4);
    bool unique = mn.arg_lo == mn.arg_hi;
    if (unique) {
      CHECK(r.verdict == CertifyMinResult::Verdict::strong_minimizer);
    } else {
      CHECK(r.verdict == CertifyMinResult::Verdict::refuted);
    }
  }
}

TEST_CASE("U/E transfer: certificates agree through the envelope", "[analysis]") {
  std::mt19937_64 rng(111);
  moreau::testing::RandomPlqOptions opt;
  opt.force_strongly_convex = true;
  for (int t = 0; t < 40; ++t) {
    PlqFunction f = moreau::testing::random_plq(rng, opt);
    CertifyMinResult rf = strong_minimizer_certificate(f, 4);
    REQUIRE(rf.verdict == CertifyMinResult::Verdict::strong_minimizer);
    // The envelope has the same strong minimizer with positive gaps.
    CertifyMinResult re = strong_minimizer_certificate(envelope_plq(f), 4);
    REQUIRE(re.verdict == CertifyMinResult::Verdict::strong_minimizer);
    CHECK(*re.minimizer == Approx(*rf.minimizer).margin(1e-9));
  }
}

TEST_CASE("oracle certificates", "[analysis][oracle]") {
  CertifyMinResult r = strong_minimizer_certificate_oracle(catalog::quartic(), 6);
  CHECK(r.verdict == CertifyMinResult::Verdict::strong_minimizer);
  CHECK(*r.minimizer == Approx(0.0).margin(1e-4));
  CHECK(r.scan_scale);
  for (const auto& c : r.u_stack) {
    CHECK(c.member);
    CHECK(c.gap == Approx(std::pow(1.0 / c.m, 4)).margin(1e-3 / c.m));
  }

  // The nonconvex counterexample: unique minimizer by scan, but annulus
  // infima leak to the window edge, so no certificate is issued.
  r = strong_minimizer_certificate_oracle(catalog::square_over_quartic(), 8);
  CHECK(r.verdict == CertifyMinResult::Verdict::not_certified);
  CHECK(*r.minimizer == Approx(0.0).margin(1e-4));
  int failures = 0;
  for (const auto& c : r.u_stack)
    if (!c.member) ++failures;
  CHECK(failures == 8);
}

TEST_CASE("em openness radius", "[analysis]") {
  // Worked example: q at z=0, m=1: gap = 1/4, j = 1, eps = 0.99/18.
  MinimizerCertificate cert = annulus_gap(catalog::half_square(), 0.0, 1, AnnulusKind::E);
  REQUIRE(cert.gap == 0.25);
  OpennessRadius r = em_openness_radius(catalog::half_square(), cert);
  CHECK(r.j == 1);
  CHECK(r.epsilon == Approx(0.99 / 18.0).margin(1e-15));
  CHECK(r.epsilon < std::ldexp(1.0, -r.j));

  // Non-positive gaps are rejected.
  MinimizerCertificate flat = annulus_gap(catalog::truncated_quadratic(), 0.0, 1, AnnulusKind::E);
  CHECK_THROWS_AS(em_openness_radius(catalog::truncated_quadratic(), flat), ValidationError);

  // U certificates are rejected.
  MinimizerCertificate u = annulus_gap(catalog::half_square(), 0.0, 1, AnnulusKind::U);
  CHECK_THROWS_AS(em_openness_radius(catalog::half_square(), u), ValidationError);

  // epsilon < 2^-j holds for random certified instances.
  std::mt19937_64 rng(121);
  moreau::testing::RandomPlqOptions opt;
  opt.force_strongly_convex = true;
  for (int t = 0; t < 30; ++t) {
    PlqFunction f = moreau::testing::random_plq(rng, opt);
    double z = plq_minimum(f).arg_lo;
    for (int m : {1, 2, 3}) {
      MinimizerCertificate c = annulus_gap(f, z, m, AnnulusKind::E);
      REQUIRE(c.gap > 0.0);
      OpennessRadius rad = em_openness_radius(f, c);
      CHECK(rad.epsilon > 0.0);
      CHECK(rad.epsilon < std::ldexp(1.0, -rad.j));
      CHECK(rad.j >= std::abs(z) + m);
    }
  }
}

TEST_CASE("epi convergence probe", "[analysis]") {
  PlqFunction target = catalog::half_square();
  std::vector<PlqFunction> members;
  std::vector<int> ks = {1, 2, 5, 10, 100, 1000};
  for (int k : ks) members.push_back(target + 1.0 / k);

  EpiProbeReport rep = epi_convergence_probe(members, target, {1, 2, 5}, 1e-3, "f + 1/k");
  CHECK(rep.converges);
  // Deviations are exactly 1/k on every ball.
  for (std::size_t k = 0; k < ks.size(); ++k)
    for (std::size_t b = 0; b < rep.balls.size(); ++b)
      CHECK(rep.deviations[k][b] == 1.0 / ks[k]);
  for (int th : rep.thresholds) CHECK(ks[th] == 1000);

  // A sequence that stays away does not converge.
  std::vector<PlqFunction> far(3, target + 1.0);
  CHECK_FALSE(epi_convergence_probe(far, target, {1}, 1e-3).converges);

  // The constant family converges with zero deviations.
  std::vector<PlqFunction> constant(4, target);
  rep = epi_convergence_probe(constant, target, {1, 3}, 1e-12);
  CHECK(rep.converges);
  for (const auto& row : rep.deviations)
    for (double d : row) CHECK(d == 0.0);
}

TEST_CASE("shrinking indicator family converges to the shifted distance", "[analysis]") {
  const double c = 0.25, xbar = 0.0;
  PlqFunction target = PlqFunction::indicator(xbar, xbar, c);
  std::vector<int> ks = {1, 2, 5, 10, 20, 50, 100, 200, 500, 1000, 2000, 5000};
  std::vector<PlqFunction> members;
  for (int k : ks) members.push_back(PlqFunction::indicator(xbar - 1.0 / k, xbar + 1.0 / k, c));

  EpiProbeReport rep = epi_convergence_probe(members, target, {1, 2}, 1e-3, "shrinking boxes");
  CHECK(rep.converges);
  // Closed form: deviation on ball i is i/k - 1/(2k^2).
  for (std::size_t k = 0; k < ks.size(); ++k)
    for (std::size_t b = 0; b < rep.balls.size(); ++b) {
      double i = rep.balls[b], kk = ks[k];
      CHECK(rep.deviations[k][b] == Approx(i / kk - 0.5 / (kk * kk)).margin(1e-12));
    }
  CHECK(ks[rep.thresholds[0]] <= 1000);  // ball 1 settles by k = 1000 at tol 1e-3
  CHECK(ks[rep.thresholds[1]] <= 2000);
}

TEST_CASE("modulus transfers to the envelope as sigma/(1+sigma)", "[analysis]") {
  auto [f1, e1] = relate_modulus_envelope(catalog::half_square());
  CHECK(f1.modulus == 1.0);
  CHECK(e1.modulus == 0.5);

  auto [f3, e3] = relate_modulus_envelope(catalog::triple_half_square());
  CHECK(f3.modulus == 3.0);
  CHECK(e3.modulus == 0.75);

  auto [ft, et] = relate_modulus_envelope(catalog::truncated_quadratic());
  CHECK(ft.modulus == 0.0);
  CHECK(et.modulus == 0.0);

  std::mt19937_64 rng(131);
  for (int t = 0; t < 60; ++t) {
    PlqFunction f = moreau::testing::random_plq(rng);
    auto [rf, re] = relate_modulus_envelope(f);
    if (rf.point_indicator) {
      CHECK(re.modulus == 1.0);  // envelope of a point indicator is q shifted
      continue;
    }
    CHECK(re.modulus == Approx(rf.modulus / (1.0 + rf.modulus)).margin(1e-10));
    CHECK((rf.modulus == 0.0) == (re.modulus == 0.0));
  }
}

TEST_CASE("midpoint convexity spot checks", "[analysis][oracle]") {
  CHECK(spot_check_convexity(catalog::quartic(), 5).ok);
  MidpointCheckResult bad = spot_check_convexity(catalog::square_over_quartic(), 5);
  CHECK_FALSE(bad.ok);
  CHECK(bad.violation > 0.0);
}

TEST_CASE("analysis json serializers", "[analysis][json]") {
  auto j = to_json(strong_convexity_report(catalog::indicator_point()));
  CHECK(j["modulus"] == "inf");
  CHECK(j["point_indicator"] == true);

  j = to_json(annulus_gap(catalog::indicator_point(), 0.0, 1, AnnulusKind::U));
  CHECK(j["gap"] == "inf");
  CHECK(j["which"] == "U");

  j = to_json(strong_minimizer_certificate(catalog::truncated_quadratic(), 2));
  CHECK(j["verdict"] == "refuted");

  j = to_json(coercivity_test(catalog::abs()));
  CHECK(j["coercive"] == false);
}
