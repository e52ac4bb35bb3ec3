#pragma once

#include <json.hpp>

#include "moreau/oracle.hpp"
#include "moreau/plq.hpp"
#include "moreau/pwl_map.hpp"

namespace moreau {

// Everything here is at envelope parameter lambda = 1; the parameter is not
// a runtime knob.

/// Exact proximal mapping Prox_f of a convex PLQ function: the resolvent
/// (Id + df)^-1, a continuous nondecreasing map with slopes in [0, 1].
MonotonePiecewiseLinearMap prox_plq(const PlqFunction& f);

/// Exact Moreau envelope e_1 f as a full-domain PLQ function with
/// e_1 f(x) = f(Prox(x)) + (Prox(x) - x)^2 / 2.
PlqFunction envelope_plq(const PlqFunction& f);

/// Gradient identity: returns x - Prox_f(x).
double envelope_gradient(const PlqFunction& f, double x);

/// e_1 f(x) + e_1 f*(x) - x^2/2; zero up to piece-arithmetic rounding.
double moreau_decomposition_residual(const PlqFunction& f, double x);

/// Reconstructs g with prox_plq(g) == P from a nondecreasing continuous
/// nonexpansive map, normalized so that g(P(0)) = 0.  Flat segments of P
/// become kinks or domain endpoints of g; slope-1 segments become affine
/// pieces.
PlqFunction prox_inverse(const MonotonePiecewiseLinearMap& P);

/// The function p with Prox_p = l*Prox_f1 + (1-l)*Prox_f2 and
/// e_1 p = l*e_1 f1 + (1-l)*e_1 f2.
PlqFunction proximal_average(const PlqFunction& f1, const PlqFunction& f2, double lambda);

struct ProxSolveReport {
  double query = 0.0;
  double minimizer = 0.0;
  double envelope_value = kInf;
  int iterations = 0;
  double residual = kInf;        // certified |minimizer - true prox| bound
  double value_residual = kInf;  // certified envelope-value error bound
  bool converged = false;
};

/// Numeric prox for the oracle tier (univariate).  The subproblem
/// f(y) + (y-x)^2/2 is 1-strongly convex; derivative-free bracketing
/// shrinks an interval known to contain the solution, and the final
/// interval width is the certified residual.  Throws BudgetExhausted with
/// the best iterate attached to the message when the budget runs out.
ProxSolveReport prox_oracle(const OracleConvexFunction& f, double x, double tol,
                            int max_iterations = 400);

nlohmann::ordered_json to_json(const ProxSolveReport& r);
ProxSolveReport prox_solve_report_from_json(const nlohmann::json& j);

}  // namespace moreau
