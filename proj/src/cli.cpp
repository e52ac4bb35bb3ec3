#include "moreau/cli.hpp"

#include <charconv>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "moreau/analysis.hpp"
#include "moreau/catalog.hpp"
#include "moreau/strongify.hpp"

namespace moreau {
namespace cli {

namespace {

using nlohmann::ordered_json;

ordered_json extended(double v) {
  if (v == kInf) return "inf";
  if (v == -kInf) return "-inf";
  return ordered_json(v);
}

ordered_json params_echo(const CommandRequest& r) {
  ordered_json p;
  p["accuracy"] = r.accuracy;
  p["eps"] = r.eps;
  p["m"] = r.m;
  p["M"] = r.depth;
  p["grid"] = {{"min", r.grid.min}, {"max", r.grid.max}, {"step", r.grid.step}};
  p["tol"] = r.tol;
  p["format"] = r.format;
  return p;
}

std::vector<int> parse_balls(const std::string& s) {
  std::vector<int> balls;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    if (tok.empty()) continue;
    balls.push_back(std::stoi(tok));
  }
  if (balls.empty()) throw ValidationError("empty ball list");
  return balls;
}

std::vector<double> make_grid(const GridSpec& g) {
  if (!(g.step > 0.0) || !(g.max > g.min))
    throw ValidationError("grid must satisfy min < max and step > 0");
  int n = static_cast<int>(std::floor((g.max - g.min) / g.step + 0.5)) + 1;
  if (n < 2) throw ValidationError("grid is degenerate (fewer than 2 points)");
  std::vector<double> xs(n);
  for (int i = 0; i < n; ++i) xs[i] = g.min + i * g.step;
  return xs;
}

const PlqFunction& require_plq(const FunctionHandle& h, const char* op) {
  if (!h.is_plq())
    throw ValidationError(std::string(op) + ": requires an exact (PLQ) function, not an oracle");
  return h.plq();
}

// Piece table rows: piece_index, interval, a, c, d.
std::string plq_csv(const PlqFunction& f, const ordered_json& params) {
  std::ostringstream os;
  os << "# params: " << params.dump() << "\n";
  os << "piece_index,interval_lo,interval_hi,a,c,d\n";
  const auto& ps = f.pieces();
  const auto& bps = f.breakpoints();
  for (std::size_t j = 0; j < ps.size(); ++j) {
    double lo = std::max(j == 0 ? -kInf : bps[j - 1], f.lower());
    double hi = std::min(j + 1 == ps.size() ? kInf : bps[j], f.upper());
    os << j << ',' << fmt_double(lo) << ',' << fmt_double(hi) << ',' << fmt_double(ps[j].a) << ','
       << fmt_double(ps[j].c) << ',' << fmt_double(ps[j].d) << "\n";
  }
  return os.str();
}

std::string map_csv(const MonotonePiecewiseLinearMap& m, const ordered_json& params) {
  std::ostringstream os;
  os << "# params: " << params.dump() << "\n";
  os << "segment_index,interval_lo,interval_hi,slope,intercept\n";
  const auto& segs = m.segments();
  const auto& bps = m.breakpoints();
  for (std::size_t j = 0; j < segs.size(); ++j) {
    double lo = j == 0 ? -kInf : bps[j - 1];
    double hi = j + 1 == segs.size() ? kInf : bps[j];
    os << j << ',' << fmt_double(lo) << ',' << fmt_double(hi) << ',' << fmt_double(segs[j].slope)
       << ',' << fmt_double(segs[j].intercept) << "\n";
  }
  return os.str();
}

std::string wrap_json(const CommandRequest& r, ordered_json body) {
  ordered_json j;
  j["subcommand"] = r.subcommand;
  j["params"] = params_echo(r);
  j["result"] = std::move(body);
  return j.dump() + "\n";
}

RunResult dispatch(const CommandRequest& r);

}  // namespace

std::string fmt_double(double v) {
  if (v == kInf) return "inf";
  if (v == -kInf) return "-inf";
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

FunctionHandle parse_function_spec(const std::string& spec) {
  if (spec.empty()) throw ValidationError("empty function spec");
  if (spec[0] == '@' || spec[0] == '{') {
    nlohmann::json j;
    if (spec[0] == '@') {
      std::ifstream in(spec.substr(1));
      if (!in) throw ValidationError("cannot open function file '" + spec.substr(1) + "'");
      in >> j;
    } else {
      j = nlohmann::json::parse(spec, nullptr, /*allow_exceptions=*/true);
    }
    PlqFunction f = plq_from_json(j);
    ConvexityReport conv = check_convexity(f);
    if (!conv.ok) throw ValidationError("function spec is not convex: " + conv.reason);
    return FunctionHandle(std::move(f));
  }
  if (auto f = catalog::find_plq(spec)) return FunctionHandle(std::move(*f));
  if (auto o = catalog::find_oracle(spec)) return FunctionHandle(std::move(*o));
  throw ValidationError("unknown catalog function '" + spec + "'");
}

namespace {

FunctionHandle arg(const CommandRequest& r, std::size_t k) {
  if (k >= r.function_specs.size())
    throw ValidationError("subcommand '" + r.subcommand + "' needs more function arguments");
  return parse_function_spec(r.function_specs[k]);
}

RunResult ok_json(const CommandRequest& r, ordered_json body) {
  return {kOk, wrap_json(r, std::move(body)), {}};
}

RunResult cmd_eval(const CommandRequest& r) {
  FunctionHandle f = arg(r, 0);
  if (!r.has_x) throw ValidationError("eval: --x is required");
  double v = f.is_plq() ? f.plq()(r.x) : f.oracle()(r.x);
  ordered_json body;
  body["x"] = r.x;
  body["value"] = extended(v);
  return ok_json(r, std::move(body));
}

RunResult cmd_prox(const CommandRequest& r) {
  FunctionHandle f = arg(r, 0);
  if (f.is_plq()) {
    MonotonePiecewiseLinearMap P = prox_plq(f.plq());
    if (r.format == "csv") return {kOk, map_csv(P, params_echo(r)), {}};
    ordered_json body;
    body["prox"] = to_json(P);
    if (r.has_x) body["value"] = P(r.x);
    return ok_json(r, std::move(body));
  }
  if (!r.has_x) throw ValidationError("prox: --x is required for oracle functions");
  ProxSolveReport rep = prox_oracle(f.oracle(), r.x, r.accuracy);
  ordered_json body;
  body["report"] = to_json(rep);
  if (!rep.converged) return {kBudget, wrap_json(r, std::move(body)), {}};
  return ok_json(r, std::move(body));
}

RunResult cmd_envelope(const CommandRequest& r) {
  FunctionHandle f = arg(r, 0);
  if (f.is_plq()) {
    PlqFunction env = envelope_plq(f.plq());
    if (r.format == "csv") return {kOk, plq_csv(env, params_echo(r)), {}};
    ordered_json body;
    body["envelope"] = to_json(env);
    if (r.has_x) body["value"] = env(r.x);
    return ok_json(r, std::move(body));
  }
  if (!r.has_x) throw ValidationError("envelope: --x is required for oracle functions");
  ProxSolveReport rep = prox_oracle(f.oracle(), r.x, r.accuracy);
  ordered_json body;
  body["report"] = to_json(rep);
  return {rep.converged ? kOk : kBudget, wrap_json(r, std::move(body)), {}};
}

RunResult cmd_conjugate(const CommandRequest& r) {
  FunctionHandle h = arg(r, 0);
  const PlqFunction& f = require_plq(h, "conjugate");
  PlqFunction star = conjugate(f);
  if (r.format == "csv") return {kOk, plq_csv(star, params_echo(r)), {}};
  ordered_json body;
  body["conjugate"] = to_json(star);
  return ok_json(r, std::move(body));
}

RunResult cmd_distance(const CommandRequest& r) {
  FunctionHandle f = arg(r, 0);
  FunctionHandle g = arg(r, 1);
  DistanceOptions opts;
  opts.accuracy = r.accuracy;
  MetricEstimate est = aw_distance(f, g, opts);
  ordered_json body = to_json(est);
  return ok_json(r, std::move(body));
}

RunResult cmd_strongify(const CommandRequest& r) {
  FunctionHandle h = arg(r, 0);
  const PlqFunction& f = require_plq(h, "strongify");
  StrongifyPlan plan = strongify(f, r.eps);
  return ok_json(r, to_json(plan));
}

RunResult cmd_certify_min(const CommandRequest& r) {
  FunctionHandle f = arg(r, 0);
  CertifyMinResult res = f.is_plq() ? strong_minimizer_certificate(f.plq(), r.depth)
                                    : strong_minimizer_certificate_oracle(f.oracle(), r.depth);
  return ok_json(r, to_json(res));
}

RunResult cmd_certify_strong_convexity(const CommandRequest& r) {
  FunctionHandle f = arg(r, 0);
  ordered_json body;
  if (f.is_plq()) {
    body = to_json(strong_convexity_report(f.plq()));
  } else {
    body["modulus_scan"] = oracle_modulus_scan(f.oracle());
    body["scan_scale"] = true;
  }
  return ok_json(r, std::move(body));
}

RunResult cmd_coercive(const CommandRequest& r) {
  FunctionHandle h = arg(r, 0);
  const PlqFunction& f = require_plq(h, "coercive");
  return ok_json(r, to_json(coercivity_test(f)));
}

RunResult cmd_epi_probe(const CommandRequest& r) {
  std::vector<PlqFunction> members;
  PlqFunction target = catalog::zero();
  std::string description;
  if (r.family == "shifted_half_square") {
    target = catalog::half_square();
    for (int k = 1; k <= r.count; ++k) members.push_back(target + 1.0 / k);
    description = "half_square + 1/k";
  } else if (r.family == "shrinking_indicator") {
    target = PlqFunction::indicator(r.center, r.center, r.shift_const);
    for (int k = 1; k <= r.count; ++k)
      members.push_back(
          PlqFunction::indicator(r.center - 1.0 / k, r.center + 1.0 / k, r.shift_const));
    description = "indicator of shrinking balls";
  } else if (!r.function_specs.empty() && r.function_specs[0][0] == '@') {
    std::ifstream in(r.function_specs[0].substr(1));
    if (!in) throw ValidationError("cannot open family file");
    nlohmann::json j;
    in >> j;
    target = plq_from_json(j.at("target"));
    for (const auto& mj : j.at("members")) members.push_back(plq_from_json(mj));
    description = "family from file";
  } else {
    throw ValidationError(
        "epi-probe: pass --family shifted_half_square|shrinking_indicator or @family.json");
  }
  EpiProbeReport rep =
      epi_convergence_probe(members, target, parse_balls(r.balls), r.tol, description);
  return ok_json(r, to_json(rep));
}

RunResult cmd_plot(const CommandRequest& r) {
  FunctionHandle f = arg(r, 0);
  std::vector<double> xs = make_grid(r.grid);
  std::vector<double> fv(xs.size()), ev(xs.size()), pv(xs.size());
  if (f.is_plq()) {
    const PlqFunction& plq = f.plq();
    PlqFunction env = envelope_plq(plq);
    MonotonePiecewiseLinearMap P = prox_plq(plq);
    for (std::size_t i = 0; i < xs.size(); ++i) {
      fv[i] = plq(xs[i]);
      ev[i] = env(xs[i]);
      pv[i] = P(xs[i]);
    }
  } else {
    const OracleConvexFunction& o = f.oracle();
    for (std::size_t i = 0; i < xs.size(); ++i) {
      fv[i] = o(xs[i]);
      ProxSolveReport rep = prox_oracle(o, xs[i], 1e-8);
      if (!rep.converged) throw BudgetExhausted("plot: prox solve did not converge");
      ev[i] = rep.envelope_value;
      pv[i] = rep.minimizer;
    }
  }
  if (r.format == "csv") {
    std::ostringstream os;
    os << "# params: " << params_echo(r).dump() << "\n";
    os << "x,f,envelope,prox\n";
    for (std::size_t i = 0; i < xs.size(); ++i)
      os << fmt_double(xs[i]) << ',' << fmt_double(fv[i]) << ',' << fmt_double(ev[i]) << ','
         << fmt_double(pv[i]) << "\n";
    return {kOk, os.str(), {}};
  }
  auto series = [&](const char* label, const std::vector<double>& ys, const char* provenance) {
    ordered_json s;
    s["label"] = label;
    s["x"] = xs;
    auto arr = ordered_json::array();
    for (double y : ys) arr.push_back(extended(y));
    s["y"] = arr;
    s["provenance"] = provenance;
    return s;
  };
  ordered_json body;
  body["series"] = {series("f", fv, "evaluate"), series("envelope", ev, "envelope"),
                    series("prox", pv, "prox")};
  return ok_json(r, std::move(body));
}

RunResult dispatch(const CommandRequest& r) {
  if (r.subcommand == "eval") return cmd_eval(r);
  if (r.subcommand == "prox") return cmd_prox(r);
  if (r.subcommand == "envelope") return cmd_envelope(r);
  if (r.subcommand == "conjugate") return cmd_conjugate(r);
  if (r.subcommand == "distance") return cmd_distance(r);
  if (r.subcommand == "strongify") return cmd_strongify(r);
  if (r.subcommand == "certify-min") return cmd_certify_min(r);
  if (r.subcommand == "certify-strong-convexity") return cmd_certify_strong_convexity(r);
  if (r.subcommand == "coercive") return cmd_coercive(r);
  if (r.subcommand == "epi-probe") return cmd_epi_probe(r);
  if (r.subcommand == "plot") return cmd_plot(r);
  RunResult res;
  res.status = kUsage;
  res.error_line = ordered_json{{"error", "unknown subcommand '" + r.subcommand + "'"},
                                {"code", kUsage}}
                       .dump();
  return res;
}

}  // namespace

RunResult run(const CommandRequest& request) {
  try {
    return dispatch(request);
  } catch (const ValidationError& e) {
    return {kValidation, {}, ordered_json{{"error", e.what()}, {"code", kValidation}}.dump()};
  } catch (const BudgetExhausted& e) {
    return {kBudget, {}, ordered_json{{"error", e.what()}, {"code", kBudget}}.dump()};
  } catch (const VerificationFailure& e) {
    return {kVerification, {}, ordered_json{{"error", e.what()}, {"code", kVerification}}.dump()};
  } catch (const std::exception& e) {
    return {kValidation, {}, ordered_json{{"error", e.what()}, {"code", kValidation}}.dump()};
  }
}

int main_entry(int argc, const char* const* argv) {
  CLI::App app{"Moreau-envelope convex analysis toolkit"};
  app.require_subcommand(0, 1);

  CommandRequest req;
  std::vector<std::string> names = {"eval",      "prox",        "envelope", "conjugate",
                                    "distance",  "strongify",   "certify-min",
                                    "certify-strong-convexity", "coercive", "epi-probe",
                                    "plot"};
  for (const std::string& name : names) {
    CLI::App* sub = app.add_subcommand(name);
    sub->add_option("specs", req.function_specs,
                    "function specs: catalog:NAME | paper.NAME | @file.json | inline JSON");
    sub->add_option("--accuracy", req.accuracy);
    sub->add_option("--eps", req.eps);
    sub->add_option("--m", req.m);
    sub->add_option("--M", req.depth);
    sub->add_option("--x", req.x)->each([&](const std::string&) { req.has_x = true; });
    sub->add_option("--grid-min", req.grid.min);
    sub->add_option("--grid-max", req.grid.max);
    sub->add_option("--grid-step", req.grid.step);
    sub->add_option("--family", req.family);
    sub->add_option("--count", req.count);
    sub->add_option("--const", req.shift_const);
    sub->add_option("--center", req.center);
    sub->add_option("--balls", req.balls);
    sub->add_option("--tol", req.tol);
    sub->add_option("--format", req.format)->check(CLI::IsMember({"json", "csv"}));
    sub->add_option("--out", req.out);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    std::cerr << nlohmann::ordered_json{{"error", e.what()}, {"code", kUsage}}.dump() << "\n";
    return kUsage;
  }

  std::vector<CLI::App*> chosen = app.get_subcommands();
  if (chosen.empty()) {
    std::cerr << nlohmann::ordered_json{{"error", "a subcommand is required"}, {"code", kUsage}}
                     .dump()
              << "\n";
    return kUsage;
  }
  req.subcommand = chosen.front()->get_name();

  RunResult res = run(req);
  if (!res.error_line.empty()) std::cerr << res.error_line << "\n";
  if (!res.payload.empty()) {
    if (req.out.empty()) {
      std::cout << res.payload;
    } else {
      std::ofstream out(req.out);
      if (!out) {
        std::cerr << nlohmann::ordered_json{{"error", "cannot open output file"},
                                            {"code", kValidation}}
                         .dump()
                  << "\n";
        return kValidation;
      }
      out << res.payload;
    }
  }
  return res.status;
}

}  // namespace cli
}  // namespace moreau
