#include "sigma2x/chain.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <functional>
#include <limits>
#include <map>
#include <numbers>
#include <optional>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "sigma2x/catalog.hpp"
#include "sigma2x/constants.hpp"
#include "sigma2x/cubature.hpp"
#include "sigma2x/probe.hpp"
#include "sigma2x/quad1d.hpp"

namespace sigma2x::chain {
namespace {

constexpr double kPi = std::numbers::pi;

std::string fmt17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

// --- cached integral evaluation -------------------------------------------

struct Quadrature {
  double value = 0.0;
  double err = 0.0;
  long n_evals = 0;
  std::string strategy;
  bool converged = true;
};

struct Ctx {
  EngineConfig cfg;
  double eng_scale = 1.0;  // halved for the discrepancy re-run
  std::map<std::string, Quadrature>* cache = nullptr;
};

std::string cache_key(const std::string& id, const std::string& strategy,
                      double tol, std::optional<double> param) {
  char buf[96];
  std::snprintf(buf, sizeof(buf), "|%s|%.6e|%.17g", strategy.c_str(), tol,
                param.value_or(0.0));
  return id + buf;
}

// Integrates a catalog entry with the requested strategy at the (already
// scaled) engine tolerance.  Values are bare: printed prefactors are applied
// by the callers that quote them.
Quadrature quad_entry(Ctx& ctx, const std::string& id,
                      const std::string& strategy, double tol,
                      std::optional<double> param = std::nullopt) {
  const std::string key = cache_key(id, strategy, tol, param);
  if (auto it = ctx.cache->find(key); it != ctx.cache->end())
    return it->second;

  const cat::Entry& e = cat::entry(id);
  const double pv = param.value_or(0.0);
  Quadrature out;
  out.strategy = strategy;
  if (e.dimension == 1) {
    std::vector<double> pt(1);
    quad::Fn fn = [&e, pv, &pt](double x) {
      pt[0] = x;
      return e.eval(pt, pv);
    };
    quad::Interval1D iv = e.domain[0];
    if (strategy == "ts")
      iv.transform = quad::Interval1D::Transform::tanh_sinh;
    const quad::QuadResult r =
        quad::integrate_adaptive(fn, iv, tol, tol, quad::Budget{});
    out.value = r.value;
    out.err = r.error_estimate;
    out.n_evals = r.n_evals;
    out.converged = r.status == quad::Status::converged;
  } else {
    cube::NdFn fn = [&e, pv](const std::vector<double>& x) {
      return e.eval(x, pv);
    };
    cube::Options opt;
    opt.rel_tol = tol;
    opt.max_evals = ctx.cfg.max_evals;
    opt.threads = ctx.cfg.threads;
    const cube::CubatureResult r =
        strategy == "iterated" ? cube::integrate_iterated(fn, e.domain, opt)
                               : cube::integrate_genz_malik(fn, e.domain, opt);
    out.value = r.value;
    out.err = r.error_estimate;
    out.n_evals = r.n_evals;
    out.converged = r.status == quad::Status::converged;
  }
  ctx.cache->emplace(key, out);
  return out;
}

// Prefactored variant: multiplies in the entry's printed prefactor unless it
// is already baked into the evaluator.
Quadrature quad_prefactored(Ctx& ctx, const std::string& id,
                            const std::string& strategy, double tol,
                            std::optional<double> param = std::nullopt) {
  Quadrature q = quad_entry(ctx, id, strategy, tol, param);
  const cat::Entry& e = cat::entry(id);
  if (!e.prefactor_baked) {
    q.value *= e.printed_prefactor;
    q.err *= std::abs(e.printed_prefactor);
  }
  return q;
}

Quadrature quad_direct(const quad::Fn& fn, const quad::Interval1D& iv,
                       double tol) {
  const quad::QuadResult r =
      quad::integrate_adaptive(fn, iv, tol, tol, quad::Budget{});
  Quadrature out;
  out.value = r.value;
  out.err = r.error_estimate;
  out.n_evals = r.n_evals;
  out.strategy = "gk";
  out.converged = r.status == quad::Status::converged;
  return out;
}

// --- step table ------------------------------------------------------------

struct StepResult {
  double computed = 0.0;
  double computed_err = 0.0;
  long n_evals = 0;
  std::string strategy = "constant";
  double expected = 0.0;
  std::string expression;
  std::string note;
  bool converged = true;
  // Per-case deviations beyond the headline pair (multi-a steps); the step's
  // reported deviation is the max over these after applying the best factor.
  std::vector<std::pair<double, double>> extra_pairs;  // (computed, expected)
};

struct StepSpec {
  std::string id;
  std::string anchor;
  double tol;           // acceptance tolerance (relative)
  bool constant_level;  // no quadrature: re-run is trivially identical
  std::function<StepResult(Ctx&)> run;
};

double closed(constants::FormId f) { return constants::eval_closed_form(f); }

const std::vector<StepSpec>& step_table() {
  static const std::vector<StepSpec> table = [] {
    using constants::FormId;
    using constants::Name;
    std::vector<StepSpec> t;
    const double G = constants::get(Name::CATALAN);
    const double z3 = constants::get(Name::ZETA3);
    const double ln2 = constants::get(Name::LN2);

    t.push_back({"S_23a", "denotes Catalan's constant", 1e-12, false,
                 [G](Ctx& c) {
                   StepResult r;
                   const Quadrature q = quad_entry(
                       c, "E23_A", "gk", 1e-13 * c.cfg.scale_1d * c.eng_scale);
                   r.computed = q.value;
                   r.computed_err = q.err;
                   r.n_evals = q.n_evals;
                   r.strategy = q.strategy;
                   r.converged = q.converged;
                   r.expected = 2.0 * G;
                   r.expression = "2*G";
                   return r;
                 }});
    t.push_back({"S_23b", "denotes Catalan's constant", 1e-12, false,
                 [G, z3](Ctx& c) {
                   StepResult r;
                   const Quadrature q = quad_entry(
                       c, "E23_B", "gk", 1e-13 * c.cfg.scale_1d * c.eng_scale);
                   r.computed = q.value;
                   r.computed_err = q.err;
                   r.n_evals = q.n_evals;
                   r.strategy = q.strategy;
                   r.converged = q.converged;
                   r.expected = 2.0 * kPi * G - 3.5 * z3;
                   r.expression = "2*pi*G - (7/2)*zeta(3)";
                   return r;
                 }});
    t.push_back({"S_T1", "partial fraction decomposition", 1e-12, false,
                 [](Ctx& c) {
                   StepResult r;
                   const Quadrature q = quad_entry(
                       c, "T_SINH1", "ts", 1e-13 * c.cfg.scale_1d * c.eng_scale);
                   r.computed = q.value;
                   r.computed_err = q.err;
                   r.n_evals = q.n_evals;
                   r.strategy = q.strategy;
                   r.converged = q.converged;
                   r.expected = kPi * kPi / 4.0;
                   r.expression = "pi^2/4";
                   return r;
                 }});
    t.push_back({"S_T2", "partial fraction decomposition", 1e-12, false,
                 [](Ctx& c) {
                   StepResult r;
                   const Quadrature q = quad_entry(
                       c, "T_SINH2", "ts", 1e-13 * c.cfg.scale_1d * c.eng_scale);
                   r.computed = q.value;
                   r.computed_err = q.err;
                   r.n_evals = q.n_evals;
                   r.strategy = q.strategy;
                   r.converged = q.converged;
                   r.expected = kPi * kPi / 16.0;
                   r.expression = "pi^2/16";
                   return r;
                 }});
    t.push_back(
        {"S_inner", "another tabulated integral", 1e-10, false, [](Ctx& c) {
           StepResult r;
           const double avals[4] = {0.25, 0.5, 0.75, 1.0};
           const double tol = 1e-11 * c.cfg.scale_1d * c.eng_scale;
           for (double a : avals) {
             const Quadrature q = quad_entry(c, "E19_INNER", "gk", tol, a);
             const double ac = std::acos(a);
             const double want = kPi * kPi / 8.0 - 0.5 * ac * ac;
             r.n_evals += q.n_evals;
             r.converged = r.converged && q.converged;
             if (a == 1.0) {
               r.computed = q.value;
               r.computed_err = q.err;
               r.expected = want;
               r.strategy = q.strategy;
             } else {
               r.extra_pairs.emplace_back(q.value, want);
             }
           }
           r.expression =
               "pi^2/8 - (arccos a)^2/2 at a in {0.25, 0.5, 0.75, 1}; "
               "reported pair is a=1, deviation is the max over the four";
           return r;
         }});
    t.push_back(
        {"S_f", "f(1)=X/4\xCF\x80\xC2\xB2 and f(0)=0", 1e-9, false, [](Ctx& c) {
           StepResult r;
           const double tol = 1e-10 * c.cfg.scale_1d * c.eng_scale;
           const cat::Entry& e20 = cat::entry("E20_DFDA");
           std::vector<double> pt(1);
           const quad::Fn dfda = [&e20, &pt](double x) {
             pt[0] = x;
             return e20.eval(pt, 0.0);
           };
           double minus_vals[2];
           int k = 0;
           for (double a : {0.5, 1.0}) {
             const Quadrature lhs = quad_direct(
                 dfda, quad::Interval1D::bounded(0.0, a), tol);
             const Quadrature rhs = quad_entry(c, "E17_F", "gk", tol, a);
             const quad::Fn neg = [a](double rr) {
               return cat::eval_e17_minus(rr, a);
             };
             const Quadrature mns =
                 quad_direct(neg, quad::Interval1D::half_line(0.0), tol);
             minus_vals[k++] = mns.value;
             r.n_evals += lhs.n_evals + rhs.n_evals;
             r.converged = r.converged && lhs.converged && rhs.converged;
             if (a == 1.0) {
               r.computed = lhs.value;
               r.computed_err = lhs.err;
               r.expected = rhs.value;
               r.strategy = "gk";
             } else {
               r.extra_pairs.emplace_back(lhs.value, rhs.value);
             }
           }
           r.expression =
               "direct quadrature of E17_F(a) with the plus-sign log argument "
               "at a in {0.5, 1}; reported pair is a=1 (f(1)); the minus-sign "
               "integral gives " +
               fmt17(minus_vals[0]) + " at a=0.5 and " + fmt17(minus_vals[1]) +
               " at a=1, matching neither side";
           r.note = "plus sign in the log argument is the matching policy";
           return r;
         }});
    t.push_back(
        {"S_16", "reduced to a single integral", 1e-10, false, [](Ctx& c) {
           StepResult r;
           const Quadrature q = quad_entry(
               c, "E16_X", "ts", 1e-11 * c.cfg.scale_1d * c.eng_scale);
           const double pref = cat::entry("E16_X").printed_prefactor;
           r.computed = pref * q.value;
           r.computed_err = pref * q.err;
           r.n_evals = q.n_evals;
           r.strategy = q.strategy;
           r.converged = q.converged;
           r.expected = closed(constants::FormId::X2_EQ25) -
                        closed(constants::FormId::X1_EQ24);
           r.expression =
               "X2_EQ25 - X1_EQ24; bare quadrature " + fmt17(q.value) +
               " equals (pi^2*ln2 - (7/2)*zeta(3))/4 = " +
               fmt17((kPi * kPi * std::numbers::ln2 -
                      3.5 * constants::get(constants::Name::ZETA3)) /
                     4.0);
           return r;
         }});
    t.push_back(
        {"S_21_22", "folding the new range of integration", 1e-10, false,
         [ln2](Ctx& c) {
           StepResult r;
           const double tol = 1e-11 * c.cfg.scale_1d * c.eng_scale;
           const Quadrature q21 = quad_entry(c, "E21_THETA", "gk", tol);
           const Quadrature q22 = quad_entry(c, "E22_PHI", "gk", tol, 0.25);
           const Quadrature q22p = quad_entry(c, "E22_PHI", "gk", tol, 4.0);
           const double head = kPi * kPi * kPi * kPi * ln2;
           r.computed = head + 4.0 * kPi * kPi * q21.value;
           r.computed_err = 4.0 * kPi * kPi * q21.err;
           r.n_evals = q21.n_evals;
           r.strategy = q21.strategy;
           r.converged = q21.converged && q22.converged;
           r.expected = head + 4.0 * kPi * kPi * q22.value;
           r.expression =
               "pi^4*ln2 + 4*pi^2*quad(E22_PHI, c=1/4), the adjudicated "
               "coefficient; the printed c=4 gives " +
               fmt17(head + 4.0 * kPi * kPi * q22p.value) +
               ", matched by no probe candidate";
           r.note = "coefficient adjudicated to 1/4 (printed: 4)";
           return r;
         }});
    t.push_back({"S_22", "closed form expressions for the two", 1e-12, true,
                 [](Ctx&) {
                   StepResult r;
                   r.computed = closed(constants::FormId::X_EQ22);
                   r.expected = closed(constants::FormId::X2_EQ25) -
                                closed(constants::FormId::X1_EQ24);
                   r.expression = "X2_EQ25 - X1_EQ24";
                   r.note =
                       "pi^4*ln2 - (7/2)*pi^2*zeta(3) equals (X2-X1)/2, not "
                       "X2-X1";
                   return r;
                 }});
    t.push_back({"S_15_14", "To evaluate the \xCF\x86-integral", 1e-8, false,
                 [](Ctx& c) {
                   StepResult r;
                   const double tol = c.cfg.rel_tol_2d * c.eng_scale;
                   const Quadrature a =
                       quad_prefactored(c, "E15_X", "adaptive", tol);
                   const Quadrature b =
                       quad_prefactored(c, "E14_X", "adaptive", tol);
                   r.computed = a.value;
                   r.computed_err = a.err;
                   r.n_evals = a.n_evals;
                   r.strategy = a.strategy;
                   r.converged = a.converged && b.converged;
                   r.expected = b.value;
                   r.expression = "8*pi * cubature of E14_X";
                   return r;
                 }});
    t.push_back({"S_14_13", "perform the elementary s-integration", 1e-6,
                 false, [](Ctx& c) {
                   StepResult r;
                   const Quadrature a = quad_prefactored(
                       c, "E14_X", "adaptive", c.cfg.rel_tol_2d * c.eng_scale);
                   // Region subdivision stalls on the quasi-step this
                   // integrand develops along s=0 toward cos(phi)=0; the
                   // nested 1D engine resolves it slice by slice.
                   const Quadrature b = quad_prefactored(
                       c, "E13_X", "iterated", c.cfg.rel_tol_3d * c.eng_scale);
                   r.computed = a.value;
                   r.computed_err = a.err;
                   r.n_evals = a.n_evals;
                   r.strategy = a.strategy;
                   r.converged = a.converged && b.converged;
                   r.expected = b.value;
                   r.expression = "4*pi * cubature of E13_X";
                   return r;
                 }});
    t.push_back({"S_13_11", "Im ln[(cos \xCF\x86+i sinh r)", 1e-6, false,
                 [](Ctx& c) {
                   StepResult r;
                   const double tol = c.cfg.rel_tol_3d * c.eng_scale;
                   const Quadrature a =
                       quad_prefactored(c, "E13_X", "iterated", tol);
                   const Quadrature b =
                       quad_prefactored(c, "E11_X", "iterated", tol);
                   r.computed = a.value;
                   r.computed_err = a.err;
                   r.n_evals = a.n_evals;
                   r.strategy = a.strategy;
                   r.converged = a.converged && b.converged;
                   r.expected = b.value;
                   r.expression = "4*pi * cubature of E11_X";
                   return r;
                 }});
    t.push_back({"S_11_10", "having Jacobian 1/2", 1e-6, false, [](Ctx& c) {
                   StepResult r;
                   const double tol = c.cfg.rel_tol_3d * c.eng_scale;
                   const Quadrature a =
                       quad_prefactored(c, "E11_X", "iterated", tol);
                   const Quadrature b =
                       quad_prefactored(c, "E10_X", "adaptive", tol);
                   r.computed = a.value;
                   r.computed_err = a.err;
                   r.n_evals = a.n_evals;
                   r.strategy = a.strategy;
                   r.converged = a.converged && b.converged;
                   r.expected = b.value;
                   r.expression = "8*pi * cubature of E10_X";
                   return r;
                 }});
    t.push_back({"S_10_9", "we set q=e^{-u}", 1e-6, false, [](Ctx& c) {
                   StepResult r;
                   const double tol = c.cfg.rel_tol_3d * c.eng_scale;
                   const Quadrature a =
                       quad_prefactored(c, "E10_X", "adaptive", tol);
                   const Quadrature b =
                       quad_prefactored(c, "E9_X", "adaptive", tol);
                   r.computed = a.value;
                   r.computed_err = a.err;
                   r.n_evals = a.n_evals;
                   r.strategy = a.strategy;
                   r.converged = a.converged && b.converged;
                   r.expected = b.value;
                   r.expression = "16*pi * cubature of E9_X";
                   return r;
                 }});
    t.push_back({"S_9_8", "only the even part of the integrand", 1e-6, false,
                 [](Ctx& c) {
                   StepResult r;
                   const double tol = c.cfg.rel_tol_3d * c.eng_scale;
                   const Quadrature a =
                       quad_prefactored(c, "E9_X", "adaptive", tol);
                   const Quadrature b =
                       quad_prefactored(c, "E8_X", "adaptive", tol);
                   r.computed = a.value;
                   r.computed_err = a.err;
                   r.n_evals = a.n_evals;
                   r.strategy = a.strategy;
                   r.converged = a.converged && b.converged;
                   r.expected = b.value;
                   r.expression =
                       "16*pi * cubature of E8_X; the even-part fold "
                       "contributes the factor 2 documented here";
                   return r;
                 }});
    t.push_back({"S_5_X1", "Ziesche found X_1=-30.70598\xE2\x80\xA6", 1e-6,
                 false, [](Ctx& c) {
                   StepResult r;
                   const Quadrature q = quad_entry(
                       c, "E5_X1", "adaptive", c.cfg.rel_tol_x5 * c.eng_scale);
                   r.computed = q.value;
                   r.computed_err = q.err;
                   r.n_evals = q.n_evals;
                   r.strategy = q.strategy;
                   r.converged = q.converged;
                   r.expected = closed(constants::FormId::X1_EQ24);
                   r.expression = "X1_EQ24 = 5*pi^2*zeta(3) - (4/3)*pi^4*ln2";
                   return r;
                 }});
    t.push_back({"S_5_X2", "Ziesche found X_1=-30.70598\xE2\x80\xA6", 1e-6,
                 false, [](Ctx& c) {
                   StepResult r;
                   const Quadrature q = quad_entry(
                       c, "E5_X2", "adaptive", c.cfg.rel_tol_x5 * c.eng_scale);
                   r.computed = q.value;
                   r.computed_err = q.err;
                   r.n_evals = q.n_evals;
                   r.strategy = q.strategy;
                   r.converged = q.converged;
                   r.expected = closed(constants::FormId::X2_EQ25);
                   r.expression = "X2_EQ25 = (2/3)*pi^4*ln2 - 2*pi^2*zeta(3)";
                   return r;
                 }});
    t.push_back({"S_sigma", "the two simpler integrals", 1e-12, true,
                 [](Ctx&) {
                   StepResult r;
                   const double x1 = closed(constants::FormId::X1_EQ24);
                   const double x2 = closed(constants::FormId::X2_EQ25);
                   r.computed = -(x1 + x2) / (4.0 * kPi * kPi);
                   r.expected = closed(constants::FormId::SIGMA_EQ26);
                   r.expression =
                       "SIGMA_EQ26 = -(X1_EQ24 + X2_EQ25)/(4*pi^4); the "
                       "computed side uses the printed denominator 4*pi^2";
                   r.note = "true denominator is 4*pi^4";
                   return r;
                 }});
    t.push_back(
        {"S_consts", "Hugenholtz-van Hove- Luttinger-Ward theorem", 1e-12,
         true, [](Ctx&) {
           StepResult r;
           const auto rows = constants::consistency_audit();
           // The headline pair is the first audit relation; the others carry
           // factors of their own and are documented in the expression.
           std::string doc = "consistency_audit:";
           for (const auto& row : rows)
             doc += " " + row.relation + " reconciles with factor " +
                    row.best_factor_label + ";";
           doc.pop_back();
           r.computed = rows.front().computed;
           r.expected = rows.front().expected;
           r.expression = doc;
           return r;
         }});
    return t;
  }();
  return table;
}

// --- outcome assembly -------------------------------------------------------

double pair_deviation(double computed, double expected, double factor) {
  const double scale =
      std::max(std::abs(expected), std::numeric_limits<double>::min());
  return std::abs(computed * factor - expected) / scale;
}

StepOutcome make_outcome(const StepSpec& spec, Ctx& ctx, const StepResult& r) {
  const double tol = spec.tol * ctx.cfg.tol_scale;
  const FactorProbe& probe = FactorProbe::default_probe();
  const FactorProbe::Match m = probe.best(r.computed, r.expected, tol);

  StepOutcome o;
  o.id = spec.id;
  o.paper_ref = spec.anchor;
  o.computed_value = r.computed;
  o.computed_error = r.computed_err;
  o.n_evals = r.n_evals;
  o.strategy = r.strategy;
  o.expected_expression = r.expression;
  o.expected_value = r.expected;
  o.best_factor = m.best_factor_label;
  o.best_factor_value = m.best_factor;
  o.note = r.note;

  double dev = m.relative_deviation;
  for (const auto& [cv, ev] : r.extra_pairs)
    dev = std::max(dev, pair_deviation(cv, ev, m.best_factor));
  o.relative_deviation = dev;

  if (!r.converged) {
    o.status = "fail";
    o.note = (o.note.empty() ? "" : o.note + "; ") +
             std::string("quadrature did not converge within budget");
    return o;
  }
  if (m.ambiguous) {
    o.status = "fail";
    o.note = (o.note.empty() ? "" : o.note + "; ") +
             std::string("ambiguous: two probe candidates within tolerance; "
                         "tighten the tolerance");
    return o;
  }
  if (m.best_factor_label == "1" && dev <= tol) {
    o.status = "pass";
    return o;
  }
  if (dev > tol) {
    o.status = "fail";
    return o;
  }

  // Candidate discrepancy: require the factor to be stable under a re-run at
  // halved engine tolerance before documenting it.
  if (spec.constant_level) {
    o.status = "discrepancy";
    o.note = (o.note.empty() ? "" : o.note + "; ") +
             std::string("constant-level relation; re-runs are identical");
    return o;
  }
  Ctx tighter = ctx;
  tighter.eng_scale = ctx.eng_scale * 0.5;
  const StepResult r2 = spec.run(tighter);
  const FactorProbe::Match m2 = probe.best(r2.computed, r2.expected, tol);
  double dev2 = m2.relative_deviation;
  for (const auto& [cv, ev] : r2.extra_pairs)
    dev2 = std::max(dev2, pair_deviation(cv, ev, m2.best_factor));
  if (m2.best_factor_label == m.best_factor_label && dev2 <= tol) {
    o.status = "discrepancy";
    o.note = (o.note.empty() ? "" : o.note + "; ") + std::string("factor ") +
             m.best_factor_label +
             " stable under re-run at halved engine tolerance";
  } else {
    o.status = "fail";
    o.note = (o.note.empty() ? "" : o.note + "; ") +
             std::string("probe factor not stable across re-runs (") +
             m.best_factor_label + " vs " + m2.best_factor_label + ")";
  }
  return o;
}

std::string rfc3339_now() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace

const std::vector<std::string>& all_step_ids() {
  static const std::vector<std::string> ids = [] {
    std::vector<std::string> v;
    for (const auto& s : step_table()) v.push_back(s.id);
    return v;
  }();
  return ids;
}

bool has_step(const std::string& id) {
  for (const auto& s : step_table())
    if (s.id == id) return true;
  return false;
}

VerificationReport run_chain(const std::vector<std::string>& selection,
                             const EngineConfig& cfg) {
  if (selection.empty())
    throw std::invalid_argument("run_chain: empty step selection");
  for (const auto& id : selection)
    if (!has_step(id)) throw std::out_of_range("unknown chain step: " + id);

  std::map<std::string, Quadrature> cache;
  Ctx ctx{cfg, 1.0, &cache};

  VerificationReport rep;
  rep.verdict = "pass";
  for (const auto& spec : step_table()) {
    if (std::find(selection.begin(), selection.end(), spec.id) ==
        selection.end())
      continue;
    const auto t0 = std::chrono::steady_clock::now();
    StepOutcome o;
    try {
      const StepResult r = spec.run(ctx);
      o = make_outcome(spec, ctx, r);
    } catch (const std::exception& ex) {
      throw std::runtime_error(spec.id + ": " + ex.what());
    }
    const auto t1 = std::chrono::steady_clock::now();
    o.wall_ms =
        std::chrono::duration_cast<std::chrono::duration<double, std::milli>>(
            t1 - t0)
            .count();
    if (o.status == "fail") rep.verdict = "fail";
    rep.steps.push_back(std::move(o));
  }
  return rep;
}

VerificationReport run_all(const EngineConfig& cfg) {
  return run_chain(all_step_ids(), cfg);
}

std::string render_text(const VerificationReport& report) {
  std::ostringstream os;
  for (const auto& s : report.steps) {
    const char* tag = s.status == "pass"          ? "[PASS]       "
                      : s.status == "discrepancy" ? "[DISCREPANCY]"
                                                  : "[FAIL]       ";
    char line[512];
    std::snprintf(line, sizeof(line),
                  "%s %-8s computed=%.17g expected=%.17g factor=%s dev=%.3g "
                  "(%s, %ld evals, %.1f ms)\n",
                  tag, s.id.c_str(), s.computed_value, s.expected_value,
                  s.best_factor.c_str(), s.relative_deviation,
                  s.strategy.c_str(), s.n_evals, s.wall_ms);
    os << line;
  }
  for (const auto& s : report.steps) {
    if (s.status == "discrepancy")
      os << "warning: " << s.id << " reconciles only with factor "
         << s.best_factor << " (" << s.note << ")\n";
    else if (s.status == "fail")
      os << "failure: " << s.id << (s.note.empty() ? "" : ": " + s.note)
         << "\n";
  }
  os << "verdict: " << report.verdict << "\n";
  return os.str();
}

std::string render_json(const VerificationReport& report) {
  nlohmann::ordered_json doc;
  doc["schema_version"] = "1";
  doc["timestamp"] = rfc3339_now();
  doc["steps"] = nlohmann::ordered_json::array();
  nlohmann::ordered_json cands = nlohmann::ordered_json::array();
  for (const auto& c : FactorProbe::default_probe().candidates)
    cands.push_back(c.label);
  for (const auto& s : report.steps) {
    nlohmann::ordered_json j;
    j["id"] = s.id;
    j["paper_ref"] = s.paper_ref;
    j["computed"] = {{"value", s.computed_value},
                     {"error_estimate", s.computed_error},
                     {"n_evals", s.n_evals},
                     {"wall_ms", s.wall_ms},
                     {"strategy", s.strategy}};
    j["expected"] = {{"expression", s.expected_expression},
                     {"value", s.expected_value}};
    j["probe"] = {{"candidates", cands},
                  {"best_factor", s.best_factor},
                  {"relative_deviation", s.relative_deviation}};
    j["status"] = s.status;
    doc["steps"].push_back(std::move(j));
  }
  doc["verdict"] = report.verdict;
  return doc.dump(2) + "\n";
}

}  // namespace sigma2x::chain
