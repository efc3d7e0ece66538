#pragma once

#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "sigma2x/cubature.hpp"
#include "sigma2x/quad1d.hpp"

namespace sigma2x::cat {

// Derived kernel parameters shared by the triple-integral entries.
struct FKernelParams {
  double p, q;
  double alpha, beta, a;
  FKernelParams(double p_, double q_);
};

// Checked kernel evaluation: requires p,q in (0,1) and x in (-1,1), throws
// std::domain_error otherwise.
double eval_F(double p, double q, double x);

// Unchecked kernel with graceful boundary limits (never throws, never NaN on
// [0,1]^2 x [-1,1]); used by the integrand evaluators.
double f_kernel(double p, double q, double x);

// The combined even-part kernel in two-argument-arctangent form, with the
// coefficient exactly as printed: atan2(2b*sqrt((1+a^2)(1-x^2)),
// 1-x^2+a^2-b^2) / (a^2-x^2).  The sum F(p,q,x)+F(p,q,-x) equals twice this.
double folded_kernel(double p, double q, double x);

// Minus-sign variant of the parametric log integrand,
// r*ln(1 - a*sech r)/(sinh r * cosh r); kept outside the catalog (the
// catalog entry uses the plus sign) so the verifier can document both.
double eval_e17_minus(double r, double a);

struct Entry {
  std::string id;
  std::string description;
  std::string paper_anchor;  // verbatim citation string
  int dimension = 1;
  cube::Domain domain;  // axes in declared (outer-to-inner) order
  std::vector<std::string> axis_names;
  bool parametric = false;
  std::string param_name;
  double param_default = 0.0;  // informational; eval_entry still requires it
  double printed_prefactor = 1.0;
  std::string prefactor_label = "1";
  bool prefactor_baked = false;  // prefactor already inside the evaluator
  std::string singularity_note;
  std::string default_method;  // "gk" for 1D, "adaptive" for multi-D
  // Pointwise evaluator; the second argument is the parameter (ignored for
  // non-parametric entries).
  std::function<double(const std::vector<double>&, double)> eval;
};

const std::vector<Entry>& all_entries();
bool has_entry(const std::string& id);
const Entry& entry(const std::string& id);  // throws std::out_of_range

// Checked pointwise evaluation.  The point may lie on the closure of the
// domain (evaluators supply finite limiting values there); outside it, or
// with the wrong arity / parameter usage, this throws.
double eval_entry(const std::string& id, const std::vector<double>& point,
                  std::optional<double> parameter = std::nullopt);

// Removable limits of the derivative entry at the ends of [0,1]:
// (value at a->0+, value at a->1-).
std::pair<double, double> eval_dfda_limits();

}  // namespace sigma2x::cat
