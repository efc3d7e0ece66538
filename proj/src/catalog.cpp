#include "sigma2x/catalog.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace sigma2x::cat {
namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kHalfPi = kPi / 2.0;

using quad::Interval1D;
using Tr = Interval1D::Transform;

// --- pointwise building blocks -------------------------------------------

// a - x computed without cancellation near the (p,q,|x|)->(1,1,1) corner:
// a - 1 = (1-pq)^2 / (2pq) exactly.
double a_minus_x(double p, double q, double x) {
  const double pq = p * q;
  const double am1 = (1.0 - pq) * (1.0 - pq) / (2.0 * pq);
  return am1 + (1.0 - x);
}

double e5_base(double p, double q, double x) {
  // F / ((1-p^2 q^2)(1+q^2)), the common body of both E5 integrands.
  if (p <= 0.0 || q <= 0.0) return 0.0;
  const double pq = p * q;
  const double d = (1.0 - pq) * (1.0 + pq) * (1.0 + q * q);
  if (d <= 0.0) return 0.0;
  return f_kernel(p, q, x) / d;
}

double e8_bare(double p, double q, double x) {
  if (p <= 0.0 || q <= 0.0) return 0.0;
  const double pq = p * q;
  const double d = (1.0 - pq) * (1.0 + pq);
  if (d <= 0.0) return 0.0;
  return f_kernel(p, q, x) / d;
}

double e9_bare(double p, double q, double x) {
  if (p <= 0.0 || q <= 0.0) return 0.0;
  const double pq = p * q;
  const double d = (1.0 - pq) * (1.0 + pq);
  if (d <= 0.0) return 0.0;
  return folded_kernel(p, q, x) / d;
}

double e10_bare(double u, double v, double phi) {
  const double r = u + v;
  if (r <= 0.0 || r > 60.0) return 0.0;
  const double c = std::cos(phi);
  if (c <= 0.0) return 0.0;
  const double shr = std::sinh(r);
  const double shs = std::sinh(v - u);
  const double sum = std::atan2((shr + shs) * c, c * c - shr * shs);
  return c * sum / (shr * (shr * shr + c * c));
}

double e11_bare(double r, double t, double phi) {
  if (r <= 0.0 || r > 60.0) return 0.0;
  const double c = std::cos(phi);
  if (c <= 0.0) return 0.0;
  const double shr = std::sinh(r);
  const double shs = std::sinh(r * t);
  const double sum = std::atan2((shr + shs) * c, c * c - shr * shs);
  return r * c * sum / (shr * (shr * shr + c * c));
}

double e13_bare(double r, double t, double phi) {
  if (r <= 0.0 || r > 60.0) return 0.0;
  const double c = std::cos(phi);
  if (c <= 0.0) return 0.0;
  const double shr = std::sinh(r);
  const double shs = std::sinh(r * t);
  const double sum = std::atan(shr / c) + std::atan(shs / c);
  return r * c * sum / (shr * (shr * shr + c * c));
}

double e14_bare(double r, double phi) {
  if (r <= 0.0 || r > 60.0) return 0.0;
  const double c = std::cos(phi);
  if (c <= 0.0) return 0.0;
  const double shr = std::sinh(r);
  return (r / shr) * std::atan(shr / c) * c / (c * c + shr * shr);
}

double e15_bare(double r, double w) {
  if (r <= 0.0 || r > 35.0) return 0.0;
  const double sech = 1.0 / std::cosh(r);
  const double mu = std::acos(sech);
  const double span = kHalfPi - mu;
  if (span <= 0.0) return 0.0;
  const double psi = mu + span * w;
  // sin^2(psi) - sin^2(mu) = sin(psi-mu) sin(psi+mu), with psi-mu = span*w
  // evaluated directly so the w->0 edge keeps full precision.
  const double d = std::sin(span * w) * std::sin(psi + mu);
  if (d <= 0.0) return 0.0;
  return (r / std::sinh(r)) * sech * psi * std::cos(psi) * span /
         std::sqrt(d);
}

double e16_bare(double r) {
  if (r <= 0.0) return r == 0.0 ? std::numbers::ln2 : 0.0;
  const double sech = 1.0 / std::cosh(r);
  return (r / std::sinh(r)) * sech * std::log1p(sech);
}

double e17_bare(double r, double a) {
  if (r <= 0.0) return r == 0.0 ? std::log1p(a) : 0.0;
  const double ch = std::cosh(r);
  return (r / std::sinh(r)) * std::log1p(a / ch) / ch;
}

double e19_bare(double r, double a) {
  if (r < 0.0) return 0.0;
  return std::log1p(a / std::cosh(r));
}

double e20_dfda(double a) {
  if (a == 0.0) return kPi * kPi / 4.0 - kHalfPi;
  if (a == 1.0) return 0.5;
  const double om = (1.0 - a) * (1.0 + a);  // 1 - a^2
  if (a <= 0.5) {
    // Rearranged form with the two large opposing poles cancelled
    // analytically; every term is O(1) as a -> 0.
    const double s = std::asin(a);
    return kPi * kPi / 8.0 * a / om + kPi * kPi / 4.0 / (1.0 + a) +
           (s / a) * (s - kPi) / (2.0 * om);
  }
  const double ac = std::acos(a);
  return -kPi * kPi / (8.0 * a) * (1.0 - a) / (1.0 + a) +
         ac * ac / (2.0 * a * om);
}

double e21_theta(double th) {
  if (th <= 0.0) return 0.0;
  if (th >= kHalfPi) return -kHalfPi;
  const double s = kHalfPi * std::sin(th);
  return (th - s) * (th + s) / std::sin(2.0 * th);
}

double e22_phi(double phi, double c) {
  if (phi <= 0.0) return -c * kPi;
  return c * phi * (phi - kPi) / std::sin(phi);
}

double e23_a(double phi) {
  if (phi <= 0.0) return 1.0;
  return phi / std::sin(phi);
}

double e23_b(double phi) {
  if (phi <= 0.0) return 0.0;
  return phi * phi / std::sin(phi);
}

double t_sinh1(double r) {
  if (r <= 0.0) return r == 0.0 ? 1.0 : 0.0;
  return r / std::sinh(r);
}

double t_sinh2(double r) {
  if (r <= 0.0) return r == 0.0 ? 0.5 : 0.0;
  return r / std::sinh(2.0 * r);
}

// --- catalog construction -------------------------------------------------

Interval1D fin(double lo, double hi, Tr t = Tr::none) {
  return Interval1D::bounded(lo, hi, t);
}
Interval1D half(double lo = 0.0) { return Interval1D::half_line(lo); }

using Eval = std::function<double(const std::vector<double>&, double)>;

Entry make(std::string id, std::string desc, std::string anchor, int dim,
           cube::Domain dom, std::vector<std::string> names, Eval ev) {
  Entry e;
  e.id = std::move(id);
  e.description = std::move(desc);
  e.paper_anchor = std::move(anchor);
  e.dimension = dim;
  e.domain = std::move(dom);
  e.axis_names = std::move(names);
  e.eval = std::move(ev);
  e.default_method = dim == 1 ? "gk" : "adaptive";
  return e;
}

std::vector<Entry> build() {
  std::vector<Entry> v;
  const std::string corner = "corner (p,q,|x|)->(1,1,1)";

  {
    Entry e = make(
        "E5_X1", "-16*pi * F[p,q,x] / ((1-p^2 q^2)(1+q^2))",
        "perform three of the integrations", 3,
        {fin(0, 1, Tr::tanh_sinh), fin(0, 1, Tr::tanh_sinh),
         fin(-1, 1, Tr::tanh_sinh)},
        {"p", "q", "x"}, [](const std::vector<double>& x, double) {
          return -16.0 * kPi * e5_base(x[0], x[1], x[2]);
        });
    e.prefactor_label = "-16*pi";
    e.prefactor_baked = true;
    e.singularity_note = corner;
    v.push_back(std::move(e));
  }
  {
    Entry e = make(
        "E5_X2", "16*pi * q^2 F[p,q,x] / ((1-p^2 q^2)(1+q^2))",
        "perform three of the integrations", 3,
        {fin(0, 1, Tr::tanh_sinh), fin(0, 1, Tr::tanh_sinh),
         fin(-1, 1, Tr::tanh_sinh)},
        {"p", "q", "x"}, [](const std::vector<double>& x, double) {
          return 16.0 * kPi * x[1] * x[1] * e5_base(x[0], x[1], x[2]);
        });
    e.prefactor_label = "16*pi";
    e.prefactor_baked = true;
    e.singularity_note = corner;
    v.push_back(std::move(e));
  }
  {
    Entry e = make("E8_X", "F[p,q,x] / (1-p^2 q^2)", "From (5) we have", 3,
                   {fin(0, 1, Tr::tanh_sinh), fin(0, 1, Tr::tanh_sinh),
                    fin(-1, 1, Tr::tanh_sinh)},
                   {"p", "q", "x"}, [](const std::vector<double>& x, double) {
                     return e8_bare(x[0], x[1], x[2]);
                   });
    e.printed_prefactor = 16.0 * kPi;
    e.prefactor_label = "16*pi";
    e.singularity_note = corner;
    v.push_back(std::move(e));
  }
  {
    Entry e = make(
        "E9_X",
        "atan2-combined even part / ((1-p^2 q^2)(a^2-x^2)), x folded to [0,1]",
        "only the even part of the integrand", 3,
        {fin(0, 1, Tr::tanh_sinh), fin(0, 1, Tr::tanh_sinh),
         fin(0, 1, Tr::tanh_sinh)},
        {"p", "q", "x"}, [](const std::vector<double>& x, double) {
          return e9_bare(x[0], x[1], x[2]);
        });
    e.printed_prefactor = 16.0 * kPi;
    e.prefactor_label = "16*pi";
    e.singularity_note = "corner (p,q,x)->(1,1,1)";
    v.push_back(std::move(e));
  }
  {
    Entry e = make(
        "E10_X",
        "cos(phi) atan2((sinh(u+v)+sinh(v-u))cos(phi), cos^2(phi)-sinh(u+v)sinh(v-u)) / "
        "(sinh(u+v)(sinh^2(u+v)+cos^2(phi)))",
        "we set q=e^{-u}", 3, {half(), half(), fin(0, kHalfPi)},
        {"u", "v", "phi"}, [](const std::vector<double>& x, double) {
          return e10_bare(x[0], x[1], x[2]);
        });
    e.printed_prefactor = 8.0 * kPi;
    e.prefactor_label = "8*pi";
    e.singularity_note =
        "former corner maps to u+v->0; bounded, direction-dependent limit";
    v.push_back(std::move(e));
  }
  {
    Entry e = make(
        "E11_X",
        "r cos(phi) atan2((sinh r+sinh s)cos(phi), cos^2(phi)-sinh r sinh s) / "
        "(sinh r (sinh^2 r+cos^2(phi))), s = r t",
        "having Jacobian 1/2", 3, {half(), fin(-1, 1), fin(0, kHalfPi)},
        {"r", "t", "phi"}, [](const std::vector<double>& x, double) {
          return e11_bare(x[0], x[1], x[2]);
        });
    e.printed_prefactor = 4.0 * kPi;
    e.prefactor_label = "4*pi";
    e.singularity_note =
        "triangular s-range rectangularized by s = r t (jacobian r in the "
        "evaluator)";
    v.push_back(std::move(e));
  }
  {
    Entry e = make(
        "E13_X",
        "r cos(phi) [atan(sinh r/cos phi)+atan(sinh s/cos phi)] / "
        "(sinh r (cos^2 phi+sinh^2 r)), s = r t",
        "perform the elementary s-integration", 3,
        {half(), fin(-1, 1), fin(0, kHalfPi)}, {"r", "t", "phi"},
        [](const std::vector<double>& x, double) {
          return e13_bare(x[0], x[1], x[2]);
        });
    e.printed_prefactor = 4.0 * kPi;
    e.prefactor_label = "4*pi";
    e.singularity_note =
        "triangular s-range rectangularized by s = r t (jacobian r in the "
        "evaluator)";
    v.push_back(std::move(e));
  }
  {
    Entry e = make(
        "E14_X",
        "(r/sinh r) atan(sinh r/cos phi) cos(phi)/(cos^2 phi+sinh^2 r)",
        "perform the elementary s-integration", 2, {half(), fin(0, kHalfPi)},
        {"r", "phi"}, [](const std::vector<double>& x, double) {
          return e14_bare(x[0], x[1]);
        });
    e.printed_prefactor = 8.0 * kPi;
    e.prefactor_label = "8*pi";
    v.push_back(std::move(e));
  }
  {
    Entry e = make(
        "E15_X",
        "(r/sinh r) cos(mu) psi cos(psi)/sqrt(sin^2 psi - sin^2 mu), "
        "psi = mu+(pi/2-mu)w, mu = arccos(sech r)",
        "To evaluate the φ-integral", 2, {half(), fin(0, 1, Tr::tanh_sinh)},
        {"r", "w"}, [](const std::vector<double>& x, double) {
          return e15_bare(x[0], x[1]);
        });
    e.printed_prefactor = 8.0 * kPi;
    e.prefactor_label = "8*pi";
    e.singularity_note =
        "endpoint-singular: inverse-square-root edge at w->0 (tanh_sinh on w)";
    v.push_back(std::move(e));
  }
  {
    Entry e = make("E16_X", "r sech(r) ln(1+sech r)/sinh r",
                   "reduced to a single integral", 1, {half()}, {"r"},
                   [](const std::vector<double>& x, double) {
                     return e16_bare(x[0]);
                   });
    e.printed_prefactor = 4.0 * kPi * kPi;
    e.prefactor_label = "4*pi^2";
    e.singularity_note = "regular; value tends to ln 2 as r->0";
    v.push_back(std::move(e));
  }
  {
    Entry e = make("E17_F", "r ln(1+a sech r)/(sinh r cosh r)",
                   "f(1)=X/4π² and f(0)=0", 1, {half()}, {"r"},
                   [](const std::vector<double>& x, double a) {
                     return e17_bare(x[0], a);
                   });
    e.parametric = true;
    e.param_name = "a";
    e.param_default = 1.0;
    e.singularity_note =
        "plus-sign policy; the printed minus sign is evaluated separately by "
        "the verifier";
    v.push_back(std::move(e));
  }
  {
    Entry e = make("E19_INNER", "ln(1+a sech r)", "after an integration by parts",
                   1, {half()}, {"r"},
                   [](const std::vector<double>& x, double a) {
                     return e19_bare(x[0], a);
                   });
    e.parametric = true;
    e.param_name = "a";
    e.param_default = 1.0;
    v.push_back(std::move(e));
  }
  {
    Entry e = make(
        "E20_DFDA",
        "df/da = -(pi^2/8a)(1-a)/(1+a) + (arccos a)^2/(2a(1-a^2)) on a in [0,1]",
        "another tabulated integral", 1, {fin(0, 1)}, {"a"},
        [](const std::vector<double>& x, double) { return e20_dfda(x[0]); });
    e.singularity_note = "removable 0/0 at both ends (limits provided)";
    v.push_back(std::move(e));
  }
  {
    Entry e = make(
        "E21_THETA",
        "[theta^2 - (pi^2/8)(1-cos 2 theta)]/sin(2 theta) on [0,pi/2]",
        "the substitution a=cos θ yields", 1, {fin(0, kHalfPi)}, {"theta"},
        [](const std::vector<double>& x, double) { return e21_theta(x[0]); });
    e.singularity_note = "removable endpoints (limits 0 and -pi/2)";
    v.push_back(std::move(e));
  }
  {
    Entry e = make("E22_PHI", "c * phi (phi-pi)/sin(phi) on [0,pi/2]",
                   "folding the new range of integration", 1,
                   {fin(0, kHalfPi)}, {"phi"},
                   [](const std::vector<double>& x, double c) {
                     return e22_phi(x[0], c);
                   });
    e.parametric = true;
    e.param_name = "c";
    e.param_default = 4.0;  // as printed; the verifier adjudicates 4 vs 1/4
    v.push_back(std::move(e));
  }
  {
    Entry e = make("E23_A", "phi/sin(phi) on [0,pi/2]",
                   "denotes Catalan's constant", 1, {fin(0, kHalfPi)},
                   {"phi"}, [](const std::vector<double>& x, double) {
                     return e23_a(x[0]);
                   });
    e.singularity_note = "removable at phi->0 (value 1)";
    v.push_back(std::move(e));
  }
  {
    Entry e = make("E23_B", "phi^2/sin(phi) on [0,pi/2]",
                   "denotes Catalan's constant", 1, {fin(0, kHalfPi)},
                   {"phi"}, [](const std::vector<double>& x, double) {
                     return e23_b(x[0]);
                   });
    v.push_back(std::move(e));
  }
  {
    Entry e = make("T_SINH1", "r/sinh r on [0,inf)",
                   "partial fraction decomposition", 1, {half()}, {"r"},
                   [](const std::vector<double>& x, double) {
                     return t_sinh1(x[0]);
                   });
    e.singularity_note = "removable at r->0 (value 1)";
    v.push_back(std::move(e));
  }
  {
    Entry e = make("T_SINH2", "r/sinh 2r on [0,inf)",
                   "partial fraction decomposition", 1, {half()}, {"r"},
                   [](const std::vector<double>& x, double) {
                     return t_sinh2(x[0]);
                   });
    e.singularity_note = "removable at r->0 (value 1/2)";
    v.push_back(std::move(e));
  }
  return v;
}

}  // namespace

FKernelParams::FKernelParams(double p_, double q_) : p(p_), q(q_) {
  alpha = (1.0 - q * q) / (2.0 * q);
  beta = (1.0 - p * p) / (2.0 * p);
  a = (1.0 + p * p * q * q) / (2.0 * p * q);
}

double f_kernel(double p, double q, double x) {
  if (p <= 0.0 || q <= 0.0) return 0.0;
  const FKernelParams k(p, q);
  if (!(k.a < 1e100)) return 0.0;  // vanishing-contribution deep-tail guard
  const double om = (1.0 - x) * (1.0 + x);  // 1 - x^2
  const double num = k.alpha * x + k.beta;
  const double den2 = (1.0 + k.alpha * k.alpha) * om;
  double at;
  if (den2 > 0.0)
    at = std::atan(num / std::sqrt(den2));
  else
    at = num > 0.0 ? kHalfPi : (num < 0.0 ? -kHalfPi : 0.0);
  return 2.0 / (a_minus_x(p, q, x) * (k.a + x)) * at;
}

double folded_kernel(double p, double q, double x) {
  if (p <= 0.0 || q <= 0.0) return 0.0;
  const FKernelParams k(p, q);
  if (!(k.a < 1e100)) return 0.0;
  const double om = (1.0 - x) * (1.0 + x);
  const double A = 2.0 * k.beta * std::sqrt((1.0 + k.alpha * k.alpha) * om);
  const double B = om + (k.alpha - k.beta) * (k.alpha + k.beta);
  return std::atan2(A, B) / (a_minus_x(p, q, x) * (k.a + x));
}

double eval_F(double p, double q, double x) {
  if (!(p > 0.0 && p < 1.0 && q > 0.0 && q < 1.0 && x > -1.0 && x < 1.0))
    throw std::domain_error("eval_F requires p,q in (0,1) and x in (-1,1)");
  return f_kernel(p, q, x);
}

double eval_e17_minus(double r, double a) {
  if (r <= 0.0) return 0.0;
  const double ch = std::cosh(r);
  double ln_term;
  if (a >= 1.0) {
    // ln(1 - sech r) = ln(2 sinh^2(r/2)) - ln(cosh r), stable for small r.
    ln_term = r <= 1.0 ? std::numbers::ln2 +
                             2.0 * std::log(std::sinh(0.5 * r)) - std::log(ch)
                       : std::log1p(-1.0 / ch);
  } else {
    ln_term = std::log1p(-a / ch);
  }
  return (r / std::sinh(r)) * ln_term / ch;
}

const std::vector<Entry>& all_entries() {
  static const std::vector<Entry> table = build();
  return table;
}

bool has_entry(const std::string& id) {
  for (const auto& e : all_entries())
    if (e.id == id) return true;
  return false;
}

const Entry& entry(const std::string& id) {
  for (const auto& e : all_entries())
    if (e.id == id) return e;
  throw std::out_of_range("unknown catalog id: " + id);
}

double eval_entry(const std::string& id, const std::vector<double>& point,
                  std::optional<double> parameter) {
  const Entry& e = entry(id);
  if (point.size() != static_cast<size_t>(e.dimension))
    throw std::invalid_argument(e.id + " expects " +
                                std::to_string(e.dimension) +
                                " coordinates, got " +
                                std::to_string(point.size()));
  if (e.parametric && !parameter.has_value())
    throw std::invalid_argument(e.id + " requires parameter " + e.param_name);
  if (!e.parametric && parameter.has_value())
    throw std::invalid_argument(e.id + " takes no parameter");
  for (int i = 0; i < e.dimension; ++i) {
    const auto& iv = e.domain[i];
    const bool ok = iv.kind == quad::Interval1D::Kind::finite
                        ? (point[i] >= iv.lo && point[i] <= iv.hi)
                        : (point[i] >= iv.lo);
    if (!ok)
      throw std::domain_error(e.id + ": coordinate " + e.axis_names[i] +
                              " outside the domain");
  }
  return e.eval(point, parameter.value_or(0.0));
}

std::pair<double, double> eval_dfda_limits() {
  return {kPi * kPi / 4.0 - kHalfPi, 0.5};
}

}  // namespace sigma2x::cat
