#include "sigma2x/quad1d.hpp"

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <limits>
#include <queue>
#include <vector>

namespace sigma2x::quad {
namespace {

// 15-point Kronrod extension of the 7-point Gauss rule (positive abscissae;
// even indices are Kronrod-only points, odd indices the embedded Gauss
// points, index 7 the centre).
constexpr double kXgk[8] = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144838258730, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr double kWgk[8] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr double kWg[4] = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Kahan {
  double s = 0.0, c = 0.0;
  void add(double x) {
    double y = x - c;
    double t = s + y;
    c = (t - s) - y;
    s = t;
  }
  double sum() const { return s; }
};

struct Evaluator {
  const Fn& f;
  long count = 0;
  double operator()(double x) {
    ++count;
    double v = f(x);
    if (!std::isfinite(v)) throw EvaluationFailure(x);
    return v;
  }
};

struct Segment {
  double a, b;
  double value, err;
  int depth;
};

struct RuleOut {
  double value, err, resabs;
};

RuleOut gk15(Evaluator& ev, double a, double b) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  double fv[15];  // saved for the scaled error estimate
  const double fc = ev(c);
  fv[14] = fc;
  double resg = fc * kWg[3];
  double resk = fc * kWgk[7];
  double resabs = std::abs(fc) * kWgk[7];
  for (int j = 0; j < 3; ++j) {
    const int idx = 2 * j + 1;
    const double dx = h * kXgk[idx];
    const double f1 = ev(c - dx);
    const double f2 = ev(c + dx);
    fv[2 * idx] = f1;
    fv[2 * idx + 1] = f2;
    resg += kWg[j] * (f1 + f2);
    resk += kWgk[idx] * (f1 + f2);
    resabs += kWgk[idx] * (std::abs(f1) + std::abs(f2));
  }
  for (int j = 0; j < 4; ++j) {
    const int idx = 2 * j;
    const double dx = h * kXgk[idx];
    const double f1 = ev(c - dx);
    const double f2 = ev(c + dx);
    fv[2 * idx] = f1;
    fv[2 * idx + 1] = f2;
    resk += kWgk[idx] * (f1 + f2);
    resabs += kWgk[idx] * (std::abs(f1) + std::abs(f2));
  }
  const double mean = resk * 0.5;
  double resasc = kWgk[7] * std::abs(fc - mean);
  for (int idx = 0; idx < 7; ++idx)
    resasc +=
        kWgk[idx] * (std::abs(fv[2 * idx] - mean) + std::abs(fv[2 * idx + 1] - mean));
  const double ah = std::abs(h);
  double value = resk * h;
  double err = std::abs((resk - resg) * h);
  resabs *= ah;
  resasc *= ah;
  if (resasc != 0.0 && err != 0.0)
    err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
  if (resabs > DBL_MIN / (50.0 * DBL_EPSILON))
    err = std::max(err, 50.0 * DBL_EPSILON * resabs);
  return {value, err, resabs};
}

QuadResult adaptive_gk(const Fn& f, double a, double b, double abs_tol,
                       double rel_tol, const Budget& budget) {
  Evaluator ev{f};
  auto worse = [](const Segment& x, const Segment& y) {
    if (x.err != y.err) return x.err < y.err;  // larger error first
    return x.a > y.a;                          // deterministic tie-break
  };
  std::priority_queue<Segment, std::vector<Segment>, decltype(worse)> heap(
      worse);

  RuleOut root = gk15(ev, a, b);
  heap.push({a, b, root.value, root.err, 0});
  double val_run = root.value;
  double err_run = root.err;
  long subdivisions = 0;
  Status status = Status::converged;

  while (true) {
    const double target = std::max(abs_tol, rel_tol * std::abs(val_run));
    if (err_run <= target) break;
    const Segment top = heap.top();
    if (top.depth >= budget.max_depth) {
      status = Status::max_depth;
      break;
    }
    if (ev.count + 30 > budget.max_evals) {
      status = Status::max_evals;
      break;
    }
    const double mid = 0.5 * (top.a + top.b);
    if (!(top.a < mid && mid < top.b)) {
      status = Status::max_depth;
      break;
    }
    heap.pop();
    RuleOut l = gk15(ev, top.a, mid);
    RuleOut r = gk15(ev, mid, top.b);
    heap.push({top.a, mid, l.value, l.err, top.depth + 1});
    heap.push({mid, top.b, r.value, r.err, top.depth + 1});
    val_run += l.value + r.value - top.value;
    err_run += l.err + r.err - top.err;
    ++subdivisions;
  }

  // Deterministic final reduction: drain the heap, order segments by
  // position, and sum with compensation.
  std::vector<Segment> segs;
  segs.reserve(heap.size());
  while (!heap.empty()) {
    segs.push_back(heap.top());
    heap.pop();
  }
  std::sort(segs.begin(), segs.end(),
            [](const Segment& x, const Segment& y) { return x.a < y.a; });
  Kahan val, err;
  for (const auto& s : segs) {
    val.add(s.value);
    err.add(s.err);
  }

  QuadResult out;
  out.value = val.sum();
  out.error_estimate = err.sum();
  out.n_evals = ev.count;
  out.subdivisions = subdivisions;
  out.status = status;
  if (status == Status::converged &&
      out.error_estimate > std::max(abs_tol, rel_tol * std::abs(out.value)))
    out.status = Status::max_depth;  // roundoff edge; do not claim convergence
  return out;
}

}  // namespace

Interval1D Interval1D::bounded(double lo, double hi, Transform t) {
  Interval1D iv;
  iv.kind = Kind::finite;
  iv.lo = lo;
  iv.hi = hi;
  iv.transform = t;
  iv.validate();
  return iv;
}

Interval1D Interval1D::half_line(double lo, Transform t) {
  Interval1D iv;
  iv.kind = Kind::semi_infinite;
  iv.lo = lo;
  iv.hi = std::numeric_limits<double>::infinity();
  iv.transform = t;
  iv.validate();
  return iv;
}

void Interval1D::validate() const {
  if (kind == Kind::finite) {
    if (!(lo < hi) || !std::isfinite(lo) || !std::isfinite(hi))
      throw std::invalid_argument("finite interval requires lo < hi, finite");
    if (transform == Transform::log_map)
      throw std::invalid_argument("log_map is only valid on semi-infinite intervals");
  } else {
    if (!std::isfinite(lo))
      throw std::invalid_argument("semi-infinite interval requires finite lo");
    if (transform == Transform::none)
      throw std::invalid_argument(
          "semi-infinite interval requires a declared transform");
  }
}

QuadResult integrate_tanh_sinh(const Fn& f, double lo, double hi,
                               double abs_tol, double rel_tol,
                               const Budget& budget) {
  if (!(lo < hi)) throw std::invalid_argument("tanh_sinh requires lo < hi");
  Evaluator ev{f};
  const double h = 0.5 * (hi - lo);
  const double half_pi = 1.57079632679489661923;

  // g(t) = h * w(t) * f(x(t)); node offsets are computed from the nearest
  // endpoint so that clustering survives in floating point.  Nodes that
  // collapse onto an endpoint are skipped: the true mass beyond them is far
  // below double resolution.
  auto term = [&](double t) -> double {
    const double u = half_pi * std::sinh(t);
    const double au = std::abs(u);
    const double e = std::exp(-2.0 * au);
    const double off = h * 2.0 * e / (1.0 + e);  // distance from endpoint
    double x;
    if (t >= 0.0) {
      x = hi - off;
      if (x >= hi) return 0.0;
    } else {
      x = lo + off;
      if (x <= lo) return 0.0;
    }
    const double sech_u = 2.0 * std::exp(-au) / (1.0 + e);
    const double w = half_pi * std::cosh(t) * sech_u * sech_u;
    if (w == 0.0) return 0.0;
    return h * w * ev(x);
  };

  // A node with |u| beyond ~745 underflows entirely.
  const double t_cut = std::asinh(745.0 / half_pi);

  double prev = 0.0, prev2 = 0.0;
  double value = 0.0;
  double resabs = 0.0;
  double e1 = std::numeric_limits<double>::infinity();
  int level = 0;
  Status status = Status::max_depth;

  for (; level <= budget.ts_level_cap; ++level) {
    const double d = std::ldexp(1.0, -level);
    Kahan sum, abs_sum;
    if (level == 0) {
      const double g0 = term(0.0);
      sum.add(g0);
      abs_sum.add(std::abs(g0));
    }
    int quiet_pos = 0, quiet_neg = 0;
    const long jmax = static_cast<long>(t_cut / d) + 1;
    const long jstep = (level == 0) ? 1 : 2;
    for (long j = 1; j <= jmax; j += jstep) {
      const double t = j * d;
      if (quiet_pos < 2) {
        const double g = term(t);
        sum.add(g);
        abs_sum.add(std::abs(g));
        const double floor_ =
            1e-20 * std::max(std::abs(value) + std::abs(sum.sum()), 1e-300);
        quiet_pos = (std::abs(g) < floor_) ? quiet_pos + 1 : 0;
      }
      if (quiet_neg < 2) {
        const double g = term(-t);
        sum.add(g);
        abs_sum.add(std::abs(g));
        const double floor_ =
            1e-20 * std::max(std::abs(value) + std::abs(sum.sum()), 1e-300);
        quiet_neg = (std::abs(g) < floor_) ? quiet_neg + 1 : 0;
      }
      if (quiet_pos >= 2 && quiet_neg >= 2) break;
      if (ev.count > budget.max_evals) {
        status = Status::max_evals;
        break;
      }
    }
    prev2 = prev;
    prev = value;
    value = (level == 0) ? sum.sum() * d : 0.5 * value + sum.sum() * d;
    resabs = 0.5 * resabs + abs_sum.sum() * d;
    if (status == Status::max_evals) break;
    if (level >= 2) {
      e1 = std::abs(value - prev);
      const double target = std::max(abs_tol, rel_tol * std::abs(value));
      if (e1 <= target) {
        status = Status::converged;
        break;
      }
    }
  }
  (void)prev2;

  QuadResult out;
  out.value = value;
  out.error_estimate =
      std::max(std::isfinite(e1) ? e1 : 0.0, 4.0 * DBL_EPSILON * resabs);
  out.n_evals = ev.count;
  out.subdivisions = level;
  out.status = status;
  return out;
}

QuadResult integrate_semi_infinite(const Fn& f, double lo, double abs_tol,
                                   double rel_tol, const Budget& budget) {
  auto g = [&f, lo](double t) { return f(lo - std::log(t)) / t; };
  return adaptive_gk(g, 0.0, 1.0, abs_tol, rel_tol, budget);
}

QuadResult integrate_truncated(const Fn& f, double lo, double abs_tol,
                               double rel_tol, double R, const Budget& budget) {
  return adaptive_gk(f, lo, lo + R, abs_tol, rel_tol, budget);
}

QuadResult integrate_adaptive(const Fn& f, const Interval1D& iv,
                              double abs_tol, double rel_tol,
                              const Budget& budget) {
  iv.validate();
  if (iv.kind == Interval1D::Kind::finite) {
    if (iv.transform == Interval1D::Transform::tanh_sinh)
      return integrate_tanh_sinh(f, iv.lo, iv.hi, abs_tol, rel_tol, budget);
    return adaptive_gk(f, iv.lo, iv.hi, abs_tol, rel_tol, budget);
  }
  if (iv.transform == Interval1D::Transform::tanh_sinh) {
    const double lo = iv.lo;
    auto g = [&f, lo](double t) { return f(lo - std::log(t)) / t; };
    return integrate_tanh_sinh(g, 0.0, 1.0, abs_tol, rel_tol, budget);
  }
  return integrate_semi_infinite(f, iv.lo, abs_tol, rel_tol, budget);
}

ErrorProbe estimate_true_error(const Fn& f, const Interval1D& iv, double exact,
                               double abs_tol, double rel_tol,
                               const Budget& budget) {
  QuadResult r = integrate_adaptive(f, iv, abs_tol, rel_tol, budget);
  return {r.error_estimate, std::abs(r.value - exact)};
}

}  // namespace sigma2x::quad
