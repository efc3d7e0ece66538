#pragma once

#include <functional>
#include <stdexcept>
#include <string>

namespace sigma2x::quad {

// One integration axis.  Finite intervals may request the tanh-sinh rule for
// endpoint singularities; semi-infinite intervals [lo, inf) are handled by
// the substitution r = lo - ln t, t in (0,1] (log_map).  A semi-infinite
// axis marked tanh_sinh is log-mapped first and the tanh-sinh rule applied
// to the mapped (0,1] integrand.
struct Interval1D {
  enum class Kind { finite, semi_infinite };
  enum class Transform { none, log_map, tanh_sinh };

  Kind kind = Kind::finite;
  double lo = 0.0;
  double hi = 1.0;  // ignored when semi_infinite
  Transform transform = Transform::none;

  static Interval1D bounded(double lo, double hi,
                            Transform t = Transform::none);
  static Interval1D half_line(double lo, Transform t = Transform::log_map);

  void validate() const;  // throws std::invalid_argument
};

enum class Status { converged, max_depth, max_evals };

struct QuadResult {
  double value = 0.0;
  double error_estimate = 0.0;
  long n_evals = 0;
  long subdivisions = 0;  // segments created (adaptive) or levels (tanh-sinh)
  Status status = Status::converged;
};

struct Budget {
  int max_depth = 60;
  long max_evals = 10'000'000;
  int ts_level_cap = 12;
};

// Thrown when the integrand returns a non-finite value at a node.
struct EvaluationFailure : std::runtime_error {
  double abscissa;
  explicit EvaluationFailure(double x)
      : std::runtime_error("non-finite integrand value at x = " +
                           std::to_string(x)),
        abscissa(x) {}
};

using Fn = std::function<double(double)>;

// Globally adaptive Gauss-Kronrod 7/15: bisect the largest-error segment
// until the summed error estimate meets max(abs_tol, rel_tol*|value|) or the
// budget runs out.  Exhausting the budget is reported through status, not an
// exception.  Final accumulation is compensated, in left-to-right segment
// order, so results are reproducible bit for bit.
/// Dispatches on the interval: finite/none -> GK, finite/tanh_sinh -> the
// tanh-sinh rule, semi-infinite -> log_map then GK (or tanh-sinh).
QuadResult integrate_adaptive(const Fn& f, const Interval1D& iv,
                              double abs_tol, double rel_tol,
                              const Budget& budget = {});

// Tanh-sinh (double-exponential) rule on a finite interval.  Levels halve
// the step until the level-to-level difference meets the tolerance or the
// level cap is reached.  Nodes never include the endpoints.
QuadResult integrate_tanh_sinh(const Fn& f, double lo, double hi,
                               double abs_tol, double rel_tol,
                               const Budget& budget = {});

// [lo, inf) via r = lo - ln t.
QuadResult integrate_semi_infinite(const Fn& f, double lo, double abs_tol,
                                   double rel_tol, const Budget& budget = {});

/// Truncation cross-check for exponentially decaying tails: integrates
// [lo, lo+R] directly.  For the sech/sinh family the discarded tail is
// O(R e^{-2R}), ~1e-33 at the default R = 40.
QuadResult integrate_truncated(const Fn& f, double lo, double abs_tol,
                               double rel_tol, double R = 40.0,
                               const Budget& budget = {});

// Runs integrate_adaptive against a known exact value; returns
// {reported error estimate, actual error}.  Used by the honesty battery.
struct ErrorProbe {
  double reported;
  double actual;
};
ErrorProbe estimate_true_error(const Fn& f, const Interval1D& iv, double exact,
                               double abs_tol, double rel_tol,
                               const Budget& budget = {});

}  // namespace sigma2x::quad
