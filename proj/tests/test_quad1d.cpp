#include <doctest.h>

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "sigma2x/constants.hpp"
#include "sigma2x/quad1d.hpp"

using namespace sigma2x;
using namespace sigma2x::constants;
using quad::Budget;
using quad::Interval1D;
using quad::Status;

namespace {

constexpr double kPi = std::numbers::pi;

double sinc_recip(double r) {  // r / sinh r with the removable point filled in
  if (r == 0.0) return 1.0;
  if (r > 350.0) return 0.0;
  return r / std::sinh(r);
}

}  // namespace

TEST_CASE("adaptive rule is exact-to-roundoff on smooth finite integrals") {
  auto r = quad::integrate_adaptive([](double x) { return x * x; },
                                    Interval1D::bounded(0.0, 1.0), 1e-14,
                                    1e-14);
  CHECK(r.status == Status::converged);
  CHECK(r.n_evals >= 15);
  CHECK(std::abs(r.value - 1.0 / 3.0) <= 1e-15);
  CHECK(r.error_estimate <= 1e-13);
}

TEST_CASE("half-line map reproduces the exponential moment integrals") {
  auto one = quad::integrate_adaptive([](double x) { return std::exp(-x); },
                                      Interval1D::half_line(0.0), 1e-13, 1e-13);
  CHECK(one.status == Status::converged);
  CHECK(std::abs(one.value - 1.0) <= 1e-13);

  auto six = quad::integrate_adaptive(
      [](double x) { return x * x * x * std::exp(-x); },
      Interval1D::half_line(0.0), 1e-12, 1e-12);
  CHECK(std::abs(six.value - 6.0) <= 1e-11);
}

TEST_CASE("kernel moment integrals hit their closed forms") {
  const double g = get(Name::CATALAN);
  const double z3 = get(Name::ZETA3);

  SUBCASE("phi / sin phi over the quarter period") {
    auto r = quad::integrate_adaptive(
        [](double phi) { return phi == 0.0 ? 1.0 : phi / std::sin(phi); },
        Interval1D::bounded(0.0, kPi / 2.0), 1e-13, 1e-13);
    CHECK(r.status == Status::converged);
    CHECK(std::abs(r.value - 2.0 * g) <= 1e-13);
  }

  SUBCASE("phi^2 / sin phi over the quarter period") {
    auto r = quad::integrate_adaptive(
        [](double phi) { return phi == 0.0 ? 0.0 : phi * phi / std::sin(phi); },
        Interval1D::bounded(0.0, kPi / 2.0), 1e-13, 1e-13);
    CHECK(std::abs(r.value - (2.0 * kPi * g - 3.5 * z3)) <= 1e-13);
  }

  SUBCASE("r / sinh r on the half line, log map and tanh-sinh agree") {
    const double exact = kPi * kPi / 4.0;
    auto gk = quad::integrate_adaptive(sinc_recip, Interval1D::half_line(0.0),
                                       1e-13, 1e-13);
    auto ts = quad::integrate_adaptive(
        sinc_recip, Interval1D::half_line(0.0, Interval1D::Transform::tanh_sinh),
        1e-13, 1e-13);
    CHECK(gk.status == Status::converged);
    CHECK(ts.status == Status::converged);
    CHECK(std::abs(gk.value - exact) <= 1e-12);
    CHECK(std::abs(ts.value - exact) <= 1e-12);
  }

  SUBCASE("r / sinh 2r halves the scale") {
    auto r = quad::integrate_adaptive(
        [](double x) { return x == 0.0 ? 0.5 : x / std::sinh(2.0 * x); },
        Interval1D::half_line(0.0), 1e-13, 1e-13);
    CHECK(std::abs(r.value - kPi * kPi / 16.0) <= 1e-12);
  }
}

TEST_CASE("tanh-sinh absorbs integrable endpoint singularities") {
  auto r = quad::integrate_tanh_sinh(
      [](double x) { return 1.0 / std::sqrt(x); }, 0.0, 1.0, 1e-12, 1e-12);
  CHECK(r.status == Status::converged);
  CHECK(std::abs(r.value - 2.0) <= 1e-12);

  auto logsqrt = quad::integrate_tanh_sinh(
      [](double x) { return std::log(x) / std::sqrt(x); }, 0.0, 1.0, 1e-12,
      1e-12);
  CHECK(logsqrt.status == Status::converged);
  CHECK(std::abs(logsqrt.value + 4.0) <= 1e-12);
}

TEST_CASE("quantized right-edge singularities are not claimed as converged") {
  // Writing the arcsine density as 1/sqrt(x(1-x)) quantizes 1-x near the
  // right endpoint, which caps the achievable accuracy; the rule must refuse
  // to claim convergence there rather than return a confident wrong answer.
  auto naive = quad::integrate_tanh_sinh(
      [](double x) { return 1.0 / std::sqrt(x * (1.0 - x)); }, 0.0, 1.0, 1e-12,
      1e-12);
  CHECK(naive.status != Status::converged);

  // Splitting at the midpoint puts each singularity at a left edge, where
  // the abscissa itself is the small quantity; this form is exact.
  auto half = quad::integrate_tanh_sinh(
      [](double u) { return 1.0 / std::sqrt(u * (1.0 - u)); }, 0.0, 0.5, 1e-13,
      1e-13);
  CHECK(half.status == Status::converged);
  CHECK(std::abs(2.0 * half.value - kPi) <= 1e-12);
}

TEST_CASE("tanh-sinh never evaluates the integrand at the endpoints") {
  bool touched_edge = false;
  auto r = quad::integrate_tanh_sinh(
      [&](double x) {
        if (x <= 0.0 || x >= 1.0) touched_edge = true;
        return std::log(x) * std::log1p(-x);
      },
      0.0, 1.0, 1e-12, 1e-12);
  CHECK_FALSE(touched_edge);
  CHECK(std::abs(r.value - (2.0 - kPi * kPi / 6.0)) <= 1e-12);
}

TEST_CASE("interval additivity and linearity hold to roundoff") {
  auto f = [](double x) { return std::exp(x) * std::cos(3.0 * x); };
  auto whole =
      quad::integrate_adaptive(f, Interval1D::bounded(0.0, 1.0), 1e-14, 1e-14);
  auto left =
      quad::integrate_adaptive(f, Interval1D::bounded(0.0, 0.37), 1e-14, 1e-14);
  auto right =
      quad::integrate_adaptive(f, Interval1D::bounded(0.37, 1.0), 1e-14, 1e-14);
  CHECK(std::abs(whole.value - (left.value + right.value)) <= 1e-14);

  auto g = [](double x) { return 1.0 / (1.0 + x * x); };
  auto combo = quad::integrate_adaptive(
      [&](double x) { return 2.0 * f(x) + 3.0 * g(x); },
      Interval1D::bounded(0.0, 1.0), 1e-14, 1e-14);
  auto gq =
      quad::integrate_adaptive(g, Interval1D::bounded(0.0, 1.0), 1e-14, 1e-14);
  CHECK(std::abs(combo.value - (2.0 * whole.value + 3.0 * gq.value)) <= 1e-13);
}

TEST_CASE("semi-infinite truncation cross-check matches the mapped result") {
  const double exact = kPi * kPi / 4.0;
  auto trunc = quad::integrate_truncated(sinc_recip, 0.0, 1e-13, 1e-13);
  CHECK(trunc.status == Status::converged);
  // Tail beyond R = 40 is ~2*41*e^-40 ~ 3e-16; both routes must agree.
  CHECK(std::abs(trunc.value - exact) <= 1e-12);
  auto helper = quad::integrate_semi_infinite(sinc_recip, 0.0, 1e-13, 1e-13);
  CHECK(std::abs(helper.value - trunc.value) <= 1e-12);
}

TEST_CASE("reported error bounds are honest on a known-value battery") {
  struct Case {
    quad::Fn f;
    Interval1D iv;
    double exact;
  };
  const double g = get(Name::CATALAN);
  std::vector<Case> battery = {
      {[](double x) { return x * x; }, Interval1D::bounded(0.0, 1.0),
       1.0 / 3.0},
      {[](double x) { return std::exp(x) * std::cos(3.0 * x); },
       Interval1D::bounded(0.0, 1.0),
       (std::exp(1.0) * (std::cos(3.0) + 3.0 * std::sin(3.0)) - 1.0) / 10.0},
      {[](double phi) { return phi == 0.0 ? 1.0 : phi / std::sin(phi); },
       Interval1D::bounded(0.0, kPi / 2.0), 2.0 * g},
      {sinc_recip, Interval1D::half_line(0.0), kPi * kPi / 4.0},
      {[](double x) { return std::exp(-x) * std::sin(x); },
       Interval1D::half_line(0.0), 0.5},
  };
  for (std::size_t i = 0; i < battery.size(); ++i) {
    CAPTURE(i);
    auto probe = quad::estimate_true_error(battery[i].f, battery[i].iv,
                                           battery[i].exact, 1e-12, 1e-12);
    // True error never exceeds ten times the claim (plus a roundoff floor).
    CHECK(probe.actual <=
          10.0 * probe.reported + 1e-15 * std::abs(battery[i].exact) + 1e-16);
  }
}

TEST_CASE("non-finite integrand values surface as evaluation failures") {
  auto bad = [](double x) {
    return x > 0.5 ? std::numeric_limits<double>::quiet_NaN() : 1.0;
  };
  bool threw = false;
  try {
    quad::integrate_adaptive(bad, Interval1D::bounded(0.0, 1.0), 1e-10, 1e-10);
  } catch (const quad::EvaluationFailure& e) {
    threw = true;
    CHECK(e.abscissa > 0.5);
    CHECK(e.abscissa <= 1.0);
    CHECK(std::string(e.what()).find("non-finite") != std::string::npos);
  }
  CHECK(threw);
}

TEST_CASE("budget exhaustion is a status, not an exception") {
  // A sharp moving peak that needs many levels; cap the budget well below.
  auto nasty = [](double x) { return 1.0 / (1e-12 + (x - 0.3) * (x - 0.3)); };

  Budget tiny_evals;
  tiny_evals.max_evals = 200;
  auto r1 = quad::integrate_adaptive(nasty, Interval1D::bounded(0.0, 1.0),
                                     1e-14, 1e-14, tiny_evals);
  CHECK(r1.status == Status::max_evals);
  CHECK(r1.n_evals <= 2 * tiny_evals.max_evals);

  Budget shallow;
  shallow.max_depth = 2;
  auto r2 = quad::integrate_adaptive(nasty, Interval1D::bounded(0.0, 1.0),
                                     1e-14, 1e-14, shallow);
  CHECK(r2.status == Status::max_depth);

  Budget few_levels;
  few_levels.ts_level_cap = 2;
  auto r3 = quad::integrate_tanh_sinh([](double x) { return 1.0 / std::sqrt(x); },
                                      0.0, 1.0, 1e-14, 1e-14, few_levels);
  CHECK(r3.status != Status::converged);
}

TEST_CASE("interval descriptors reject inconsistent configurations") {
  CHECK_THROWS_AS(
      Interval1D::bounded(0.0, 1.0, Interval1D::Transform::log_map).validate(),
      std::invalid_argument);
  CHECK_THROWS_AS(
      Interval1D::half_line(0.0, Interval1D::Transform::none).validate(),
      std::invalid_argument);
  CHECK_THROWS_AS(Interval1D::bounded(1.0, 0.0).validate(),
                  std::invalid_argument);
  CHECK_NOTHROW(Interval1D::bounded(0.0, 1.0).validate());
  CHECK_NOTHROW(Interval1D::half_line(0.0).validate());
  CHECK_NOTHROW(
      Interval1D::half_line(0.0, Interval1D::Transform::tanh_sinh).validate());
}
