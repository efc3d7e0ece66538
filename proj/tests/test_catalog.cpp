#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "sigma2x/catalog.hpp"
#include "sigma2x/quad1d.hpp"

using namespace sigma2x;

namespace {

constexpr double kPi = std::numbers::pi;

double rel_gap(double a, double b) {
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-300});
}

}  // namespace

TEST_CASE("the catalog lists every reduction stage in order") {
  const auto& all = cat::all_entries();
  REQUIRE(all.size() == 19);
  const std::vector<std::string> want = {
      "E5_X1",  "E5_X2",    "E8_X",      "E9_X",      "E10_X",
      "E11_X",  "E13_X",    "E14_X",     "E15_X",     "E16_X",
      "E17_F",  "E19_INNER", "E20_DFDA", "E21_THETA", "E22_PHI",
      "E23_A",  "E23_B",    "T_SINH1",   "T_SINH2"};
  for (std::size_t i = 0; i < want.size(); ++i) {
    CAPTURE(i);
    CHECK(all[i].id == want[i]);
    CHECK(cat::has_entry(want[i]));
    CHECK_FALSE(all[i].description.empty());
    CHECK_FALSE(all[i].paper_anchor.empty());
    CHECK(all[i].dimension == static_cast<int>(all[i].domain.size()));
    CHECK(all[i].axis_names.size() == all[i].domain.size());
    CHECK(all[i].default_method ==
          (all[i].dimension == 1 ? "gk" : "adaptive"));
  }
  CHECK_FALSE(cat::has_entry("E12_X"));
  CHECK_THROWS_AS(cat::entry("E12_X"), std::out_of_range);
}

TEST_CASE("entry metadata matches the printed normalizations") {
  const auto& x1 = cat::entry("E5_X1");
  CHECK(x1.prefactor_baked);
  CHECK(x1.prefactor_label == "-16*pi");
  CHECK(x1.dimension == 3);
  CHECK(x1.axis_names == std::vector<std::string>{"p", "q", "x"});
  CHECK(x1.paper_anchor == "perform three of the integrations");
  CHECK(x1.singularity_note.find("corner") != std::string::npos);

  const auto& x2 = cat::entry("E5_X2");
  CHECK(x2.prefactor_baked);
  CHECK(x2.prefactor_label == "16*pi");

  const auto& e8 = cat::entry("E8_X");
  CHECK_FALSE(e8.prefactor_baked);
  CHECK(e8.printed_prefactor == doctest::Approx(16.0 * kPi).epsilon(1e-15));

  const auto& e10 = cat::entry("E10_X");
  CHECK(e10.prefactor_label == "8*pi");
  CHECK(e10.axis_names == std::vector<std::string>{"u", "v", "phi"});

  const auto& e16 = cat::entry("E16_X");
  CHECK(e16.prefactor_label == "4*pi^2");
  CHECK(e16.dimension == 1);
  CHECK(e16.paper_anchor == "reduced to a single integral");

  const auto& e15 = cat::entry("E15_X");
  CHECK(e15.singularity_note.find("tanh_sinh on w") != std::string::npos);
  CHECK(e15.domain[1].transform == quad::Interval1D::Transform::tanh_sinh);

  for (const char* id : {"E17_F", "E19_INNER", "E22_PHI"}) {
    CAPTURE(id);
    CHECK(cat::entry(id).parametric);
  }
  CHECK(cat::entry("E17_F").param_name == "a");
  CHECK(cat::entry("E17_F").param_default == 1.0);
  CHECK(cat::entry("E22_PHI").param_name == "c");
  CHECK(cat::entry("E22_PHI").param_default == 4.0);
  CHECK_FALSE(cat::entry("E16_X").parametric);
}

TEST_CASE("kernel parameters and a point value agree with hand evaluation") {
  const cat::FKernelParams k(0.5, 0.5);
  CHECK(k.alpha == 0.75);
  CHECK(k.beta == 0.75);
  CHECK(k.a == 2.125);

  // At p = q = 1/2, x = 0 the kernel collapses to (2/a^2) atan(3/5).
  const double expect = 2.0 / 4.515625 * std::atan(0.6);
  CHECK(cat::eval_F(0.5, 0.5, 0.0) == doctest::Approx(expect).epsilon(1e-15));
}

TEST_CASE("the checked kernel rejects the open-domain boundary") {
  CHECK_THROWS_AS(cat::eval_F(0.0, 0.5, 0.0), std::domain_error);
  CHECK_THROWS_AS(cat::eval_F(1.0, 0.5, 0.0), std::domain_error);
  CHECK_THROWS_AS(cat::eval_F(0.5, 0.0, 0.0), std::domain_error);
  CHECK_THROWS_AS(cat::eval_F(0.5, 1.0, 0.0), std::domain_error);
  CHECK_THROWS_AS(cat::eval_F(0.5, 0.5, -1.0), std::domain_error);
  CHECK_THROWS_AS(cat::eval_F(0.5, 0.5, 1.0), std::domain_error);
  CHECK_NOTHROW(cat::eval_F(0.5, 0.5, 0.999999));
}

TEST_CASE("the kernel approaches its analytic x -> 1 limit") {
  const cat::FKernelParams k(0.5, 0.5);
  const double limit = kPi / (k.a * k.a - 1.0);
  CHECK(rel_gap(cat::f_kernel(0.5, 0.5, 1.0 - 1e-12), limit) < 1e-5);
}

TEST_CASE("folding the kernel halves the even part exactly") {
  std::mt19937_64 rng(20260816);
  std::uniform_real_distribution<double> upq(0.02, 0.98);
  std::uniform_real_distribution<double> ux(-0.98, 0.98);
  double worst = 0.0;
  for (int i = 0; i < 2000; ++i) {
    const double p = upq(rng), q = upq(rng), x = ux(rng);
    const double sum = cat::f_kernel(p, q, x) + cat::f_kernel(p, q, -x);
    const double folded = 2.0 * cat::folded_kernel(p, q, x);
    worst = std::max(worst, rel_gap(sum, folded));
  }
  CHECK(worst <= 1e-12);
}

TEST_CASE("the two-arctangent split agrees with the combined form pointwise") {
  // The identity lives on the angles: atan(sinh r/c) + atan(sinh s/c) equals
  // atan2((sinh r+sinh s)c, c^2 - sinh r sinh s) with c = cos(phi).  Angles
  // are bounded by pi, so the comparison is absolute; the split form loses
  // relative accuracy only where the two arctangents nearly cancel.
  std::mt19937_64 rng(8321);
  std::uniform_real_distribution<double> ur(0.01, 20.0);
  std::uniform_real_distribution<double> ut(-0.99, 0.99);
  std::uniform_real_distribution<double> uphi(0.01, kPi / 2.0 - 0.01);
  double worst = 0.0;
  int negative_second_arg = 0;
  for (int i = 0; i < 2000; ++i) {
    const double r = ur(rng), s = r * ut(rng), c = std::cos(uphi(rng));
    const double shr = std::sinh(r), shs = std::sinh(s);
    const double split = std::atan(shr / c) + std::atan(shs / c);
    const double combined = std::atan2((shr + shs) * c, c * c - shr * shs);
    worst = std::max(worst, std::abs(split - combined));
    if (c * c - shr * shs < 0.0) ++negative_second_arg;
  }
  CHECK(worst <= 1e-13);
  CHECK(negative_second_arg > 100);  // the branchy region was exercised

  // The two catalog entries differ only by that angle factor, so they agree
  // wherever the split form is well conditioned.
  const auto& e11 = cat::entry("E11_X");
  const auto& e13 = cat::entry("E13_X");
  const std::vector<double> pt = {1.3, 0.4, 0.7};
  CHECK(rel_gap(e11.eval(pt, 0.0), e13.eval(pt, 0.0)) <= 1e-13);
}

TEST_CASE("the exponential substitution carries the stated jacobian") {
  // With q = e^-u, p = e^-v, x = sin(phi) the cube-form integrand times
  // e-(u+v) cos(phi) must reproduce the half-line form, printed prefactors
  // included on both sides.
  const auto& e9 = cat::entry("E9_X");
  const auto& e10 = cat::entry("E10_X");
  std::mt19937_64 rng(5150);
  std::uniform_real_distribution<double> uu(0.05, 4.0);
  std::uniform_real_distribution<double> uphi(0.05, kPi / 2.0 - 0.05);
  double worst = 0.0;
  for (int i = 0; i < 2000; ++i) {
    const double u = uu(rng), v = uu(rng), phi = uphi(rng);
    const double p = std::exp(-v), q = std::exp(-u), x = std::sin(phi);
    const double lhs = e9.printed_prefactor * e9.eval({p, q, x}, 0.0) *
                       std::exp(-(u + v)) * std::cos(phi);
    const double rhs = e10.printed_prefactor * e10.eval({u, v, phi}, 0.0);
    worst = std::max(worst, rel_gap(lhs, rhs));
  }
  CHECK(worst <= 1e-12);
}

TEST_CASE("removable limits are filled in on the domain closure") {
  CHECK(cat::eval_entry("E16_X", {0.0}) == std::log(2.0));
  CHECK(std::abs(cat::eval_entry("E16_X", {1e-8}) - std::log(2.0)) <= 1e-12);

  CHECK(cat::eval_entry("E23_A", {0.0}) == 1.0);
  CHECK(cat::eval_entry("E23_A", {kPi / 2.0}) ==
        doctest::Approx(kPi / 2.0).epsilon(1e-15));
  CHECK(cat::eval_entry("T_SINH1", {0.0}) == 1.0);
  CHECK(cat::eval_entry("T_SINH2", {0.0}) == 0.5);

  CHECK(cat::eval_entry("E21_THETA", {0.0}) == 0.0);
  CHECK(cat::eval_entry("E21_THETA", {kPi / 2.0}) == -kPi / 2.0);

  CHECK(cat::eval_entry("E22_PHI", {0.0}, 4.0) ==
        doctest::Approx(-4.0 * kPi).epsilon(1e-15));
  CHECK(cat::eval_entry("E19_INNER", {0.0}, 1.0) ==
        doctest::Approx(std::log(2.0)).epsilon(1e-15));
}

TEST_CASE("the derivative entry handles its branch point and endpoints") {
  const auto lims = cat::eval_dfda_limits();
  CHECK(lims.first == doctest::Approx(kPi * kPi / 4.0 - kPi / 2.0)
                          .epsilon(1e-15));
  CHECK(lims.second == 0.5);

  CHECK(cat::eval_entry("E20_DFDA", {0.0}) == lims.first);
  CHECK(cat::eval_entry("E20_DFDA", {1.0}) == 0.5);
  CHECK(std::abs(cat::eval_entry("E20_DFDA", {1e-6}) - lims.first) <= 1e-4);
  CHECK(std::abs(cat::eval_entry("E20_DFDA", {1.0 - 1e-8}) - 0.5) <= 1e-6);

  // The two algebraic forms must splice continuously at a = 1/2.
  const double below = cat::eval_entry("E20_DFDA", {0.5 - 1e-12});
  const double above = cat::eval_entry("E20_DFDA", {0.5 + 1e-12});
  CHECK(std::abs(below - above) <= 1e-10);

  // Independent oracle: central difference of the parametric log integral.
  auto f_of_a = [](double a) {
    return quad::integrate_adaptive(
               [a](const double r) {
                 return cat::eval_entry("E17_F", {r}, a);
               },
               quad::Interval1D::half_line(0.0), 1e-13, 1e-13)
        .value;
  };
  const double h = 1e-5;
  const double central = (f_of_a(0.5 + h) - f_of_a(0.5 - h)) / (2.0 * h);
  CHECK(std::abs(central - cat::eval_entry("E20_DFDA", {0.5})) <= 1e-6);
}

TEST_CASE("the minus-sign companion integrand stays finite and continuous") {
  // Near r = 0 the integrand has only a logarithmic spike at a = 1.
  CHECK(std::isfinite(cat::eval_e17_minus(1e-12, 1.0)));
  CHECK(std::isfinite(cat::eval_e17_minus(100.0, 1.0)));
  CHECK(std::abs(cat::eval_e17_minus(1.0 - 1e-9, 1.0) -
                 cat::eval_e17_minus(1.0 + 1e-9, 1.0)) <= 1e-7);
  // Away from a = 1 it matches the direct formula.
  const double r = 0.8, a = 0.5;
  const double direct =
      r * std::log1p(-a / std::cosh(r)) / (std::sinh(r) * std::cosh(r));
  CHECK(cat::eval_e17_minus(r, a) == doctest::Approx(direct).epsilon(1e-14));
}

TEST_CASE("checked evaluation polices arity, parameters, and domain") {
  CHECK_THROWS_AS(cat::eval_entry("E12_X", {0.5}), std::out_of_range);
  CHECK_THROWS_AS(cat::eval_entry("E16_X", {0.5, 0.5}), std::invalid_argument);
  CHECK_THROWS_AS(cat::eval_entry("E16_X", {0.5}, 2.0), std::invalid_argument);
  CHECK_THROWS_AS(cat::eval_entry("E17_F", {0.5}), std::invalid_argument);
  CHECK_THROWS_AS(cat::eval_entry("E23_A", {-0.1}), std::domain_error);
  CHECK_THROWS_AS(cat::eval_entry("E23_A", {kPi / 2.0 + 0.1}),
                  std::domain_error);
  CHECK_THROWS_AS(cat::eval_entry("E5_X1", {0.5, 0.5, 2.0}),
                  std::domain_error);
  CHECK_THROWS_AS(cat::eval_entry("E16_X", {-1.0}), std::domain_error);
  CHECK_NOTHROW(cat::eval_entry("E17_F", {0.5}, 1.0));
}
