#include "sigma2x/probe.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace sigma2x {

const FactorProbe& FactorProbe::default_probe() {
  static const FactorProbe p = [] {
    FactorProbe fp;
    const double pi = 3.14159265358979323846;
    const double pi2 = pi * pi;
    struct Rat {
      double v;
      const char* s;
    };
    const Rat rats[] = {{1.0 / 16, "1/16"}, {1.0 / 8, "1/8"}, {1.0 / 4, "1/4"},
                        {1.0 / 2, "1/2"},   {1.0, "1"},       {2.0, "2"},
                        {4.0, "4"},         {8.0, "8"},       {16.0, "16"}};
    for (const auto& r : rats)
      fp.candidates.push_back({r.v / pi2, std::string(r.s) + "/pi^2"});
    for (const auto& r : rats) fp.candidates.push_back({r.v, r.s});
    for (const auto& r : rats)
      fp.candidates.push_back({r.v * pi2, std::string(r.s) + "*pi^2"});
    return fp;
  }();
  return p;
}

FactorProbe::Match FactorProbe::best(double computed, double expected,
                                     double tol) const {
  if (candidates.empty()) throw std::logic_error("empty factor probe");
  const double scale =
      std::max(std::abs(expected), std::numeric_limits<double>::min());
  Match m;
  double best_dev = std::numeric_limits<double>::infinity();
  double second = std::numeric_limits<double>::infinity();
  for (const auto& c : candidates) {
    double dev = std::abs(computed * c.value - expected) / scale;
    if (dev < best_dev) {
      second = best_dev;
      best_dev = dev;
      m.best_factor = c.value;
      m.best_factor_label = c.label;
    } else if (dev < second) {
      second = dev;
    }
  }
  m.relative_deviation = best_dev;
  m.second_deviation = second;
  m.ambiguous = (second <= tol);
  return m;
}

}  // namespace sigma2x
