#pragma once

#include <string>
#include <vector>

namespace sigma2x {

// Rational-times-pi-power factor probe.  Given a computed value and the value
// it should reconcile with, it searches the fixed candidate grid
//   {1/16, 1/8, 1/4, 1/2, 1, 2, 4, 8, 16} x {pi^-2, 1, pi^2}
// for the multiplier f that minimizes |computed*f - expected| / |expected|.
// The grid spacing (adjacent candidates differ by a ratio >= 16/pi^2 ~ 1.62,
// or pi^2/8 ~ 1.23 across bands) guarantees a unique best match whenever the
// residual deviation is below ~0.1, far above any tolerance used here.
struct FactorProbe {
  struct Candidate {
    double value;
    std::string label;  // exact form, e.g. "1/4", "2*pi^2", "1/pi^2"
  };

  struct Match {
    double best_factor = 1.0;
    std::string best_factor_label = "1";
    double relative_deviation = 0.0;  // after applying best_factor
    bool ambiguous = false;           // two candidates within tolerance
    double second_deviation = 0.0;
  };

  std::vector<Candidate> candidates;

  static const FactorProbe& default_probe();

  // tol is the relative tolerance used for the ambiguity check.
  Match best(double computed, double expected, double tol) const;
};

}  // namespace sigma2x
