#pragma once

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "sigma2x/quad1d.hpp"

namespace sigma2x::cube {

// A box domain is one Interval1D per axis, in catalog axis order.  All
// engines parametrise the box over the unit cube: finite axes map linearly
// (or through tanh-sinh when the axis declares it), semi-infinite axes map
// through x = lo - ln(xi).  Jacobians are folded into the integrand values.
using Domain = std::vector<quad::Interval1D>;

using NdFn = std::function<double(const std::vector<double>&)>;

// Thrown when the integrand returns a non-finite value; carries the full
// coordinate vector of the offending point.
struct CubatureEvalFailure : std::runtime_error {
  std::vector<double> coords;
  explicit CubatureEvalFailure(const std::vector<double>& x)
      : std::runtime_error(describe(x)), coords(x) {}

 private:
  static std::string describe(const std::vector<double>& x) {
    std::string s = "non-finite integrand value at (";
    for (size_t i = 0; i < x.size(); ++i)
      s += (i ? ", " : "") + std::to_string(x[i]);
    return s + ")";
  }
};

struct Options {
  double abs_tol = 0.0;
  double rel_tol = 1e-7;
  long max_evals = 100'000'000;
  int threads = 1;
  int batch = 64;  // regions refined per synchronous batch
};

struct CubatureResult {
  double value = 0.0;
  double error_estimate = 0.0;  // Monte Carlo: the standard error
  long n_evals = 0;
  long n_regions = 0;  // adaptive: final region count; MC: chunks consumed
  quad::Status status = quad::Status::converged;
  std::uint64_t seed = 0;  // MC only; echoed for reproducibility
};

// Globally adaptive Genz-Malik degree-7 rule with the embedded degree-5
// error estimate.  Refinement is batch-synchronous: each round pops the
// `batch` worst regions (error descending, region id ascending), splits each
// along its widest unit-cube axis, and evaluates children in parallel.  The
// final reduction sums regions in id order with compensation, so the result
// is bit-identical for any thread count.
CubatureResult integrate_genz_malik(const NdFn& f, const Domain& dom,
                                    const Options& opt = {});

// Nested 1D quadrature, outermost axis first.  `axis_order` permutes the
// nesting (default: domain order).  Inner tolerances tighten by a fixed
// ratio per level; the reported error adds each level's tolerance times the
// measure it integrates over.
CubatureResult integrate_iterated(const NdFn& f, const Domain& dom,
                                  const Options& opt = {},
                                  const std::vector<int>& axis_order = {});

// Plain Monte Carlo over the same unit-cube parametrisation.  Samples are
// drawn in fixed chunks of 65536, each chunk's generator seeded from
// splitmix64(seed + chunk_index), and chunk sums are combined in chunk
// order, so the estimate is independent of thread count and reproducible
// for a given seed.  Non-finite draws are rejected and redrawn; a rejection
// rate above 1e-6 aborts.  error_estimate is the standard error of the mean.
CubatureResult integrate_mc(const NdFn& f, const Domain& dom, long n_samples,
                            std::uint64_t seed, const Options& opt = {});

}  // namespace sigma2x::cube
