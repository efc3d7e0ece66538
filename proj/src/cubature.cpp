#include "sigma2x/cubature.hpp"

#include <algorithm>
#include <array>
#include <cfloat>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <queue>
#include <random>
#include <thread>

namespace sigma2x::cube {
namespace {

constexpr double kHalfPi = 1.57079632679489661923;
// Half-width of the tanh-sinh parameter range.  At t = 4 the mapped point
// sits within e^(-pi*sinh 4) ~ 5e-38 of the endpoint, so even an integrable
// inverse-square-root edge keeps its truncated mass below 1e-18.
constexpr double kTsTmax = 4.0;
constexpr int kMaxAxes = 4;

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

std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

struct AxisMapper {
  enum class M { linear, tanh_sinh, log_map } m;
  double lo, hi, span;
};

AxisMapper make_mapper(const quad::Interval1D& iv) {
  iv.validate();
  AxisMapper a;
  a.lo = iv.lo;
  a.hi = iv.hi;
  if (iv.kind == quad::Interval1D::Kind::semi_infinite) {
    a.m = AxisMapper::M::log_map;
    a.span = 1.0;
  } else {
    a.span = iv.hi - iv.lo;
    a.m = iv.transform == quad::Interval1D::Transform::tanh_sinh
              ? AxisMapper::M::tanh_sinh
              : AxisMapper::M::linear;
  }
  return a;
}

// Maps a unit-cube coordinate onto the axis.  Returns the jacobian factor,
// or 0.0 when the node collapses onto a boundary (the integrand must not be
// evaluated there; the discarded mass is below double resolution).
double map_axis(const AxisMapper& a, double xi, double& x) {
  switch (a.m) {
    case AxisMapper::M::linear:
      x = a.lo + a.span * xi;
      return a.span;
    case AxisMapper::M::log_map:
      if (xi <= 0.0) return 0.0;
      x = a.lo - std::log(xi);
      return 1.0 / xi;
    case AxisMapper::M::tanh_sinh: {
      const double t = kTsTmax * (2.0 * xi - 1.0);
      const double u = kHalfPi * std::sinh(t);
      const double e = std::exp(-2.0 * std::abs(u));
      const double near = e / (1.0 + e);  // fractional distance to endpoint
      const double far = 1.0 / (1.0 + e);
      x = (u >= 0.0) ? a.hi - a.span * near : a.lo + a.span * near;
      if (x <= a.lo || x >= a.hi) return 0.0;
      return a.span * 2.0 * kTsTmax * kHalfPi * std::cosh(t) * 2.0 * near *
             far;
    }
  }
  return 0.0;
}

struct MappedIntegrand {
  const NdFn* f;
  std::vector<AxisMapper> ax;

  // Sets g = f(x(xi)) * jacobian (or 0 on a boundary collision).  Returns
  // false when f itself produced a non-finite value; x then holds the
  // offending coordinates.
  bool try_eval(const double* xi, std::vector<double>& x, double& g) const {
    double jac = 1.0;
    for (size_t i = 0; i < ax.size(); ++i) {
      double xv;
      const double j = map_axis(ax[i], xi[i], xv);
      if (j == 0.0) {
        g = 0.0;
        return true;
      }
      x[i] = xv;
      jac *= j;
    }
    g = (*f)(x)*jac;
    return std::isfinite(g);
  }
};

void parallel_for(long ntasks, int threads,
                  const std::function<void(long)>& task) {
  threads = std::max(1, threads);
  if (threads == 1 || ntasks <= 1) {
    for (long i = 0; i < ntasks; ++i) task(i);
    return;
  }
  const int nw = static_cast<int>(std::min<long>(threads, ntasks));
  std::vector<std::exception_ptr> errs(nw);
  std::vector<std::thread> pool;
  pool.reserve(nw - 1);
  for (int w = 1; w < nw; ++w)
    pool.emplace_back([&, w] {
      try {
        for (long i = w; i < ntasks; i += nw) task(i);
      } catch (...) {
        errs[w] = std::current_exception();
      }
    });
  try {
    for (long i = 0; i < ntasks; i += nw) task(i);
  } catch (...) {
    errs[0] = std::current_exception();
  }
  for (auto& t : pool) t.join();
  for (auto& e : errs)
    if (e) std::rethrow_exception(e);
}

// ---------------------------------------------------------------------------
// Genz-Malik degree-7 rule with embedded degree-5 estimate.

struct GMRule {
  int n = 0;
  int npts = 0;
  std::vector<double> offs;  // npts * n offsets in [-1,1]^n
  std::vector<double> w7, w5;
};

GMRule make_rule(int n) {
  const double l2 = std::sqrt(9.0 / 70.0);
  const double l4 = std::sqrt(9.0 / 10.0);
  const double l5 = std::sqrt(9.0 / 19.0);
  const double nn = n;
  // Weights below are normalised so that a constant integrates to the
  // region volume.
  const double w1 = (12824.0 - 9120.0 * nn + 400.0 * nn * nn) / 19683.0;
  const double w2 = 980.0 / 6561.0;
  const double w3 = (1820.0 - 400.0 * nn) / 19683.0;
  const double w4 = 200.0 / 19683.0;
  const double w5c = (6859.0 / 19683.0) / std::ldexp(1.0, n);
  const double e1 = (729.0 - 950.0 * nn + 50.0 * nn * nn) / 729.0;
  const double e2 = 245.0 / 486.0;
  const double e3 = (265.0 - 100.0 * nn) / 1458.0;
  const double e4 = 25.0 / 729.0;

  GMRule R;
  R.n = n;
  auto push = [&R, n](const std::vector<double>& p, double a, double b) {
    R.offs.insert(R.offs.end(), p.begin(), p.end());
    R.w7.push_back(a);
    R.w5.push_back(b);
    (void)n;
  };
  std::vector<double> p(n, 0.0);
  push(p, w1, e1);
  for (int i = 0; i < n; ++i)
    for (double s : {-l2, l2}) {
      std::fill(p.begin(), p.end(), 0.0);
      p[i] = s;
      push(p, w2, e2);
    }
  for (int i = 0; i < n; ++i)
    for (double s : {-l4, l4}) {
      std::fill(p.begin(), p.end(), 0.0);
      p[i] = s;
      push(p, w3, e3);
    }
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      for (double si : {-l4, l4})
        for (double sj : {-l4, l4}) {
          std::fill(p.begin(), p.end(), 0.0);
          p[i] = si;
          p[j] = sj;
          push(p, w4, e4);
        }
  for (int mask = 0; mask < (1 << n); ++mask) {
    for (int i = 0; i < n; ++i) p[i] = (mask >> i & 1) ? l5 : -l5;
    push(p, w5c, 0.0);
  }
  R.npts = static_cast<int>(R.w7.size());
  return R;
}

struct RegionId {
  std::uint64_t hi = 0, lo = 0;
};
bool id_less(const RegionId& a, const RegionId& b) {
  return a.hi != b.hi ? a.hi < b.hi : a.lo < b.lo;
}

struct Region {
  std::array<double, kMaxAxes> c{}, h{};
  double v7 = 0.0, err = 0.0;
  RegionId id;
  int depth = 0;
};

struct WorseFirst {
  // priority_queue keeps the "largest" on top; we want largest error, with
  // the smaller region id winning ties so pop order is deterministic.
  bool operator()(const Region& a, const Region& b) const {
    if (a.err != b.err) return a.err < b.err;
    return id_less(b.id, a.id);
  }
};

struct RuleOut {
  double v7, err;
};

RuleOut apply_rule(const GMRule& R, const MappedIntegrand& mi, const Region& r,
                   std::vector<double>& xbuf) {
  double vol = 1.0;
  for (int i = 0; i < R.n; ++i) vol *= 2.0 * r.h[i];
  double s7 = 0.0, s5 = 0.0;
  double xi[kMaxAxes];
  for (int p = 0; p < R.npts; ++p) {
    for (int i = 0; i < R.n; ++i) xi[i] = r.c[i] + R.offs[p * R.n + i] * r.h[i];
    double g;
    if (!mi.try_eval(xi, xbuf, g)) throw CubatureEvalFailure(xbuf);
    s7 += R.w7[p] * g;
    s5 += R.w5[p] * g;
  }
  return {vol * s7, std::abs(vol * (s7 - s5))};
}

Region make_child(const Region& parent, int axis, int side) {
  Region ch = parent;
  ch.h[axis] *= 0.5;
  ch.c[axis] += (side ? ch.h[axis] : -ch.h[axis]);
  if (side) {
    if (parent.depth < 64)
      ch.id.lo |= std::uint64_t{1} << parent.depth;
    else
      ch.id.hi |= std::uint64_t{1} << (parent.depth - 64);
  }
  ch.depth = parent.depth + 1;
  return ch;
}

}  // namespace

CubatureResult integrate_genz_malik(const NdFn& f, const Domain& dom,
                                    const Options& opt) {
  const int n = static_cast<int>(dom.size());
  if (n < 1 || n > kMaxAxes)
    throw std::invalid_argument("genz_malik supports 1 to 4 axes");
  MappedIntegrand mi{&f, {}};
  for (const auto& iv : dom) mi.ax.push_back(make_mapper(iv));
  const GMRule rule = make_rule(n);

  Region root;
  for (int i = 0; i < n; ++i) {
    root.c[i] = 0.5;
    root.h[i] = 0.5;
  }
  {
    std::vector<double> xbuf(n);
    RuleOut o = apply_rule(rule, mi, root, xbuf);
    root.v7 = o.v7;
    root.err = o.err;
  }

  std::priority_queue<Region, std::vector<Region>, WorseFirst> heap;
  std::vector<Region> frozen;
  heap.push(root);
  double val_run = root.v7;
  double err_run = root.err;
  long rule_calls = 1;
  long splits = 0;
  quad::Status status = quad::Status::converged;

  std::vector<Region> parents;
  std::vector<std::pair<Region, Region>> children;
  while (true) {
    const double target =
        std::max(opt.abs_tol, opt.rel_tol * std::abs(val_run));
    if (err_run <= target) break;
    long k = std::min<long>(opt.batch, static_cast<long>(heap.size()));
    const long evals_left =
        opt.max_evals - rule_calls * static_cast<long>(rule.npts);
    k = std::min(k, evals_left / (2 * rule.npts));
    if (heap.size() + frozen.size() > 8'000'000) k = 0;
    if (k <= 0) {
      status = heap.empty() ? quad::Status::max_depth : quad::Status::max_evals;
      break;
    }
    parents.clear();
    while (static_cast<long>(parents.size()) < k && !heap.empty()) {
      Region r = heap.top();
      heap.pop();
      if (r.depth >= 127) {
        frozen.push_back(r);
        continue;
      }
      parents.push_back(r);
    }
    if (parents.empty()) {
      status = quad::Status::max_depth;
      break;
    }
    children.assign(parents.size(), {});
    parallel_for(static_cast<long>(parents.size()), opt.threads, [&](long i) {
      const Region& par = parents[i];
      int axis = 0;
      for (int a = 1; a < n; ++a)
        if (par.h[a] > par.h[axis]) axis = a;
      Region lo = make_child(par, axis, 0);
      Region hi = make_child(par, axis, 1);
      std::vector<double> xbuf(n);
      RuleOut ol = apply_rule(rule, mi, lo, xbuf);
      RuleOut oh = apply_rule(rule, mi, hi, xbuf);
      lo.v7 = ol.v7;
      lo.err = ol.err;
      hi.v7 = oh.v7;
      hi.err = oh.err;
      children[i] = {lo, hi};
    });
    for (size_t i = 0; i < parents.size(); ++i) {
      val_run += children[i].first.v7 + children[i].second.v7 - parents[i].v7;
      err_run +=
          children[i].first.err + children[i].second.err - parents[i].err;
      heap.push(children[i].first);
      heap.push(children[i].second);
    }
    rule_calls += 2 * static_cast<long>(parents.size());
    splits += static_cast<long>(parents.size());
  }

  std::vector<Region> leaves;
  leaves.reserve(heap.size() + frozen.size());
  while (!heap.empty()) {
    leaves.push_back(heap.top());
    heap.pop();
  }
  leaves.insert(leaves.end(), frozen.begin(), frozen.end());
  std::sort(leaves.begin(), leaves.end(), [](const Region& a, const Region& b) {
    if (a.id.hi != b.id.hi || a.id.lo != b.id.lo) return id_less(a.id, b.id);
    return a.depth < b.depth;
  });
  Kahan val, err;
  for (const auto& r : leaves) {
    val.add(r.v7);
    err.add(r.err);
  }

  CubatureResult out;
  out.value = val.sum();
  out.error_estimate = err.sum();
  out.n_evals = rule_calls * rule.npts;
  out.n_regions = static_cast<long>(leaves.size());
  out.status = status;
  return out;
}

CubatureResult integrate_iterated(const NdFn& f, const Domain& dom,
                                  const Options& opt,
                                  const std::vector<int>& axis_order) {
  const int n = static_cast<int>(dom.size());
  if (n < 1) throw std::invalid_argument("iterated requires at least one axis");
  std::vector<int> order = axis_order;
  if (order.empty()) {
    order.resize(n);
    std::iota(order.begin(), order.end(), 0);
  }
  {
    std::vector<int> check = order;
    std::sort(check.begin(), check.end());
    for (int i = 0; i < n; ++i)
      if (check.size() != static_cast<size_t>(n) || check[i] != i)
        throw std::invalid_argument("axis_order must permute 0..n-1");
  }

  // Inner levels run at tolerances tightened by a fixed ratio so their
  // error does not dominate the outer estimate.
  constexpr double kRatio = 1.0 / 16.0;
  const double tol0 = opt.abs_tol > 0.0 ? opt.abs_tol : opt.rel_tol;
  std::vector<double> abs_tols(n), rel_tols(n);
  for (int k = 0; k < n; ++k) {
    abs_tols[k] = tol0 * std::pow(kRatio, k);
    rel_tols[k] = opt.rel_tol * std::pow(kRatio, k);
  }
  // Every level is an adaptive 1D integration; give each one a generous
  // budget of its own (the interesting structure often sits entirely in one
  // axis) while keeping the innermost global counter as the honest total.
  quad::Budget budget;
  budget.max_evals = std::clamp<long>(
      static_cast<long>(std::pow(static_cast<double>(opt.max_evals),
                                 1.0 / static_cast<double>(n))),
      50'000, quad::Budget{}.max_evals);

  long fcalls = 0;
  long level_calls = 0;
  quad::Status worst = quad::Status::converged;
  std::vector<double> x(n);
  quad::QuadResult outer;

  std::function<double(int)> level = [&](int k) -> double {
    const int ax = order[k];
    quad::Fn g = [&, k, ax](double xv) -> double {
      x[ax] = xv;
      if (k == n - 1) {
        ++fcalls;
        if (fcalls > opt.max_evals && worst == quad::Status::converged)
          worst = quad::Status::max_evals;
        if (fcalls > 4 * opt.max_evals)
          throw std::runtime_error(
              "iterated cubature exceeded 4x the evaluation budget");
        const double v = f(x);
        if (!std::isfinite(v)) throw CubatureEvalFailure(x);
        return v;
      }
      return level(k + 1);
    };
    quad::QuadResult r =
        quad::integrate_adaptive(g, dom[ax], abs_tols[k], rel_tols[k], budget);
    ++level_calls;
    if (r.status != quad::Status::converged &&
        worst == quad::Status::converged)
      worst = r.status;
    if (k == 0) outer = r;
    return r.value;
  };
  const double value = level(0);

  // Reported error: the outer estimate plus each inner level's tolerance
  // times the measure it is integrated over (1 for mapped half-lines).
  double err = outer.error_estimate;
  double measure = 1.0;
  for (int k = 1; k < n; ++k) {
    const auto& iv = dom[order[k - 1]];
    measure *= iv.kind == quad::Interval1D::Kind::finite ? iv.hi - iv.lo : 1.0;
    err += abs_tols[k] * measure;
  }

  CubatureResult out;
  out.value = value;
  out.error_estimate = err;
  out.n_evals = fcalls;
  out.n_regions = level_calls;
  out.status = worst;
  return out;
}

CubatureResult integrate_mc(const NdFn& f, const Domain& dom, long n_samples,
                            std::uint64_t seed, const Options& opt) {
  const int n = static_cast<int>(dom.size());
  if (n < 1) throw std::invalid_argument("mc requires at least one axis");
  if (n_samples <= 0) throw std::invalid_argument("mc requires n_samples > 0");
  MappedIntegrand mi{&f, {}};
  for (const auto& iv : dom) mi.ax.push_back(make_mapper(iv));

  constexpr long kChunk = 1L << 16;
  const long nchunks = (n_samples + kChunk - 1) / kChunk;
  struct ChunkOut {
    double s = 0.0, s2 = 0.0;
    double mn = std::numeric_limits<double>::infinity();
    double mx = -std::numeric_limits<double>::infinity();
    long rejects = 0;
  };
  std::vector<ChunkOut> outs(nchunks);

  parallel_for(nchunks, opt.threads, [&](long c) {
    std::mt19937_64 rng(splitmix64(seed + static_cast<std::uint64_t>(c)));
    const long m = std::min(kChunk, n_samples - c * kChunk);
    Kahan ks, ks2;
    ChunkOut& o = outs[c];
    std::vector<double> x(n);
    double xi[kMaxAxes > 0 ? kMaxAxes : 1];
    std::vector<double> xiv;
    double* xs = xi;
    if (n > kMaxAxes) {
      xiv.resize(n);
      xs = xiv.data();
    }
    for (long j = 0; j < m; ++j) {
      double g;
      int attempts = 0;
      while (true) {
        for (int i = 0; i < n; ++i)
          xs[i] = static_cast<double>(rng() >> 11) * 0x1.0p-53;
        if (mi.try_eval(xs, x, g)) break;
        ++o.rejects;
        if (++attempts > 100) throw CubatureEvalFailure(x);
      }
      ks.add(g);
      ks2.add(g * g);
      o.mn = std::min(o.mn, g);
      o.mx = std::max(o.mx, g);
    }
    o.s = ks.sum();
    o.s2 = ks2.sum();
  });

  Kahan S, S2;
  double mn = std::numeric_limits<double>::infinity();
  double mx = -std::numeric_limits<double>::infinity();
  long rejects = 0;
  for (const auto& o : outs) {
    S.add(o.s);
    S2.add(o.s2);
    mn = std::min(mn, o.mn);
    mx = std::max(mx, o.mx);
    rejects += o.rejects;
  }
  if (rejects > 1e-6 * static_cast<double>(n_samples))
    throw std::runtime_error("mc rejection rate exceeded 1e-6");

  const double N = static_cast<double>(n_samples);
  const double mean = S.sum() / N;
  double std_err = 0.0;
  if (mn != mx && n_samples > 1) {
    const double var = std::max(0.0, (S2.sum() - N * mean * mean) / (N - 1.0));
    std_err = std::sqrt(var / N);
  }

  CubatureResult out;
  out.value = mean;
  out.error_estimate = std_err;
  out.n_evals = n_samples + rejects;
  out.n_regions = nchunks;
  out.status = quad::Status::converged;
  out.seed = seed;
  return out;
}

}  // namespace sigma2x::cube
