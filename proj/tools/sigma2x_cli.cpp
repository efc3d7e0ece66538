// Batch front end: catalog listing, single-integral computation, chain
// verification, and the constant table.  Exit codes: 0 success (verify:
// verdict pass), 1 verify verdict fail, 2 non-convergence or evaluation
// failure, 3 usage errors (unknown ids, bad flags, missing --seed).

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "sigma2x/catalog.hpp"
#include "sigma2x/chain.hpp"
#include "sigma2x/constants.hpp"
#include "sigma2x/cubature.hpp"
#include "sigma2x/quad1d.hpp"

namespace {

using sigma2x::cat::Entry;

std::string fmt17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string axis_string(const Entry& e) {
  std::string s;
  for (int i = 0; i < e.dimension; ++i) {
    const auto& iv = e.domain[i];
    if (i) s += ", ";
    s += e.axis_names[i];
    if (iv.kind == sigma2x::quad::Interval1D::Kind::semi_infinite) {
      s += ":[" + fmt17(iv.lo) + ",inf)";
    } else {
      s += ":[" + fmt17(iv.lo) + "," + fmt17(iv.hi) + "]";
    }
    using Tr = sigma2x::quad::Interval1D::Transform;
    if (iv.transform == Tr::tanh_sinh) s += "~ts";
    if (iv.transform == Tr::log_map) s += "~log";
  }
  return s;
}

std::string transform_name(sigma2x::quad::Interval1D::Transform t) {
  using Tr = sigma2x::quad::Interval1D::Transform;
  switch (t) {
    case Tr::log_map: return "log_map";
    case Tr::tanh_sinh: return "tanh_sinh";
    default: return "none";
  }
}

int cmd_list(bool as_json, const std::string& filter) {
  const auto& entries = sigma2x::cat::all_entries();
  const auto& steps = sigma2x::chain::all_step_ids();
  const auto matches = [&filter](const std::string& id) {
    return filter.empty() || id.find(filter) != std::string::npos;
  };
  if (as_json) {
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const auto& e : entries) {
      if (!matches(e.id)) continue;
      nlohmann::ordered_json j;
      j["type"] = "entry";
      j["id"] = e.id;
      j["dimension"] = e.dimension;
      j["axes"] = e.axis_names;
      nlohmann::ordered_json dom = nlohmann::ordered_json::array();
      for (const auto& iv : e.domain) {
        nlohmann::ordered_json d;
        d["lo"] = iv.lo;
        if (iv.kind == sigma2x::quad::Interval1D::Kind::finite)
          d["hi"] = iv.hi;
        d["transform"] = transform_name(iv.transform);
        dom.push_back(std::move(d));
      }
      j["domain"] = std::move(dom);
      j["anchor"] = e.paper_anchor;
      j["description"] = e.description;
      j["parametric"] = e.parametric;
      if (e.parametric) {
        j["param_name"] = e.param_name;
        j["param_default"] = e.param_default;
      }
      j["prefactor"] = e.prefactor_label;
      j["prefactor_baked"] = e.prefactor_baked;
      if (!e.singularity_note.empty()) j["singularity"] = e.singularity_note;
      j["default_method"] = e.default_method;
      arr.push_back(std::move(j));
    }
    for (const auto& id : steps) {
      if (!matches(id)) continue;
      nlohmann::ordered_json j;
      j["type"] = "step";
      j["id"] = id;
      arr.push_back(std::move(j));
    }
    std::cout << arr.dump(2) << "\n";
    return 0;
  }
  std::cout << "catalog entries:\n";
  for (const auto& e : entries) {
    if (!matches(e.id)) continue;
    char line[512];
    std::snprintf(line, sizeof(line), "  %-10s %dD  %-46s \"%s\"\n",
                  e.id.c_str(), e.dimension, axis_string(e).c_str(),
                  e.paper_anchor.c_str());
    std::cout << line;
    if (e.parametric)
      std::cout << "             parametric: " << e.param_name << " (default "
                << fmt17(e.param_default) << ")\n";
  }
  std::cout << "chain steps:\n";
  for (const auto& id : steps)
    if (matches(id)) std::cout << "  " << id << "\n";
  return 0;
}

int cmd_constants() {
  std::cout << "constants:\n";
  for (const auto& c : sigma2x::constants::all_constants()) {
    char line[256];
    std::snprintf(line, sizeof(line), "  %-10s = %.17g\n", c.name.c_str(),
                  c.value);
    std::cout << line;
  }
  std::cout << "closed forms:\n";
  for (const auto& f : sigma2x::constants::all_closed_forms()) {
    char line[512];
    std::snprintf(line, sizeof(line), "  %-10s = %-24.17g (%s)", f.id.c_str(),
                  f.value, f.expression.c_str());
    std::cout << line;
    if (f.paper_digits) {
      // Count how many leading significant digits of the working-precision
      // value agree with the printed string.
      const auto digits_of = [](const std::string& s) {
        std::string d;
        bool leading = true;
        for (char ch : s) {
          if (ch < '0' || ch > '9') continue;
          if (leading && ch == '0') continue;
          leading = false;
          d += ch;
        }
        return d;
      };
      char ours[64];
      std::snprintf(ours, sizeof(ours), "%.16e", f.value);
      const std::string a = digits_of(ours), b = digits_of(*f.paper_digits);
      size_t n = 0;
      while (n < a.size() && n < b.size() && a[n] == b[n]) ++n;
      std::cout << "  matches paper digits: >=" << n;
    }
    std::cout << "\n";
  }
  return 0;
}

struct ComputeFlags {
  std::string id;
  std::string method;
  double abs_tol = -1.0;
  double rel_tol = -1.0;
  long mc_samples = 1'000'000;
  std::optional<std::uint64_t> seed;
  std::optional<double> param;
  long max_evals = 100'000'000;
  int threads = 1;
};

int cmd_compute(const ComputeFlags& fl) {
  namespace cat = sigma2x::cat;
  namespace quad = sigma2x::quad;
  namespace cube = sigma2x::cube;
  if (!cat::has_entry(fl.id)) {
    std::cerr << "unknown catalog id: " << fl.id << "\n";
    return 3;
  }
  const Entry& e = cat::entry(fl.id);
  const std::string method = fl.method.empty() ? e.default_method : fl.method;
  if ((method == "gk" || method == "ts") && e.dimension != 1) {
    std::cerr << "--method " << method << " applies to 1D entries only\n";
    return 3;
  }
  if (e.parametric && !fl.param) {
    std::cerr << fl.id << " requires --param " << e.param_name << "\n";
    return 3;
  }
  if (!e.parametric && fl.param) {
    std::cerr << fl.id << " takes no --param\n";
    return 3;
  }
  if (method == "mc" && !fl.seed) {
    std::cerr << "--method mc requires --seed\n";
    return 3;
  }
  const double pv = fl.param.value_or(0.0);

  // Tolerance defaults: 1e-10 (abs and rel) in 1D; relative 1e-9 / 1e-7 for
  // 2D / 3D cubature.  A flag given alone zeroes the other target so it
  // alone drives convergence.
  double abs_tol, rel_tol;
  if (e.dimension == 1) {
    abs_tol = fl.abs_tol >= 0 ? fl.abs_tol : (fl.rel_tol >= 0 ? 0.0 : 1e-10);
    rel_tol = fl.rel_tol >= 0 ? fl.rel_tol : (fl.abs_tol >= 0 ? 0.0 : 1e-10);
  } else {
    const double dflt = e.dimension == 2 ? 1e-9 : 1e-7;
    abs_tol = fl.abs_tol >= 0 ? fl.abs_tol : 0.0;
    rel_tol = fl.rel_tol >= 0 ? fl.rel_tol : (fl.abs_tol >= 0 ? 0.0 : dflt);
  }

  double value = 0, err = 0, std_error = -1;
  long n_evals = 0;
  std::string status = "converged";
  const auto t0 = std::chrono::steady_clock::now();
  try {
    if (method == "mc") {
      cube::NdFn fn = [&e, pv](const std::vector<double>& x) {
        return e.eval(x, pv);
      };
      cube::Options opt;
      opt.max_evals = fl.max_evals;
      opt.threads = fl.threads;
      const cube::CubatureResult r =
          cube::integrate_mc(fn, e.domain, fl.mc_samples, *fl.seed, opt);
      value = r.value;
      err = std_error = r.error_estimate;
      n_evals = r.n_evals;
    } else if (e.dimension == 1) {
      std::vector<double> pt(1);
      quad::Fn fn = [&e, pv, &pt](double x) {
        pt[0] = x;
        return e.eval(pt, pv);
      };
      quad::Interval1D iv = e.domain[0];
      if (method == "ts") iv.transform = quad::Interval1D::Transform::tanh_sinh;
      quad::Budget budget;
      budget.max_evals = fl.max_evals;
      const quad::QuadResult r =
          quad::integrate_adaptive(fn, iv, abs_tol, rel_tol, budget);
      value = r.value;
      err = r.error_estimate;
      n_evals = r.n_evals;
      if (r.status == quad::Status::max_depth) status = "max_depth";
      if (r.status == quad::Status::max_evals) status = "max_evals";
    } else {
      cube::NdFn fn = [&e, pv](const std::vector<double>& x) {
        return e.eval(x, pv);
      };
      cube::Options opt;
      opt.abs_tol = abs_tol;
      opt.rel_tol = rel_tol;
      opt.max_evals = fl.max_evals;
      opt.threads = fl.threads;
      const cube::CubatureResult r =
          method == "iterated" ? cube::integrate_iterated(fn, e.domain, opt)
                               : cube::integrate_genz_malik(fn, e.domain, opt);
      value = r.value;
      err = r.error_estimate;
      n_evals = r.n_evals;
      if (r.status == quad::Status::max_depth) status = "max_depth";
      if (r.status == quad::Status::max_evals) status = "max_evals";
    }
  } catch (const std::exception& ex) {
    std::cerr << "evaluation failure: " << ex.what() << "\n";
    return 2;
  }
  const auto t1 = std::chrono::steady_clock::now();
  const double wall_ms =
      std::chrono::duration_cast<std::chrono::duration<double, std::milli>>(
          t1 - t0)
          .count();

  std::cout << "id: " << e.id << "\n";
  if (e.parametric)
    std::cout << "param " << e.param_name << ": " << fmt17(pv) << "\n";
  std::cout << "value: " << fmt17(value) << "\n";
  std::cout << "error_estimate: " << fmt17(err) << "\n";
  if (std_error >= 0) {
    std::cout << "std_error: " << fmt17(std_error) << "\n";
    std::cout << "seed: " << *fl.seed << "\n";
  }
  std::cout << "n_evals: " << n_evals << "\n";
  char wbuf[64];
  std::snprintf(wbuf, sizeof(wbuf), "%.3f", wall_ms);
  std::cout << "wall_ms: " << wbuf << "\n";
  std::cout << "strategy: " << method << "\n";
  std::cout << "status: " << status << "\n";
  return status == "converged" ? 0 : 2;
}

struct VerifyFlags {
  std::vector<std::string> steps;
  bool all = false;
  std::string json_path;
  double rel_tol = -1.0;
  double tol = -1.0;
  long max_evals = 100'000'000;
  int threads = 1;
};

int cmd_verify(const VerifyFlags& fl) {
  namespace chain = sigma2x::chain;
  if (fl.all == !fl.steps.empty()) {
    std::cerr << "verify requires exactly one of --all or --steps\n";
    return 3;
  }
  chain::EngineConfig cfg;
  cfg.max_evals = fl.max_evals;
  cfg.threads = fl.threads;
  if (fl.rel_tol > 0) {
    // Engine override anchored at the 3D relative target; the other engine
    // classes scale in proportion.
    const double f = fl.rel_tol / 1e-7;
    cfg.rel_tol_3d = fl.rel_tol;
    cfg.rel_tol_2d = 1e-9 * f;
    cfg.rel_tol_x5 = 1e-8 * f;
    cfg.scale_1d = f;
  }
  if (fl.tol > 0) cfg.tol_scale = fl.tol / 1e-6;  // anchored at the 3D class

  chain::VerificationReport report;
  try {
    report = fl.all ? chain::run_all(cfg) : chain::run_chain(fl.steps, cfg);
  } catch (const std::out_of_range& ex) {
    std::cerr << ex.what() << "\n";
    return 3;
  } catch (const std::invalid_argument& ex) {
    std::cerr << ex.what() << "\n";
    return 3;
  } catch (const std::exception& ex) {
    std::cerr << "verification failure: " << ex.what() << "\n";
    return 2;
  }
  std::cout << chain::render_text(report);
  if (!fl.json_path.empty()) {
    std::ofstream out(fl.json_path, std::ios::binary);
    out << chain::render_json(report);
    if (!out) {
      std::cerr << "cannot write " << fl.json_path << "\n";
      return 3;
    }
  }
  return report.passed() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"second-order exchange self-energy integral verifier"};
  app.require_subcommand(1);

  auto* list = app.add_subcommand("list", "catalog entries and chain steps");
  bool list_json = false;
  std::string list_filter;
  list->add_flag("--json", list_json, "machine-readable array");
  list->add_option("--filter", list_filter, "substring filter on ids");

  auto* compute = app.add_subcommand("compute", "integrate one catalog entry");
  ComputeFlags cf;
  compute->add_option("id", cf.id, "catalog entry id")->required();
  compute->add_option("--tol", cf.abs_tol, "absolute tolerance");
  compute->add_option("--rel-tol", cf.rel_tol, "relative tolerance");
  compute
      ->add_option("--method", cf.method, "gk | ts | iterated | adaptive | mc")
      ->check(CLI::IsMember({"gk", "ts", "iterated", "adaptive", "mc"}));
  compute->add_option("--mc-samples", cf.mc_samples, "Monte Carlo samples");
  std::uint64_t seed_raw = 0;
  auto* seed_opt = compute->add_option("--seed", seed_raw, "Monte Carlo seed");
  double param_raw = 0;
  auto* param_opt =
      compute->add_option("--param", param_raw, "parameter for E17_F/E19_INNER/E22_PHI");
  compute->add_option("--max-evals", cf.max_evals, "evaluation budget");
  compute->add_option("--threads", cf.threads, "worker cap (results identical)");

  auto* verify = app.add_subcommand("verify", "run the verification chain");
  VerifyFlags vf;
  verify->add_option("--steps", vf.steps, "comma-separated step ids")
      ->delimiter(',');
  verify->add_flag("--all", vf.all, "run every step");
  verify->add_option("--json", vf.json_path, "write the schema-1 report here");
  verify->add_option("--rel-tol", vf.rel_tol,
                     "3D engine relative target (default 1e-7)");
  verify->add_option("--tol", vf.tol,
                     "step acceptance tolerance for the 3D class (default 1e-6)");
  verify->add_option("--max-evals", vf.max_evals, "evaluation budget");
  verify->add_option("--threads", vf.threads, "worker cap (results identical)");

  auto* consts = app.add_subcommand("constants", "constants and closed forms");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 3;
  }

  if (list->parsed()) return cmd_list(list_json, list_filter);
  if (compute->parsed()) {
    if (*seed_opt) cf.seed = seed_raw;
    if (*param_opt) cf.param = param_raw;
    return cmd_compute(cf);
  }
  if (verify->parsed()) return cmd_verify(vf);
  if (consts->parsed()) return cmd_constants();
  return 3;
}
