#include "perifront/cli_io.hpp"

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>

#include "json.hpp"
#include "perifront/semiwave.hpp"
#include "perifront/speed_lab.hpp"

namespace perifront {

using nlohmann::json;
namespace fs = std::filesystem;

const char* tool_version() { return "0.1.0"; }

namespace {

[[noreturn]] void config_fail(const std::string& path, const std::string& why) {
  throw ConfigError("config error at '" + path + "': " + why);
}

void reject_unknown_keys(const json& j, const std::set<std::string>& allowed,
                         const std::string& path) {
  if (!j.is_object()) config_fail(path, "expected an object");
  for (const auto& [key, _] : j.items())
    if (!allowed.count(key)) config_fail(path + "." + key, "unknown key");
}

Real get_real(const json& j, const std::string& key, Real dflt,
              const std::string& path) {
  if (!j.contains(key)) return dflt;
  if (!j.at(key).is_number()) config_fail(path + "." + key, "expected a number");
  return j.at(key).get<Real>();
}

int get_int(const json& j, const std::string& key, int dflt,
            const std::string& path) {
  if (!j.contains(key)) return dflt;
  if (!j.at(key).is_number_integer())
    config_fail(path + "." + key, "expected an integer");
  return j.at(key).get<int>();
}

ReactionSpec parse_problem(const json& j) {
  if (!j.is_object()) config_fail("problem", "expected an object");
  if (!j.contains("family")) config_fail("problem.family", "missing");
  try {
    return reaction_from_json(j.dump());
  } catch (const std::exception& e) {
    config_fail("problem", e.what());
  }
}

CompactProfile parse_initial(const json& j, const PeriodicState* ps,
                             const std::string& path) {
  reject_unknown_keys(j, {"shape", "center", "width", "height", "h0", "depth",
                          "factor", "halfwidth"},
                      path);
  const std::string shape = j.value("shape", "");
  if (shape == "hat") {
    return hat_profile(get_real(j, "center", 0.0, path),
                       get_real(j, "width", 4.0, path),
                       get_real(j, "height", 0.5, path));
  }
  if (shape == "ramp-to-p") {
    if (!ps) config_fail(path, "ramp-to-p needs a periodic state");
    return ramp_to_p(*ps, get_real(j, "h0", 0.0, path),
                     get_real(j, "depth", 30.0, path), 512);
  }
  if (shape == "scaled-p") {
    if (!ps) config_fail(path, "scaled-p needs a periodic state");
    const Real X = get_real(j, "halfwidth", 40.0, path);
    const Real f = get_real(j, "factor", 1.0, path);
    CompactProfile p;
    p.class_tag = ProfileClass::WholeLine;
    const int n = 2049;
    p.xs.resize(n);
    p.vals.resize(n);
    for (int i = 0; i < n; ++i) {
      p.xs[i] = -X + 2 * X * i / (n - 1);
      p.vals[i] = f * ps->at(0.0, p.xs[i]);
    }
    return p;
  }
  config_fail(path + ".shape", "must be hat | ramp-to-p | scaled-p");
}

void write_text(const fs::path& p, const std::string& text) {
  std::ofstream f(p);
  if (!f) throw std::runtime_error("cannot write " + p.string());
  f << text;
}

void write_fronts_csv(const fs::path& p, const FrontTrajectory& tr) {
  std::ofstream f(p);
  f << "t,g,h\n";
  f.precision(17);
  for (size_t i = 0; i < tr.times.size(); ++i) {
    f << tr.times[i] << ",";
    if (i < tr.g.size()) f << tr.g[i];
    f << ",";
    if (i < tr.h.size()) f << tr.h[i];
    f << "\n";
  }
}

void write_snapshots_csv(const fs::path& p, const FrontTrajectory& tr) {
  std::ofstream f(p);
  f << "t,x,u\n";
  f.precision(17);
  for (const auto& s : tr.snapshots)
    for (Eigen::Index i = 0; i < s.xs.size(); ++i)
      f << s.t << "," << s.xs[i] << "," << s.vals[i] << "\n";
}

json speed_to_json(const SpeedEstimate& e) {
  json j;
  j["value"] = e.value;
  j["method"] = to_string(e.method);
  j["fit_window"] = {e.fit_t_lo, e.fit_t_hi};
  j["residual"] = e.residual;
  for (const auto& [k, v] : e.meta) j["meta"][k] = v;
  return j;
}

const char* flag_name(TrajectoryFlag f) {
  switch (f) {
    case TrajectoryFlag::Spreading: return "spreading";
    case TrajectoryFlag::Vanished: return "vanished";
    default: return "undecided";
  }
}

struct PStateOptions {
  int nt = 64, nx = 64;
  Real tol = 1e-8;
};

PStateOptions parse_pstate_options(const json& num) {
  PStateOptions o;
  if (num.contains("pstate")) {
    const json& p = num.at("pstate");
    reject_unknown_keys(p, {"nt", "nx", "tol"}, "numerics.pstate");
    o.nt = get_int(p, "nt", o.nt, "numerics.pstate");
    o.nx = get_int(p, "nx", o.nx, "numerics.pstate");
    o.tol = get_real(p, "tol", o.tol, "numerics.pstate");
  }
  return o;
}

WeinbergerNumerics parse_weinberger(const json& num, int jobs) {
  WeinbergerNumerics w;
  if (num.contains("recursion")) {
    const json& r = num.at("recursion");
    reject_unknown_keys(r,
                        {"nx", "per_period", "nt_per_period", "window",
                         "right_margin", "n_max", "stagnation_tol",
                         "bisect_tol_frac"},
                        "numerics.recursion");
    w.nx = get_int(r, "nx", w.nx, "numerics.recursion");
    w.per_period = get_int(r, "per_period", w.per_period, "numerics.recursion");
    w.nt_per_period =
        get_int(r, "nt_per_period", w.nt_per_period, "numerics.recursion");
    w.window = get_real(r, "window", w.window, "numerics.recursion");
    w.right_margin =
        get_real(r, "right_margin", w.right_margin, "numerics.recursion");
    w.n_max = get_int(r, "n_max", w.n_max, "numerics.recursion");
    w.stagnation_tol =
        get_real(r, "stagnation_tol", w.stagnation_tol, "numerics.recursion");
    w.bisect_tol_frac = get_real(r, "bisect_tol_frac", w.bisect_tol_frac,
                                 "numerics.recursion");
  }
  w.jobs = jobs;
  return w;
}

void write_recursion_diags(const fs::path& p,
                           const std::vector<ProbeLog>& probes) {
  std::ofstream f(p);
  f << "probe_c,label,n_used\n";
  f.precision(17);
  for (const auto& pr : probes) {
    const char* lbl = pr.label == CClass::Below ? "below"
                      : pr.label == CClass::AboveOrEqual ? "above_or_equal"
                                                         : "undecided";
    f << pr.c << "," << lbl << "," << pr.n_used << "\n";
  }
}

}  // namespace

int run_task(const std::string& task, const std::string& config_path,
             const std::string& out_override, int jobs) {
  const auto t_start = std::chrono::steady_clock::now();

  std::ifstream in(config_path);
  if (!in) throw ConfigError("cannot open config: " + config_path);
  json cfg;
  try {
    cfg = json::parse(in);
  } catch (const std::exception& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  reject_unknown_keys(cfg, {"task", "problem", "numerics", "output_dir"}, "");
  if (cfg.contains("task") && cfg.at("task").get<std::string>() != task)
    config_fail("task", "config task '" +
                            cfg.at("task").get<std::string>() +
                            "' does not match the requested task '" + task + "'");
  if (!cfg.contains("problem")) config_fail("problem", "missing");
  const ReactionSpec spec = parse_problem(cfg.at("problem"));
  const json num = cfg.value("numerics", json::object());

  fs::path out_dir = cfg.value("output_dir", std::string("out"));
  if (!out_override.empty()) out_dir = out_override;
  if (const char* env = std::getenv("PERIFRONT_OUT")) out_dir = env;
  fs::create_directories(out_dir);

  json result;
  result["task"] = task;
  int exit_code = 0;

  const std::set<std::string> common_keys = {"pstate", "recursion"};

  if (task == "periodic-state") {
    std::set<std::string> keys = common_keys;
    keys.insert({"nt", "nx", "tol"});
    reject_unknown_keys(num, keys, "numerics");
    const int nt = get_int(num, "nt", 64, "numerics");
    const int nx = get_int(num, "nx", 64, "numerics");
    const Real tol = get_real(num, "tol", 1e-8, "numerics");
    PeriodicState ps = compute_periodic_state(spec, nt, nx, tol);
    std::ofstream f(out_dir / "periodic_state.csv");
    f << "t,x,p\n";
    f.precision(17);
    for (int i = 0; i < ps.nt; ++i)
      for (int j = 0; j < ps.nx; ++j)
        f << i * ps.omega / ps.nt << "," << j * ps.L / ps.nx << ","
          << ps.values(i, j) << "\n";
    result["min"] = ps.min_value();
    result["max"] = ps.max_value();
    result["residual"] = ps.residual;
    result["nt"] = ps.nt;
    result["nx"] = ps.nx;
  } else if (task == "solve") {
    std::set<std::string> keys = common_keys;
    keys.insert({"kind", "T", "nx", "dt", "window_width", "domain_halfwidth",
                 "snapshot_every", "initial"});
    reject_unknown_keys(num, keys, "numerics");
    const std::string kind = num.value("kind", "two-sided");
    const Real T = get_real(num, "T", 10.0, "numerics");
    const int nx = get_int(num, "nx", 256, "numerics");
    const Real dt = get_real(num, "dt", spec.omega / 64, "numerics");
    StepControl ctl;
    ctl.snapshot_every = get_real(num, "snapshot_every", spec.omega, "numerics");

    std::optional<PeriodicState> ps;
    const std::string shape =
        num.contains("initial") ? num.at("initial").value("shape", "") : "";
    if (kind == "cauchy" || shape == "ramp-to-p" || shape == "scaled-p") {
      const PStateOptions po = parse_pstate_options(num);
      ps = compute_periodic_state(spec, po.nt, po.nx, po.tol);
    }
    if (!num.contains("initial")) config_fail("numerics.initial", "missing");
    const CompactProfile u0 =
        parse_initial(num.at("initial"), ps ? &*ps : nullptr, "numerics.initial");

    FrontTrajectory tr;
    if (kind == "two-sided") {
      tr = solve_two_sided(spec, u0, T, nx, dt, ctl);
    } else if (kind == "right") {
      CompactProfile r = u0;
      r.class_tag = ProfileClass::RightFront;
      tr = solve_right(spec, r, T, get_real(num, "window_width", 40.0, "numerics"),
                       nx, dt, ps ? &*ps : nullptr, ctl);
    } else if (kind == "left") {
      CompactProfile l = u0;
      l.class_tag = ProfileClass::LeftFront;
      l.g0 = -u0.h0;
      tr = solve_left(spec, l, T, get_real(num, "window_width", 40.0, "numerics"),
                      nx, dt, ps ? &*ps : nullptr, ctl);
    } else if (kind == "cauchy") {
      tr = solve_cauchy(spec, u0, T,
                        get_real(num, "domain_halfwidth", 60.0, "numerics"), nx,
                        dt, ps ? &*ps : nullptr, ctl);
    } else {
      config_fail("numerics.kind", "must be two-sided | right | left | cauchy");
    }
    write_fronts_csv(out_dir / "fronts.csv", tr);
    write_snapshots_csv(out_dir / "snapshots.csv", tr);
    result["flag"] = flag_name(tr.flag);
    result["sup_u"] = tr.sup_u;
    if (!tr.h.empty()) result["h_final"] = tr.h.back();
    if (!tr.g.empty()) result["g_final"] = tr.g.back();
  } else if (task == "speed-direct") {
    std::set<std::string> keys = common_keys;
    keys.insert({"T", "nx", "dt", "window_width", "tail_fraction"});
    reject_unknown_keys(num, keys, "numerics");
    const PStateOptions po = parse_pstate_options(num);
    PeriodicState ps = compute_periodic_state(spec, po.nt, po.nx, po.tol);
    const Real T = get_real(num, "T", 60.0, "numerics");
    const Real W = get_real(num, "window_width", 40.0, "numerics");
    const int nx = get_int(num, "nx", static_cast<int>(W / (spec.L / 64)), "numerics");
    const Real dt = get_real(num, "dt", spec.omega / 64, "numerics");
    CompactProfile u0 = ramp_to_p(ps, 0.0, 0.75 * W, 4 * nx);
    FrontTrajectory tr = solve_right(spec, u0, T, W, nx, dt, &ps);
    write_fronts_csv(out_dir / "fronts.csv", tr);
    const SpeedEstimate est =
        front_slope_speed(tr, get_real(num, "tail_fraction", 0.5, "numerics"));
    result["speed"] = speed_to_json(est);
  } else if (task == "speed-recursion" || task == "speed-cauchy") {
    reject_unknown_keys(num, common_keys, "numerics");
    const PStateOptions po = parse_pstate_options(num);
    PeriodicState ps = compute_periodic_state(spec, po.nt, po.nx, po.tol);
    const WeinbergerNumerics w = parse_weinberger(num, jobs);
    const XiProfile phi0 = default_phi0(spec, ps, w.nx, w.per_period);
    const RecursionSpeed rs = (task == "speed-recursion")
                                  ? estimate_c_plus(spec, ps, phi0, w)
                                  : estimate_c_cauchy(spec, ps, phi0, w);
    write_recursion_diags(out_dir / "recursion_probes.csv", rs.probes);
    result["speed"] = speed_to_json(rs.estimate);
    result["c_per_period"] = rs.c_per_period;
    result["bracket"] = {rs.c_lo, rs.c_hi};
  } else if (task == "semiwave") {
    std::set<std::string> keys = common_keys;
    keys.insert({"tol"});
    reject_unknown_keys(num, keys, "numerics");
    if (spec.family != ReactionFamily::HomogeneousLogistic)
      config_fail("problem.family",
                  "semiwave task requires the homogeneous logistic family");
    SemiWaveProblem prob;
    prob.kind = SemiWaveProblem::Kind::LogisticAB;
    prob.d = spec.d;
    prob.mu = spec.mu;
    prob.a = spec.hom_a;
    prob.b = spec.hom_b;
    const SpeedEstimate est =
        shoot_semiwave_speed(prob, get_real(num, "tol", 1e-8, "numerics"));
    result["speed"] = speed_to_json(est);
    result["upper_bound_c_plus"] = upper_bound_c_plus(spec);
  } else if (task == "dichotomy") {
    std::set<std::string> keys = common_keys;
    keys.insert({"widths", "height", "T", "nx", "dt"});
    reject_unknown_keys(num, keys, "numerics");
    if (!num.contains("widths")) config_fail("numerics.widths", "missing");
    std::vector<Real> widths;
    for (const auto& w : num.at("widths")) widths.push_back(w.get<Real>());
    const DichotomyReport rep = dichotomy_scan(
        spec, widths, get_real(num, "height", 0.1, "numerics"),
        get_real(num, "T", 80.0, "numerics"), get_int(num, "nx", 256, "numerics"),
        get_real(num, "dt", 1e-2, "numerics"));
    json entries = json::array();
    for (const auto& e : rep.entries) {
      const char* o = e.outcome == Outcome::Spreading ? "spreading"
                      : e.outcome == Outcome::Vanished ? "vanished"
                                                       : "undecided";
      entries.push_back({{"width", e.width}, {"outcome", o}});
    }
    result["entries"] = entries;
    result["monotone"] = rep.monotone_in_width;
    result["threshold_interval"] = {rep.last_vanished, rep.first_spread};
    if (!rep.monotone_in_width) exit_code = 1;
  } else if (task == "mu-sweep") {
    std::set<std::string> keys = common_keys;
    keys.insert({"mu_grid", "method", "T", "window_width", "tail_fraction"});
    reject_unknown_keys(num, keys, "numerics");
    const PStateOptions po = parse_pstate_options(num);
    PeriodicState ps = compute_periodic_state(spec, po.nt, po.nx, po.tol);
    if (!num.contains("mu_grid")) config_fail("numerics.mu_grid", "missing");
    std::vector<Real> grid;
    for (const auto& m : num.at("mu_grid")) grid.push_back(m.get<Real>());
    const std::string method = num.value("method", "front-slope");
    MuSweepConfig mc;
    mc.T = get_real(num, "T", 60.0, "numerics");
    mc.window = get_real(num, "window_width", 40.0, "numerics");
    mc.tail_fraction = get_real(num, "tail_fraction", 0.5, "numerics");
    mc.recursion = parse_weinberger(num, jobs);
    const MuSweepReport rep =
        mu_sweep(spec, ps, grid, method == "recursion" ? SpeedMethod::Recursion
                                                       : SpeedMethod::FrontSlope,
                 mc);
    json pts = json::array();
    for (const auto& pt : rep.points) {
      json p;
      p["mu"] = pt.mu;
      p["ok"] = pt.ok;
      if (pt.ok)
        p["speed"] = speed_to_json(pt.speed);
      else
        p["error"] = pt.error;
      pts.push_back(p);
    }
    result["points"] = pts;
    result["cauchy_ref"] = rep.cauchy_ref;
    result["monotone"] = rep.monotone;
    result["all_below_cauchy"] = rep.all_below_cauchy;
    result["gap_shrinking"] = rep.gap_shrinking;
    if (!(rep.monotone && rep.all_below_cauchy && rep.gap_shrinking))
      exit_code = 1;
  } else if (task == "verify-theorem4") {
    std::set<std::string> keys = common_keys;
    keys.insert({"B", "m", "c", "cprime", "A", "Aprime"});
    reject_unknown_keys(num, keys, "numerics");
    const PStateOptions po = parse_pstate_options(num);
    PeriodicState ps = compute_periodic_state(spec, po.nt, po.nx, po.tol);
    const Real B = get_real(num, "B", 8.0, "numerics");
    const int m = get_int(num, "m", 6, "numerics");
    const Real c = get_real(num, "c", 0.5, "numerics");
    const Real cp = get_real(num, "cprime", 0.5, "numerics");
    const Real A =
        get_real(num, "A", (1 + m * (B + c) + 2 * B) / c, "numerics");
    const Real Ap =
        get_real(num, "Aprime", (1 + m * (B + cp) + 2 * B) / cp, "numerics");
    WeinbergerNumerics w = parse_weinberger(num, jobs);
    w.nx = std::min(w.nx, 32);  // pointwise U_B solves dominate the cost
    const SubsolutionReport rep =
        verify_subsolution_chain(spec, ps, B, m, c, cp, A, Ap, w);
    json checks = json::array();
    for (const auto& ck : rep.checks)
      checks.push_back({{"name", ck.name},
                        {"pass", ck.pass},
                        {"worst_margin", ck.worst_margin}});
    result["checks"] = checks;
    result["all_pass"] = rep.all_pass();
    result["eps"] = rep.eps;
    if (!rep.all_pass()) exit_code = 1;
  } else if (task == "check-below-p") {
    std::set<std::string> keys = common_keys;
    keys.insert({"T_scan", "nx", "dt", "initial"});
    reject_unknown_keys(num, keys, "numerics");
    const PStateOptions po = parse_pstate_options(num);
    PeriodicState ps = compute_periodic_state(spec, po.nt, po.nx, po.tol);
    if (!num.contains("initial")) config_fail("numerics.initial", "missing");
    const CompactProfile u0 =
        parse_initial(num.at("initial"), &ps, "numerics.initial");
    const BelowPReport rep = check_u_below_p(
        spec, ps, u0, get_real(num, "T_scan", 20.0, "numerics"),
        get_int(num, "nx", 256, "numerics"),
        get_real(num, "dt", spec.omega / 100, "numerics"));
    result["achieved"] = rep.achieved;
    result["t0"] = rep.t0;
    result["margin"] = rep.margin;
    if (!rep.achieved) result["status"] = "not-yet";
  } else {
    throw ConfigError("unknown task: " + task);
  }

  const auto t_end = std::chrono::steady_clock::now();
  json manifest;
  manifest["config"] = cfg;
  manifest["tool_version"] = tool_version();
  manifest["task"] = task;
  manifest["wall_time_s"] =
      std::chrono::duration<double>(t_end - t_start).count();
  write_text(out_dir / "manifest.json", manifest.dump(2) + "\n");
  write_text(out_dir / "result.json", result.dump(2) + "\n");
  return exit_code;
}

int run_compare(const std::vector<std::string>& result_paths) {
  if (result_paths.size() < 2)
    throw ConfigError("compare: need at least 2 result files");
  struct Entry {
    std::string label;
    Real value;
    json problem;
  };
  std::vector<Entry> entries;
  for (const auto& path : result_paths) {
    std::ifstream in(path);
    if (!in) throw ConfigError("compare: cannot open " + path);
    const json r = json::parse(in);
    if (!r.contains("speed"))
      throw ConfigError("compare: " + path + " is not a speed-bearing result");
    Entry e;
    e.label = r.at("speed").value("method", "?") + " (" + path + ")";
    e.value = r.at("speed").at("value").get<Real>();
    // problem echo lives in the manifest next to the result, if present
    const fs::path man = fs::path(path).parent_path() / "manifest.json";
    if (fs::exists(man)) {
      std::ifstream mf(man);
      const json m = json::parse(mf);
      e.problem = m.value("config", json::object()).value("problem", json());
    }
    entries.push_back(e);
  }
  for (size_t i = 1; i < entries.size(); ++i) {
    if (entries[i].problem.is_null() || entries[0].problem.is_null()) continue;
    if (entries[i].problem != entries[0].problem) {
      std::string diffs;
      for (const auto& [k, v] : entries[0].problem.items())
        if (!entries[i].problem.contains(k) || entries[i].problem.at(k) != v)
          diffs += k + " ";
      throw ConfigError("compare: mixed incompatible specs; differing fields: " +
                        (diffs.empty() ? std::string("<structure>") : diffs));
    }
  }
  std::cout << "method,value";
  for (const auto& e : entries) std::cout << "," << e.label;
  std::cout << "\n";
  std::cout.precision(10);
  for (const auto& a : entries) {
    std::cout << a.label << "," << a.value;
    for (const auto& b : entries) {
      const Real gap = std::abs(a.value - b.value) /
                       std::max({std::abs(a.value), std::abs(b.value), 1e-300});
      std::cout << "," << gap;
    }
    std::cout << "\n";
  }
  return 0;
}

}  // namespace perifront
