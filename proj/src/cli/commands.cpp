#include "commands.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <numbers>
#include <random>

#include "nlflat/errors.hpp"
#include "nlflat/fractional_reference.hpp"
#include "nlflat/simd.hpp"
#include "nlflat/subsolution.hpp"
#include "nlflat/time_integration.hpp"

namespace nlflat::cli {

namespace {

using nlohmann::json;

struct Simulation {
  OperatorDiscretization op;
  Trajectory traj;
  double dt;
};

std::string g17(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::ofstream open_output(const RunConfig& cfg, const std::string& name) {
  std::filesystem::create_directories(cfg.output_dir);
  const auto path = cfg.output_dir / name;
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  return out;
}

void write_json(const RunConfig& cfg, const std::string& name, const json& j) {
  open_output(cfg, name) << j.dump(2) << '\n';
}

json kernel_json(const KernelSpec& k) {
  const auto& d = k.declared();
  return {{"id", k.id()}, {"family", k.family_name()}, {"s", k.s()}, {"J0", d.J0}, {"J1", d.J1}, {"R0", d.R0}};
}

json grid_json(const Grid& g) {
  return {{"x_min", g.x_min()}, {"x_max", g.x_max()}, {"n", g.size()}, {"h", g.spacing()}};
}

json base_metadata(std::string_view command, const RunConfig& cfg) {
  return {{"command", command},
          {"kernel", kernel_json(cfg.kernel)},
          {"isa", simd::isa_name(simd::active_isa())},
          {"seed", cfg.seed},
          {"config", cfg.source}};
}

std::vector<double> output_times(const RunConfig& cfg) {
  std::vector<double> out = cfg.time.snapshots;
  if (cfg.flattening.t && *cfg.flattening.t <= cfg.time.t_final &&
      std::find(out.begin(), out.end(), *cfg.flattening.t) == out.end()) {
    out.push_back(*cfg.flattening.t);
    std::sort(out.begin(), out.end());
  }
  return out;
}

OperatorDiscretization build_operator(const RunConfig& cfg, GridPtr grid, BoundaryModel boundary) {
  DiscretizeOptions opts;
  opts.force = cfg.force_kernel;
  return discretize(cfg.kernel, std::move(grid), std::move(boundary), opts);
}

Simulation simulate_run(const RunConfig& cfg, const InitialDatum& datum) {
  auto grid = make_grid(cfg.grid.x_min, cfg.grid.x_max, cfg.grid.n);
  auto op = build_operator(cfg, grid, cfg.boundary);
  const double dt = stable_dt(op, cfg.time.safety);
  const auto times = output_times(cfg);
  auto traj = evolve(op, datum.sample(grid), cfg.time.t_final, times, {cfg.time.safety, cfg.time.method});
  return {std::move(op), std::move(traj), dt};
}

json simulation_json(const Simulation& sim) {
  const auto& c = sim.op.certificate();
  return {{"grid", grid_json(sim.op.grid())},
          {"boundary", describe(sim.op.boundary())},
          {"dt", sim.dt},
          {"row_sum", sim.op.row_sum()},
          {"snapshot_times", std::vector<double>(sim.traj.times().begin(), sim.traj.times().end())},
          {"certificate",
           {{"verified", c.verified},
            {"upper_margin", c.upper_margin},
            {"lower_margin", c.lower_margin},
            {"near_moment", c.near_moment},
            {"sample_count", c.sample_count}}}};
}

void write_trajectory_csv(const RunConfig& cfg, const Trajectory& traj) {
  auto out = open_output(cfg, "trajectory.csv");
  out << "t,x,u\n";
  const auto xs = traj.grid().points();
  for (const Field& f : traj.states()) {
    const std::string t = g17(f.time());
    for (std::size_t i = 0; i < f.size(); ++i) out << t << ',' << g17(xs[i]) << ',' << g17(f[i]) << '\n';
  }
}

void write_reports(const RunConfig& cfg, const std::vector<VerificationReport>& reports) {
  write_json(cfg, "report.json", to_json(reports));
  if (!wants_csv(cfg.format)) return;
  auto out = open_output(cfg, "report.csv");
  out << "check,pass,measured,bound,tolerance,worst_t,worst_x\n";
  for (const auto& r : reports) {
    out << r.check << ',' << (r.pass ? "true" : "false") << ',' << g17(r.measured) << ',' << g17(r.bound) << ','
        << g17(r.tolerance) << ',' << g17(r.worst_t) << ',' << g17(r.worst_x) << '\n';
  }
}

int summarize(const std::vector<VerificationReport>& reports) {
  bool ok = true;
  for (const auto& r : reports) {
    std::cout << (r.pass ? "PASS " : "FAIL ") << r.check << ": measured=" << g17(r.measured)
              << " bound=" << g17(r.bound) << " tolerance=" << g17(r.tolerance) << '\n';
    ok = ok && r.pass;
  }
  return ok ? kExitOk : kExitCheckFailed;
}

// ---- simulate ----

int cmd_simulate(const RunConfig& cfg) {
  const auto sim = simulate_run(cfg, cfg.datum);
  if (wants_csv(cfg.format)) write_trajectory_csv(cfg, sim.traj);
  if (wants_json(cfg.format)) {
    json states = json::array();
    for (const Field& f : sim.traj.states()) {
      states.push_back({{"t", f.time()}, {"u", std::vector<double>(f.values().begin(), f.values().end())}});
    }
    write_json(cfg, "trajectory.json", {{"x", sim.traj.grid().points()}, {"states", states}});
  }
  auto meta = base_metadata("simulate", cfg);
  meta["simulation"] = simulation_json(sim);
  write_json(cfg, "metadata.json", meta);
  std::cout << "simulated " << sim.traj.size() << " snapshots on n=" << sim.op.grid().size() << '\n';
  return kExitOk;
}

// ---- verify-subsolution ----

int cmd_verify_subsolution(const RunConfig& cfg) {
  const auto& sc = cfg.subsolution;
  const auto p = make_subsolution_params(cfg.kernel, sc.C, cfg.datum.a(), cfg.datum.b());
  const double x_lo = sc.x_lo.value_or(p.region_start());
  if (x_lo < p.region_start()) throw ConfigError("checks.subsolution.x_lo lies below R0 + R_C");
  if (!(sc.x_hi > x_lo)) throw ConfigError("checks.subsolution.x_hi must exceed x_lo");

  const auto samples = residual_grid(cfg.kernel, p, sc.t_count, sc.x_count, x_lo, sc.x_hi, sc.quad_tol);
  VerificationReport r;
  r.check = "subsolution_residual";
  r.bound = 0.0;
  r.tolerance = sc.quad_tol;
  r.measured = -std::numeric_limits<double>::infinity();
  r.pass = true;
  for (const auto& s : samples) {
    r.pass = r.pass && s.pass;
    if (s.residual - s.budget > r.measured) {
      r.measured = s.residual - s.budget;
      r.worst_t = s.t;
      r.worst_x = s.x;
    }
  }
  r.metadata = {{"kappa", g17(p.kappa)}, {"t_star", g17(p.t_star)}, {"R_C", g17(p.R_C)}, {"C", g17(p.C)},
                {"R0", g17(p.R0)},       {"x_lo", g17(x_lo)},       {"x_hi", g17(sc.x_hi)},
                {"samples", std::to_string(samples.size())},        {"measured", "max(residual - budget)"}};

  // Left of R0 + R_C no sign is claimed; the values are recorded only.
  VerificationReport inner;
  inner.check = "subsolution_residual_inner";
  inner.pass = true;
  inner.bound = std::numeric_limits<double>::infinity();
  inner.measured = -std::numeric_limits<double>::infinity();
  const auto inner_samples = residual_grid(cfg.kernel, p, sc.t_count, sc.x_count, p.R0 + 0.05 * p.R_C,
                                           p.region_start() - 0.05 * p.R_C, sc.quad_tol);
  for (const auto& s : inner_samples) {
    if (s.residual > inner.measured) {
      inner.measured = s.residual;
      inner.worst_t = s.t;
      inner.worst_x = s.x;
    }
  }
  inner.metadata = {{"asserted", "false"}, {"measured", "max residual on (R0, R0 + R_C)"}};

  if (wants_csv(cfg.format)) {
    auto out = open_output(cfg, "residual_grid.csv");
    out << "t,x,residual,budget,pass\n";
    for (const auto& s : samples) {
      out << g17(s.t) << ',' << g17(s.x) << ',' << g17(s.residual) << ',' << g17(s.budget) << ','
          << (s.pass ? "true" : "false") << '\n';
    }
  }
  if (wants_json(cfg.format)) {
    json arr = json::array();
    for (const auto& s : samples) arr.push_back(to_json(s));
    write_json(cfg, "residual_grid.json", arr);
  }
  const std::vector<VerificationReport> reports{r, inner};
  write_reports(cfg, reports);
  write_json(cfg, "metadata.json", base_metadata("verify-subsolution", cfg));
  return summarize(reports);
}

// ---- verify-flattening ----

int cmd_verify_flattening(const RunConfig& cfg) {
  const double t = cfg.flattening.t.value_or(cfg.time.t_final);
  if (!(t > 0.0) || t > cfg.time.t_final) throw ConfigError("checks.flattening.t must lie in (0, t_final]");
  const auto sim = simulate_run(cfg, cfg.datum);
  const auto r = flattening_ratio(sim.traj, cfg.kernel, t, cfg.flattening.window, cfg.datum.a(), cfg.datum.b(),
                                  cfg.flattening.tol_rel);
  const std::vector<VerificationReport> reports{r};
  write_reports(cfg, reports);
  auto meta = base_metadata("verify-flattening", cfg);
  meta["simulation"] = simulation_json(sim);
  write_json(cfg, "metadata.json", meta);
  return summarize(reports);
}

// ---- verify-proposition ----

int cmd_verify_proposition(const RunConfig& cfg) {
  const double a = cfg.datum.a();
  const double b = cfg.datum.b();
  std::vector<VerificationReport> reports;

  const auto sim = simulate_run(cfg, cfg.datum);
  reports.push_back(halfline_bound_check(sim.traj, a, b, cfg.halfline.tol * a));
  if (cfg.datum.kind() != DatumKind::custom) reports.push_back(nonincreasing_check(sim.traj, 1e-12));

  // Mollified datum pushed left by its radius, hence below u0 everywhere.
  const double eps = cfg.mirror.epsilon;
  const auto lower_datum = InitialDatum::mollified_step(a, b - eps, eps);
  const auto lower = evolve(sim.op, lower_datum.sample(sim.op.grid_ptr()), cfg.time.t_final, output_times(cfg),
                            {cfg.time.safety, cfg.time.method});
  auto cmp = discrete_comparison_check(sim.traj, lower, 1e-12);
  cmp.metadata["lower"] = "mollified step, edge b - epsilon";
  reports.push_back(cmp);

  const auto& m = cfg.mirror;
  auto mgrid = make_grid(b - m.half_width, b + m.half_width, m.n);
  std::vector<double> mtimes;
  for (double s : cfg.time.snapshots) {
    if (s <= m.t_final) mtimes.push_back(s);
  }
  auto mop = build_operator(cfg, mgrid, BoundaryModel{a, RightZero{}});
  const auto mtraj = evolve(mop, InitialDatum::mollified_step(a, b, eps).sample(mgrid), m.t_final, mtimes,
                            {cfg.time.safety, cfg.time.method});
  auto mirror = mirror_identity_check(mtraj, a, b, m.tol * a);
  mirror.metadata["epsilon"] = g17(eps);
  reports.push_back(mirror);

  write_reports(cfg, reports);
  auto meta = base_metadata("verify-proposition", cfg);
  meta["simulation"] = simulation_json(sim);
  write_json(cfg, "metadata.json", meta);
  return summarize(reports);
}

// ---- reference-compare ----

/// Normalizing constant of (-Laplacian)^s in one dimension.
double fractional_laplacian_constant(double s) {
  return s * std::pow(4.0, s) * std::tgamma(0.5 + s) / (std::sqrt(std::numbers::pi) * std::tgamma(1.0 - s));
}

int cmd_reference_compare(const RunConfig& cfg) {
  const auto* pure = std::get_if<PureFractional>(&cfg.kernel.family());
  const double s = cfg.kernel.s();
  if (!pure || !(s < 1.0)) throw ConfigError("reference-compare needs a pure_fractional kernel with s < 1");
  if (cfg.datum.kind() != DatumKind::step) throw ConfigError("reference-compare needs a step initial datum");
  if (!(cfg.time.t_final > 0.0)) throw ConfigError("reference-compare needs t_final > 0");
  const double a = cfg.datum.a();
  const double b = cfg.datum.b();
  // A |z|^{-1-2s} = (A / c_s) times the kernel of -(-Laplacian)^s.
  const double t_eff = cfg.time.t_final * pure->amplitude / fractional_laplacian_constant(s);
  const Window w = cfg.reference.window.value_or(Window{0.5 * cfg.grid.x_min, 0.25 * cfg.grid.x_max});
  if (w.lo < cfg.grid.x_min || w.hi > cfg.grid.x_max) throw ConfigError("checks.reference.window lies outside the grid");

  struct Level {
    double h, x_min, x_max;
    std::size_t n;
    double error, worst_x;
  };
  std::vector<Level> levels;
  const std::size_t count = std::max<std::size_t>(cfg.reference.levels, 1);
  for (std::size_t k = 0; k < count; ++k) {
    const double scale = std::ldexp(1.0, static_cast<int>(k));
    auto grid = make_grid(cfg.grid.x_min * scale, cfg.grid.x_max * scale,
                          (cfg.grid.n - 1) * static_cast<std::size_t>(scale * scale) + 1);
    auto op = build_operator(cfg, grid, cfg.boundary);
    const auto traj = evolve(op, cfg.datum.sample(grid), cfg.time.t_final, {}, {cfg.time.safety, cfg.time.method});
    const Field& u = traj.back();
    Level lv{grid->spacing(), grid->x_min(), grid->x_max(), grid->size(), 0.0, 0.0};
    for (std::size_t i = 0; i < u.size(); ++i) {
      const double x = grid->point(i);
      if (x < w.lo || x > w.hi) continue;
      const double e = std::abs(u[i] - reference_solution(s, a, b, t_eff, x));
      if (e > lv.error) {
        lv.error = e;
        lv.worst_x = x;
      }
    }
    levels.push_back(lv);
    std::cout << "level " << k << ": n=" << lv.n << " h=" << g17(lv.h) << " Linf=" << g17(lv.error) << '\n';
  }

  std::vector<VerificationReport> reports;
  VerificationReport err;
  err.check = "reference_linf_error";
  err.measured = levels.front().error;
  err.bound = cfg.reference.tol;
  err.tolerance = cfg.reference.tol;
  err.worst_t = cfg.time.t_final;
  err.worst_x = levels.front().worst_x;
  err.pass = err.measured <= err.bound;
  err.metadata = {{"window_lo", g17(w.lo)}, {"window_hi", g17(w.hi)}, {"t_effective", g17(t_eff)}};
  reports.push_back(err);
  if (levels.size() >= 2) {
    VerificationReport ratio;
    ratio.check = "reference_refinement_ratio";
    ratio.measured = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k + 1 < levels.size(); ++k) {
      ratio.measured = std::min(ratio.measured, levels[k].error / levels[k + 1].error);
    }
    ratio.bound = cfg.reference.min_ratio;
    ratio.pass = ratio.measured >= ratio.bound;
    ratio.worst_t = cfg.time.t_final;
    reports.push_back(ratio);
  }

  // Far-field constant of the exact solution against the two-sided kernel bound.
  const std::vector<double> ts{0.5, 1.0, 2.0};
  std::vector<double> xs{0.0};
  for (int e = -2; e <= 3; ++e) {
    for (double m : {1.0, 3.0}) xs.push_back(m * std::pow(10.0, e));
  }
  const auto fit = heat_kernel_bounds_fit(s, ts, xs);
  VerificationReport lim;
  lim.check = "heat_kernel_limit";
  lim.measured = a * fit.limit_measured;
  lim.bound = a * fit.limit_bound_exact_integral;
  lim.tolerance = 1e-9;
  lim.pass = lim.measured >= lim.bound * (1.0 - lim.tolerance);
  lim.metadata = {{"C1", g17(fit.C1)},
                  {"a_over_C1", g17(a * fit.limit_bound)},
                  {"a_over_2sC1", g17(a * fit.limit_bound_exact_integral)},
                  {"tail_coefficient_limit", g17(a * heat_kernel_tail_coefficient(s) / (2.0 * s))}};
  reports.push_back(lim);

  if (wants_csv(cfg.format)) {
    auto out = open_output(cfg, "reference.csv");
    out << "h,x_min,x_max,n,linf_error\n";
    for (const auto& lv : levels) {
      out << g17(lv.h) << ',' << g17(lv.x_min) << ',' << g17(lv.x_max) << ',' << lv.n << ',' << g17(lv.error) << '\n';
    }
  }
  write_reports(cfg, reports);
  write_json(cfg, "metadata.json", base_metadata("reference-compare", cfg));
  return summarize(reports);
}

// ---- bench ----

template <class F>
double median_ms(std::size_t repeats, F&& f) {
  std::vector<double> ms;
  for (std::size_t r = 0; r < repeats; ++r) {
    const auto t0 = std::chrono::steady_clock::now();
    f();
    const auto t1 = std::chrono::steady_clock::now();
    ms.push_back(std::chrono::duration<double, std::milli>(t1 - t0).count());
  }
  std::sort(ms.begin(), ms.end());
  return ms[ms.size() / 2];
}

int cmd_bench(const RunConfig& cfg) {
  std::mt19937_64 rng(cfg.seed);
  std::uniform_real_distribution<double> dist(0.0, 1.0);
  struct Row {
    std::size_t n;
    double direct_ms, fft_ms, rel_diff;
  };
  std::vector<Row> rows;
  for (std::size_t n : cfg.bench.sizes) {
    const double half = 0.05 * static_cast<double>(n - 1);
    auto grid = make_grid(-half, half, n);
    auto op = build_operator(cfg, grid, BoundaryModel{1.0, RightZero{}});
    std::vector<double> u(n), direct(n), fft(n);
    for (auto& v : u) v = dist(rng);
    const double d_ms = median_ms(cfg.bench.repeats, [&] { op.apply_values(u, direct, ApplyMethod::direct); });
    const double f_ms = median_ms(cfg.bench.repeats, [&] { op.apply_values(u, fft, ApplyMethod::fft); });
    double diff = 0.0, scale = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      diff = std::max(diff, std::abs(direct[i] - fft[i]));
      scale = std::max(scale, std::abs(direct[i]));
    }
    rows.push_back({n, d_ms, f_ms, scale > 0.0 ? diff / scale : diff});
    std::cout << "n=" << n << " direct_ms=" << g17(d_ms) << " fft_ms=" << g17(f_ms) << '\n';
  }

  if (wants_csv(cfg.format)) {
    auto out = open_output(cfg, "bench.csv");
    out << "n,direct_ms,fft_ms,speedup\n";
    for (const auto& r : rows) {
      out << r.n << ',' << g17(r.direct_ms) << ',' << g17(r.fft_ms) << ',' << g17(r.direct_ms / r.fft_ms) << '\n';
    }
  }

  std::vector<VerificationReport> reports;
  VerificationReport agree;
  agree.check = "fft_matches_direct";
  agree.bound = 1e-10;
  agree.tolerance = 1e-10;
  for (const auto& r : rows) {
    if (r.rel_diff >= agree.measured) {
      agree.measured = r.rel_diff;
      agree.worst_x = static_cast<double>(r.n);
    }
  }
  agree.pass = agree.measured <= agree.bound;
  agree.metadata["worst_x"] = "grid size n";
  reports.push_back(agree);
  VerificationReport faster;
  faster.check = "fft_faster_for_large_n";
  faster.bound = 1.0;
  faster.measured = std::numeric_limits<double>::infinity();
  for (const auto& r : rows) {
    if (r.n < kFftThreshold) continue;
    const double speedup = r.direct_ms / r.fft_ms;
    if (speedup < faster.measured) {
      faster.measured = speedup;
      faster.worst_x = static_cast<double>(r.n);
    }
  }
  faster.pass = faster.measured > faster.bound;
  faster.metadata = {{"measured", "min direct_ms / fft_ms over n >= 4096"}, {"worst_x", "grid size n"}};
  if (std::isfinite(faster.measured)) reports.push_back(faster);

  write_reports(cfg, reports);
  auto meta = base_metadata("bench", cfg);
  meta["repeats"] = cfg.bench.repeats;
  write_json(cfg, "metadata.json", meta);
  return summarize(reports);
}

}  // namespace

int run(std::string_view command, const RunConfig& cfg) {
  if (command == "simulate") return cmd_simulate(cfg);
  if (command == "verify-subsolution") return cmd_verify_subsolution(cfg);
  if (command == "verify-flattening") return cmd_verify_flattening(cfg);
  if (command == "verify-proposition") return cmd_verify_proposition(cfg);
  if (command == "reference-compare") return cmd_reference_compare(cfg);
  if (command == "bench") return cmd_bench(cfg);
  throw ConfigError("unknown command '" + std::string(command) + "'");
}

}  // namespace nlflat::cli
