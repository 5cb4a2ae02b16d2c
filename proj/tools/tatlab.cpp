// tatlab command-line driver: runs experiments described by an INI config and
// writes plot-ready CSV / binary grid artifacts.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "tatlab.hpp"

namespace fs = std::filesystem;
using namespace tat;

namespace {

enum Exit { ok = 0, config_failure = 1, usage = 2, blow_up = 3, runtime_failure = 4 };

const std::map<std::string, std::set<std::string>> kSchema = {
    {"medium", {"kind", "c", "a", "b", "r0", "sigma", "amplitude", "center_x", "center_y", "path"}},
    {"scenario",
     {"domain_x_min", "domain_x_max", "domain_y_min", "domain_y_max", "omega_x", "omega_y", "omega_radius", "s_x",
      "s_y", "s_radius", "s_angle_start", "s_angle_end", "n_s", "n_t", "v_margin", "u_x", "u_y", "u_radius",
      "t_obs"}},
    {"grid", {"h"}},
    {"solver",
     {"cfl", "dt", "boundary", "sponge_width", "sponge_sigma", "sponge_exponent", "snapshots_every",
      "track_energy", "ray_x", "ray_y", "ray_xi_x", "ray_xi_y", "ray_t_max", "ray_ds", "n_dir", "n_pos",
      "n_u_samples"}},
    {"subspace", {"center_x", "center_y", "f0_radius", "epsilon", "orientation", "k_min", "k_max", "k_step",
                  "s_list"}},
    {"spectrum", {"basis_per_side", "j_min", "embedding", "s", "s1", "s2", "epsilon", "side_x", "side_y",
                  "n_modes", "holder", "holder_s0", "holder_s1", "holder_s", "mu_list"}},
    {"reconstruct", {"method", "n_iter", "step_scale", "power_iterations", "seed", "noise", "phantom",
                     "phantom_x", "phantom_y", "phantom_width", "phantom_edge", "phantom_k", "cone_half_angle"}},
    {"output", {"dir"}},
};

struct Run {
  Config cfg;
  fs::path out;
  std::size_t workers = 1;
};

void write_text(const fs::path& file, const std::string& text) {
  auto os = open_output(file);
  os << text;
}

struct Setup {
  Scenario scenario;
  SpeedField field = SpeedField::constant(1.0);
  GridField grid;
  SolverOptions solver;
};

SolverOptions solver_options(const Config& cfg) {
  SolverOptions o;
  o.cfl = cfg.get_double("solver.cfl", 0.5);
  if (cfg.has("solver.dt")) o.dt = cfg.get_double("solver.dt");
  const std::string b = cfg.get_string("solver.boundary", "sponge");
  if (b == "sponge")
    o.boundary = Boundary::sponge;
  else if (b == "periodic")
    o.boundary = Boundary::periodic;
  else
    throw ConfigError("solver.boundary", "solver.boundary must be sponge or periodic");
  const auto width = cfg.get_int("solver.sponge_width", static_cast<long long>(kDefaultSpongeWidth));
  if (width < 0) throw ConfigError("solver.sponge_width", "solver.sponge_width must be non-negative");
  o.sponge.width = std::size_t(width);
  o.sponge.sigma_max = cfg.get_double("solver.sponge_sigma", 0.0);
  o.sponge.exponent = cfg.get_double("solver.sponge_exponent", 2.0);
  const auto snaps = cfg.get_int("solver.snapshots_every", 0);
  if (snaps < 0) throw ConfigError("solver.snapshots_every", "solver.snapshots_every must be non-negative");
  o.snapshots_every = std::size_t(snaps);
  o.track_energy = cfg.get_bool("solver.track_energy", false);
  return o;
}

Setup make_setup(const Config& cfg) {
  Setup s;
  try {
    s.scenario = build_scenario(cfg);
  } catch (const ValidationError& e) {
    throw ConfigError("scenario", std::string("invalid scenario: ") + e.what());
  }
  s.field = build_speed(cfg, s.scenario.domain_rect);
  const double h = cfg.get_double("grid.h");
  if (!(h > 0.0)) throw ConfigError("grid.h", "grid.h must be positive");
  s.grid = grid_covering(s.scenario.domain_rect, h);
  s.solver = solver_options(cfg);
  return s;
}

std::size_t positive(const Config& cfg, const std::string& key, long long fallback) {
  const auto v = cfg.get_int(key, fallback);
  if (v < 1) throw ConfigError(key, key + " must be at least 1");
  return std::size_t(v);
}

Vec2 parse_direction(const std::string& key, const std::string& text) {
  std::stringstream ss(text);
  double x = 0.0, y = 0.0;
  char comma = 0;
  if (!(ss >> x >> comma >> y) || comma != ',' || (x == 0.0 && y == 0.0))
    throw ConfigError(key, key + " must be 'auto' or 'x,y' with a non-zero vector");
  return Vec2{x, y} * (1.0 / norm(Vec2{x, y}));
}

/// Invisible direction from the config, or from a scan when set to auto.
Vec2 family_orientation(const Run& run, const Setup& s, bool* found = nullptr) {
  const std::string text = run.cfg.get_string("subspace.orientation", "auto");
  if (text != "auto") return parse_direction("subspace.orientation", text);
  const auto dir = find_invisible_direction(
      s.scenario, s.field, positive(run.cfg, "solver.n_u_samples", 32), positive(run.cfg, "solver.n_dir", 180),
      run.cfg.get_double("solver.ray_t_max", 10.0), run.cfg.get_double("solver.ray_ds", 1e-3), run.workers);
  if (found) *found = dir.has_value();
  return dir.value_or(Vec2{0.0, 1.0});
}

ProductFunction family_member(const Config& cfg, const Scenario& sc, Vec2 orientation, int k) {
  ProductFunction pf;
  pf.center = {cfg.get_double("subspace.center_x", sc.u_region.center.x),
               cfg.get_double("subspace.center_y", sc.u_region.center.y)};
  pf.f0_radius = cfg.get_double("subspace.f0_radius", 0.5 * sc.u_region.radius);
  pf.epsilon = cfg.get_double("subspace.epsilon", 0.5 * sc.u_region.radius);
  pf.k = k;
  pf.orientation = orientation;
  return pf;
}

std::vector<int> k_list(const Config& cfg) {
  const auto lo = cfg.get_int("subspace.k_min", 10), hi = cfg.get_int("subspace.k_max", 40),
             step = cfg.get_int("subspace.k_step", 2);
  if (lo < 0 || hi < lo || step < 1) throw ConfigError("subspace.k_step", "subspace k range is empty or invalid");
  std::vector<int> ks;
  for (auto k = lo; k <= hi; k += step) ks.push_back(int(k));
  return ks;
}

GridField make_phantom(const Run& run, const Setup& s) {
  const Config& cfg = run.cfg;
  const std::string kind = cfg.get_string("reconstruct.phantom", "gaussian");
  const Vec2 c{cfg.get_double("reconstruct.phantom_x", s.scenario.omega.center.x),
               cfg.get_double("reconstruct.phantom_y", s.scenario.omega.center.y)};
  const double width = cfg.get_double("reconstruct.phantom_width", 0.25 * s.scenario.omega.radius);
  GridField f = s.grid.zeros_like();
  if (kind == "gaussian") {
    for (std::size_t j = 0; j < f.ny; ++j)
      for (std::size_t i = 0; i < f.nx; ++i)
        f(i, j) = std::exp(-norm2(f.node(i, j) - c) / (width * width));
  } else if (kind == "square") {
    // Smoothed square: tanh edges of thickness phantom_edge.
    const double edge = cfg.get_double("reconstruct.phantom_edge", 2.0 * s.grid.h);
    for (std::size_t j = 0; j < f.ny; ++j)
      for (std::size_t i = 0; i < f.nx; ++i) {
        const Vec2 d = f.node(i, j) - c;
        f(i, j) = 0.25 * (1.0 + std::tanh((width - std::abs(d.x)) / edge)) *
                  (1.0 + std::tanh((width - std::abs(d.y)) / edge));
      }
  } else if (kind == "product") {
    const auto k = cfg.get_int("reconstruct.phantom_k", 20);
    return family_member(cfg, s.scenario, family_orientation(run, s), int(k)).sample(s.grid, s.scenario.u_region);
  } else {
    throw ConfigError("reconstruct.phantom", "reconstruct.phantom must be gaussian, square or product");
  }
  // Taper to zero well inside omega so the support condition holds exactly.
  const Disc& om = s.scenario.omega;
  for (std::size_t j = 0; j < f.ny; ++j)
    for (std::size_t i = 0; i < f.nx; ++i) {
      const double r = norm(f.node(i, j) - om.center) / om.radius;
      f(i, j) *= smooth_step((1.0 - r) / 0.1);
    }
  return f;
}

// ---------------------------------------------------------------- commands

int cmd_rays(const Run& run, bool halve) {
  const Setup s = make_setup(run.cfg);
  const Vec2 x0{run.cfg.get_double("solver.ray_x", 0.0), run.cfg.get_double("solver.ray_y", 0.0)};
  const Vec2 xi0{run.cfg.get_double("solver.ray_xi_x", 0.0), run.cfg.get_double("solver.ray_xi_y", 1.0)};
  const double t_max = run.cfg.get_double("solver.ray_t_max", 10.0);
  const double ds = run.cfg.get_double("solver.ray_ds", 1e-3);
  std::ostringstream summary;
  CsvWriter w(summary, {"branch", "t_end", "x_end", "y_end", "drift", "endpoint_difference"});
  for (Branch b : {Branch::plus, Branch::minus}) {
    const RayPath p = trace_bicharacteristic(s.field, s.scenario.domain_rect, x0, xi0, b, t_max, ds);
    write_ray_csv(run.out / (std::string("rays_") + to_string(b) + ".csv"), p);
    double diff = 0.0;
    if (halve) {
      const RayPath q = trace_bicharacteristic(s.field, s.scenario.domain_rect, x0, xi0, b, t_max, 0.5 * ds);
      write_ray_csv(run.out / (std::string("rays_") + to_string(b) + "_half.csv"), q);
      diff = norm(p.back().x - q.back().x);
    }
    w.row({b == Branch::plus ? 1.0 : -1.0, p.back().t, p.back().x.x, p.back().x.y, hamiltonian_drift(s.field, p),
           diff});
  }
  write_text(run.out / "rays_summary.csv", summary.str());
  return ok;
}

int cmd_visibility(const Run& run) {
  const Setup s = make_setup(run.cfg);
  const double t_max = run.cfg.get_double("solver.ray_t_max", 10.0);
  const double ds = run.cfg.get_double("solver.ray_ds", 1e-3);
  const auto n_dir = positive(run.cfg, "solver.n_dir", 180);
  const auto vm = visibility_map(s.scenario, s.field, positive(run.cfg, "solver.n_pos", 64), n_dir, t_max, ds,
                                 run.workers);
  {
    auto os = open_output(run.out / "visibility.csv");
    CsvWriter w(os, {"position", "x", "y", "fraction"});
    for (std::size_t i = 0; i < vm.positions.size(); ++i)
      w.row({double(i), vm.positions[i].x, vm.positions[i].y, vm.fraction(i)});
  }
  {
    auto os = open_output(run.out / "visibility_matrix.csv");
    CsvWriter w(os, {"position", "direction", "theta_deg", "visible"});
    for (std::size_t i = 0; i < vm.positions.size(); ++i)
      for (std::size_t j = 0; j < n_dir; ++j)
        w.row({double(i), double(j), 180.0 * double(j) / double(n_dir), vm.at(i, j) ? 1.0 : 0.0});
  }
  const auto search = find_invisible_direction_scan(s.scenario, s.field, positive(run.cfg, "solver.n_u_samples", 32),
                                                    n_dir, t_max, ds, run.workers);
  std::ostringstream txt;
  txt << "t_max = " << format_double(t_max) << '\n';
  if (search.direction)
    txt << "invisible_direction = " << format_double(search.direction->x) << ','
        << format_double(search.direction->y) << '\n';
  else
    txt << "invisible_direction = none\n";
  write_text(run.out / "visibility_summary.txt", txt.str());
  return ok;
}

void write_trace_csv(const fs::path& file, const TraceRecord& g) {
  auto os = open_output(file);
  CsvWriter w(os, {"s_index", "t", "g"});
  for (std::size_t i = 0; i < g.n_s; ++i)
    for (std::size_t j = 0; j < g.n_t; ++j) w.row({double(i), double(j) * g.dt_trace, g(i, j)});
}

int cmd_simulate(const Run& run) {
  const Setup s = make_setup(run.cfg);
  const GridField f = make_phantom(run, s);
  const WavePropagator prop(s.field, s.scenario, s.grid, s.solver);
  const SimulationResult r = prop.simulate(f);
  write_grid(f, run.out / "initial.tatg");
  write_trace_csv(run.out / "trace.csv", r.trace);
  for (std::size_t k = 0; k < r.snapshots.size(); ++k) {
    char name[64];
    std::snprintf(name, sizeof name, "snapshot_%05zu.tatg", k);
    write_grid(r.snapshots[k], run.out / name);
  }
  auto os = open_output(run.out / "norms.csv");
  if (s.solver.track_energy) {
    CsvWriter w(os, {"t", "l2", "energy"});
    for (std::size_t n = 0; n < r.times.size(); ++n) w.row({r.times[n], r.l2_norms[n], r.energy[n]});
  } else {
    CsvWriter w(os, {"t", "l2"});
    for (std::size_t n = 0; n < r.times.size(); ++n) w.row({r.times[n], r.l2_norms[n]});
  }
  return ok;
}

std::string fit_text(const DecayFit& f) {
  std::ostringstream o;
  o << "power_exponent = " << format_double(f.exponent) << '\n'
    << "power_r2 = " << format_double(f.power_r2) << '\n'
    << "exp_rate = " << format_double(f.rate) << '\n'
    << "exp_r2 = " << format_double(f.exp_r2) << '\n'
    << "aic_power = " << format_double(f.aic_power) << '\n'
    << "aic_exp = " << format_double(f.aic_exp) << '\n'
    << "model_preference = " << to_string(f.preference) << '\n'
    << "n_used = " << f.n_used << '\n';
  return o.str();
}

SpectrumReport forward_spectrum(const Run& run, const Setup& s) {
  const WavePropagator prop(s.field, s.scenario, s.grid, s.solver);
  std::vector<std::string> names;
  const auto basis = make_bump_basis(s.grid, s.scenario.omega, positive(run.cfg, "spectrum.basis_per_side", 6), &names);
  if (basis.empty()) throw ConfigError("spectrum.basis_per_side", "bump basis is empty for this omega");
  const auto m = assemble_forward_matrix(prop, basis, names, run.workers);
  return spectrum_report(m, positive(run.cfg, "spectrum.j_min", 8));
}

void write_sigmas(const fs::path& file, const std::vector<double>& sigmas) {
  auto os = open_output(file);
  CsvWriter w(os, {"j", "sigma"});
  for (std::size_t j = 0; j < sigmas.size(); ++j) w.row({double(j + 1), sigmas[j]});
}

int cmd_spectrum(const Run& run) {
  const Setup s = make_setup(run.cfg);
  const auto rep = forward_spectrum(run, s);
  write_sigmas(run.out / "spectrum.csv", rep.sigmas);
  write_text(run.out / "spectrum_fit.txt", rep.fit ? fit_text(*rep.fit) : "model_preference = insufficient_data\n");
  return ok;
}

int cmd_embedding(const Run& run) {
  const Config& cfg = run.cfg;
  EmbeddingSpec spec;
  const std::string kind = cfg.get_string("spectrum.embedding", "interval");
  if (kind == "interval")
    spec.kind = EmbeddingKind::interval_Hs0_to_L2;
  else if (kind == "torus")
    spec.kind = EmbeddingKind::torus_Hs1_to_Hs2;
  else
    throw ConfigError("spectrum.embedding", "spectrum.embedding must be interval or torus");
  spec.s = int(cfg.get_int("spectrum.s", 1));
  spec.s1 = int(cfg.get_int("spectrum.s1", 2));
  spec.s2 = int(cfg.get_int("spectrum.s2", 0));
  spec.epsilon = cfg.get_double("spectrum.epsilon", 1.0);
  spec.side_x = cfg.get_double("spectrum.side_x", 2.0 * std::numbers::pi);
  spec.side_y = cfg.get_double("spectrum.side_y", 2.0 * std::numbers::pi);
  spec.n_modes = positive(cfg, "spectrum.n_modes", 128);
  const auto sn = embedding_snumbers(spec);
  write_sigmas(run.out / "embedding.csv", sn);
  std::string text = fit_text(fit_decay(sn, positive(cfg, "spectrum.j_min", 8)));

  if (cfg.get_bool("spectrum.holder", false)) {
    const int s0 = int(cfg.get_int("spectrum.holder_s0", 0));
    const int s1 = int(cfg.get_int("spectrum.holder_s1", 1));
    const int s = int(cfg.get_int("spectrum.holder_s", 8));
    const auto emb = probe_embeddings(s0, s1, s, spec.epsilon, spec.side_x, spec.side_y);
    auto os = open_output(run.out / "holder.csv");
    CsvWriter w(os, {"mu", "j", "margin"});
    std::ostringstream o;
    for (double mu : cfg.get_list("spectrum.mu_list", {0.25, 0.5, 0.75, 1.0})) {
      const auto hp = holder_probe(emb.interval, emb.torus, mu, s0, s1, s);
      for (std::size_t j = 0; j < hp.margin.size(); ++j) w.row({mu, double(j + 1), hp.margin[j]});
      o << "holder_mu_" << format_double(mu) << " = C " << format_double(hp.c_calibrated) << ", positive from j "
        << (hp.j_positive ? std::to_string(*hp.j_positive) : std::string("never")) << '\n';
    }
    text += o.str();
  }
  write_text(run.out / "embedding_fit.txt", text);
  return ok;
}

InstabilityCurve run_instability(const Run& run, const Setup& s, Vec2 orientation) {
  const WavePropagator prop(s.field, s.scenario, s.grid, s.solver);
  const auto family = [&](int k) {
    return family_member(run.cfg, s.scenario, orientation, k).sample(s.grid, s.scenario.u_region);
  };
  return instability_curve(prop, family, k_list(run.cfg), run.cfg.get_list("subspace.s_list", {1.0, 2.0}),
                           run.workers);
}

void write_curve(const fs::path& file, const InstabilityCurve& c) {
  auto os = open_output(file);
  std::vector<std::string> names{"k", "r_k"};
  for (double s : c.s_list) names.push_back("Hs" + format_double(s));
  std::string header;
  for (std::size_t i = 0; i < names.size(); ++i) header += (i ? "," : "") + names[i];
  os << header << '\n';
  for (const auto& p : c.points) {
    os << p.k << ',' << format_double(p.r_k);
    for (double v : p.trace_hs) os << ',' << format_double(v);
    os << '\n';
  }
}

std::optional<DecayFit> try_fit(const InstabilityCurve& c) {
  try {
    return fit_decay(c.ks(), c.ratios(), 0.0);
  } catch (const NumericalError&) {
    return std::nullopt;
  }
}

int cmd_instability(const Run& run) {
  const Setup s = make_setup(run.cfg);
  const auto c = run_instability(run, s, family_orientation(run, s));
  write_curve(run.out / "instability_curve.csv", c);
  const auto fit = try_fit(c);
  write_text(run.out / "instability_fit.txt", fit ? fit_text(*fit) : "model_preference = insufficient_data\n");
  return ok;
}

int cmd_reconstruct(const Run& run) {
  const Setup s = make_setup(run.cfg);
  const WavePropagator prop(s.field, s.scenario, s.grid, s.solver);
  const GridField f = make_phantom(run, s);
  TraceRecord g = prop.forward(f);
  if (const double noise = run.cfg.get_double("reconstruct.noise", 0.0); noise > 0.0) {
    double peak = 0.0;
    for (double v : g.values) peak = std::max(peak, std::abs(v));
    std::mt19937_64 rng(std::uint64_t(run.cfg.get_int("reconstruct.seed", 12345)));
    std::normal_distribution<double> normal(0.0, noise * peak);
    for (auto& v : g.values) v += normal(rng);
  }
  const std::string method = run.cfg.get_string("reconstruct.method", "time_reversal");
  const double half_angle = run.cfg.get_double("reconstruct.cone_half_angle", 45.0);
  std::ostringstream txt;
  GridField rec;
  if (method == "time_reversal") {
    rec = time_reversal(prop, g);
  } else if (method == "landweber") {
    const double norm2 = estimate_operator_norm2(prop, positive(run.cfg, "reconstruct.power_iterations", 20));
    const double step = run.cfg.get_double("reconstruct.step_scale", 1.0) / norm2;
    const auto res = landweber(prop, g, positive(run.cfg, "reconstruct.n_iter", 20), step);
    rec = res.f_rec;
    auto os = open_output(run.out / "residuals.csv");
    write_residual_csv(os, res.residual_history);
    txt << "operator_norm2 = " << format_double(norm2) << "\nstep = " << format_double(step) << '\n';
  } else {
    throw ConfigError("reconstruct.method", "reconstruct.method must be time_reversal or landweber");
  }
  write_grid(f, run.out / "truth.tatg");
  write_grid(rec, run.out / "reconstruction.tatg");
  GridField err = rec;
  axpy(-1.0, f, err);
  mask_outside(err, s.scenario.omega);
  const Vec2 inv = family_orientation(run, s);
  txt << "rel_l2_error = " << format_double(relative_error(rec, f, s.scenario.omega)) << '\n'
      << "invisible_direction = " << format_double(inv.x) << ',' << format_double(inv.y) << '\n'
      << "invisible_cone_fraction = " << format_double(cone_residual_energy(err, inv, half_angle)) << '\n'
      << "visible_cone_fraction = " << format_double(cone_residual_energy(err, perp(inv), half_angle)) << '\n';
  write_text(run.out / "reconstruct_summary.txt", txt.str());
  return ok;
}

int cmd_demo(const Run& run) {
  const Setup inv = make_setup(run.cfg);
  bool found = false;
  const Vec2 dir = family_orientation(run, inv, &found);
  const auto c_inv = run_instability(run, inv, dir);

  Run control = run;
  control.cfg.set("scenario.s_angle_start", "0");
  control.cfg.set("scenario.s_angle_end", "360");
  const Setup vis = make_setup(control.cfg);
  const auto c_vis = run_instability(control, vis, dir);

  write_curve(run.out / "instability_curve.csv", c_inv);
  write_curve(run.out / "instability_curve_visible.csv", c_vis);
  const auto rep = forward_spectrum(run, inv);
  write_sigmas(run.out / "spectrum.csv", rep.sigmas);

  std::ostringstream t;
  t << "invisible_direction = " << format_double(dir.x) << ',' << format_double(dir.y)
    << (found ? "" : " (none found; default used)") << "\n\n";
  t << "configuration  exponent_q  exp_rate  exp_r2  preference  r_first  r_last";
  for (double s : c_inv.s_list) t << "  Hs" << format_double(s) << "_spread";
  t << '\n';
  for (const auto& [name, curve] : {std::pair{"invisible", &c_inv}, std::pair{"visible", &c_vis}}) {
    const auto fit = try_fit(*curve);
    t << name;
    if (fit)
      t << "  " << format_double(fit->exponent) << "  " << format_double(fit->rate) << "  "
        << format_double(fit->exp_r2) << "  " << to_string(fit->preference);
    else
      t << "  -  -  -  insufficient_data";
    t << "  " << format_double(curve->points.front().r_k) << "  " << format_double(curve->points.back().r_k);
    for (std::size_t i = 0; i < curve->s_list.size(); ++i) t << "  " << format_double(curve->hs_spread(i));
    t << '\n';
  }
  if (rep.fit)
    t << "\nforward_spectrum  n = " << rep.sigmas.size() << "  power_exponent = " << format_double(rep.fit->exponent)
      << "  exp_rate = " << format_double(rep.fit->rate) << "  preference = " << to_string(rep.fit->preference)
      << '\n';
  write_text(run.out / "summary.txt", t.str());
  return ok;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"tatlab: thermoacoustic tomography visibility and stability laboratory"};
  app.require_subcommand(1);
  std::string config_path;
  std::vector<std::string> overrides;
  std::string out_dir;
  std::size_t workers = 0;
  bool halve = false;

  const std::vector<std::pair<std::string, std::string>> commands = {
      {"rays", "trace both bicharacteristic branches from a point"},
      {"visibility", "visibility map over omega and invisible-direction search"},
      {"simulate", "forward wave simulation of the phantom"},
      {"spectrum", "singular values of the discretised forward operator"},
      {"embedding", "s-numbers of Sobolev embeddings and the Holder probe"},
      {"instability", "trace-to-data ratios of the oscillating product family"},
      {"reconstruct", "time reversal or Landweber reconstruction"},
      {"demo", "paired invisible/visible instability experiment with summary"},
  };
  for (const auto& [name, help] : commands) {
    auto* sub = app.add_subcommand(name, help);
    sub->add_option("-c,--config", config_path, "INI config file")->required()->check(CLI::ExistingFile);
    sub->add_option("-s,--set", overrides, "override, section.key=value (repeatable)");
    sub->add_option("-o,--out", out_dir, "output directory (else TATLAB_OUTPUT_DIR, output.dir, ./out)");
    sub->add_option("-j,--workers", workers, "worker threads (else TATLAB_WORKERS)");
    if (name == "rays") sub->add_flag("--halve-step", halve, "repeat at ds/2 and report endpoint differences");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? ok : usage;
  }

  const std::string cmd = app.get_subcommands().front()->get_name();
  try {
    Run run;
    run.cfg = Config::load(config_path);
    for (const auto& o : overrides) run.cfg.apply_override(o);
    run.cfg.reject_unknown(kSchema);
    if (out_dir.empty()) {
      if (const char* env = std::getenv("TATLAB_OUTPUT_DIR"); env && *env) out_dir = env;
    }
    if (out_dir.empty()) out_dir = run.cfg.get_string("output.dir", "out");
    run.out = out_dir;
    run.workers = workers ? workers : default_workers();
    fs::create_directories(run.out);
    write_text(run.out / "resolved.cfg", run.cfg.resolved_ini());

    int rc = ok;
    if (cmd == "rays") rc = cmd_rays(run, halve);
    else if (cmd == "visibility") rc = cmd_visibility(run);
    else if (cmd == "simulate") rc = cmd_simulate(run);
    else if (cmd == "spectrum") rc = cmd_spectrum(run);
    else if (cmd == "embedding") rc = cmd_embedding(run);
    else if (cmd == "instability") rc = cmd_instability(run);
    else if (cmd == "reconstruct") rc = cmd_reconstruct(run);
    else if (cmd == "demo") rc = cmd_demo(run);
    write_text(run.out / "resolved.cfg", run.cfg.resolved_ini());
    return rc;
  } catch (const ConfigError& e) {
    std::cerr << "tatlab " << cmd << ": config error [" << e.key() << "]: " << e.what() << '\n';
    return config_failure;
  } catch (const BlowUpError& e) {
    std::cerr << "tatlab " << cmd << ": numerical blow-up at step " << e.step() << ": " << e.what() << '\n';
    return blow_up;
  } catch (const std::exception& e) {
    std::cerr << "tatlab " << cmd << ": " << e.what() << '\n';
    return runtime_failure;
  }
}
