#include <algorithm>
#include <cmath>
#include <map>

#include "nhtopo/nhse.hpp"
#include "nhtopo/symmetry.hpp"
#include "nhtopo/tasks.hpp"
#include "task_util.hpp"

namespace nhtopo {

using namespace detail;

namespace {

const Complex kI(0.0, 1.0);

void add_loop(TaskOutput& out, const std::string& key, const ParametricModel& m, const ParamPath& path) {
  const BandTrajectories traj = track_bands(m, path);
  out.summary[key] = loop_summary(m, path, traj);
  out.tables.push_back(trajectory_table(traj, key + "_trajectories"));
  out.tables.push_back(loops_table(orbit_loops(traj), key + "_loops"));
}

// Flat copy of one loop summary into the top level, for single-loop figures.
void hoist(TaskOutput& out, const std::string& key) {
  const json inner = out.summary[key];
  for (auto it = inner.begin(); it != inner.end(); ++it) out.summary[it.key()] = it.value();
  out.summary.erase(key);
}

void add_arc(TaskOutput& out, const std::string& key, const ParametricModel& m, const std::array<Axis, 3>& axes,
             const ParamPoint& seed, double step, int max_points) {
  json both = json::array();
  for (int dir : {1, -1}) {
    const ArcTrace tr = trace_ea(m, axes, seed, step, max_points, dir);
    Table t;
    t.name = key + (dir > 0 ? "_forward" : "_backward");
    t.columns = {axis_name(axes[0]), axis_name(axes[1]), axis_name(axes[2]), "re_E", "im_E", "j0", "j1", "j2"};
    for (const auto& p : tr.points) {
      t.add({get_axis(p.location, axes[0]), get_axis(p.location, axes[1]), get_axis(p.location, axes[2]),
             p.energy.real(), p.energy.imag(), p.current[0], p.current[1], p.current[2]});
    }
    out.tables.push_back(std::move(t));
    both.push_back(json{{"direction", dir},
                        {"points", tr.points.size()},
                        {"order_changed", tr.order_changed},
                        {"stop_reason", tr.stop_reason}});
  }
  const auto c = ea_current(m, seed, axes);
  out.summary[key] = json{{"seed", point_json(seed)}, {"current", {c[0], c[1], c[2]}}, {"traces", both}};
}

Table sampled_spectrum(const ParametricModel& m, const ParamPath& path, const std::string& name) {
  Table t;
  t.name = name;
  t.columns = {"u"};
  for (Eigen::Index b = 0; b < m.dim(); ++b) {
    t.columns.push_back("re_E" + std::to_string(b + 1));
    t.columns.push_back("im_E" + std::to_string(b + 1));
  }
  const auto pts = path.points();
  for (std::size_t i = 0; i < pts.size(); ++i) {
    ComplexVector e = eigenvalues(m(pts[i]));
    std::sort(e.data(), e.data() + e.size(), [](Complex a, Complex b) {
      return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
    });
    std::vector<double> row{path.u_end() * static_cast<double>(i) / static_cast<double>(pts.size())};
    for (Eigen::Index b = 0; b < e.size(); ++b) {
      row.push_back(e(b).real());
      row.push_back(e(b).imag());
    }
    t.add(std::move(row));
  }
  return t;
}

TaskOutput fig_1g() {
  TaskOutput out;
  const ParametricModel m = h2_model();
  add_loop(out, "loop", m, circle_path(m.point({0.0, 1.0}), "z", 0.0, 0.8, 256));
  hoist(out, "loop");
  return out;
}

TaskOutput fig_1h() {
  TaskOutput out;
  const ParametricModel m = h2_model();
  const ParamPath path = circle_path(m.point({0.0, 1.0}), "z", 1.2 * kI, 0.8, 256);
  out.tables.push_back(sampled_spectrum(m, path, "spectrum"));
  out.summary["hits_ep"] = false;
  try {
    out.summary["ewn"] = vorticity_winding(m, path);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::PathHitsEP) throw;
    out.summary["hits_ep"] = true;
    out.summary["diagnostic"] = e.what();
  }
  double best = std::numeric_limits<double>::infinity(), at = 0.0;
  const auto pts = path.points();
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const double d = std::abs(discriminant(m(pts[i])));
    if (d < best) {
      best = d;
      at = static_cast<double>(i) / static_cast<double>(pts.size());
    }
  }
  out.summary["closest_u"] = at;
  out.summary["min_abs_discriminant"] = best;
  return out;
}

TaskOutput fig_1i() {
  TaskOutput out;
  const ParametricModel m = h2_model();
  const ParamPoint base = m.point({0.0, 1.0});
  add_loop(out, "loop", m, circle_path(base, "z", 2.0 * kI, 0.8, 256));
  hoist(out, "loop");
  const BerryResult two = wilson_loop(m, circle_path(base, "z", 2.0 * kI, 0.8, 256, 2));
  out.summary["two_cycles"] = berry_json(two);
  return out;
}

TaskOutput fig_1k() {
  TaskOutput out;
  const ParametricModel m = h2_model();
  const ParamPoint base = m.point({0.0, 1.0});
  Table t;
  t.name = "sheets";
  t.columns = {"x", "y", "re_E1", "im_E1", "re_E2", "im_E2"};
  const int n = 61;
  for (int i = 0; i < n; ++i) {
    for (int k = 0; k < n; ++k) {
      const Complex z(-3.0 + 6.0 * i / (n - 1), -3.0 + 6.0 * k / (n - 1));
      const Complex root = std::sqrt(z * z + 4.0);
      const Complex a = 0.5 * (z + root), b = 0.5 * (z - root);
      t.add({z.real(), z.imag(), a.real(), a.imag(), b.real(), b.imag()});
    }
  }
  out.tables.push_back(std::move(t));
  const Region r{base, Axis{"z", false}, Axis{"z", true}, -3.1, 2.9, -3.1, 2.9};
  json eps = json::array();
  for (const auto& e : locate_eps(m, r)) eps.push_back(ep_json(e));
  out.summary["eps"] = eps;
  out.summary["count"] = count_eps(m, r);
  return out;
}

TaskOutput fig_2a() {
  TaskOutput out;
  const ParametricModel m = h2_model();
  const std::array<Axis, 3> axes{Axis{"z", false}, Axis{"z", true}, Axis{"t", false}};
  add_arc(out, "arc_upper", m, axes, m.point({2.0 * kI, 1.0}), 0.05, 120);
  add_arc(out, "arc_lower", m, axes, m.point({-2.0 * kI, 1.0}), 0.05, 120);
  add_loop(out, "purple", m, circle_path(m.point({0.0, 1.0}), "z", 0.0, 3.0, 256));
  add_loop(out, "blue", m, plane_loop(m.point({-2.0 * kI, 0.0}), Axis{"z", false}, Axis{"t", false}, 0.0, 0.0, 1.5, 256));
  return out;
}

TaskOutput fig_2b() {
  TaskOutput out;
  const ParametricModel m = h2_model();
  add_loop(out, "loop", m, circle_path(m.point({0.0, 1.0}), "z", 0.0, 3.0, 256));
  hoist(out, "loop");
  return out;
}

TaskOutput fig_2c() {
  TaskOutput out;
  const ParametricModel m = h2_parabola_model();
  add_loop(out, "purple", m,
           plane_loop(m.point({0.0, 0.0}), Axis{"dt", false}, Axis{"dz", false}, 0.0, -0.5, 0.2, 256));
  add_loop(out, "blue", m, circle_path(m.point({0.0, -0.09}), "dt", 0.3, 0.1, 256));
  Table t;
  t.name = "ep_parabola";
  t.columns = {"dt", "dz"};
  for (int i = 0; i <= 40; ++i) {
    const double dt = -1.0 + 2.0 * i / 40;
    t.add({dt, -dt * dt});
  }
  out.tables.push_back(std::move(t));
  return out;
}

TaskOutput fig_2d() {
  TaskOutput out;
  const ParametricModel m = h2_parabola_model();
  add_loop(out, "loop", m, circle_path(m.point({0.0, -0.09}), "dt", 0.3, 0.1, 256));
  hoist(out, "loop");
  return out;
}

TaskOutput fig_2e() {
  TaskOutput out;
  const ParametricModel m = h2_parabola_model();
  const std::array<Axis, 3> axes{Axis{"dt", false}, Axis{"dt", true}, Axis{"dz", false}};
  add_arc(out, "arc", m, axes, m.point({0.5, -0.25}), 0.02, 200);
  add_loop(out, "kissing", m, circle_path(m.point({0.0, 0.0}), "dt", 0.0, 0.2, 256));
  return out;
}

TaskOutput fig_2f() {
  TaskOutput out;
  const ParametricModel m = h2_parabola_model();
  add_loop(out, "loop", m, circle_path(m.point({0.0, 0.0}), "dt", 0.0, 0.2, 256));
  hoist(out, "loop");
  return out;
}

TaskOutput fig_3a() {
  TaskOutput out;
  const ParametricModel m = h3_model();
  const Axis xr{"xi", false}, xi_im{"xi", true};
  for (const auto& [key, lam] : std::vector<std::pair<std::string, Complex>>{{"lam0", 0.0}, {"lam_m02i", -0.2 * kI}}) {
    Table t;
    t.name = "xi_scan_" + key;
    t.columns = {"xi", "re_E1", "im_E1", "re_E2", "im_E2", "re_E3", "im_E3"};
    for (int i = 0; i <= 200; ++i) {
      const double xi = -1.0 + 2.0 * i / 200;
      ComplexVector e = eigenvalues(h3(lam, xi));
      std::sort(e.data(), e.data() + 3, [](Complex a, Complex b) { return a.imag() < b.imag(); });
      t.add({xi, e(0).real(), e(0).imag(), e(1).real(), e(1).imag(), e(2).real(), e(2).imag()});
    }
    out.tables.push_back(std::move(t));
  }
  const OrderProbe p = ep_order(m, m.point({0.0, 0.0}), xr, xi_im);
  out.summary["origin_order"] = p.order;

  // Two order-2 EPs at lam = -0.2i, each encircled by a loop from a common base point.
  const ParamPoint base = m.point({-0.2 * kI, 0.0});
  const auto eps = locate_eps(m, Region{base, xr, xi_im, -2.0, 2.0, -2.0, 2.0});
  json list = json::array();
  std::vector<Permutation> perms;
  for (const auto& e : eps) {
    const Complex c = e.location.get("xi");
    const BandTrajectories tr =
        track_bands(m, lollipop_path(base, xr, xi_im, 0.0, 0.0, c.real(), c.imag(), 0.05, 512));
    perms.push_back(tr.permutation);
    json j = ep_json(e);
    j["permutation"] = cycle_notation(tr.permutation);
    list.push_back(j);
  }
  out.summary["eps"] = list;
  if (perms.size() == 2) {
    out.summary["composition_ab"] = cycle_notation(compose(perms[0], perms[1]));
    out.summary["composition_ba"] = cycle_notation(compose(perms[1], perms[0]));
    out.summary["group_order"] = generated_group_order(perms);
  }
  return out;
}

TaskOutput fig_3f() {
  TaskOutput out;
  struct Case {
    std::string key;
    ParametricModel model;
    ParamPoint at;
    std::string label;
    Complex direction;
    Axis x, y;
  };
  const ParametricModel m2 = h2_model(), m3 = h3_model();
  const std::vector<Case> cases{
      {"order2", m2, m2.point({2.0 * kI, 1.0}), "z", kI, Axis{"z", false}, Axis{"z", true}},
      {"order3_xi", m3, m3.point({0.0, 0.0}), "xi", 1.0, Axis{"xi", false}, Axis{"xi", true}},
      {"order3_lam", m3, m3.point({0.0, 0.0}), "lam", 1.0, Axis{"xi", false}, Axis{"xi", true}},
  };
  for (const auto& c : cases) {
    const OrderProbe p = ep_order(c.model, c.at, c.x, c.y);
    const EpRecord ep{c.at, p.energy, p.order, 0.0, false};
    json entry;
    entry["order"] = p.order;
    for (const auto& [name, obs] :
         std::vector<std::pair<std::string, Observable>>{{"rigidity", Observable::PhaseRigidity},
                                                         {"splitting", Observable::Splitting}}) {
      const ExponentFit f = critical_exponent(c.model, ep, c.label, c.direction, 1e-6, 1e-2, obs);
      entry[name] = json{{"slope", f.slope}, {"r_squared", f.r_squared}};
      Table t;
      t.name = c.key + "_" + name;
      t.columns = {"log_delta", "log_value"};
      for (std::size_t i = 0; i < f.deltas.size(); ++i) t.add({std::log(f.deltas[i]), std::log(f.values[i])});
      out.tables.push_back(std::move(t));
    }
    out.summary[c.key] = entry;
  }
  return out;
}

TaskOutput fig_3g() {
  TaskOutput out;
  const ParametricModel m2 = h2_model(), m3 = h3_model();
  const BerryResult a = wilson_loop(m2, circle_path(m2.point({0.0, 1.0}), "z", 2.0 * kI, 0.8, 256, 2));
  out.summary["order2_two_cycles"] = berry_json(a);
  const BerryResult b = wilson_loop(m3, circle_path(m3.point({0.0, 0.0}), "xi", 0.0, 0.5, 256, 3));
  out.summary["xi_three_cycles"] = berry_json(b);

  const ParamPoint origin = m3.point({0.0, 0.0});
  const Permutation perm = loop_permutation(m3, circle_path(origin, "lam", 0.0, 0.5, 256));
  int middle = -1;
  for (int k = 0; k < 3; ++k) {
    if (perm[k] == k) middle = k;
  }
  json lam;
  lam["permutation"] = cycle_notation(perm);
  if (middle >= 0) {
    lam["middle_band"] = middle + 1;
    lam["middle_one_cycle"] = single_band_phase(m3, circle_path(origin, "lam", 0.0, 0.5, 256, 1), middle, 1);
    json outer = json::array();
    for (int k = 0; k < 3; ++k) {
      if (k == middle) continue;
      outer.push_back(single_band_phase(m3, circle_path(origin, "lam", 0.0, 0.5, 256, 2), k, 2));
    }
    lam["outer_two_cycles"] = outer;
  }
  out.summary["lam"] = lam;
  return out;
}

TaskOutput fig_3h() {
  TaskOutput out;
  const ParametricModel m = h3_model();
  add_loop(out, "loop", m, circle_path(m.point({0.0, 0.0}), "xi", 0.0, 0.5, 256));
  hoist(out, "loop");
  return out;
}

TaskOutput fig_3i() {
  TaskOutput out;
  const ParametricModel m = h3_model();
  add_loop(out, "loop", m, circle_path(m.point({0.0, 0.0}), "lam", 0.0, 0.5, 256));
  hoist(out, "loop");
  return out;
}

const SshParams kFig4{1.0, 0.5, 4.0 / 3.0};

// Below t1 - gamma/2 neither band winds into the other, so each PBC band is its own loop.
const SshParams kFig4Separated{1.0, 0.2, 4.0 / 3.0};

TaskOutput fig_4b() {
  TaskOutput out;
  const SshParams& p = kFig4Separated;
  const PbcSpectrum pbc = pbc_spectrum(p, 512);
  const OpenChainSpectrum obc = obc_spectrum(p, 40);
  out.tables.push_back(loops_table(pbc.loops, "pbc"));
  std::vector<Complex> e(obc.eigenvalues.data(), obc.eigenvalues.data() + obc.eigenvalues.size());
  out.tables.push_back(points_table(e, "obc"));
  double max_im = 0.0;
  for (const Complex& x : e) max_im = std::max(max_im, std::abs(x.imag()));
  const auto lg = line_gap(pbc.bands);
  const PointGapReport pg = point_gap_regions(pbc.loops);
  out.summary = json{{"params", json{{"t1", p.t1}, {"t2", p.t2}, {"gamma", p.gamma}, {"n_cells", 40}}},
                     {"obc_max_abs_im", max_im},
                     {"pbc_loops", pbc.loops.size()},
                     {"line_gap_margin", lg ? json(lg->margin) : json(nullptr)},
                     {"point_gap_regions", pg.count}};
  return out;
}

TaskOutput fig_4c() {
  TaskOutput out;
  const int n = 120;
  const OpenChainSpectrum obc = obc_spectrum(kFig4, n);
  const SkinProfile prof = skin_profile(obc);
  Table env;
  env.name = "envelopes";
  env.columns = {"mode", "re_E", "im_E", "site", "abs_psi"};
  for (Eigen::Index m = 0; m < obc.eigensystem.dim; m += 24) {
    const ComplexVector r = obc.eigensystem.right.col(m).normalized();
    for (Eigen::Index j = 0; j < r.size(); ++j) {
      env.add({static_cast<double>(m), obc.eigenvalues(m).real(), obc.eigenvalues(m).imag(), static_cast<double>(j),
               std::abs(r(j))});
    }
  }
  out.tables.push_back(std::move(env));
  std::vector<double> kappas;
  for (const auto& md : prof.modes) {
    if (!md.extended) kappas.push_back(md.kappa);
  }
  std::sort(kappas.begin(), kappas.end());
  const double r = gbz_radius(kFig4.t1, kFig4.gamma).r;
  const std::vector<Complex> bulk = bulk_eigenvalues(obc);
  out.summary = json{{"n_cells", n},
                     {"gbz_radius", r},
                     {"log_inv_r", std::log(1.0 / r)},
                     {"kappa_median", kappas.empty() ? json(nullptr) : json(kappas[kappas.size() / 2])},
                     {"kappa_min", kappas.empty() ? json(nullptr) : json(kappas.front())},
                     {"kappa_max", kappas.empty() ? json(nullptr) : json(kappas.back())},
                     {"left_fraction", prof.left_fraction},
                     {"hausdorff_gbz_obc", hausdorff(bulk, gbz_spectrum(kFig4, 1024))}};
  return out;
}

TaskOutput fig_4e(int jobs) {
  RunConfig cfg;
  cfg.task = "ssh-transition";
  cfg.body = json{{"task", "ssh-transition"}, {"options", {{"t1", 1.0}, {"gamma", 4.0 / 3.0}, {"n_cells", 100}}}};
  TaskOutput out = run_task(cfg, jobs);
  const double t1 = 1.0, g = 4.0 / 3.0;
  out.summary["expected_pbc"] = {t1 - g / 2, t1 + g / 2};
  out.summary["expected_obc"] = std::sqrt(t1 * t1 - g * g / 4);
  return out;
}

}  // namespace

std::vector<std::pair<std::string, std::string>> figure_catalog() {
  return {
      {"1g", "H2 loop around z = 0: unlinked eigenvalue loops"},
      {"1h", "H2 loop through the EP at 2i"},
      {"1i", "H2 loop around the EP at 2i: one merged loop, Berry phase after two cycles"},
      {"1k", "H2 eigenvalue sheets over the z plane and their EPs"},
      {"2a", "exceptional arcs of H2 in (Re z, Im z, t) with the purple and blue loops"},
      {"2b", "Hopf-link braid of the purple loop"},
      {"2c", "parabolic EA of the expanded model: line-like loop and EA-encircling loop"},
      {"2d", "braid of the EA-encircling loop of 2c"},
      {"2e", "kissing exceptional arcs and the loop around the kissing point"},
      {"2f", "braid of the kissing-point loop"},
      {"3a", "H3 order-3 EP, split EPs at lam = -0.2i and their non-Abelian permutations"},
      {"3f", "critical exponents of phase rigidity and splitting"},
      {"3g", "Berry phases around order-2 and order-3 EPs"},
      {"3h", "three-strand braid of the xi-plane loop"},
      {"3i", "Hopf-link braid of the lam-plane loop"},
      {"4b", "SSH PBC loops and OBC spectrum"},
      {"4c", "skin-mode envelopes and decay rate"},
      {"4e", "SSH gap closings and zero-mode transition"},
  };
}

TaskOutput reproduce_figure(const std::string& id, int jobs) {
  static const std::map<std::string, TaskOutput (*)()> simple{
      {"1g", fig_1g}, {"1h", fig_1h}, {"1i", fig_1i}, {"1k", fig_1k}, {"2a", fig_2a}, {"2b", fig_2b},
      {"2c", fig_2c}, {"2d", fig_2d}, {"2e", fig_2e}, {"2f", fig_2f}, {"3a", fig_3a}, {"3f", fig_3f},
      {"3g", fig_3g}, {"3h", fig_3h}, {"3i", fig_3i}, {"4b", fig_4b}, {"4c", fig_4c}};
  if (id == "4e") return fig_4e(jobs);
  const auto it = simple.find(id);
  if (it == simple.end()) throw Error(ErrorKind::UnknownFigure, "unknown figure '" + id + "'");
  return it->second();
}

}  // namespace nhtopo
