#include "nhtopo/tasks.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <iomanip>
#include <limits>
#include <sstream>

#include "nhtopo/dynamics.hpp"
#include "nhtopo/nhse.hpp"
#include "nhtopo/parallel.hpp"
#include "nhtopo/symmetry.hpp"
#include "task_util.hpp"

namespace nhtopo {

using namespace detail;

void Table::add(std::vector<double> row) {
  if (row.size() != columns.size()) throw Error(ErrorKind::BadSize, "row width does not match table " + name);
  rows.push_back(std::move(row));
}

json complex_json(Complex z) { return json{{"re", z.real()}, {"im", z.imag()}}; }

Complex complex_from_json(const json& j, const std::string& where) {
  if (j.is_number()) return Complex(j.get<double>(), 0.0);
  if (j.is_object()) {
    for (auto it = j.begin(); it != j.end(); ++it) {
      if (it.key() != "re" && it.key() != "im") bad_input("unknown key '" + it.key() + "' in " + where);
    }
    const double re = j.value("re", 0.0), im = j.value("im", 0.0);
    if ((j.contains("re") && !j["re"].is_number()) || (j.contains("im") && !j["im"].is_number())) {
      bad_input(where + " must hold numeric re/im");
    }
    if (!std::isfinite(re) || !std::isfinite(im)) bad_input(where + " must be finite");
    return Complex(re, im);
  }
  bad_input(where + " must be a number or {\"re\": .., \"im\": ..}");
}

int exit_code(ErrorKind kind) { return is_validation_error(kind) ? 2 : 3; }

std::string to_csv(const Table& t) {
  std::ostringstream os;
  os << std::setprecision(17);
  for (std::size_t c = 0; c < t.columns.size(); ++c) os << (c ? "," : "") << t.columns[c];
  os << '\n';
  for (const auto& row : t.rows) {
    for (std::size_t c = 0; c < row.size(); ++c) os << (c ? "," : "") << row[c];
    os << '\n';
  }
  return os.str();
}

json envelope(const json& task_echo, const TaskOutput& out) {
  json env;
  env["task"] = task_echo;
  env["version"] = kArtifactVersion;
  env["payload"] = out.summary;
  json notes = convention_notes();
  for (auto it = out.notes.begin(); it != out.notes.end(); ++it) notes[it.key()] = it.value();
  env["notes"] = notes;
  return env;
}

std::vector<std::string> tolerance_names() {
  return {"defect_tol", "biorth_tol", "cluster_rel_tol", "gap_fraction", "unitary_tol",
          "ep_tol", "ep_cluster_tol", "zero_tol"};
}

std::vector<std::pair<std::string, std::string>> task_catalog() {
  return {
      {"winding", "EWN of a closed path, optional det winding about a reference energy"},
      {"berry", "Wilson-loop Berry phase and fractional winding"},
      {"braid", "braid word, linking numbers and loop permutation"},
      {"gaps", "line gap and point-gap regions of the tracked band loops"},
      {"ep-locate", "EPs inside a rectangle of a parameter plane"},
      {"ep-order", "order of a degeneracy from clustering and a probe loop"},
      {"exponent", "log-log fit of splitting or phase rigidity near an EP"},
      {"ea-trace", "continuation of an exceptional arc in three real axes"},
      {"ssh-spectra", "PBC, OBC and GBZ spectra of the nonreciprocal SSH chain"},
      {"ssh-transition", "PBC gap closings and the OBC zero-mode transition over t2"},
      {"nhse-sweep", "NHSE predicate against OBC/PBC distance on a (t2, gamma) grid"},
      {"symmetry", "defect of a symmetry relation for a given unitary"},
      {"evolve", "RK4 evolution along a path with biorthogonal projections"},
      {"encircle", "dynamic encircling outcome on a circle around a point"},
  };
}

namespace {

struct Tols {
  TrackOptions track;
  BerryOptions berry;
  EpTolerances ep;
  double zero_tol = 1e-4;
};

Tols make_tols(const std::map<std::string, double>& m) {
  Tols t;
  for (const auto& [k, v] : m) {
    if (!(v > 0) || !std::isfinite(v)) bad_input("tolerance '" + k + "' must be positive");
    if (k == "defect_tol") t.track.spectral.defect_tol = v;
    else if (k == "biorth_tol") t.track.spectral.biorth_tol = v;
    else if (k == "cluster_rel_tol") t.track.spectral.cluster_rel_tol = v;
    else if (k == "gap_fraction") t.track.gap_fraction = v;
    else if (k == "unitary_tol") t.berry.unitary_tol = v;
    else if (k == "ep_tol") t.ep.ep_tol = v;
    else if (k == "ep_cluster_tol") t.ep.cluster_tol = v;
    else if (k == "zero_tol") t.zero_tol = v;
    else bad_input("unknown tolerance '" + k + "'");
  }
  t.berry.track = t.track;
  return t;
}

std::map<std::string, double> default_model_params(const std::string& name) {
  if (name == "h2") return {{"z", 0.0}, {"t", 1.0}};
  if (name == "ssh_bloch") return {{"k", 0.0}, {"t1", 1.0}, {"t2", 0.5}, {"gamma", 4.0 / 3.0}};
  return {};
}

struct ModelSpec {
  ParametricModel model;
  ParamPoint point;
};

ModelSpec read_model(Fields f) {
  const std::string name = f.text("name");
  const ParametricModel model = model_by_name(name);
  const auto defaults = default_model_params(name);
  std::vector<Complex> coords;
  if (f.has("params")) {
    Fields p = f.object("params");
    for (const auto& label : model.labels()) {
      const auto d = defaults.find(label);
      coords.push_back(p.complex(label, d == defaults.end() ? 0.0 : d->second));
    }
    p.finish();
  } else {
    for (const auto& label : model.labels()) {
      const auto d = defaults.find(label);
      coords.push_back(d == defaults.end() ? 0.0 : d->second);
    }
  }
  f.finish();
  return ModelSpec{model, model.point(coords)};
}

SshParams read_ssh(Fields& o) {
  SshParams p;
  p.t1 = o.number("t1", p.t1);
  p.t2 = o.number("t2", p.t2);
  p.gamma = o.number("gamma", p.gamma);
  return p;
}

using Plan = std::function<TaskOutput()>;

struct Context {
  const RunConfig& cfg;
  int jobs;
  Tols tol;
};

// --- loop tasks -------------------------------------------------------------

Plan plan_loop_task(const std::string& task, const ModelSpec& ms, const ParamPath& path, Fields& opts,
                    const Tols& tol) {
  std::optional<Complex> reference;
  if (task == "winding" && opts.has("reference")) reference = opts.complex("reference");
  const int resolution = task == "gaps" ? opts.integer("resolution", 512) : 512;
  return [=]() {
    TaskOutput out;
    const BandTrajectories traj = track_bands(ms.model, path, tol.track);
    out.tables.push_back(trajectory_table(traj, "trajectories"));
    json& s = out.summary;
    s["permutation"] = permutation_json(traj.permutation);
    s["samples"] = traj.samples();
    if (task == "winding") {
      s["ewn"] = vorticity_winding(ms.model, path);
      if (reference) {
        s["reference"] = complex_json(*reference);
        s["det_winding"] = eigenvalue_winding(ms.model, path, *reference);
      }
      if (traj.n_bands == 2) {
        const double nu = vorticity(traj, 0, 1) + vorticity(traj, 1, 0);
        s["vorticity_sum"] = nu;
      }
    } else if (task == "berry") {
      const BerryResult b = wilson_loop(traj, tol.berry);
      s.update(berry_json(b));
      Table t;
      t.name = "partial_phases";
      t.columns = {"step", "phase"};
      for (std::size_t i = 0; i < b.partial_phases.size(); ++i) t.add({static_cast<double>(i), b.partial_phases[i]});
      out.tables.push_back(std::move(t));
    } else if (task == "braid") {
      s.update(braid_json(braid_word(traj)));
      out.notes["braid_sign"] = convention_notes()["braid_sign"];
    } else if (task == "gaps") {
      const auto loops = orbit_loops(traj);
      const PointGapReport pg = point_gap_regions(loops, resolution);
      json reps = json::array();
      for (const Complex& e : pg.representatives) reps.push_back(complex_json(e));
      s["point_gaps"] = json{{"count", pg.count}, {"representatives", reps}, {"resolution", pg.resolution}};
      std::vector<std::vector<Complex>> bands(traj.n_bands);
      for (std::size_t l = 0; l < traj.samples(); ++l) {
        for (int b = 0; b < traj.n_bands; ++b) bands[b].push_back(traj.energies[l](b));
      }
      const auto lg = traj.n_bands >= 2 ? line_gap(loops.size() >= 2 ? loops : bands) : std::nullopt;
      if (lg) {
        s["line_gap"] = json{{"point", complex_json(lg->point)}, {"direction", complex_json(lg->direction)},
                             {"margin", lg->margin}, {"side", lg->side}};
      } else {
        s["line_gap"] = nullptr;
      }
      out.tables.push_back(loops_table(loops, "loops"));
    }
    return out;
  };
}

// --- EP tasks ---------------------------------------------------------------

Plan plan_ep_locate(const ModelSpec& ms, Fields& o, const Tols& tol) {
  Region r{ms.point, parse_axis(o.text("x")), parse_axis(o.text("y")), o.number("x0"), o.number("x1"),
           o.number("y0"), o.number("y1")};
  const double loc_tol = o.number("tol", 1e-6);
  if (!(r.x1 > r.x0) || !(r.y1 > r.y0)) bad_input("region must satisfy x0 < x1 and y0 < y1");
  return [=]() {
    TaskOutput out;
    const auto eps = locate_eps(ms.model, r, loc_tol, tol.ep);
    json list = json::array();
    for (const auto& e : eps) list.push_back(ep_json(e));
    out.summary["count"] = eps.size();
    out.summary["eps"] = list;
    return out;
  };
}

Plan plan_ep_order(const ModelSpec& ms, Fields& o, const Tols& tol) {
  const Axis x = parse_axis(o.text("x")), y = parse_axis(o.text("y"));
  const double radius = o.number("probe_radius", 1e-3);
  return [=]() {
    TaskOutput out;
    const OrderProbe p = ep_order(ms.model, ms.point, x, y, radius, tol.ep);
    out.summary = json{{"order", p.order},
                       {"diabolic", p.diabolic},
                       {"cluster_size", p.cluster_size},
                       {"cycle_length", p.cycle_length},
                       {"energy", complex_json(p.energy)}};
    return out;
  };
}

Plan plan_exponent(const ModelSpec& ms, Fields& o, const Tols& tol) {
  const std::string label = o.text("label");
  const Complex direction = o.complex("direction", 1.0);
  const double dmin = o.number("delta_min", 1e-6), dmax = o.number("delta_max", 1e-2);
  const int samples = o.integer("samples", 9);
  const std::string obs_name = o.text("observable", "rigidity");
  if (obs_name != "rigidity" && obs_name != "splitting") bad_input("observable must be rigidity or splitting");
  const Axis x = parse_axis(o.text("probe_x", label + ".re"));
  const Axis y = parse_axis(o.text("probe_y", label + ".im"));
  ms.point.get(label);
  return [=]() {
    TaskOutput out;
    const OrderProbe p = ep_order(ms.model, ms.point, x, y, 1e-3, tol.ep);
    const EpRecord ep{ms.point, p.energy, p.order, 0.0, p.diabolic};
    const Observable obs = obs_name == "rigidity" ? Observable::PhaseRigidity : Observable::Splitting;
    const ExponentFit f = critical_exponent(ms.model, ep, label, direction, dmin, dmax, obs, samples);
    out.summary = json{{"slope", f.slope}, {"intercept", f.intercept}, {"r_squared", f.r_squared},
                       {"order", p.order}, {"observable", obs_name}};
    Table t;
    t.name = "samples";
    t.columns = {"delta", "value"};
    for (std::size_t i = 0; i < f.deltas.size(); ++i) t.add({f.deltas[i], f.values[i]});
    out.tables.push_back(std::move(t));
    return out;
  };
}

Table arc_table(const ArcTrace& tr, const std::array<Axis, 3>& axes) {
  Table t;
  t.name = "arc";
  t.columns = {axis_name(axes[0]), axis_name(axes[1]), axis_name(axes[2]), "re_E", "im_E", "j0", "j1", "j2"};
  for (const auto& p : tr.points) {
    t.add({get_axis(p.location, axes[0]), get_axis(p.location, axes[1]), get_axis(p.location, axes[2]),
           p.energy.real(), p.energy.imag(), p.current[0], p.current[1], p.current[2]});
  }
  return t;
}

Plan plan_ea_trace(const ModelSpec& ms, Fields& o, const Tols& tol) {
  const json& ax = o.raw("axes");
  if (!ax.is_array() || ax.size() != 3) bad_input("options.axes must list three axes");
  std::array<Axis, 3> axes;
  for (int i = 0; i < 3; ++i) {
    if (!ax[i].is_string()) bad_input("options.axes must hold strings");
    axes[i] = parse_axis(ax[i].get<std::string>());
  }
  const double step = o.number("step", 0.05);
  const int max_points = o.integer("max_points", 200);
  const int direction = o.integer("direction", 1);
  return [=]() {
    TaskOutput out;
    const ArcTrace tr = trace_ea(ms.model, axes, ms.point, step, max_points, direction, tol.ep);
    out.summary = json{{"points", tr.points.size()}, {"order_changed", tr.order_changed},
                       {"stop_reason", tr.stop_reason}};
    out.tables.push_back(arc_table(tr, axes));
    return out;
  };
}

// --- SSH tasks --------------------------------------------------------------

Plan plan_ssh_spectra(Fields& o) {
  const SshParams p = read_ssh(o);
  const int n_cells = o.integer("n_cells", 120);
  const int n_k = o.integer("n_k", 512);
  if (n_cells < 2) bad_input("n_cells must be at least 2");
  return [=]() {
    TaskOutput out;
    const PbcSpectrum pbc = pbc_spectrum(p, n_k);
    const OpenChainSpectrum obc = obc_spectrum(p, n_cells);
    std::vector<Complex> all_pbc;
    for (const auto& b : pbc.bands) all_pbc.insert(all_pbc.end(), b.begin(), b.end());
    const std::vector<Complex> bulk = bulk_eigenvalues(obc);
    std::vector<Complex> obc_all(obc.eigenvalues.data(), obc.eigenvalues.data() + obc.eigenvalues.size());
    json& s = out.summary;
    s["params"] = json{{"t1", p.t1}, {"t2", p.t2}, {"gamma", p.gamma}, {"n_cells", n_cells}, {"n_k", n_k}};
    s["hausdorff_obc_pbc"] = hausdorff(bulk, all_pbc);
    const NhseVerdict v = nhse_predicate(p, n_k);
    s["nhse"] = v.nhse;
    s["pbc_winding"] = v.winding;
    s["point_gap_regions"] = v.regions;
    s["bulk_modes"] = bulk.size();
    out.tables.push_back(loops_table(pbc.loops, "pbc"));
    out.tables.push_back(points_table(obc_all, "obc"));
    if (p.t1 + p.gamma / 2 != 0.0 && p.t1 - p.gamma / 2 != 0.0) {
      const GbzCircle c = gbz_radius(p.t1, p.gamma);
      const std::vector<Complex> gbz = gbz_spectrum(p, n_k);
      s["gbz_radius"] = c.r;
      s["log_inv_r"] = std::log(1.0 / c.r);
      s["hausdorff_gbz_obc"] = hausdorff(bulk, gbz);
      out.tables.push_back(points_table(gbz, "gbz"));
    }
    const SkinProfile prof = skin_profile(obc);
    std::vector<double> kappas;
    Table env;
    env.name = "skin_modes";
    env.columns = {"re_E", "im_E", "center", "kappa", "r_squared", "extended"};
    for (const auto& m : prof.modes) {
      if (!m.extended) kappas.push_back(m.kappa);
      env.add({m.energy.real(), m.energy.imag(), m.center, m.kappa, m.r_squared, m.extended ? 1.0 : 0.0});
    }
    out.tables.push_back(std::move(env));
    s["left_fraction"] = prof.left_fraction;
    if (!kappas.empty()) {
      std::sort(kappas.begin(), kappas.end());
      s["kappa_median"] = kappas[kappas.size() / 2];
    }
    return out;
  };
}

Plan plan_ssh_transition(Fields& o, const Context& ctx) {
  const double t1 = o.number("t1", 1.0), gamma = o.number("gamma", 4.0 / 3.0);
  const int n_cells = o.integer("n_cells", 100);
  const double lo = o.number("t2_min", 0.05), hi = o.number("t2_max", 2.0);
  const int n_points = o.integer("n_points", 391);
  const int n_k = o.integer("n_k", 512);
  if (n_points < 3 || !(hi > lo)) bad_input("t2 sweep needs t2_min < t2_max and n_points >= 3");
  const int jobs = ctx.jobs;
  const double zero_tol = ctx.tol.zero_tol;
  return [=]() {
    TaskOutput out;
    std::vector<double> gaps(n_points), t2s(n_points);
    parallel_for(static_cast<std::size_t>(n_points), jobs, [&](std::size_t i) {
      t2s[i] = lo + (hi - lo) * static_cast<double>(i) / (n_points - 1);
      gaps[i] = pbc_gap(SshParams{t1, t2s[i], gamma}, n_k);
    });
    const double spacing = (hi - lo) / (n_points - 1);
    // the gap opens like sqrt|t2 - t2c|, so the grid test is on its square
    const double scale = std::max(1.0, std::abs(t1) + std::abs(gamma) / 2);
    json closings = json::array();
    for (int i = 0; i < n_points; ++i) {
      const bool left_ok = i == 0 || gaps[i] <= gaps[i - 1];
      const bool right_ok = i == n_points - 1 || gaps[i] <= gaps[i + 1];
      if (left_ok && right_ok && gaps[i] * gaps[i] < 2 * spacing * scale) closings.push_back(t2s[i]);
    }
    const TransitionScan scan = zero_mode_scan(t1, gamma, n_cells, lo, hi, n_points, zero_tol, jobs);
    out.summary = json{{"pbc_closings", closings},
                       {"obc_transition", scan.transition},
                       {"grid_spacing", spacing},
                       {"params", json{{"t1", t1}, {"gamma", gamma}, {"n_cells", n_cells}}}};
    Table t;
    t.name = "scan";
    t.columns = {"t2", "pbc_gap", "obc_bulk_gap", "zero_modes"};
    for (int i = 0; i < n_points; ++i) {
      t.add({t2s[i], gaps[i], scan.bulk_gap[i], static_cast<double>(scan.zero_modes[i])});
    }
    out.tables.push_back(std::move(t));
    out.notes["obc_transition"] = "argmin over t2 of the third-smallest |E| of the open chain";
    return out;
  };
}

Plan plan_nhse_sweep(Fields& o, const Context& ctx) {
  const double t1 = o.number("t1", 1.0);
  const std::vector<double> t2s = o.numbers("t2");
  const std::vector<double> gammas = o.numbers("gamma");
  const int n_cells = o.integer("n_cells", 120);
  const int n_k = o.integer("n_k", 512);
  const double threshold = o.number("threshold", 0.05);
  const int jobs = ctx.jobs;
  return [=]() {
    TaskOutput out;
    struct Row {
      double t2, gamma;
      NhseVerdict v;
      double dist;
    };
    std::vector<Row> rows(t2s.size() * gammas.size());
    parallel_for(rows.size(), jobs, [&](std::size_t i) {
      const double g = gammas[i / t2s.size()], t2 = t2s[i % t2s.size()];
      const SshParams p{t1, t2, g};
      rows[i] = Row{t2, g, nhse_predicate(p, n_k), obc_pbc_distance(p, n_cells, n_k)};
    });
    Table t;
    t.name = "sweep";
    t.columns = {"t2", "gamma", "nhse", "pbc_winding", "regions", "hausdorff"};
    int agree = 0;
    json mismatches = json::array();
    for (const auto& r : rows) {
      t.add({r.t2, r.gamma, r.v.nhse ? 1.0 : 0.0, static_cast<double>(r.v.winding), static_cast<double>(r.v.regions),
             r.dist});
      if (r.v.nhse == (r.dist > threshold)) {
        ++agree;
      } else {
        mismatches.push_back(json{{"t2", r.t2}, {"gamma", r.gamma}});
      }
    }
    out.tables.push_back(std::move(t));
    out.summary = json{{"points", rows.size()}, {"agree", agree}, {"mismatches", mismatches}, {"threshold", threshold}};
    return out;
  };
}

// --- symmetry, dynamics -----------------------------------------------------

ComplexMatrix read_matrix(const json& j, const std::string& where) {
  if (!j.is_array() || j.empty()) bad_input(where + " must be a non-empty array of rows");
  const Eigen::Index n = static_cast<Eigen::Index>(j.size());
  ComplexMatrix m(n, n);
  for (Eigen::Index r = 0; r < n; ++r) {
    if (!j[r].is_array() || static_cast<Eigen::Index>(j[r].size()) != n) bad_input(where + " must be square");
    for (Eigen::Index c = 0; c < n; ++c) m(r, c) = complex_from_json(j[r][c], where);
  }
  return m;
}

Plan plan_symmetry(const ModelSpec& ms, Fields& o) {
  const SymmetryKind kind = symmetry_from_string(o.text("kind"));
  const ComplexMatrix u = read_matrix(o.raw("unitary"), "options.unitary");
  const std::string k_label = o.text("k_label", "");
  const int n_k = o.integer("n_k", 64);
  return [=]() {
    TaskOutput out;
    const std::vector<double> grid = k_label.empty() ? std::vector<double>{} : symmetric_k_grid(n_k);
    const double d = check_symmetry(ms.model, ms.point, k_label, grid, u, kind);
    out.summary = json{{"kind", std::string(to_string(kind))}, {"defect", d}};
    return out;
  };
}

Plan plan_evolve(const ModelSpec& ms, const ParamPath& path, Fields& o, const Tols& tol) {
  const double duration = o.number("duration");
  const json& psi = o.raw("psi0");
  if (!psi.is_array()) bad_input("options.psi0 must be an array");
  ComplexVector psi0(static_cast<Eigen::Index>(psi.size()));
  for (std::size_t i = 0; i < psi.size(); ++i) psi0(static_cast<Eigen::Index>(i)) = complex_from_json(psi[i], "options.psi0");
  EvolveOptions eo;
  eo.steps = o.integer("steps", 0);
  eo.record_every = o.integer("record_every", 10);
  eo.track = tol.track;
  return [=]() {
    TaskOutput out;
    const EvolutionTrace tr = evolve(ms.model, path, duration, psi0, eo);
    Table t;
    t.name = "evolution";
    t.columns = {"t", "norm"};
    const Eigen::Index n = psi0.size();
    for (Eigen::Index b = 0; b < n; ++b) t.columns.push_back("p" + std::to_string(b + 1));
    for (std::size_t i = 0; i < tr.times.size(); ++i) {
      std::vector<double> row{tr.times[i], tr.states[i].norm()};
      for (Eigen::Index b = 0; b < n; ++b) row.push_back(tr.projections[i](b));
      t.add(std::move(row));
    }
    out.tables.push_back(std::move(t));
    json fin = json::array();
    for (Eigen::Index b = 0; b < n; ++b) fin.push_back(complex_json(tr.states.back()(b)));
    out.summary = json{{"final_state", fin}, {"records", tr.times.size()}};
    return out;
  };
}

Plan plan_encircle(const ModelSpec& ms, Fields& o, const Tols& tol) {
  const Axis x = parse_axis(o.text("x")), y = parse_axis(o.text("y"));
  const double radius = o.number("radius");
  const int direction = o.integer("direction", 1);
  const double start = o.number("start_angle", 0.0);
  const double duration = o.number("duration");
  const int band = o.integer("initial_band", 0);
  EvolveOptions eo;
  eo.steps = o.integer("steps", 0);
  eo.track = tol.track;
  return [=]() {
    TaskOutput out;
    const EncircleOutcome r = encircle_outcome(ms.model, ms.point, x, y, radius, direction, start, duration, band, eo);
    out.summary = json{{"final_band", r.final_band},
                       {"initial_band", r.initial_band},
                       {"dominance_ratio", r.dominance_ratio},
                       {"direction", r.direction},
                       {"switched", r.switched()},
                       {"definite", r.dominance_ratio >= kDominanceThreshold},
                       {"start_point", point_json(r.start_point)}};
    return out;
  };
}

const std::vector<std::string>& loop_tasks() {
  static const std::vector<std::string> names{"winding", "berry", "braid", "gaps"};
  return names;
}

bool is_loop_task(const std::string& t) {
  return std::find(loop_tasks().begin(), loop_tasks().end(), t) != loop_tasks().end();
}

Plan build_plan(const RunConfig& cfg, int jobs) {
  Fields top(cfg.body, "config");
  const std::string task = top.text("task");
  top.text("version", kArtifactVersion);
  if (top.has("output")) {
    Fields out = top.object("output");
    out.text("path", "");
    out.text("format", "json");
    out.finish();
  }
  if (top.has("tolerances")) top.raw("tolerances");
  const Context ctx{cfg, jobs, make_tols(cfg.tolerances)};

  const bool needs_model = task != "ssh-spectra" && task != "ssh-transition" && task != "nhse-sweep";
  const bool needs_path = is_loop_task(task) || task == "evolve";
  std::optional<ModelSpec> ms;
  if (needs_model) {
    ms = read_model(top.object("model"));
  } else if (top.has("model")) {
    bad_input("task '" + task + "' does not take a model");
  }
  std::optional<ParamPath> path;
  if (needs_path) {
    path = path_from_json(ms->point, top.object("path"));
  } else if (top.has("path")) {
    bad_input("task '" + task + "' does not take a path");
  }
  static const json empty = json::object();
  Fields opts = top.has("options") ? top.object("options") : Fields(empty, "config.options");

  Plan plan;
  if (is_loop_task(task)) plan = plan_loop_task(task, *ms, *path, opts, ctx.tol);
  else if (task == "ep-locate") plan = plan_ep_locate(*ms, opts, ctx.tol);
  else if (task == "ep-order") plan = plan_ep_order(*ms, opts, ctx.tol);
  else if (task == "exponent") plan = plan_exponent(*ms, opts, ctx.tol);
  else if (task == "ea-trace") plan = plan_ea_trace(*ms, opts, ctx.tol);
  else if (task == "ssh-spectra") plan = plan_ssh_spectra(opts);
  else if (task == "ssh-transition") plan = plan_ssh_transition(opts, ctx);
  else if (task == "nhse-sweep") plan = plan_nhse_sweep(opts, ctx);
  else if (task == "symmetry") plan = plan_symmetry(*ms, opts);
  else if (task == "evolve") plan = plan_evolve(*ms, *path, opts, ctx.tol);
  else if (task == "encircle") plan = plan_encircle(*ms, opts, ctx.tol);
  else bad_input("unknown task '" + task + "'");
  opts.finish();
  top.finish();
  return plan;
}

}  // namespace

RunConfig parse_config(const json& doc) {
  if (!doc.is_object()) bad_input("configuration must be a JSON object");
  RunConfig cfg;
  cfg.body = doc;
  Fields top(doc, "config");
  cfg.task = top.text("task");
  if (doc.contains("output")) {
    const json& o = doc["output"];
    if (!o.is_object()) bad_input("config.output must be an object");
    if (o.contains("path") && o["path"].is_string()) cfg.out = o["path"].get<std::string>();
    if (o.contains("format") && o["format"].is_string()) cfg.format = o["format"].get<std::string>();
  }
  if (cfg.format != "json" && cfg.format != "csv") bad_input("output.format must be json or csv");
  if (doc.contains("tolerances")) {
    const json& t = doc["tolerances"];
    if (!t.is_object()) bad_input("config.tolerances must be an object");
    for (auto it = t.begin(); it != t.end(); ++it) {
      if (!it.value().is_number()) bad_input("tolerance '" + it.key() + "' must be a number");
      cfg.tolerances[it.key()] = it.value().get<double>();
    }
  }
  make_tols(cfg.tolerances);
  build_plan(cfg, 1);
  return cfg;
}

TaskOutput run_task(const RunConfig& cfg, int jobs) {
  TaskOutput out = build_plan(cfg, jobs)();
  if (!cfg.tolerances.empty()) out.notes["tolerances"] = cfg.tolerances;
  return out;
}

json config_schema() {
  json axis = {{"type", "string"}, {"pattern", "^[a-z0-9_]+(\\.(re|im))?$"}};
  json cplx = {{"oneOf", json::array({json{{"type", "number"}},
                                       json{{"type", "object"},
                                            {"properties", {{"re", {{"type", "number"}}}, {"im", {{"type", "number"}}}}},
                                            {"additionalProperties", false}}})}};
  json path = {
      {"type", "object"},
      {"required", {"kind"}},
      {"properties",
       {{"kind", {{"enum", {"circle", "loop", "lollipop", "sweep"}}}},
        {"label", {{"type", "string"}}},
        {"x", axis},
        {"y", axis},
        {"center", {{"description", "complex for circle, [x, y] for loop and lollipop"}}},
        {"start", {{"type", "array"}, {"items", {{"type", "number"}}}, {"minItems", 2}, {"maxItems", 2}}},
        {"radius", {{"type", "number"}, {"exclusiveMinimum", 0}}},
        {"steps", {{"type", "integer"}, {"minimum", 16}}},
        {"cycles", {{"type", "integer"}, {"minimum", 1}}},
        {"orientation", {{"enum", {1, -1}}}},
        {"from", cplx},
        {"to", cplx}}},
      {"additionalProperties", false}};
  json task_names = json::array();
  for (const auto& [name, desc] : task_catalog()) task_names.push_back(name);
  json options = {
      {"winding", {"reference"}},
      {"berry", json::array()},
      {"braid", json::array()},
      {"gaps", {"resolution"}},
      {"ep-locate", {"x", "y", "x0", "x1", "y0", "y1", "tol"}},
      {"ep-order", {"x", "y", "probe_radius"}},
      {"exponent", {"label", "direction", "delta_min", "delta_max", "samples", "observable", "probe_x", "probe_y"}},
      {"ea-trace", {"axes", "step", "max_points", "direction"}},
      {"ssh-spectra", {"t1", "t2", "gamma", "n_cells", "n_k"}},
      {"ssh-transition", {"t1", "gamma", "n_cells", "t2_min", "t2_max", "n_points", "n_k"}},
      {"nhse-sweep", {"t1", "t2", "gamma", "n_cells", "n_k", "threshold"}},
      {"symmetry", {"kind", "unitary", "k_label", "n_k"}},
      {"evolve", {"duration", "psi0", "steps", "record_every"}},
      {"encircle", {"x", "y", "radius", "direction", "start_angle", "duration", "initial_band", "steps"}}};
  json tol_props = json::object();
  for (const auto& n : tolerance_names()) tol_props[n] = {{"type", "number"}, {"exclusiveMinimum", 0}};
  return {
      {"$schema", "https://json-schema.org/draft/2020-12/schema"},
      {"title", "nhtopo run configuration"},
      {"type", "object"},
      {"required", {"task"}},
      {"additionalProperties", false},
      {"properties",
       {{"task", {{"enum", task_names}}},
        {"version", {{"type", "string"}}},
        {"model",
         {{"type", "object"},
          {"required", {"name"}},
          {"properties",
           {{"name", {{"enum", model_names()}}},
            {"params", {{"type", "object"}, {"additionalProperties", cplx}}}}},
          {"additionalProperties", false}}},
        {"path", path},
        {"options", {{"type", "object"}}},
        {"output",
         {{"type", "object"},
          {"properties", {{"path", {{"type", "string"}}}, {"format", {{"enum", {"json", "csv"}}}}}},
          {"additionalProperties", false}}},
        {"tolerances", {{"type", "object"}, {"properties", tol_props}, {"additionalProperties", false}}}}},
      {"x-task-options", options}};
}

}  // namespace nhtopo
