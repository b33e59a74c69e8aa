#include "task_util.hpp"

#include <cmath>

#include "nhtopo/symmetry.hpp"

namespace nhtopo::detail {

void bad_input(const std::string& msg) { throw Error(ErrorKind::BadInput, msg); }

Fields::Fields(const json& j, std::string where) : j_(&j), where_(std::move(where)) {
  if (!j.is_object()) bad_input(where_ + " must be an object");
}

bool Fields::has(const std::string& key) const { return j_->contains(key); }

const json& Fields::get(const std::string& key) {
  if (!j_->contains(key)) bad_input("missing key '" + key + "' in " + where_);
  used_.insert(key);
  return j_->at(key);
}

double Fields::number(const std::string& key) {
  const json& v = get(key);
  if (!v.is_number()) bad_input("'" + key + "' in " + where_ + " must be a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) bad_input("'" + key + "' in " + where_ + " must be finite");
  return x;
}

double Fields::number(const std::string& key, double fallback) { return has(key) ? number(key) : fallback; }

int Fields::integer(const std::string& key) {
  const json& v = get(key);
  if (!v.is_number_integer()) bad_input("'" + key + "' in " + where_ + " must be an integer");
  return v.get<int>();
}

int Fields::integer(const std::string& key, int fallback) { return has(key) ? integer(key) : fallback; }

bool Fields::boolean(const std::string& key, bool fallback) {
  if (!has(key)) return fallback;
  const json& v = get(key);
  if (!v.is_boolean()) bad_input("'" + key + "' in " + where_ + " must be true or false");
  return v.get<bool>();
}

std::string Fields::text(const std::string& key) {
  const json& v = get(key);
  if (!v.is_string()) bad_input("'" + key + "' in " + where_ + " must be a string");
  return v.get<std::string>();
}

std::string Fields::text(const std::string& key, const std::string& fallback) {
  return has(key) ? text(key) : fallback;
}

Complex Fields::complex(const std::string& key) { return complex_from_json(get(key), where_ + "." + key); }

Complex Fields::complex(const std::string& key, Complex fallback) { return has(key) ? complex(key) : fallback; }

std::vector<double> Fields::numbers(const std::string& key) {
  const json& v = get(key);
  if (!v.is_array() || v.empty()) bad_input("'" + key + "' in " + where_ + " must be a non-empty array");
  std::vector<double> out;
  for (const auto& x : v) {
    if (!x.is_number() || !std::isfinite(x.get<double>())) bad_input("'" + key + "' in " + where_ + " must hold numbers");
    out.push_back(x.get<double>());
  }
  return out;
}

const json& Fields::raw(const std::string& key) { return get(key); }

Fields Fields::object(const std::string& key) { return Fields(get(key), where_ + "." + key); }

void Fields::finish() const {
  for (auto it = j_->begin(); it != j_->end(); ++it) {
    if (!used_.count(it.key())) bad_input("unknown key '" + it.key() + "' in " + where_);
  }
}

Axis parse_axis(const std::string& s) {
  const auto dot = s.find('.');
  if (dot == std::string::npos) return Axis{s, false};
  const std::string part = s.substr(dot + 1);
  if (part != "re" && part != "im") bad_input("axis '" + s + "' must end in .re or .im");
  return Axis{s.substr(0, dot), part == "im"};
}

std::string axis_name(const Axis& a) { return a.label + (a.imag ? ".im" : ".re"); }

json point_json(const ParamPoint& p) {
  json j = json::object();
  for (std::size_t i = 0; i < p.labels.size(); ++i) j[p.labels[i]] = complex_json(p.coords[i]);
  return j;
}

json permutation_json(const Permutation& p) {
  json j;
  j["cycles"] = cycle_notation(p);
  json image = json::array();
  for (int b : p) image.push_back(b + 1);
  j["image"] = image;
  return j;
}

json matrix_json(const Eigen::MatrixXi& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json r = json::array();
    for (Eigen::Index k = 0; k < m.cols(); ++k) r.push_back(m(i, k));
    rows.push_back(r);
  }
  return rows;
}

Table trajectory_table(const BandTrajectories& traj, const std::string& name) {
  Table t;
  t.name = name;
  t.columns.push_back("u");
  for (int b = 0; b < traj.n_bands; ++b) {
    t.columns.push_back("re_E" + std::to_string(b + 1));
    t.columns.push_back("im_E" + std::to_string(b + 1));
  }
  for (std::size_t l = 0; l < traj.samples(); ++l) {
    std::vector<double> row{traj.u[l]};
    for (int b = 0; b < traj.n_bands; ++b) {
      row.push_back(traj.energies[l](b).real());
      row.push_back(traj.energies[l](b).imag());
    }
    t.add(std::move(row));
  }
  return t;
}

std::vector<std::vector<Complex>> orbit_loops(const BandTrajectories& traj) {
  std::vector<std::vector<Complex>> loops;
  const std::size_t last = traj.samples() - 1;
  for (const auto& orbit : perm_cycles(traj.permutation)) {
    std::vector<Complex> loop;
    int b = orbit.front();
    do {
      for (std::size_t l = 0; l < last; ++l) loop.push_back(traj.energies[l](b));
      b = traj.permutation[b];
    } while (b != orbit.front());
    loops.push_back(std::move(loop));
  }
  return loops;
}

Table loops_table(const std::vector<std::vector<Complex>>& loops, const std::string& name) {
  Table t;
  t.name = name;
  t.columns = {"loop", "index", "re_E", "im_E"};
  for (std::size_t i = 0; i < loops.size(); ++i) {
    for (std::size_t k = 0; k < loops[i].size(); ++k) {
      t.add({static_cast<double>(i), static_cast<double>(k), loops[i][k].real(), loops[i][k].imag()});
    }
  }
  return t;
}

Table points_table(const std::vector<Complex>& pts, const std::string& name) {
  Table t;
  t.name = name;
  t.columns = {"index", "re_E", "im_E"};
  for (std::size_t k = 0; k < pts.size(); ++k) t.add({static_cast<double>(k), pts[k].real(), pts[k].imag()});
  return t;
}

json braid_json(const BraidWord& w) {
  json j;
  j["word"] = w.to_string();
  j["generators"] = w.generators;
  json comps = json::array();
  for (const auto& c : w.components) {
    json one = json::array();
    for (int b : c) one.push_back(b + 1);
    comps.push_back(one);
  }
  j["components"] = comps;
  j["linking"] = matrix_json(w.linking);
  j["crossing_linking"] = matrix_json(w.crossing_linking);
  j["permutation"] = permutation_json(w.induced_permutation);
  return j;
}

json berry_json(const BerryResult& b) {
  json j;
  j["theta"] = b.theta;
  j["vwn"] = b.vwn;
  j["det_phase"] = b.det_phase;
  j["band_phases"] = b.band_phases;
  j["unitarity_error"] = b.unitarity_error;
  j["cycles"] = b.cycles_used;
  return j;
}

json ep_json(const EpRecord& e) {
  json j;
  j["location"] = point_json(e.location);
  j["energy"] = complex_json(e.energy);
  j["order"] = e.order;
  j["residual"] = e.residual;
  j["diabolic"] = e.diabolic;
  return j;
}

json loop_summary(const ParametricModel& model, const ParamPath& path, const BandTrajectories& traj) {
  const BraidWord w = braid_word(traj);
  const BerryResult b = wilson_loop(traj);
  json j;
  j["ewn"] = vorticity_winding(model, path);
  j["permutation"] = cycle_notation(traj.permutation);
  j["braid"] = w.to_string();
  j["linking"] = matrix_json(w.linking);
  j["crossing_linking"] = matrix_json(w.crossing_linking);
  j["theta"] = b.theta;
  j["vwn"] = b.vwn;
  j["band_phases"] = b.band_phases;
  j["point_gap_regions"] = point_gap_regions(orbit_loops(traj)).count;
  j["cycles"] = path.cycles;
  return j;
}

ParamPath path_from_json(const ParamPoint& base, Fields f) {
  const std::string kind = f.text("kind");
  ParamPath path;
  if (kind == "circle") {
    path = circle_path(base, f.text("label"), f.complex("center"), f.number("radius"), f.integer("steps", 256),
                       f.integer("cycles", 1), f.integer("orientation", 1));
  } else if (kind == "loop") {
    const json& c = f.raw("center");
    if (!c.is_array() || c.size() != 2 || !c[0].is_number() || !c[1].is_number()) {
      bad_input("path.center must be [x, y]");
    }
    path = plane_loop(base, parse_axis(f.text("x")), parse_axis(f.text("y")), c[0].get<double>(), c[1].get<double>(),
                      f.number("radius"), f.integer("steps", 256), f.integer("cycles", 1), f.integer("orientation", 1));
  } else if (kind == "lollipop") {
    const json& s = f.raw("start");
    const json& c = f.raw("center");
    if (!s.is_array() || s.size() != 2 || !c.is_array() || c.size() != 2) bad_input("path.start and path.center must be [x, y]");
    path = lollipop_path(base, parse_axis(f.text("x")), parse_axis(f.text("y")), s[0].get<double>(), s[1].get<double>(),
                         c[0].get<double>(), c[1].get<double>(), f.number("radius"), f.integer("steps", 512),
                         f.integer("orientation", 1));
  } else if (kind == "sweep") {
    path = periodic_sweep(base, f.text("label"), f.complex("from"), f.complex("to"), f.integer("steps", 256),
                          f.integer("cycles", 1));
  } else {
    bad_input("path.kind must be circle, loop, lollipop or sweep");
  }
  f.finish();
  return path;
}

json convention_notes() {
  json j;
  j["ewn"] = "ewn = -(winding of the discriminant), the sum of ordered vorticities";
  j["det_winding"] = "winding of det(H - E_r) along the path";
  j["braid_sign"] = "s_i is positive when the strand moving right in Re E carries the larger Im E";
  j["berry_theta"] = "extended orbit phase of band 1; Im ln of the overlap product, positive for counterclockwise loops";
  j["complex"] = "JSON {re, im}; CSV re_*, im_* column pairs";
  return j;
}

}  // namespace nhtopo::detail
