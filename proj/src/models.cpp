#include "nhtopo/models.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace nhtopo {

namespace {

const Complex I(0.0, 1.0);

void require_finite(Complex c, const char* what) {
  if (!std::isfinite(c.real()) || !std::isfinite(c.imag())) {
    throw Error(ErrorKind::BadInput, std::string(what) + " is not finite");
  }
}

double wrap01(double s) {
  s -= std::floor(s);
  return s >= 1.0 ? 0.0 : s;
}

}  // namespace

int ParamPoint::index_of(const std::string& label) const {
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] == label) return static_cast<int>(i);
  }
  return -1;
}

Complex ParamPoint::get(const std::string& label) const {
  const int i = index_of(label);
  if (i < 0) throw Error(ErrorKind::BadInput, "unknown parameter '" + label + "'");
  return coords[i];
}

ParamPoint ParamPoint::with(const std::string& label, Complex value) const {
  const int i = index_of(label);
  if (i < 0) throw Error(ErrorKind::BadInput, "unknown parameter '" + label + "'");
  ParamPoint p = *this;
  p.coords[i] = value;
  return p;
}

ParametricModel::ParametricModel(std::string name, Eigen::Index dim, std::vector<std::string> labels,
                                 Evaluator eval)
    : name_(std::move(name)), dim_(dim), labels_(std::move(labels)), eval_(std::move(eval)) {
  std::set<std::string> uniq(labels_.begin(), labels_.end());
  if (uniq.size() != labels_.size()) throw Error(ErrorKind::BadInput, "duplicate parameter labels");
}

ParamPoint ParametricModel::point(std::vector<Complex> coords) const {
  if (coords.size() != labels_.size()) throw Error(ErrorKind::BadInput, "wrong number of coordinates");
  return ParamPoint{labels_, std::move(coords)};
}

ComplexMatrix ParametricModel::operator()(const ParamPoint& p) const {
  if (p.labels != labels_) throw Error(ErrorKind::BadInput, "parameter labels do not match model " + name_);
  for (const auto& c : p.coords) require_finite(c, "parameter");
  return eval_(p.coords);
}

ComplexMatrix h2(Complex z, Complex t) {
  ComplexMatrix h(2, 2);
  h << 0.0, t, t, z;
  return h;
}

ComplexMatrix h2_parabola(Complex dt, Complex dz) {
  const Complex c = 1.0 - dt * dt;
  ComplexMatrix h(2, 2);
  h << 0.0, c, c, -2.0 * I * (1.0 + dz);
  return h;
}

ComplexMatrix h3(Complex lam, Complex xi) {
  const double s2 = std::sqrt(2.0);
  ComplexMatrix h = ComplexMatrix::Zero(3, 3);
  h(0, 0) = s2 * I * (1.0 + lam);
  h(1, 1) = I * xi;
  h(2, 2) = -s2 * I * (1.0 + lam);
  h(0, 1) = h(1, 0) = h(1, 2) = h(2, 1) = -1.0;
  return h;
}

ComplexMatrix ssh_bloch(Complex k, double t1, double t2, double gamma) {
  ComplexMatrix h = ComplexMatrix::Zero(2, 2);
  h(0, 1) = (t1 + gamma / 2) + t2 * std::exp(-I * k);
  h(1, 0) = (t1 - gamma / 2) + t2 * std::exp(I * k);
  return h;
}

ComplexMatrix ssh_obc(int n_cells, double t1, double t2, double gamma) {
  if (n_cells < 2) throw Error(ErrorKind::BadSize, "ssh_obc needs at least 2 cells");
  const int n = 2 * n_cells;
  ComplexMatrix h = ComplexMatrix::Zero(n, n);
  for (int c = 0; c < n_cells; ++c) {
    const int a = 2 * c, b = 2 * c + 1;
    h(a, b) = t1 + gamma / 2;
    h(b, a) = t1 - gamma / 2;
    if (c > 0) {
      h(a, b - 2) = t2;
      h(b - 2, a) = t2;
    }
  }
  return h;
}

ParametricModel h2_model() {
  return ParametricModel("h2", 2, {"z", "t"}, [](const std::vector<Complex>& c) { return h2(c[0], c[1]); });
}

ParametricModel h2_parabola_model() {
  return ParametricModel("h2_parabola", 2, {"dt", "dz"},
                         [](const std::vector<Complex>& c) { return h2_parabola(c[0], c[1]); });
}

ParametricModel h3_model() {
  return ParametricModel("h3", 3, {"lam", "xi"}, [](const std::vector<Complex>& c) { return h3(c[0], c[1]); });
}

ParametricModel ssh_bloch_model() {
  return ParametricModel("ssh_bloch", 2, {"k", "t1", "t2", "gamma"}, [](const std::vector<Complex>& c) {
    return ssh_bloch(c[0], c[1].real(), c[2].real(), c[3].real());
  });
}

ParametricModel constant_model(const ComplexMatrix& h) {
  require_valid(h);
  return ParametricModel("constant", h.rows(), {"s"}, [h](const std::vector<Complex>&) { return h; });
}

std::vector<std::string> model_names() { return {"h2", "h2_parabola", "h3", "ssh_bloch"}; }

ParametricModel model_by_name(const std::string& name) {
  if (name == "h2") return h2_model();
  if (name == "h2_parabola") return h2_parabola_model();
  if (name == "h3") return h3_model();
  if (name == "ssh_bloch") return ssh_bloch_model();
  throw Error(ErrorKind::BadInput, "unknown model '" + name + "'");
}

ParamPoint set_axis(const ParamPoint& p, const Axis& axis, double value) {
  const Complex old = p.get(axis.label);
  return p.with(axis.label, axis.imag ? Complex(old.real(), value) : Complex(value, old.imag()));
}

double get_axis(const ParamPoint& p, const Axis& axis) {
  const Complex v = p.get(axis.label);
  return axis.imag ? v.imag() : v.real();
}

double param_distance(const ParamPoint& a, const ParamPoint& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.coords.size(); ++i) s += std::norm(a.coords[i] - b.coords[i]);
  return std::sqrt(s);
}

ParamPoint ParamPath::at(double u) const {
  if (!closed) return curve(std::clamp(u, 0.0, 1.0));
  return curve(wrap01(u));
}

std::size_t ParamPath::size() const {
  return closed ? static_cast<std::size_t>(steps) * cycles : static_cast<std::size_t>(steps) + 1;
}

std::vector<ParamPoint> ParamPath::points() const {
  std::vector<ParamPoint> out;
  out.reserve(size());
  for (std::size_t l = 0; l < size(); ++l) out.push_back(at(static_cast<double>(l) / steps));
  return out;
}

double ParamPath::max_step() const {
  const auto pts = points();
  double m = 0.0;
  for (std::size_t l = 0; l + 1 < pts.size(); ++l) m = std::max(m, param_distance(pts[l], pts[l + 1]));
  if (closed) m = std::max(m, param_distance(pts.back(), pts.front()));
  return m;
}

namespace {

void check_loop_args(double radius, int steps, int cycles, int orientation) {
  if (!(radius > 0.0) || !std::isfinite(radius)) throw Error(ErrorKind::BadInput, "radius must be positive");
  if (steps < 16) throw Error(ErrorKind::BadSize, "a loop needs at least 16 steps");
  if (cycles < 1) throw Error(ErrorKind::BadSize, "cycles must be positive");
  if (orientation != 1 && orientation != -1) throw Error(ErrorKind::BadInput, "orientation must be +1 or -1");
}

std::string plane_name(const Axis& a, const Axis& b) {
  auto part = [](const Axis& x) { return (x.imag ? "Im " : "Re ") + x.label; };
  return part(a) + " / " + part(b);
}

}  // namespace

ParamPath plane_loop(const ParamPoint& base, Axis a, Axis b, double ca, double cb, double radius, int steps,
                     int cycles, int orientation) {
  check_loop_args(radius, steps, cycles, orientation);
  base.get(a.label);
  base.get(b.label);
  ParamPath path;
  path.curve = [=](double s) {
    const double phi = 2.0 * kPi * s * orientation;
    ParamPoint p = set_axis(base, a, ca + radius * std::cos(phi));
    return set_axis(p, b, cb + radius * std::sin(phi));
  };
  path.steps = steps;
  path.cycles = cycles;
  path.closed = true;
  path.orientation = orientation;
  path.plane = plane_name(a, b);
  return path;
}

ParamPath circle_path(const ParamPoint& base, const std::string& label, Complex center, double radius, int steps,
                      int cycles, int orientation) {
  return plane_loop(base, Axis{label, false}, Axis{label, true}, center.real(), center.imag(), radius, steps,
                    cycles, orientation);
}

ParamPath lollipop_path(const ParamPoint& base, Axis a, Axis b, double a0, double b0, double ca, double cb,
                        double radius, int steps, int orientation) {
  check_loop_args(radius, steps, 1, orientation);
  const double da = a0 - ca, db = b0 - cb;
  const double dist = std::hypot(da, db);
  if (dist <= radius) throw Error(ErrorKind::BadInput, "lollipop base point must lie outside its circle");
  const double phi0 = std::atan2(db, da);
  const double ea = ca + radius * std::cos(phi0), eb = cb + radius * std::sin(phi0);
  // stick length vs circumference sets how the s-range is shared
  const double stick = dist - radius;
  const double ring = 2.0 * kPi * radius;
  const double f = stick / (2.0 * stick + ring);
  ParamPath path;
  path.curve = [=](double s) {
    double pa, pb;
    if (s < f) {
      const double w = s / f;
      pa = a0 + (ea - a0) * w;
      pb = b0 + (eb - b0) * w;
    } else if (s < 1.0 - f) {
      const double phi = phi0 + 2.0 * kPi * orientation * (s - f) / (1.0 - 2.0 * f);
      pa = ca + radius * std::cos(phi);
      pb = cb + radius * std::sin(phi);
    } else {
      const double w = (s - (1.0 - f)) / f;
      pa = ea + (a0 - ea) * w;
      pb = eb + (b0 - eb) * w;
    }
    return set_axis(set_axis(base, a, pa), b, pb);
  };
  path.steps = steps;
  path.cycles = 1;
  path.closed = true;
  path.orientation = orientation;
  path.plane = plane_name(a, b);
  return path;
}

ParamPath periodic_sweep(const ParamPoint& base, const std::string& label, Complex from, Complex to, int steps,
                         int cycles) {
  if (steps < 16) throw Error(ErrorKind::BadSize, "a sweep needs at least 16 steps");
  if (cycles < 1) throw Error(ErrorKind::BadSize, "cycles must be positive");
  base.get(label);
  ParamPath path;
  path.curve = [=](double s) { return base.with(label, from + (to - from) * s); };
  path.steps = steps;
  path.cycles = cycles;
  path.closed = true;
  path.orientation = 1;
  path.plane = label;
  return path;
}

ParamPath segment_path(const ParamPoint& from, const ParamPoint& to, int steps) {
  if (from.labels != to.labels) throw Error(ErrorKind::BadInput, "segment endpoints have different labels");
  if (steps < 1) throw Error(ErrorKind::BadSize, "segment needs at least one step");
  ParamPath path;
  path.curve = [=](double s) {
    ParamPoint p = from;
    for (std::size_t i = 0; i < p.coords.size(); ++i) p.coords[i] = from.coords[i] + (to.coords[i] - from.coords[i]) * s;
    return p;
  };
  path.steps = steps;
  path.cycles = 1;
  path.closed = false;
  path.orientation = 1;
  path.plane = "segment";
  return path;
}

}  // namespace nhtopo
