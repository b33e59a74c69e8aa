#include "nhtopo/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace nhtopo {

namespace {

Eigen::VectorXd project(const ComplexMatrix& left, const ComplexVector& psi) {
  Eigen::VectorXd out(left.cols());
  for (Eigen::Index n = 0; n < left.cols(); ++n) out(n) = std::abs(left.col(n).dot(psi.conjugate()));
  return out;
}

std::size_t nearest_sample(const std::vector<double>& u, double x) {
  const auto it = std::lower_bound(u.begin(), u.end(), x);
  if (it == u.begin()) return 0;
  if (it == u.end()) return u.size() - 1;
  const std::size_t hi = static_cast<std::size_t>(it - u.begin());
  return (x - u[hi - 1] <= u[hi] - x) ? hi - 1 : hi;
}

}  // namespace

EvolutionTrace evolve(const ParametricModel& model, const ParamPath& path, double duration,
                      const ComplexVector& psi0, const EvolveOptions& opt) {
  if (!(duration > 0) || !std::isfinite(duration)) throw Error(ErrorKind::BadInput, "duration must be positive");
  if (opt.record_every < 1) throw Error(ErrorKind::BadInput, "record_every must be positive");
  const double u_end = path.u_end();
  auto hamiltonian = [&](double t) { return model(path.at(u_end * t / duration)); };
  const ComplexMatrix h0 = hamiltonian(0.0);
  if (psi0.size() != h0.rows()) throw Error(ErrorKind::BadSize, "initial state does not match the model dimension");
  if (!psi0.allFinite()) throw Error(ErrorKind::BadInput, "initial state must be finite");

  int steps = opt.steps;
  if (steps <= 0) steps = std::max(2000, static_cast<int>(std::ceil(40.0 * duration * matrix_scale(h0))));
  const double h = duration / steps;
  const Complex mi(0.0, -1.0);

  EvolutionTrace trace;
  trace.frames = track_bands(model, path, opt.track);
  auto record = [&](double t, const ComplexVector& psi) {
    const std::size_t l = nearest_sample(trace.frames.u, u_end * t / duration);
    trace.times.push_back(t);
    trace.states.push_back(psi);
    trace.projections.push_back(project(trace.frames.left[l], psi));
  };

  ComplexVector psi = psi0;
  record(0.0, psi);
  for (int s = 0; s < steps; ++s) {
    const double t = s * h;
    const ComplexMatrix ha = hamiltonian(t);
    const ComplexMatrix hm = hamiltonian(t + 0.5 * h);
    const ComplexMatrix hb = hamiltonian(t + h);
    const ComplexVector k1 = mi * (ha * psi);
    const ComplexVector k2 = mi * (hm * (psi + 0.5 * h * k1));
    const ComplexVector k3 = mi * (hm * (psi + 0.5 * h * k2));
    const ComplexVector k4 = mi * (hb * (psi + h * k3));
    psi += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    const double norm = psi.norm();
    if (!std::isfinite(norm) || norm > opt.overflow_guard) {
      throw Error(ErrorKind::StepUnstable, "state norm overflowed at t = " + std::to_string(t + h));
    }
    if ((s + 1) % opt.record_every == 0 || s + 1 == steps) record(s + 1 == steps ? duration : t + h, psi);
  }
  return trace;
}

EncircleOutcome encircle_outcome(const ParametricModel& model, const ParamPoint& center, Axis x, Axis y,
                                 double radius, int direction, double start_angle, double duration,
                                 int initial_band, const EvolveOptions& opt) {
  if (!(radius > 0)) throw Error(ErrorKind::BadInput, "radius must be positive");
  if (direction != 1 && direction != -1) throw Error(ErrorKind::BadInput, "direction must be +1 or -1");
  const double cx = get_axis(center, x), cy = get_axis(center, y);
  ParamPath path;
  path.curve = [=](double s) {
    const double phi = start_angle + 2.0 * kPi * s * direction;
    ParamPoint p = set_axis(center, x, cx + radius * std::cos(phi));
    return set_axis(p, y, cy + radius * std::sin(phi));
  };
  path.steps = 512;
  path.orientation = direction;
  path.plane = x.label + (x.imag ? "_im" : "_re") + "/" + y.label + (y.imag ? "_im" : "_re");

  const ParamPoint start = path.at(0.0);
  const ComplexMatrix h0 = model(start);
  if (initial_band < 0 || initial_band >= h0.rows()) throw Error(ErrorKind::BadInput, "initial band out of range");

  // Frames at u = 0 fix the band order used for both the start and the end state.
  EvolveOptions run = opt;
  run.record_every = std::max(run.record_every, 1 << 30);
  BandTrajectories frames = track_bands(model, path, opt.track);
  const ComplexVector psi0 = frames.right[0].col(initial_band).normalized();
  const EvolutionTrace trace = evolve(model, path, duration, psi0, run);
  const Eigen::VectorXd proj = project(frames.left[0], trace.states.back());

  EncircleOutcome out;
  out.direction = direction;
  out.start_point = start;
  out.initial_band = initial_band;
  Eigen::Index best = 0;
  proj.maxCoeff(&best);
  out.final_band = static_cast<int>(best);
  double second = 0.0;
  for (Eigen::Index n = 0; n < proj.size(); ++n) {
    if (n != best) second = std::max(second, proj(n));
  }
  out.dominance_ratio = second > 0 ? proj(best) / second : std::numeric_limits<double>::infinity();
  return out;
}

EncircleOutcome encircle_outcome(const ParametricModel& model, const EpRecord& ep, Axis x, Axis y, double radius,
                                 int direction, double start_angle, double duration, int initial_band,
                                 const EvolveOptions& opt) {
  return encircle_outcome(model, ep.location, x, y, radius, direction, start_angle, duration, initial_band, opt);
}

}  // namespace nhtopo
