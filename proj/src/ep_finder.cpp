#include "nhtopo/ep_finder.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace nhtopo {

namespace {

Complex disc_at(const ParametricModel& model, const ParamPoint& p) { return discriminant(model(p)); }

ParamPoint perimeter_point(const Region& r, double u) {
  const double w = r.x1 - r.x0, h = r.y1 - r.y0;
  if (u < 1) return r.at(r.x0 + w * u, r.y0);
  if (u < 2) return r.at(r.x1, r.y0 + h * (u - 1));
  if (u < 3) return r.at(r.x1 - w * (u - 2), r.y1);
  return r.at(r.x0, r.y1 - h * std::min(1.0, u - 3));
}

void check_region(const Region& r) {
  if (!(r.x1 > r.x0) || !(r.y1 > r.y0)) throw Error(ErrorKind::BadInput, "region must be a non-degenerate rectangle");
  r.base.get(r.x.label);
  r.base.get(r.y.label);
}

// Largest group of eigenvalues within cluster_tol of one another's seed.
std::vector<int> largest_cluster(const ComplexVector& e, double cluster_tol) {
  std::vector<int> best;
  for (Eigen::Index i = 0; i < e.size(); ++i) {
    std::vector<int> g;
    for (Eigen::Index j = 0; j < e.size(); ++j) {
      if (std::abs(e(i) - e(j)) <= cluster_tol) g.push_back(static_cast<int>(j));
    }
    if (g.size() > best.size()) best = g;
  }
  return best;
}

Complex mean_of(const ComplexVector& e, const std::vector<int>& idx) {
  Complex s = 0.0;
  for (int i : idx) s += e(i);
  return s / static_cast<double>(idx.size());
}

// Indices of the k eigenvalues nearest to `target`.
std::vector<int> nearest(const ComplexVector& e, Complex target, int k) {
  std::vector<int> idx(e.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(),
                   [&](int a, int b) { return std::abs(e(a) - target) < std::abs(e(b) - target); });
  idx.resize(std::min<std::size_t>(idx.size(), static_cast<std::size_t>(k)));
  return idx;
}

// Damped Newton on (Re disc, Im disc) in the region's two real coordinates.
bool newton_polish(const ParametricModel& model, const Region& r, double& xv, double& yv, const EpTolerances& tol) {
  auto f = [&](double a, double b) { return disc_at(model, r.at(a, b)); };
  Complex fv = f(xv, yv);
  const double reach = 4.0 * std::max(r.x1 - r.x0, r.y1 - r.y0);
  const double cx = 0.5 * (r.x0 + r.x1), cy = 0.5 * (r.y0 + r.y1);
  for (int it = 0; it < 60 && std::abs(fv) > 1e-3 * tol.ep_tol; ++it) {
    const double hx = tol.fd_step * std::max(1.0, std::abs(xv));
    const double hy = tol.fd_step * std::max(1.0, std::abs(yv));
    const Complex dx = (f(xv + hx, yv) - f(xv - hx, yv)) / (2 * hx);
    const Complex dy = (f(xv, yv + hy) - f(xv, yv - hy)) / (2 * hy);
    Eigen::Matrix2d j;
    j << dx.real(), dy.real(), dx.imag(), dy.imag();
    if (std::abs(j.determinant()) < 1e-300) return false;
    const Eigen::Vector2d step = j.fullPivLu().solve(Eigen::Vector2d(-fv.real(), -fv.imag()));
    double lam = 1.0;
    bool improved = false;
    for (int k = 0; k < 30; ++k, lam *= 0.5) {
      const double nx = xv + lam * step(0), ny = yv + lam * step(1);
      if (std::hypot(nx - cx, ny - cy) > reach) continue;
      const Complex nf = f(nx, ny);
      if (std::abs(nf) < std::abs(fv)) {
        xv = nx;
        yv = ny;
        fv = nf;
        improved = true;
        break;
      }
    }
    if (!improved) break;
  }
  return std::abs(fv) <= tol.ep_tol;
}

// `multiplicity` is the discriminant's zero count at p; an order-N EP contributes N - 1.
EpRecord make_record(const ParametricModel& model, const ParamPoint& p, const EpTolerances& tol, int multiplicity) {
  EpRecord rec;
  rec.location = p;
  const ComplexMatrix h = model(p);
  const ComplexVector e = eigenvalues(h);
  const std::vector<int> cl = largest_cluster(e, tol.cluster_tol);
  rec.order = std::max<int>(multiplicity + 1, static_cast<int>(cl.size()));
  rec.order = std::min<int>(rec.order, static_cast<int>(e.size()));
  const std::vector<int> idx = static_cast<int>(cl.size()) >= rec.order ? cl : nearest(e, mean_of(e, cl), rec.order);
  rec.energy = mean_of(e, idx);
  rec.residual = std::abs(discriminant_from_values(e));
  return rec;
}

void search(const ParametricModel& model, const Region& r, double tol, const EpTolerances& eptol, int count,
            std::vector<EpRecord>& out, int depth) {
  if (count == 0) return;
  const double w = r.x1 - r.x0, h = r.y1 - r.y0;
  if (count == 1 && depth >= 6) {
    // simple zero in a small box: Newton converges quadratically from the center
    double xv = 0.5 * (r.x0 + r.x1), yv = 0.5 * (r.y0 + r.y1);
    if (newton_polish(model, r, xv, yv, eptol) && xv >= r.x0 - 0.5 * w && xv <= r.x1 + 0.5 * w &&
        yv >= r.y0 - 0.5 * h && yv <= r.y1 + 0.5 * h) {
      out.push_back(make_record(model, r.at(xv, yv), eptol, count));
      return;
    }
  }
  if (std::max(w, h) <= tol || depth > 80) {
    double xv = 0.5 * (r.x0 + r.x1), yv = 0.5 * (r.y0 + r.y1);
    const double cx = xv, cy = yv;
    if (!newton_polish(model, r, xv, yv, eptol)) {
      xv = cx;
      yv = cy;
      if (std::abs(disc_at(model, r.at(xv, yv))) > eptol.ep_tol) {
        throw Error(ErrorKind::PolishDiverged, "discriminant stays above ep_tol after polishing");
      }
    }
    out.push_back(make_record(model, r.at(xv, yv), eptol, count));
    return;
  }
  // Off-center splits keep symmetric EPs off the sub-box edges; retry if one lands there.
  static constexpr double kSplits[] = {0.5173, 0.4791, 0.5437, 0.4523};
  for (double fr : kSplits) {
    const double xm = r.x0 + fr * w, ym = r.y0 + fr * h;
    std::array<Region, 4> parts{r, r, r, r};
    parts[0].x1 = xm, parts[0].y1 = ym;
    parts[1].x0 = xm, parts[1].y1 = ym;
    parts[2].x1 = xm, parts[2].y0 = ym;
    parts[3].x0 = xm, parts[3].y0 = ym;
    std::array<int, 4> counts{};
    // inside the search only an exact hit on an edge is a problem
    EpTolerances inner = eptol;
    inner.ep_tol = 1e-15;
    try {
      for (int k = 0; k < 4; ++k) counts[k] = count_eps(model, parts[k], 16, inner);
    } catch (const Error& e) {
      if (e.kind() == ErrorKind::EpOnBoundary) continue;
      throw;
    }
    for (int k = 0; k < 4; ++k) search(model, parts[k], tol, eptol, counts[k], out, depth + 1);
    return;
  }
  throw Error(ErrorKind::EpOnBoundary, "could not split region away from an EP");
}

}  // namespace

int count_eps(const ParametricModel& model, const Region& region, int resolution, const EpTolerances& tol) {
  check_region(region);
  if (resolution < 4) throw Error(ErrorKind::BadSize, "resolution must be at least 4");
  if (model.dim() < 2) return 0;
  auto f = [&](double u) { return disc_at(model, perimeter_point(region, u)); };
  int n = 4 * resolution;
  double prev = accumulated_phase(f, 0.0, 4.0, n, tol.ep_tol, ErrorKind::EpOnBoundary) / (2 * kPi);
  for (int attempt = 0; attempt < 6; ++attempt) {
    n *= 2;
    const double w = accumulated_phase(f, 0.0, 4.0, n, tol.ep_tol, ErrorKind::EpOnBoundary) / (2 * kPi);
    if (std::lround(w) == std::lround(prev) && std::abs(w - std::round(w)) <= 1e-3) {
      return static_cast<int>(std::lround(w));
    }
    prev = w;
  }
  throw Error(ErrorKind::NonConvergence, "boundary winding did not stabilize");
}

std::vector<EpRecord> locate_eps(const ParametricModel& model, const Region& region, double tol,
                                 const EpTolerances& eptol) {
  if (!(tol > 0)) throw Error(ErrorKind::BadInput, "tolerance must be positive");
  const int total = count_eps(model, region, 64, eptol);
  std::vector<EpRecord> out;
  // A signed count can hide zeros of opposite winding; only positive counts are searched.
  search(model, region, tol, eptol, std::abs(total), out, 0);
  std::sort(out.begin(), out.end(), [&](const EpRecord& a, const EpRecord& b) {
    const double ax = get_axis(a.location, region.x), bx = get_axis(b.location, region.x);
    if (ax != bx) return ax < bx;
    return get_axis(a.location, region.y) < get_axis(b.location, region.y);
  });
  return out;
}

EpRecord locate_ep(const ParametricModel& model, const Region& region, double tol, const EpTolerances& eptol) {
  const std::vector<EpRecord> eps = locate_eps(model, region, tol, eptol);
  if (eps.empty()) throw Error(ErrorKind::NoEp, "no EP inside the region");
  if (eps.size() > 1) throw Error(ErrorKind::MultipleEps, std::to_string(eps.size()) + " EPs inside the region");
  return eps.front();
}

OrderProbe ep_order(const ParametricModel& model, const ParamPoint& at, const Axis& x, const Axis& y,
                    double probe_radius, const EpTolerances& tol) {
  const Eigensystem es = eig_biorthogonal(model(at));
  const std::vector<int> cl = largest_cluster(es.values, tol.cluster_tol);
  OrderProbe probe;
  probe.cluster_size = static_cast<int>(cl.size());
  probe.energy = mean_of(es.values, cl);
  if (probe.cluster_size < 2) throw Error(ErrorKind::NotDegenerate, "no coalescing eigenvalues at this point");

  const ParamPath loop = plane_loop(at, x, y, get_axis(at, x), get_axis(at, y), probe_radius, 64);
  const BandTrajectories traj = track_bands(model, loop);
  const std::vector<int> near = nearest(traj.energies.front(), probe.energy, probe.cluster_size);
  for (const auto& c : perm_cycles(traj.permutation)) {
    for (int b : near) {
      if (std::find(c.begin(), c.end(), b) != c.end()) {
        probe.cycle_length = std::max(probe.cycle_length, static_cast<int>(c.size()));
      }
    }
  }

  if (probe.cycle_length == probe.cluster_size) {
    probe.order = probe.cluster_size;
    return probe;
  }
  if (probe.cycle_length == 1) {
    // Degenerate energies that do not braid: diabolic if the eigenvectors stay apart.
    double min_angle = kPi / 2;
    for (std::size_t a = 0; a < cl.size(); ++a) {
      for (std::size_t b = a + 1; b < cl.size(); ++b) {
        const double c = std::min(1.0, std::abs(es.right.col(cl[a]).normalized().dot(es.right.col(cl[b]).normalized())));
        min_angle = std::min(min_angle, std::acos(c));
      }
    }
    if (min_angle > 1e-2) {
      probe.order = 1;
      probe.diabolic = true;
      return probe;
    }
  }
  throw Error(ErrorKind::ProbesDisagree, "cluster size " + std::to_string(probe.cluster_size) +
                                             " but loop cycle length " + std::to_string(probe.cycle_length));
}

ExponentFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  const auto n = static_cast<double>(x.size());
  if (x.size() < 2 || x.size() != y.size()) throw Error(ErrorKind::BadSize, "fit needs at least two points");
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  ExponentFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  fit.r_squared = syy > 0 ? (sxy * sxy) / (sxx * syy) : 1.0;
  return fit;
}

ExponentFit critical_exponent(const ParametricModel& model, const EpRecord& ep, const std::string& label,
                              Complex direction, double delta_min, double delta_max, Observable obs, int samples) {
  if (samples < 8) throw Error(ErrorKind::BadSize, "exponent fit needs at least 8 samples");
  if (!(delta_min > 0) || !(delta_max > delta_min)) throw Error(ErrorKind::BadInput, "invalid detuning range");
  if (std::abs(direction) == 0.0) throw Error(ErrorKind::BadInput, "direction must be nonzero");
  direction /= std::abs(direction);
  const int k = std::max(2, ep.order);
  std::vector<double> lx, ly, deltas, values;
  for (int s = 0; s < samples; ++s) {
    const double d = delta_min * std::pow(delta_max / delta_min, static_cast<double>(s) / (samples - 1));
    const ParamPoint p = ep.location.with(label, ep.location.get(label) + d * direction);
    const ComplexMatrix h = model(p);
    double v = 0.0;
    if (obs == Observable::Splitting) {
      const ComplexVector e = eigenvalues(h);
      const std::vector<int> idx = nearest(e, ep.energy, k);
      for (int a : idx) {
        for (int b : idx) v = std::max(v, std::abs(e(a) - e(b)));
      }
    } else {
      const Eigensystem es = eig_biorthogonal_strict(h);
      v = std::numeric_limits<double>::infinity();
      for (int a : nearest(es.values, ep.energy, k)) v = std::min(v, std::abs(phase_rigidity(es, a)));
    }
    if (!(v > 0)) throw Error(ErrorKind::FitRejected, "observable vanishes at a sample");
    deltas.push_back(d);
    values.push_back(v);
    lx.push_back(std::log(d));
    ly.push_back(std::log(v));
  }
  ExponentFit fit = fit_line(lx, ly);
  fit.delta_min = delta_min;
  fit.delta_max = delta_max;
  fit.deltas = std::move(deltas);
  fit.values = std::move(values);
  if (fit.r_squared < 0.99) throw Error(ErrorKind::FitRejected, "r^2 = " + std::to_string(fit.r_squared));
  return fit;
}

// ---------------------------------------------------------------------------
// arc continuation

namespace {

using Vec3 = Eigen::Vector3d;

ParamPoint place(const ParamPoint& base, const std::array<Axis, 3>& axes, const Vec3& v) {
  ParamPoint p = base;
  for (int i = 0; i < 3; ++i) p = set_axis(p, axes[i], v(i));
  return p;
}

Vec3 coords_of(const ParamPoint& p, const std::array<Axis, 3>& axes) {
  return Vec3(get_axis(p, axes[0]), get_axis(p, axes[1]), get_axis(p, axes[2]));
}

// Rows: grad Re(disc), grad Im(disc).
Eigen::Matrix<double, 2, 3> disc_jacobian(const ParametricModel& model, const ParamPoint& base,
                                          const std::array<Axis, 3>& axes, const Vec3& v, double h) {
  Eigen::Matrix<double, 2, 3> j;
  for (int i = 0; i < 3; ++i) {
    Vec3 a = v, b = v;
    a(i) += h;
    b(i) -= h;
    const Complex d = (disc_at(model, place(base, axes, a)) - disc_at(model, place(base, axes, b))) / (2 * h);
    j(0, i) = d.real();
    j(1, i) = d.imag();
  }
  return j;
}

Vec3 current_of(const Eigen::Matrix<double, 2, 3>& j) {
  return Vec3(j.row(0).transpose()).cross(Vec3(j.row(1).transpose()));
}

// Newton on disc = 0 constrained to the hyperplane through `pred` normal to `t`.
bool correct(const ParametricModel& model, const ParamPoint& base, const std::array<Axis, 3>& axes, Vec3& v,
             const Vec3& pred, const Vec3& t, const EpTolerances& tol) {
  for (int it = 0; it < 12; ++it) {
    const Complex d = disc_at(model, place(base, axes, v));
    const double plane = t.dot(v - pred);
    if (std::abs(d) <= 1e-2 * tol.ep_tol && std::abs(plane) < 1e-12) return true;
    const auto j = disc_jacobian(model, base, axes, v, 1e-6);
    Eigen::Matrix3d a;
    a.row(0) = j.row(0);
    a.row(1) = j.row(1);
    a.row(2) = t.transpose();
    const Vec3 rhs(-d.real(), -d.imag(), -plane);
    const Eigen::FullPivLU<Eigen::Matrix3d> lu(a);
    if (!lu.isInvertible()) return false;
    const Vec3 dv = lu.solve(rhs);
    v += dv;
    if (!v.allFinite()) return false;
    if (dv.norm() < 1e-14 * std::max(1.0, v.norm())) break;
  }
  return std::abs(disc_at(model, place(base, axes, v))) <= tol.ep_tol;
}

}  // namespace

std::array<double, 3> ea_current(const ParametricModel& model, const ParamPoint& p, const std::array<Axis, 3>& axes,
                                 double h) {
  const Vec3 c = current_of(disc_jacobian(model, p, axes, coords_of(p, axes), h));
  return {c(0), c(1), c(2)};
}

ArcTrace trace_ea(const ParametricModel& model, const std::array<Axis, 3>& axes, const ParamPoint& seed, double step,
                  int max_points, int direction, const EpTolerances& tol) {
  if (!(step > 0) || max_points < 2) throw Error(ErrorKind::BadInput, "step must be positive and max_points >= 2");
  if (direction != 1 && direction != -1) throw Error(ErrorKind::BadInput, "direction must be +1 or -1");
  ArcTrace trace;
  Vec3 v = coords_of(seed, axes);
  Vec3 c = current_of(disc_jacobian(model, seed, axes, v, 1e-6));
  const double c_seed = c.norm();
  if (!(c_seed > 0)) throw Error(ErrorKind::BadInput, "seed is not a regular point of an exceptional arc");
  // pull the seed onto the arc
  if (!correct(model, seed, axes, v, v, c / c_seed, tol)) {
    throw Error(ErrorKind::ContinuationStalled, "seed could not be corrected onto the arc");
  }
  auto record = [&](const Vec3& at, const Vec3& cur) {
    ArcPoint pt;
    pt.location = place(seed, axes, at);
    const ComplexVector e = eigenvalues(model(pt.location));
    pt.energy = mean_of(e, largest_cluster(e, tol.cluster_tol));
    const Vec3 n = cur.normalized();
    pt.current = {n(0), n(1), n(2)};
    trace.points.push_back(pt);
  };
  c = current_of(disc_jacobian(model, seed, axes, v, 1e-6));
  record(v, c);
  Vec3 t_prev = direction * c.normalized();

  while (static_cast<int>(trace.points.size()) < max_points) {
    if (c.norm() < 1e-3 * c_seed) {
      trace.order_changed = true;
      trace.stop_reason = "discriminant gradients lose rank";
      return trace;
    }
    const Vec3 t = direction * c.normalized();
    if (t.dot(t_prev) < 0) {
      trace.order_changed = true;
      trace.stop_reason = "arc orientation flips";
      return trace;
    }
    double h = step;
    Vec3 next;
    for (;;) {
      const Vec3 pred = v + h * t;
      next = pred;
      if (correct(model, seed, axes, next, pred, t, tol) && (next - v).norm() <= 2 * h) break;
      h *= 0.5;
      if (h < 1e-4 * step) throw Error(ErrorKind::ContinuationStalled, "corrector failed at minimum step");
    }
    v = next;
    t_prev = t;
    c = current_of(disc_jacobian(model, seed, axes, v, 1e-6));
    record(v, c);
  }
  trace.stop_reason = "max_points reached";
  return trace;
}

}  // namespace nhtopo
