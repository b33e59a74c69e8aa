#include "nhtopo/winding.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

#include "nhtopo/assignment.hpp"

namespace nhtopo {

// ---------------------------------------------------------------------------
// permutations

Permutation compose(const Permutation& first, const Permutation& second) {
  Permutation out(first.size());
  for (std::size_t b = 0; b < first.size(); ++b) out[b] = second[first[b]];
  return out;
}

std::vector<std::vector<int>> perm_cycles(const Permutation& p) {
  std::vector<char> seen(p.size(), 0);
  std::vector<std::vector<int>> out;
  for (std::size_t s = 0; s < p.size(); ++s) {
    if (seen[s]) continue;
    std::vector<int> cyc;
    for (int b = static_cast<int>(s); !seen[b]; b = p[b]) {
      seen[b] = 1;
      cyc.push_back(b);
    }
    out.push_back(std::move(cyc));
  }
  return out;
}

std::string cycle_notation(const Permutation& p) {
  std::string out;
  for (const auto& c : perm_cycles(p)) {
    if (c.size() < 2) continue;
    out += "(";
    for (std::size_t k = 0; k < c.size(); ++k) out += (k ? " " : "") + std::to_string(c[k] + 1);
    out += ")";
  }
  return out.empty() ? "()" : out;
}

std::size_t generated_group_order(const std::vector<Permutation>& gens) {
  if (gens.empty()) return 1;
  Permutation id(gens.front().size());
  std::iota(id.begin(), id.end(), 0);
  std::set<Permutation> seen{id};
  std::vector<Permutation> frontier{id};
  while (!frontier.empty()) {
    std::vector<Permutation> next;
    for (const auto& g : frontier) {
      for (const auto& h : gens) {
        Permutation gh = compose(g, h);
        if (seen.insert(gh).second) next.push_back(std::move(gh));
      }
    }
    frontier = std::move(next);
  }
  return seen.size();
}

// ---------------------------------------------------------------------------
// tracking

namespace {

struct Sample {
  double u = 0.0;
  ComplexVector e;
  ComplexMatrix r, l;
};

Sample eval_sample(const ParametricModel& model, const ParamPath& path, double u, const SpectralTolerances& tol) {
  const ComplexMatrix h = model(path.at(u));
  Eigensystem es = eig_biorthogonal(h, tol);
  if (!es.normalized) {
    std::ostringstream msg;
    msg << "defective matrix at path parameter u=" << u << " (denominator " << es.defect.norm_denominator_min << ")";
    throw Error(ErrorKind::PathHitsEP, msg.str());
  }
  return Sample{u, es.values, es.right, es.left};
}

// Lexicographic (Re, Im) with Re quantized so exact ties in exact arithmetic stay ties.
std::vector<int> re_order(const ComplexVector& e, double scale) {
  const double q = 1e-9 * scale;
  std::vector<int> idx(e.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) {
    const double ra = std::round(e(a).real() / q), rb = std::round(e(b).real() / q);
    if (ra != rb) return ra < rb;
    return e(a).imag() < e(b).imag();
  });
  return idx;
}

void reorder(Sample& s, const std::vector<int>& order) {
  Sample t = s;
  for (std::size_t k = 0; k < order.size(); ++k) {
    t.e(k) = s.e(order[k]);
    t.r.col(k) = s.r.col(order[k]);
    t.l.col(k) = s.l.col(order[k]);
  }
  s = std::move(t);
}

double min_gap(const ComplexVector& e, Eigen::Index i) {
  double g = std::numeric_limits<double>::infinity();
  for (Eigen::Index j = 0; j < e.size(); ++j) {
    if (j != i) g = std::min(g, std::abs(e(i) - e(j)));
  }
  return g;
}

// Returns the assignment prev band -> index in next, or empty when the step is too coarse.
std::vector<int> match_step(const Sample& prev, const Sample& next, double gap_fraction, double scale) {
  const Eigen::Index n = prev.e.size();
  Eigen::MatrixXd cost(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) cost(i, j) = std::abs(prev.e(i) - next.e(j));
  }
  std::vector<int> sigma = min_cost_assignment(cost);

  // Inside exactly degenerate clusters energy cannot decide; use eigenvector overlap.
  const double tie = 1e-10 * scale;
  std::vector<char> done(n, 0);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (done[i]) continue;
    std::vector<int> group;
    for (Eigen::Index k = 0; k < n; ++k) {
      if (std::abs(next.e(sigma[k]) - next.e(sigma[i])) <= tie) group.push_back(static_cast<int>(k));
    }
    for (int k : group) done[k] = 1;
    if (group.size() < 2) continue;
    const auto m = static_cast<Eigen::Index>(group.size());
    Eigen::MatrixXd oc(m, m);
    for (Eigen::Index a = 0; a < m; ++a) {
      for (Eigen::Index c = 0; c < m; ++c) {
        const Complex ov = prev.l.col(group[a]).transpose() * next.r.col(sigma[group[c]]);
        oc(a, c) = -std::abs(ov);
      }
    }
    const std::vector<int> om = min_cost_assignment(oc);
    std::vector<int> targets;
    for (int k : group) targets.push_back(sigma[k]);
    for (Eigen::Index a = 0; a < m; ++a) sigma[group[a]] = targets[om[a]];
  }

  for (Eigen::Index i = 0; i < n; ++i) {
    const double d = std::abs(prev.e(i) - next.e(sigma[i]));
    if (d <= 1e-12 * scale) continue;
    const double g = std::min(min_gap(prev.e, i), min_gap(next.e, sigma[i]));
    if (!(d <= gap_fraction * g)) return {};
  }
  return sigma;
}

// Rotates the new frame so <L_b(prev)|R_b(next)> is real positive (keeps L.R = 1).
void parallel_transport(const Sample& prev, Sample& next) {
  for (Eigen::Index b = 0; b < prev.e.size(); ++b) {
    const Complex ov = prev.l.col(b).transpose() * next.r.col(b);
    const double a = std::abs(ov);
    if (a == 0.0 || !std::isfinite(a)) continue;
    const Complex ph = ov / a;
    next.r.col(b) *= std::conj(ph);
    next.l.col(b) *= ph;
  }
}

double continuity_deficit(const Sample& prev, const Sample& next) {
  double worst = 0.0;
  for (Eigen::Index b = 0; b < prev.e.size(); ++b) {
    const double c = std::abs(prev.r.col(b).normalized().dot(next.r.col(b).normalized()));
    worst = std::max(worst, 1.0 - c);
  }
  return worst;
}

}  // namespace

BandTrajectories track_bands(const ParametricModel& model, const ParamPath& path, const TrackOptions& opt) {
  if (path.steps < 1) throw Error(ErrorKind::BadSize, "path has no steps");
  Sample cur = eval_sample(model, path, 0.0, opt.spectral);
  const double scale = matrix_scale(model(path.at(0.0)));
  reorder(cur, re_order(cur.e, scale));

  BandTrajectories traj;
  traj.n_bands = static_cast<int>(cur.e.size());
  traj.path = path;
  auto push = [&](const Sample& s) {
    traj.u.push_back(s.u);
    traj.energies.push_back(s.e);
    traj.right.push_back(s.r);
    traj.left.push_back(s.l);
  };
  push(cur);

  const std::size_t n_grid = path.closed ? path.size() : static_cast<std::size_t>(path.steps);
  const double du = 1.0 / path.steps;
  const double min_du = du * std::ldexp(1.0, -opt.max_depth);
  for (std::size_t k = 1; k <= n_grid; ++k) {
    const double target = static_cast<double>(k) * du;
    std::vector<double> stack{target};
    while (!stack.empty()) {
      const double t = stack.back();
      if (t - cur.u < min_du) {
        std::ostringstream msg;
        msg << "band matching still ambiguous near u=" << cur.u << " after " << opt.max_depth << " bisections";
        throw Error(ErrorKind::AmbiguousMatch, msg.str());
      }
      Sample next = eval_sample(model, path, t, opt.spectral);
      const std::vector<int> sigma = match_step(cur, next, opt.gap_fraction, scale);
      if (sigma.empty()) {
        stack.push_back(0.5 * (cur.u + t));
        continue;
      }
      reorder(next, sigma);
      parallel_transport(cur, next);
      traj.continuity_residual = std::max(traj.continuity_residual, continuity_deficit(cur, next));
      push(next);
      cur = std::move(next);
      stack.pop_back();
    }
  }

  traj.permutation.resize(traj.n_bands);
  std::iota(traj.permutation.begin(), traj.permutation.end(), 0);
  if (path.closed) {
    // The last sample is the starting point again: read off the permutation and
    // reuse the initial frames so products over the loop are exactly closed.
    const Eigen::Index n = traj.n_bands;
    const ComplexVector& e0 = traj.energies.front();
    const ComplexVector& el = traj.energies.back();
    Eigen::MatrixXd cost(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = 0; j < n; ++j) cost(i, j) = std::abs(el(i) - e0(j));
    }
    traj.permutation = min_cost_assignment(cost);
    for (Eigen::Index b = 0; b < n; ++b) {
      const int s = traj.permutation[b];
      if (std::abs(el(b) - e0(s)) > 1e-8 * scale) {
        throw Error(ErrorKind::AmbiguousMatch, "loop does not close onto its starting spectrum");
      }
      traj.energies.back()(b) = e0(s);
      traj.right.back().col(b) = traj.right.front().col(s);
      traj.left.back().col(b) = traj.left.front().col(s);
    }
  }
  return traj;
}

Permutation loop_permutation(const ParametricModel& model, const ParamPath& path, const TrackOptions& opt) {
  if (!path.closed) throw Error(ErrorKind::BadInput, "loop_permutation needs a closed path");
  return track_bands(model, path, opt).permutation;
}

// ---------------------------------------------------------------------------
// phase accumulation and windings

namespace {

Complex checked(const std::function<Complex(double)>& f, double u, double zero_tol, ErrorKind kind) {
  const Complex v = f(u);
  if (!(std::abs(v) > zero_tol)) {
    std::ostringstream msg;
    msg << "winding integrand vanishes at path parameter u=" << u;
    throw Error(kind, msg.str());
  }
  return v;
}

double segment_phase(const std::function<Complex(double)>& f, double a, Complex fa, double b, Complex fb,
                     double zero_tol, ErrorKind kind, int depth, int max_depth) {
  const double d = std::arg(fb / fa);
  if (std::abs(d) < kPi / 2) return d;
  if (depth >= max_depth) throw Error(ErrorKind::NonConvergence, "phase increments do not shrink under bisection");
  const double m = 0.5 * (a + b);
  const Complex fm = checked(f, m, zero_tol, kind);
  return segment_phase(f, a, fa, m, fm, zero_tol, kind, depth + 1, max_depth) +
         segment_phase(f, m, fm, b, fb, zero_tol, kind, depth + 1, max_depth);
}

}  // namespace

double accumulated_phase(const std::function<Complex(double)>& f, double u0, double u1, int base_steps,
                         double zero_tol, ErrorKind zero_kind, int max_depth) {
  if (base_steps < 1) throw Error(ErrorKind::BadSize, "need at least one step");
  double total = 0.0;
  double a = u0;
  Complex fa = checked(f, a, zero_tol, zero_kind);
  for (int k = 1; k <= base_steps; ++k) {
    const double b = u0 + (u1 - u0) * k / base_steps;
    const Complex fb = checked(f, b, zero_tol, zero_kind);
    total += segment_phase(f, a, fa, b, fb, zero_tol, zero_kind, 0, max_depth);
    a = b;
    fa = fb;
  }
  return total;
}

namespace {

// Winding of f along the closed path, confirmed by a run at twice the resolution.
double stable_winding(const std::function<Complex(double)>& f, const ParamPath& path, double zero_tol,
                      ErrorKind zero_kind) {
  if (!path.closed) throw Error(ErrorKind::BadInput, "winding needs a closed path");
  int n = static_cast<int>(path.size());
  double prev = accumulated_phase(f, 0.0, path.u_end(), n, zero_tol, zero_kind) / (2 * kPi);
  for (int attempt = 0; attempt < 5; ++attempt) {
    n *= 2;
    const double w = accumulated_phase(f, 0.0, path.u_end(), n, zero_tol, zero_kind) / (2 * kPi);
    if (std::lround(w) == std::lround(prev) && std::abs(w - std::round(w)) <= 1e-3) return w;
    prev = w;
  }
  throw Error(ErrorKind::NonConvergence, "winding did not stabilize under refinement");
}

}  // namespace

double eigenvalue_winding_raw(const ParametricModel& model, const ParamPath& path, Complex e_ref) {
  const Eigen::Index n = model.dim();
  const double scale = matrix_scale(model(path.at(0.0))) + std::abs(e_ref);
  const double zero_tol = 1e-13 * std::pow(scale, static_cast<double>(n));
  auto f = [&](double u) {
    ComplexMatrix h = model(path.at(u));
    h.diagonal().array() -= e_ref;
    return Complex(h.determinant());
  };
  return stable_winding(f, path, zero_tol, ErrorKind::ReferenceOnSpectrum);
}

int eigenvalue_winding(const ParametricModel& model, const ParamPath& path, Complex e_ref) {
  return static_cast<int>(std::lround(eigenvalue_winding_raw(model, path, e_ref)));
}

int vorticity_winding(const ParametricModel& model, const ParamPath& path) {
  if (model.dim() < 2) return 0;
  auto f = [&](double u) { return discriminant(model(path.at(u))); };
  return -static_cast<int>(std::lround(stable_winding(f, path, 1e-8, ErrorKind::PathHitsEP)));
}

namespace {

double pair_arg_change(const BandTrajectories& traj, int i, int j) {
  const double scale = std::max(1.0, traj.energies.front().cwiseAbs().maxCoeff());
  double total = 0.0;
  Complex prev = traj.energies[0](i) - traj.energies[0](j);
  for (std::size_t l = 1; l < traj.samples(); ++l) {
    const Complex d = traj.energies[l](i) - traj.energies[l](j);
    if (std::abs(d) <= 1e-12 * scale) throw Error(ErrorKind::BandsCollide, "bands coincide along the path");
    total += std::arg(d / prev);
    prev = d;
  }
  return total;
}

void check_band(const BandTrajectories& traj, int b) {
  if (b < 0 || b >= traj.n_bands) throw Error(ErrorKind::BadInput, "band index out of range");
}

}  // namespace

double vorticity(const BandTrajectories& traj, int i, int j) {
  check_band(traj, i);
  check_band(traj, j);
  if (i == j) throw Error(ErrorKind::BadInput, "vorticity needs two distinct bands");
  if (!traj.path.closed) throw Error(ErrorKind::BadInput, "vorticity needs a closed path");
  const auto& p = traj.permutation;
  const bool closed_pair = (p[i] == i && p[j] == j) || (p[i] == j && p[j] == i);
  if (!closed_pair) throw Error(ErrorKind::BandNotClosed, "band pair is not mapped onto itself by the loop");
  const double v = -pair_arg_change(traj, i, j) / (2 * kPi);
  if (std::abs(2 * v - std::round(2 * v)) > 1e-3) throw Error(ErrorKind::NonConvergence, "vorticity is not a half-integer");
  return v;
}

// ---------------------------------------------------------------------------
// Berry phases

namespace {

// One closed strand: a band followed until it returns to itself.
struct Strand {
  std::vector<ComplexVector> r, l;
  std::vector<Complex> c;  // product over the other bands of (E_k - E_b)
};

Strand build_strand(const BandTrajectories& traj, int band) {
  Strand s;
  const std::size_t last = traj.samples() - 1;
  int b = band;
  do {
    for (std::size_t l = 0; l < last; ++l) {
      s.r.push_back(traj.right[l].col(b));
      s.l.push_back(traj.left[l].col(b));
      Complex c = 1.0;
      for (int k = 0; k < traj.n_bands; ++k) {
        if (k != b) c *= traj.energies[l](k) - traj.energies[l](b);
      }
      s.c.push_back(c);
    }
    b = traj.permutation[b];
  } while (b != band);
  s.r.push_back(s.r.front());
  s.l.push_back(s.l.front());
  s.c.push_back(s.c.front());
  return s;
}

// Phase of the strand measured against the analytic gauge built from c * (projector),
// with the sqrt normalization continued along the strand. Returns the cumulative values.
std::vector<double> extended_phase(const Strand& s) {
  const std::size_t n = s.r.size();
  const Eigen::Index dim = s.r.front().size();
  // entry (i, j) of the scaled projector that stays farthest from zero
  Eigen::Index bi = 0, bj = 0;
  double best = -1.0;
  for (Eigen::Index i = 0; i < dim; ++i) {
    for (Eigen::Index j = 0; j < dim; ++j) {
      double m = std::numeric_limits<double>::infinity();
      for (std::size_t l = 0; l < n; ++l) m = std::min(m, std::abs(s.c[l] * s.r[l](i) * s.l[l](j)));
      if (m > best) {
        best = m;
        bi = i;
        bj = j;
      }
    }
  }
  if (!(best > 1e-12)) {
    // No single entry stays away from zero: fall back to the transported frames.
    std::vector<double> cumulative{0.0};
    double phi = 0.0;
    for (std::size_t l = 0; l + 1 < n; ++l) {
      phi += std::arg(Complex(s.l[l].transpose() * s.r[l + 1]));
      cumulative.push_back(phi);
    }
    return cumulative;
  }

  std::vector<ComplexVector> rv(n), lv(n);
  std::vector<Complex> sq(n);
  for (std::size_t l = 0; l < n; ++l) {
    rv[l] = s.c[l] * s.l[l](bj) * s.r[l];
    lv[l] = s.c[l] * s.r[l](bi) * s.l[l];
    const Complex norm = lv[l].transpose() * rv[l];
    Complex root = std::sqrt(norm);
    if (l > 0 && std::abs(root - sq[l - 1]) > std::abs(root + sq[l - 1])) root = -root;
    sq[l] = root;
  }
  std::vector<double> cumulative{0.0};
  double phi = 0.0, nphase = 0.0;
  for (std::size_t l = 0; l + 1 < n; ++l) {
    const Complex ov = (lv[l] / sq[l]).transpose() * (rv[l + 1] / sq[l + 1]);
    phi += std::arg(ov);
    nphase += std::arg((sq[l + 1] * sq[l + 1]) / (sq[l] * sq[l]));
    cumulative.push_back(phi + 0.5 * nphase);
  }
  return cumulative;
}

double wrap_pi(double a) {
  a = std::remainder(a, 2 * kPi);
  return a <= -kPi ? a + 2 * kPi : a;
}

}  // namespace

BerryResult wilson_loop(const BandTrajectories& traj, const BerryOptions& opt) {
  if (!traj.path.closed) throw Error(ErrorKind::BadInput, "wilson_loop needs a closed path");
  const int n = traj.n_bands;
  BerryResult res;
  res.cycles_used = traj.path.cycles;
  res.U = ComplexMatrix::Identity(n, n);
  for (std::size_t l = 0; l + 1 < traj.samples(); ++l) {
    res.U = res.U * (traj.left[l].transpose() * traj.right[l + 1]);
  }
  const Complex det = res.U.determinant();
  if (!(std::abs(det) > 0.0) || !std::isfinite(std::abs(det))) {
    throw Error(ErrorKind::UnitarityLoss, "Wilson loop product is singular");
  }
  res.det_phase = wrap_pi(std::arg(det));
  const ComplexMatrix un = res.U / std::pow(std::abs(det), 1.0 / n);
  res.unitarity_error = (un.adjoint() * un - ComplexMatrix::Identity(n, n)).cwiseAbs().maxCoeff();
  if (res.unitarity_error > opt.unitary_tol) {
    throw Error(ErrorKind::UnitarityLoss, "Wilson loop deviates from unitarity by " + std::to_string(res.unitarity_error));
  }
  res.band_phases.assign(n, 0.0);
  for (const auto& orbit : perm_cycles(traj.permutation)) {
    const std::vector<double> cum = extended_phase(build_strand(traj, orbit.front()));
    for (int b : orbit) res.band_phases[b] = cum.back();
    if (std::find(orbit.begin(), orbit.end(), 0) != orbit.end()) res.partial_phases = cum;
  }
  res.theta = res.band_phases[0];
  res.vwn = res.theta / (res.cycles_used * kPi);
  return res;
}

BerryResult wilson_loop(const ParametricModel& model, const ParamPath& path, const BerryOptions& opt) {
  if (!path.closed) throw Error(ErrorKind::BadInput, "wilson_loop needs a closed path");
  return wilson_loop(track_bands(model, path, opt.track), opt);
}

double single_band_phase(const BandTrajectories& traj, int band) {
  check_band(traj, band);
  if (!traj.path.closed) throw Error(ErrorKind::BadInput, "single_band_phase needs a closed path");
  if (traj.permutation[band] != band) {
    throw Error(ErrorKind::BandNotClosed, "band does not return to itself after " + std::to_string(traj.path.cycles) + " cycles");
  }
  return extended_phase(build_strand(traj, band)).back();
}

double single_band_phase(const ParametricModel& model, const ParamPath& path, int band, int cycles,
                         const TrackOptions& opt) {
  if (cycles < 1) throw Error(ErrorKind::BadSize, "cycles must be positive");
  ParamPath p = path;
  p.cycles = cycles;
  return single_band_phase(track_bands(model, p, opt), band);
}

double single_band_raw_phase(const BandTrajectories& traj, int band) {
  check_band(traj, band);
  if (traj.permutation[band] != band) throw Error(ErrorKind::BandNotClosed, "band does not return to itself");
  Complex prod = 1.0;
  for (std::size_t l = 0; l + 1 < traj.samples(); ++l) {
    const Complex ov = traj.left[l].col(band).transpose() * traj.right[l + 1].col(band);
    prod *= ov / std::abs(ov);
  }
  return wrap_pi(std::arg(prod));
}

// ---------------------------------------------------------------------------
// braids

std::string BraidWord::to_string() const {
  std::string out;
  for (int g : generators) {
    if (!out.empty()) out += " ";
    out += "s" + std::to_string(std::abs(g));
    if (g < 0) out += "^-1";
  }
  return out;
}

BraidWord braid_word(const BandTrajectories& traj) {
  if (!traj.path.closed) throw Error(ErrorKind::BadInput, "braid_word needs closed trajectories");
  const int n = traj.n_bands;
  const double scale = std::max(1.0, traj.energies.front().cwiseAbs().maxCoeff());

  struct Crossing {
    int gen;
    int a, b;
  };
  std::vector<Crossing> raw;
  std::vector<int> order = re_order(traj.energies.front(), scale);
  for (std::size_t l = 0; l + 1 < traj.samples(); ++l) {
    const ComplexVector& e0 = traj.energies[l];
    const ComplexVector& e1 = traj.energies[l + 1];
    const std::vector<int> next = re_order(e1, scale);
    std::vector<int> rank(n);
    for (int p = 0; p < n; ++p) rank[next[p]] = p;
    // bubble the current order into the next one, one adjacent swap at a time
    bool swapped = true;
    while (swapped) {
      swapped = false;
      for (int p = 0; p + 1 < n; ++p) {
        const int a = order[p], b = order[p + 1];
        if (rank[a] < rank[b]) continue;
        const double d0 = (e0(a) - e0(b)).real(), d1 = (e1(a) - e1(b)).real();
        const double tau = (d0 == d1) ? 0.5 : std::clamp(d0 / (d0 - d1), 0.0, 1.0);
        const double im = (1 - tau) * (e0(a) - e0(b)).imag() + tau * (e1(a) - e1(b)).imag();
        if (std::abs(im) <= 1e-9 * scale) {
          throw Error(ErrorKind::DegenerateCrossing, "strands cross with equal Im E");
        }
        // strand a moves to the right across b
        raw.push_back({im > 0 ? (p + 1) : -(p + 1), a, b});
        std::swap(order[p], order[p + 1]);
        swapped = true;
      }
    }
  }

  BraidWord word;
  std::vector<Crossing> reduced;
  for (const auto& c : raw) {
    if (!reduced.empty() && reduced.back().gen == -c.gen) {
      reduced.pop_back();
    } else {
      reduced.push_back(c);
    }
  }
  for (const auto& c : reduced) word.generators.push_back(c.gen);

  // Induced permutation: strand at final position p sits where initial strand p started.
  const std::vector<int> start = re_order(traj.energies.front(), scale);
  word.induced_permutation.assign(n, 0);
  for (int p = 0; p < n; ++p) word.induced_permutation[order[p]] = start[p];

  word.components = perm_cycles(traj.permutation);
  const auto nc = static_cast<Eigen::Index>(word.components.size());
  std::vector<int> comp_of(n);
  for (Eigen::Index c = 0; c < nc; ++c) {
    for (int b : word.components[c]) comp_of[b] = static_cast<int>(c);
  }
  word.linking = Eigen::MatrixXi::Zero(nc, nc);
  word.crossing_linking = Eigen::MatrixXi::Zero(nc, nc);
  for (Eigen::Index ca = 0; ca < nc; ++ca) {
    for (Eigen::Index cb = ca + 1; cb < nc; ++cb) {
      double total = 0.0;
      for (int i : word.components[ca]) {
        for (int j : word.components[cb]) total += pair_arg_change(traj, i, j);
      }
      const int lk = static_cast<int>(std::lround(-total / (2 * kPi)));
      word.linking(ca, cb) = word.linking(cb, ca) = lk;
    }
  }
  Eigen::MatrixXi twice = Eigen::MatrixXi::Zero(nc, nc);
  for (const auto& c : raw) {
    const int x = comp_of[c.a], y = comp_of[c.b];
    if (x == y) continue;
    const int s = c.gen > 0 ? 1 : -1;
    twice(x, y) += s;
    twice(y, x) += s;
  }
  word.crossing_linking = twice / 2;
  return word;
}

}  // namespace nhtopo
