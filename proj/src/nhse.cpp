#include "nhtopo/nhse.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Eigenvalues>

#include "nhtopo/ep_finder.hpp"
#include "nhtopo/parallel.hpp"
#include "nhtopo/symmetry.hpp"
#include "nhtopo/winding.hpp"

namespace nhtopo {

namespace {

void check_params(const SshParams& p) {
  if (!std::isfinite(p.t1) || !std::isfinite(p.t2) || !std::isfinite(p.gamma)) {
    throw Error(ErrorKind::BadInput, "SSH parameters must be finite");
  }
}

ParamPath bz_loop(const SshParams& p, int n_k) {
  const ParametricModel m = ssh_bloch_model();
  const ParamPoint base = m.point({-kPi, p.t1, p.t2, p.gamma});
  return periodic_sweep(base, "k", -kPi, kPi, n_k);
}

}  // namespace

PbcSpectrum pbc_spectrum(const SshParams& p, int n_k) {
  check_params(p);
  if (n_k < 64) throw Error(ErrorKind::BadSize, "n_k must be at least 64");
  PbcSpectrum out;
  const ParametricModel m = ssh_bloch_model();
  try {
    const BandTrajectories traj = track_bands(m, bz_loop(p, n_k));
    const std::size_t last = traj.samples() - 1;
    out.bands.assign(traj.n_bands, {});
    for (std::size_t l = 0; l < last; ++l) {
      out.k.push_back(-kPi + 2 * kPi * traj.u[l]);
      for (int b = 0; b < traj.n_bands; ++b) out.bands[b].push_back(traj.energies[l](b));
    }
    for (const auto& orbit : perm_cycles(traj.permutation)) {
      std::vector<Complex> loop;
      int b = orbit.front();
      do {
        loop.insert(loop.end(), out.bands[b].begin(), out.bands[b].end());
        b = traj.permutation[b];
      } while (b != orbit.front());
      out.loops.push_back(std::move(loop));
    }
  } catch (const Error& e) {
    // Gap closings defeat tracking; fall back to bands sorted by Re E at each k.
    if (e.kind() != ErrorKind::PathHitsEP && e.kind() != ErrorKind::AmbiguousMatch) throw;
    out = PbcSpectrum{};
    out.bands.assign(2, {});
    for (int i = 0; i < n_k; ++i) {
      const double k = -kPi + 2 * kPi * i / n_k;
      ComplexVector e = eigenvalues(ssh_bloch(k, p.t1, p.t2, p.gamma));
      if (e(0).real() > e(1).real()) std::swap(e(0), e(1));
      out.k.push_back(k);
      out.bands[0].push_back(e(0));
      out.bands[1].push_back(e(1));
    }
    out.loops = out.bands;
  }
  return out;
}

double pbc_gap(const SshParams& p, int n_k) {
  check_params(p);
  double g = std::numeric_limits<double>::infinity();
  for (int i = 0; i < n_k; ++i) {
    const double k = -kPi + 2 * kPi * i / n_k;
    const ComplexMatrix h = ssh_bloch(k, p.t1, p.t2, p.gamma);
    // E^2 = h01 * h10 for the off-diagonal block form
    g = std::min(g, std::sqrt(std::abs(h(0, 1) * h(1, 0))));
  }
  return g;
}

OpenChainSpectrum obc_spectrum(const SshParams& p, int n_cells) {
  check_params(p);
  OpenChainSpectrum s;
  s.n_cells = n_cells;
  s.params = p;
  s.eigensystem = eig_biorthogonal(ssh_obc(n_cells, p.t1, p.t2, p.gamma));
  s.eigenvalues = s.eigensystem.values;
  return s;
}

ComplexVector obc_eigenvalues(const SshParams& p, int n_cells) {
  check_params(p);
  return eigenvalues(ssh_obc(n_cells, p.t1, p.t2, p.gamma));
}

ComplexVector similar_hermitian_eigenvalues(const SshParams& p, int n_cells) {
  const double prod = (p.t1 - p.gamma / 2) * (p.t1 + p.gamma / 2);
  if (prod >= 0) {
    const ComplexMatrix h = ssh_obc(n_cells, std::sqrt(prod), p.t2, 0.0);
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(h, Eigen::EigenvaluesOnly);
    return es.eigenvalues().cast<Complex>();
  }
  // imaginary effective hopping: complex symmetric chain
  ComplexMatrix h = ssh_obc(n_cells, 0.0, p.t2, 0.0);
  const Complex tb = std::sqrt(Complex(prod));
  for (int c = 0; c < n_cells; ++c) h(2 * c, 2 * c + 1) = h(2 * c + 1, 2 * c) = tb;
  return eigenvalues(h);
}

GbzCircle gbz_radius(double t1, double gamma, int n_samples) {
  if (t1 + gamma / 2 == 0.0) throw Error(ErrorKind::DivByZero, "t1 + gamma/2 vanishes");
  if (n_samples < 1) throw Error(ErrorKind::BadSize, "need at least one sample");
  GbzCircle c;
  c.r = std::sqrt(std::abs((t1 - gamma / 2) / (t1 + gamma / 2)));
  for (int i = 0; i < n_samples; ++i) c.samples.push_back(std::polar(c.r, 2 * kPi * i / n_samples));
  return c;
}

std::vector<Complex> gbz_spectrum(const SshParams& p, int n_k) {
  const GbzCircle c = gbz_radius(p.t1, p.gamma);
  if (!(c.r > 0)) throw Error(ErrorKind::DivByZero, "GBZ radius vanishes");
  const double shift = std::log(1.0 / c.r);
  std::vector<Complex> out;
  for (int i = 0; i < n_k; ++i) {
    const double k = -kPi + 2 * kPi * i / n_k;
    const ComplexVector e = eigenvalues(ssh_bloch(Complex(k, shift), p.t1, p.t2, p.gamma));
    out.push_back(e(0));
    out.push_back(e(1));
  }
  return out;
}

SkinProfile skin_profile(const OpenChainSpectrum& spec) {
  const int n = spec.n_cells;
  const int sites = 2 * n;
  const int cut = n / 10;
  const double mid = 0.5 * (sites - 1);
  SkinProfile prof;
  double left = 0.0;
  for (Eigen::Index m = 0; m < spec.eigensystem.dim; ++m) {
    const ComplexVector r = spec.eigensystem.right.col(m).normalized();
    ModeProfile mp;
    mp.energy = spec.eigenvalues(m);
    double w = 0.0, wx = 0.0;
    for (int j = 0; j < sites; ++j) {
      w += std::norm(r(j));
      wx += j * std::norm(r(j));
    }
    mp.center = wx / w;
    if (std::abs(mp.center - mid) <= 1e-6 * sites) {
      left += 0.5;
    } else if (mp.center < mid) {
      left += 1.0;
    }
    std::vector<double> xs, ys;
    for (int x = cut; x < n - cut; ++x) {
      const double c = std::sqrt(std::norm(r(2 * x)) + std::norm(r(2 * x + 1)));
      if (c > 0) {
        xs.push_back(x);
        ys.push_back(std::log(c));
      }
    }
    if (xs.size() >= 2) {
      const ExponentFit f = fit_line(xs, ys);
      mp.r_squared = f.r_squared;
      mp.kappa = -f.slope;
    }
    if (mp.r_squared < 0.9) {
      mp.extended = true;
      mp.kappa = 0.0;
    }
    prof.modes.push_back(mp);
  }
  prof.left_fraction = left / static_cast<double>(spec.eigensystem.dim);
  return prof;
}

double biorthogonal_ipr(const OpenChainSpectrum& spec, int mode) {
  if (mode < 0 || mode >= spec.eigensystem.dim) throw Error(ErrorKind::BadInput, "mode index out of range");
  if (!spec.eigensystem.normalized) throw Error(ErrorKind::DefectiveAtTolerance, "eigensystem is not normalized");
  double s1 = 0.0, s2 = 0.0;
  for (Eigen::Index x = 0; x < spec.eigensystem.dim; ++x) {
    const double a = std::abs(spec.eigensystem.left(x, mode) * spec.eigensystem.right(x, mode));
    s1 += a;
    s2 += a * a;
  }
  return s2 / (s1 * s1);
}

std::vector<Complex> bulk_eigenvalues(const OpenChainSpectrum& spec, double ipr_cut) {
  if (ipr_cut <= 0) ipr_cut = 10.0 / (2.0 * spec.n_cells);
  std::vector<Complex> out;
  for (Eigen::Index m = 0; m < spec.eigensystem.dim; ++m) {
    if (biorthogonal_ipr(spec, static_cast<int>(m)) < ipr_cut) out.push_back(spec.eigenvalues(m));
  }
  return out;
}

double hausdorff(const std::vector<Complex>& a, const std::vector<Complex>& b) {
  if (a.empty() || b.empty()) throw Error(ErrorKind::BadInput, "Hausdorff distance of an empty set");
  auto directed = [](const std::vector<Complex>& p, const std::vector<Complex>& q) {
    double worst = 0.0;
    for (const Complex& x : p) {
      double best = std::numeric_limits<double>::infinity();
      for (const Complex& y : q) best = std::min(best, std::abs(x - y));
      worst = std::max(worst, best);
    }
    return worst;
  };
  return std::max(directed(a, b), directed(b, a));
}

NhseVerdict nhse_predicate(const SshParams& p, int n_k) {
  const PbcSpectrum pbc = pbc_spectrum(p, n_k);
  const PointGapReport gaps = point_gap_regions(pbc.loops, 512);
  NhseVerdict v;
  v.regions = gaps.count;
  const ParametricModel m = ssh_bloch_model();
  const ParamPath loop = bz_loop(p, n_k);
  for (const Complex& e : gaps.representatives) {
    int w = 0;
    try {
      w = eigenvalue_winding(m, loop, e);
    } catch (const Error& err) {
      if (err.kind() != ErrorKind::ReferenceOnSpectrum) throw;
      continue;
    }
    if (w != 0) {
      v.nhse = true;
      v.witness = e;
      v.winding = w;
      break;
    }
  }
  return v;
}

double obc_pbc_distance(const SshParams& p, int n_cells, int n_k) {
  const std::vector<Complex> bulk = bulk_eigenvalues(obc_spectrum(p, n_cells));
  const PbcSpectrum pbc = pbc_spectrum(p, n_k);
  std::vector<Complex> all;
  for (const auto& b : pbc.bands) all.insert(all.end(), b.begin(), b.end());
  return hausdorff(bulk, all);
}

TransitionScan zero_mode_scan(double t1, double gamma, int n_cells, double t2_min, double t2_max, int n_points,
                              double zero_tol, int jobs) {
  if (n_points < 2 || !(t2_max > t2_min)) throw Error(ErrorKind::BadInput, "invalid t2 sweep");
  TransitionScan scan;
  scan.t2.resize(n_points);
  scan.bulk_gap.resize(n_points);
  scan.zero_modes.resize(n_points);
  parallel_for(static_cast<std::size_t>(n_points), jobs, [&](std::size_t i) {
    const double t2 = t2_min + (t2_max - t2_min) * static_cast<double>(i) / (n_points - 1);
    const ComplexVector e = obc_eigenvalues(SshParams{t1, t2, gamma}, n_cells);
    std::vector<double> mags(e.size());
    for (Eigen::Index k = 0; k < e.size(); ++k) mags[k] = std::abs(e(k));
    std::sort(mags.begin(), mags.end());
    scan.t2[i] = t2;
    scan.bulk_gap[i] = mags.size() > 2 ? mags[2] : mags.back();
    scan.zero_modes[i] = static_cast<int>(std::count_if(mags.begin(), mags.end(), [&](double x) { return x < zero_tol; }));
  });
  const auto it = std::min_element(scan.bulk_gap.begin(), scan.bulk_gap.end());
  scan.transition = scan.t2[static_cast<std::size_t>(it - scan.bulk_gap.begin())];
  return scan;
}

}  // namespace nhtopo
