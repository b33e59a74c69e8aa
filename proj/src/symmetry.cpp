#include "nhtopo/symmetry.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>

namespace nhtopo {

std::string_view to_string(SymmetryKind kind) {
  switch (kind) {
    case SymmetryKind::TRS: return "TRS";
    case SymmetryKind::PHS: return "PHS";
    case SymmetryKind::CS: return "CS";
    case SymmetryKind::TRSDagger: return "TRS+";
    case SymmetryKind::PHSDagger: return "PHS+";
    case SymmetryKind::CSDagger: return "CS+";
  }
  return "?";
}

SymmetryKind symmetry_from_string(const std::string& s) {
  if (s == "TRS") return SymmetryKind::TRS;
  if (s == "PHS") return SymmetryKind::PHS;
  if (s == "CS") return SymmetryKind::CS;
  if (s == "TRS+" || s == "TRS_dagger") return SymmetryKind::TRSDagger;
  if (s == "PHS+" || s == "PHS_dagger") return SymmetryKind::PHSDagger;
  if (s == "CS+" || s == "CS_dagger") return SymmetryKind::CSDagger;
  throw Error(ErrorKind::BadInput, "unknown symmetry kind '" + s + "'");
}

std::vector<double> symmetric_k_grid(int n) {
  if (n < 1) throw Error(ErrorKind::BadSize, "grid needs at least one point");
  std::vector<double> k(n);
  for (int i = 0; i < n; ++i) k[i] = -kPi + 2 * kPi * i / n;
  return k;
}

namespace {

bool same_momentum(double a, double b) {
  const double d = std::remainder(a - b, 2 * kPi);
  return std::abs(d) <= 1e-12 * std::max(1.0, std::abs(a));
}

}  // namespace

double check_symmetry(const ParametricModel& model, const ParamPoint& base, const std::string& k_label,
                      const std::vector<double>& k_grid, const ComplexMatrix& u, SymmetryKind kind) {
  require_valid(u);
  if (u.rows() != model.dim()) throw Error(ErrorKind::BadSize, "symmetry matrix has the wrong dimension");
  const Eigen::Index n = u.rows();
  if ((u.adjoint() * u - ComplexMatrix::Identity(n, n)).cwiseAbs().maxCoeff() > 1e-10) {
    throw Error(ErrorKind::NotUnitary, "symmetry matrix is not unitary within 1e-10");
  }
  std::vector<double> grid = k_label.empty() ? std::vector<double>{0.0} : k_grid;
  if (grid.empty()) throw Error(ErrorKind::BadInput, "momentum grid is empty");
  auto at = [&](double k) { return k_label.empty() ? model(base) : model(base.with(k_label, k)); };
  const ComplexMatrix ui = u.adjoint();

  double worst = 0.0;
  for (double k : grid) {
    const bool has_partner =
        std::any_of(grid.begin(), grid.end(), [&](double q) { return same_momentum(q, -k); });
    if (!has_partner) throw Error(ErrorKind::BadInput, "momentum grid is not symmetric under k -> -k");
    const ComplexMatrix h = at(k);
    const ComplexMatrix hm = at(-k);
    ComplexMatrix defect;
    switch (kind) {
      case SymmetryKind::TRS: defect = ui * h.conjugate() * u - hm; break;
      case SymmetryKind::PHS: defect = ui * h.transpose() * u + hm; break;
      case SymmetryKind::CS: defect = ui * h * u + h; break;
      case SymmetryKind::TRSDagger: defect = ui * h.transpose() * u - hm; break;
      case SymmetryKind::PHSDagger: defect = ui * h.conjugate() * u + hm; break;
      case SymmetryKind::CSDagger: defect = ui * h.adjoint() * u + h; break;
    }
    worst = std::max(worst, defect.norm());
  }
  return worst;
}

// ---------------------------------------------------------------------------
// line gap

namespace {

double cross(Complex o, Complex a, Complex b) {
  return (a.real() - o.real()) * (b.imag() - o.imag()) - (a.imag() - o.imag()) * (b.real() - o.real());
}

// Monotone chain; returns the hull counterclockwise (degenerate inputs give 1-2 points).
std::vector<Complex> convex_hull(std::vector<Complex> pts) {
  std::sort(pts.begin(), pts.end(), [](Complex a, Complex b) {
    return a.real() < b.real() || (a.real() == b.real() && a.imag() < b.imag());
  });
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  if (pts.size() < 3) return pts;
  std::vector<Complex> hull(2 * pts.size());
  std::size_t k = 0;
  for (const Complex& p : pts) {
    while (k >= 2 && cross(hull[k - 2], hull[k - 1], p) <= 0) --k;
    hull[k++] = p;
  }
  for (std::size_t i = pts.size() - 1, t = k + 1; i-- > 0;) {
    while (k >= t && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0) --k;
    hull[k++] = pts[i];
  }
  hull.resize(k - 1);
  return hull;
}

std::pair<double, double> project(const std::vector<Complex>& pts, Complex normal) {
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (const Complex& p : pts) {
    const double v = p.real() * normal.real() + p.imag() * normal.imag();
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  return {lo, hi};
}

std::optional<LineGap> separate(const std::vector<Complex>& a, const std::vector<Complex>& b) {
  const std::vector<Complex> ha = convex_hull(a), hb = convex_hull(b);
  std::vector<Complex> normals{Complex(1, 0), Complex(0, 1)};
  for (const auto* h : {&ha, &hb}) {
    for (std::size_t i = 0; i < h->size(); ++i) {
      const Complex e = (*h)[(i + 1) % h->size()] - (*h)[i];
      if (std::abs(e) > 0) normals.push_back(Complex(-e.imag(), e.real()) / std::abs(e));
    }
  }
  std::optional<LineGap> best;
  for (Complex n : normals) {
    for (int flip = 0; flip < 2; ++flip, n = -n) {
      const double ahi = project(ha, n).second;
      const double blo = project(hb, n).first;
      const double margin = blo - ahi;
      if (margin > 0 && (!best || margin > best->margin)) {
        LineGap g;
        g.margin = margin;
        g.point = n * (0.5 * (ahi + blo));
        g.direction = Complex(0, 1) * n;
        best = g;
      }
    }
  }
  return best;
}

}  // namespace

std::optional<LineGap> line_gap(const std::vector<std::vector<Complex>>& bands) {
  const std::size_t m = bands.size();
  if (m < 2) throw Error(ErrorKind::BadInput, "line_gap needs at least two bands");
  if (m > 16) throw Error(ErrorKind::BadSize, "line_gap supports at most 16 bands");
  std::optional<LineGap> best;
  // band 0 always on side 0; enumerate the remaining memberships
  for (unsigned mask = 1; mask < (1u << (m - 1)); ++mask) {
    std::vector<Complex> a, b;
    std::vector<int> side(m, 0);
    for (std::size_t i = 0; i < m; ++i) {
      const bool right = i > 0 && ((mask >> (i - 1)) & 1u);
      side[i] = right ? 1 : 0;
      auto& dst = right ? b : a;
      dst.insert(dst.end(), bands[i].begin(), bands[i].end());
    }
    if (a.empty() || b.empty()) continue;
    auto g = separate(a, b);
    if (g && (!best || g->margin > best->margin)) {
      g->side = side;
      best = g;
    }
  }
  return best;
}

// ---------------------------------------------------------------------------
// point gaps

PointGapReport point_gap_regions(const std::vector<std::vector<Complex>>& loops, int resolution) {
  if (resolution < 16) throw Error(ErrorKind::BadSize, "resolution must be at least 16");
  double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin, ymin = xmin, ymax = -xmin;
  std::size_t total = 0;
  for (const auto& loop : loops) {
    for (const Complex& p : loop) {
      if (!std::isfinite(p.real()) || !std::isfinite(p.imag())) throw Error(ErrorKind::BadInput, "non-finite sample");
      xmin = std::min(xmin, p.real());
      xmax = std::max(xmax, p.real());
      ymin = std::min(ymin, p.imag());
      ymax = std::max(ymax, p.imag());
    }
    total += loop.size();
  }
  PointGapReport rep;
  rep.resolution = resolution;
  if (total == 0) return rep;
  const double span = std::max({xmax - xmin, ymax - ymin, 1e-9});
  // margin of 10% of the larger span on every side, so flat spectra still get a 2D box
  const double margin = 0.1 * span;
  xmin -= margin, xmax += margin, ymin -= margin, ymax += margin;
  const int n = resolution;
  const double px = (xmax - xmin) / n, py = (ymax - ymin) / n;
  rep.pixel = std::max(px, py);

  std::vector<char> band(static_cast<std::size_t>(n) * n, 0);
  auto cell = [&](Complex p) {
    const int ix = std::clamp(static_cast<int>((p.real() - xmin) / px), 0, n - 1);
    const int iy = std::clamp(static_cast<int>((p.imag() - ymin) / py), 0, n - 1);
    return std::pair<int, int>{ix, iy};
  };
  for (const auto& loop : loops) {
    if (loop.empty()) continue;
    for (std::size_t i = 0; i < loop.size(); ++i) {
      const Complex a = loop[i], b = loop[(i + 1) % loop.size()];
      const double gap = std::max(std::abs(b.real() - a.real()) / px, std::abs(b.imag() - a.imag()) / py);
      if (gap > 16.0) {
        throw Error(ErrorKind::ResolutionTooCoarse,
                    "band loop has a gap of " + std::to_string(gap) + " pixels; sample more densely or lower resolution");
      }
      const int steps = static_cast<int>(std::ceil(4 * gap)) + 1;
      for (int s = 0; s <= steps; ++s) {
        const auto [ix, iy] = cell(a + (b - a) * (static_cast<double>(s) / steps));
        band[static_cast<std::size_t>(iy) * n + ix] = 1;
      }
    }
  }

  auto idx = [n](int x, int y) { return static_cast<std::size_t>(y) * n + x; };
  const int dx4[] = {1, -1, 0, 0}, dy4[] = {0, 0, 1, -1};
  // distance (in pixels, 4-connected) from the nearest band pixel
  std::vector<int> dist(band.size(), -1);
  std::deque<std::pair<int, int>> q;
  for (int y = 0; y < n; ++y) {
    for (int x = 0; x < n; ++x) {
      if (band[idx(x, y)]) {
        dist[idx(x, y)] = 0;
        q.emplace_back(x, y);
      }
    }
  }
  while (!q.empty()) {
    const auto [x, y] = q.front();
    q.pop_front();
    for (int d = 0; d < 4; ++d) {
      const int nx = x + dx4[d], ny = y + dy4[d];
      if (nx < 0 || ny < 0 || nx >= n || ny >= n || dist[idx(nx, ny)] >= 0) continue;
      dist[idx(nx, ny)] = dist[idx(x, y)] + 1;
      q.emplace_back(nx, ny);
    }
  }

  // label complement components; those touching the border form the unbounded region
  std::vector<int> label(band.size(), -1);
  int next_label = 0;
  for (int y0 = 0; y0 < n; ++y0) {
    for (int x0 = 0; x0 < n; ++x0) {
      if (band[idx(x0, y0)] || label[idx(x0, y0)] >= 0) continue;
      const int lab = next_label++;
      bool touches_border = false;
      int best = -1;
      std::pair<int, int> best_px{x0, y0};
      label[idx(x0, y0)] = lab;
      q.emplace_back(x0, y0);
      while (!q.empty()) {
        const auto [x, y] = q.front();
        q.pop_front();
        if (x == 0 || y == 0 || x == n - 1 || y == n - 1) touches_border = true;
        if (dist[idx(x, y)] > best) {
          best = dist[idx(x, y)];
          best_px = {x, y};
        }
        for (int d = 0; d < 4; ++d) {
          const int nx = x + dx4[d], ny = y + dy4[d];
          if (nx < 0 || ny < 0 || nx >= n || ny >= n) continue;
          if (band[idx(nx, ny)] || label[idx(nx, ny)] >= 0) continue;
          label[idx(nx, ny)] = lab;
          q.emplace_back(nx, ny);
        }
      }
      if (touches_border || best < 2) continue;
      ++rep.count;
      rep.representatives.emplace_back(xmin + (best_px.first + 0.5) * px, ymin + (best_px.second + 0.5) * py);
    }
  }
  return rep;
}

int polar_winding(const std::vector<Complex>& loop, Complex e_ref) {
  if (loop.size() < 3) throw Error(ErrorKind::BadSize, "loop needs at least 3 samples");
  double scale = 1.0;
  for (const Complex& p : loop) scale = std::max(scale, std::abs(p));
  double total = 0.0;
  for (std::size_t i = 0; i < loop.size(); ++i) {
    const Complex a = loop[i] - e_ref, b = loop[(i + 1) % loop.size()] - e_ref;
    if (std::abs(a) <= 1e-12 * scale) throw Error(ErrorKind::ReferenceOnSpectrum, "reference energy lies on the loop");
    const Complex ua = a / std::abs(a), ub = b / std::abs(b);
    const double d = std::arg(ub / ua);
    if (std::abs(d) >= 0.9 * kPi) throw Error(ErrorKind::NonConvergence, "loop samples too sparse around the reference");
    total += d;
  }
  return static_cast<int>(std::lround(total / (2 * kPi)));
}

}  // namespace nhtopo
