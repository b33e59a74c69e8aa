// Acceptance checks. Prints one PASS/FAIL line per criterion and exits nonzero if any fail.

#include <chrono>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>

#include "nhtopo/dynamics.hpp"
#include "nhtopo/ep_finder.hpp"
#include "nhtopo/errors.hpp"
#include "nhtopo/nhse.hpp"
#include "nhtopo/symmetry.hpp"
#include "nhtopo/winding.hpp"
#include "support.hpp"

using namespace nhtopo;

namespace {

const Complex kI(0, 1);

struct Verdict {
  bool ok = true;
  std::ostringstream detail;
  void require(bool cond, const std::string& what) {
    if (!cond) {
      ok = false;
      detail << " [failed: " << what << "]";
    }
  }
};

int failures = 0;

void criterion(int id, const std::string& title, const std::function<void(Verdict&)>& body) {
  Verdict v;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    body(v);
  } catch (const std::exception& e) {
    v.ok = false;
    v.detail << " [exception: " << e.what() << "]";
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (!v.ok) ++failures;
  std::printf("%s %2d %s:%s (%.2f s)\n", v.ok ? "PASS" : "FAIL", id, title.c_str(), v.detail.str().c_str(), secs);
  std::fflush(stdout);
}

Region h2_plane(double x0, double x1, double y0, double y1) {
  return Region{h2_model().point({0.0, 1.0}), Axis{"z", false}, Axis{"z", true}, x0, x1, y0, y1};
}

double gbz_radius_oracle(const SshParams& p) {
  return std::sqrt(std::abs((p.t1 - p.gamma / 2) / (p.t1 + p.gamma / 2)));
}

// E^2 = (t1 + g/2 + t2/beta)(t1 - g/2 + t2 beta) on |beta| = r.
std::vector<Complex> gbz_oracle(const SshParams& p, int n) {
  const double r = gbz_radius_oracle(p);
  std::vector<Complex> out;
  for (int i = 0; i < n; ++i) {
    const Complex beta = std::polar(r, -oracle::pi + 2 * oracle::pi * i / n);
    const Complex e = std::sqrt((p.t1 + p.gamma / 2 + p.t2 / beta) * (p.t1 - p.gamma / 2 + p.t2 * beta));
    out.push_back(e);
    out.push_back(-e);
  }
  return out;
}

std::vector<Complex> to_vec(const ComplexVector& v) { return {v.data(), v.data() + v.size()}; }

}  // namespace

int main() {
  const ParametricModel h2m = h2_model(), h3m = h3_model(), parab = h2_parabola_model();

  criterion(1, "EP location of H2", [&](Verdict& v) {
    const auto eps = locate_eps(h2m, h2_plane(-1.0, 1.3, -3.0, 3.1), 1e-9);
    v.require(eps.size() == 2, "two EPs");
    for (const auto& e : eps) {
      const Complex z = e.location.get("z");
      const Complex want = z.imag() > 0 ? 2.0 * kI : -2.0 * kI;
      v.detail << " z=" << z << " |dz|=" << std::abs(z - want);
      v.require(std::abs(z - want) <= 1e-6, "within 1e-6 of +-2i");
    }
  });

  criterion(2, "splitting exponent at the H2 EP", [&](Verdict& v) {
    const EpRecord ep = locate_ep(h2m, h2_plane(-1.0, 1.3, 0.2, 4.0), 1e-10);
    const ExponentFit f = critical_exponent(h2m, ep, "z", 1.0, 1e-6, 1e-2, Observable::Splitting, 9);
    v.detail << " slope=" << f.slope << " r2=" << f.r_squared;
    v.require(std::abs(f.slope - 0.5) <= 0.02, "slope 0.5 +- 0.02");
    // same fit on eigenvalues from the quadratic formula
    std::vector<double> lx, ly;
    for (int i = 0; i < 9; ++i) {
      const double d = std::pow(10.0, -6.0 + 4.0 * i / 8);
      const auto r = oracle::quadratic_roots(-(2.0 * kI + d), -1.0);
      lx.push_back(std::log(d));
      ly.push_back(std::log(std::abs(r[0] - r[1])));
    }
    const ExponentFit ref = fit_line(lx, ly);
    v.detail << " oracle_slope=" << ref.slope;
    v.require(std::abs(f.slope - ref.slope) <= 0.01, "agrees with the closed-form splitting");
  });

  criterion(3, "energy winding numbers", [&](Verdict& v) {
    const ParamPoint base = h2m.point({0.0, 1.0});
    const int at0 = vorticity_winding(h2m, circle_path(base, "z", 0.0, 0.8, 256));
    const int at2i = vorticity_winding(h2m, circle_path(base, "z", 2.0 * kI, 0.8, 256));
    const int purple = vorticity_winding(h2m, circle_path(base, "z", 0.0, 3.0, 256));
    const int blue = vorticity_winding(
        h2m, plane_loop(h2m.point({-2.0 * kI, 0.0}), Axis{"z", false}, Axis{"t", false}, 0.0, 0.0, 1.5, 256));
    const int kiss = vorticity_winding(parab, circle_path(parab.point({0.0, 0.0}), "dt", 0.0, 0.2, 256));
    v.detail << " loop@0=" << at0 << " loop@2i=" << at2i << " purple=" << purple << " blue=" << blue
             << " kissing=" << kiss;
    v.require(at0 == 0 && at2i == -1, "0 / -1 for the small loops");
    v.require(purple == -2 && blue == 0, "purple -2, blue 0");
    v.require(kiss == -2, "kissing point -2");
    // cross-check with eigenvalue trajectories at the EP energy
    const BandTrajectories tr = track_bands(h2m, circle_path(base, "z", 2.0 * kI, 0.8, 256, 2));
    const double vort = vorticity(tr, 0, 1) + vorticity(tr, 1, 0);
    v.detail << " tracked=" << vort / 2;
    v.require(std::abs(vort / 2 + 1.0) < 1e-6, "tracked vorticities sum to -1 per cycle");
  });

  criterion(4, "Berry phases", [&](Verdict& v) {
    const BerryResult two =
        wilson_loop(h2m, circle_path(h2m.point({0.0, 1.0}), "z", 2.0 * kI, 0.8, 256, 2));
    v.detail << " order2=" << two.theta << " W=" << two.vwn;
    v.require(std::abs(two.theta - oracle::pi) <= 1e-3, "order-2 theta = pi");
    v.require(std::abs(two.vwn - 0.5) <= 1e-3, "W = 1/2");
    const ParamPoint origin = h3m.point({0.0, 0.0});
    const BerryResult xi = wilson_loop(h3m, circle_path(origin, "xi", 0.0, 0.5, 256, 3));
    v.detail << " xi3=" << xi.theta;
    v.require(std::abs(xi.theta - 2 * oracle::pi) <= 1e-2, "xi-plane 3 cycles = 2pi");
    const Permutation perm = loop_permutation(h3m, circle_path(origin, "lam", 0.0, 0.5, 256));
    int middle = -1;
    for (int k = 0; k < 3; ++k) {
      if (perm[k] == k) middle = k;
    }
    v.require(middle >= 0, "lam loop fixes one band");
    if (middle < 0) return;
    const double mid = single_band_phase(h3m, circle_path(origin, "lam", 0.0, 0.5, 256), middle, 1);
    v.detail << " lam_middle=" << mid;
    v.require(std::abs(mid - oracle::pi) <= 1e-2, "lam middle band 1 cycle = pi");
    for (int k = 0; k < 3; ++k) {
      if (k == middle) continue;
      const double outer = single_band_phase(h3m, circle_path(origin, "lam", 0.0, 0.5, 256, 2), k, 2);
      v.detail << " lam_outer=" << outer;
      v.require(std::abs(outer - 2 * oracle::pi) <= 1e-2, "lam outer band 2 cycles = 2pi");
    }
  });

  criterion(5, "phase-rigidity exponents", [&](Verdict& v) {
    struct Case {
      const ParametricModel* m;
      ParamPoint at;
      std::string label;
      Complex dir;
      Axis x, y;
      double want;
    };
    const std::vector<Case> cases{
        {&h2m, h2m.point({2.0 * kI, 1.0}), "z", kI, Axis{"z", false}, Axis{"z", true}, 0.5},
        {&h3m, h3m.point({0.0, 0.0}), "xi", 1.0, Axis{"xi", false}, Axis{"xi", true}, 2.0 / 3},
        {&h3m, h3m.point({0.0, 0.0}), "lam", 1.0, Axis{"xi", false}, Axis{"xi", true}, 1.0},
    };
    for (const auto& c : cases) {
      const OrderProbe p = ep_order(*c.m, c.at, c.x, c.y);
      const EpRecord ep{c.at, p.energy, p.order, 0.0, false};
      const ExponentFit f = critical_exponent(*c.m, ep, c.label, c.dir, 1e-6, 1e-2, Observable::PhaseRigidity);
      v.detail << " " << c.label << ":" << f.slope;
      v.require(std::abs(f.slope - c.want) <= 0.05, "slope within 0.05");
    }
  });

  criterion(6, "non-Abelian EP permutations", [&](Verdict& v) {
    const ParamPoint base = h3m.point({-0.2 * kI, 0.0});
    const Axis xr{"xi", false}, xim{"xi", true};
    const auto eps = locate_eps(h3m, Region{base, xr, xim, -2.0, 2.0, -2.0, 2.0});
    v.require(eps.size() == 2, "two EPs at lam = -0.2i");
    if (eps.size() != 2) return;
    std::vector<Permutation> perms;
    for (const auto& e : eps) {
      const Complex c = e.location.get("xi");
      perms.push_back(
          track_bands(h3m, lollipop_path(base, xr, xim, 0.0, 0.0, c.real(), c.imag(), 0.05, 512)).permutation);
      v.detail << " xi=" << c << ":" << cycle_notation(perms.back());
    }
    v.require(cycle_notation(perms[0]) == "(2 3)" && cycle_notation(perms[1]) == "(1 2)", "(2 3) and (1 2)");
    const Permutation ab = compose(perms[0], perms[1]), ba = compose(perms[1], perms[0]);
    v.detail << " ab=" << cycle_notation(ab) << " ba=" << cycle_notation(ba);
    v.require(ab != ba, "compositions differ");
    const std::size_t order = generated_group_order(perms);
    v.detail << " group=" << order;
    v.require(order == 6, "group order 6");
  });

  criterion(7, "braids", [&](Verdict& v) {
    const ParamPoint base = h2m.point({0.0, 1.0});
    const BraidWord unlink = braid_word(track_bands(h2m, circle_path(base, "z", 0.0, 0.8, 256)));
    v.detail << " 1g='" << unlink.to_string() << "'";
    v.require(unlink.generators.empty(), "empty word");
    const BraidWord hopf = braid_word(track_bands(h2m, circle_path(base, "z", 0.0, 3.0, 256)));
    v.detail << " 2b='" << hopf.to_string() << "' L=" << hopf.linking(0, 1);
    v.require(hopf.components.size() == 2 && std::abs(hopf.linking(0, 1)) == 1, "2b Hopf link");
    v.require(hopf.linking(0, 1) == hopf.crossing_linking(0, 1), "2b linking from crossings agrees");
    const ParamPoint origin = h3m.point({0.0, 0.0});
    const BraidWord lam = braid_word(track_bands(h3m, circle_path(origin, "lam", 0.0, 0.5, 256)));
    v.require(lam.components.size() == 2, "3i two components");
    if (lam.components.size() == 2) {
      v.detail << " 3i='" << lam.to_string() << "' L=" << lam.linking(0, 1);
      v.require(std::abs(lam.linking(0, 1)) == 1 && lam.linking(0, 1) == lam.crossing_linking(0, 1), "3i Hopf link");
    }
    const BandTrajectories xi = track_bands(h3m, circle_path(origin, "xi", 0.0, 0.5, 256));
    const BraidWord w3 = braid_word(xi);
    std::vector<Complex> loop;
    int b = 0;
    do {
      for (std::size_t l = 0; l + 1 < xi.samples(); ++l) loop.push_back(xi.energies[l](b));
      b = xi.permutation[b];
    } while (b != 0);
    const int regions = point_gap_regions({loop}).count;
    v.detail << " 3h='" << w3.to_string() << "' perm=" << cycle_notation(w3.induced_permutation)
             << " regions=" << regions;
    v.require(perm_cycles(w3.induced_permutation).size() == 1, "3h induced 3-cycle");
    v.require(loop.size() == 3 * (xi.samples() - 1), "3h one loop through all strands");
    v.require(regions == 1, "3h single point gap");
  });

  criterion(8, "SSH gap closings and zero-mode transition", [&](Verdict& v) {
    const double t1 = 1.0, gamma = 4.0 / 3;
    const double lo = 0.05, hi = 2.0;
    const int n = 391;
    const double spacing = (hi - lo) / (n - 1);
    std::vector<double> t2(n), gap(n);
    for (int i = 0; i < n; ++i) {
      t2[i] = lo + spacing * i;
      gap[i] = pbc_gap(SshParams{t1, t2[i], gamma}, 1024);
    }
    for (const double want : {t1 - gamma / 2, t1 + gamma / 2}) {
      // grid minimum of the gap near each expected closing
      int best = -1;
      for (int i = 0; i < n; ++i) {
        if (std::abs(t2[i] - want) > 0.2) continue;
        if (best < 0 || gap[i] < gap[best]) best = i;
      }
      const bool local = best > 0 && best + 1 < n && gap[best] <= gap[best - 1] && gap[best] <= gap[best + 1];
      v.detail << " closing=" << t2[best] << " (want " << want << ")";
      v.require(local && std::abs(t2[best] - want) <= spacing, "PBC closing within one grid step");
    }
    const int cells = 100;
    const TransitionScan s = zero_mode_scan(t1, gamma, cells, 0.6, 0.9, 151);
    const double want = std::sqrt(t1 * t1 - gamma * gamma / 4);
    v.detail << " obc=" << s.transition << " (want " << want << ")";
    v.require(std::abs(s.transition - want) <= 1.0 / cells, "OBC transition within 1/n_cells");
    v.require(s.zero_modes.front() == 0 && s.zero_modes.back() == 2, "zero-mode pair appears past the transition");
  });

  criterion(9, "GBZ spectrum against open-chain diagonalization", [&](Verdict& v) {
    const SshParams p{1.0, 0.5, 4.0 / 3};
    const int cells = 120;
    const OpenChainSpectrum obc = obc_spectrum(p, cells);
    const auto gbz = gbz_oracle(p, 2048);
    const double d = oracle::set_distance(to_vec(obc.eigenvalues), gbz);
    const double dlib = hausdorff(gbz_spectrum(p, 2048), gbz);
    v.detail << " hausdorff=" << d << " lib_vs_oracle=" << dlib;
    v.require(d <= 0.02, "Hausdorff <= 0.02");
    v.require(dlib <= 1e-3, "library GBZ spectrum matches the closed form");
    const double want = std::log(1.0 / gbz_radius_oracle(p));
    const SkinProfile prof = skin_profile(obc);
    double worst = 0;
    int fitted = 0;
    for (const auto& m : prof.modes) {
      if (m.extended) continue;
      ++fitted;
      worst = std::max(worst, std::abs(m.kappa - want) / want);
    }
    v.detail << " log(1/r)=" << want << " worst_rel=" << worst << " fitted=" << fitted;
    v.require(fitted > 0 && worst <= 0.02, "decay rate within 2%");
  });

  criterion(10, "skin effect iff nonzero PBC winding", [&](Verdict& v) {
    int agree = 0, total = 0;
    for (double gamma : {0.0, 0.4, 0.8, 1.2, 1.6}) {
      for (double t2 : {0.35, 0.65, 0.95, 1.35}) {
        const SshParams p{1.0, t2, gamma};
        const bool pred = nhse_predicate(p).nhse;
        const double d = obc_pbc_distance(p, 120);
        ++total;
        if (pred == (d > 0.05)) {
          ++agree;
        } else {
          v.detail << " mismatch(t2=" << t2 << ",g=" << gamma << ",d=" << d << ")";
        }
      }
    }
    v.detail << " " << agree << "/" << total;
    v.require(agree == total, "no exceptions");
  });

  criterion(11, "polar winding equals det winding for one-band loops", [&](Verdict& v) {
    std::mt19937 rng(20240611);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    int agree = 0, nonzero = 0;
    for (int trial = 0; trial < 20; ++trial) {
      std::vector<Complex> coef(5);
      for (auto& c : coef) c = Complex(u(rng), u(rng));
      const ParametricModel one("one_band", 1, {"s"}, [coef](const std::vector<Complex>& x) {
        ComplexMatrix h(1, 1);
        h(0, 0) = 0.0;
        for (int n = -2; n <= 2; ++n) h(0, 0) += coef[n + 2] * std::pow(x[0], n);
        return h;
      });
      const ParamPath path = circle_path(one.point({1.0}), "s", 0.0, 1.0, 2048);
      std::vector<Complex> loop;
      for (const auto& q : path.points()) loop.push_back(one(q)(0, 0));
      Complex ref;
      double clearance = 0;
      while (clearance < 0.05) {
        ref = Complex(u(rng), u(rng));
        clearance = 1e300;
        for (const auto& e : loop) clearance = std::min(clearance, std::abs(e - ref));
      }
      const int a = polar_winding(loop, ref), b = eigenvalue_winding(one, path, ref);
      if (a != 0) ++nonzero;
      if (a == b) ++agree;
      else v.detail << " mismatch(" << a << " vs " << b << ")";
    }
    v.detail << " " << agree << "/20 (" << nonzero << " nonzero)";
    v.require(agree == 20, "exact agreement");
  });

  criterion(12, "property suites", [&](Verdict& v) {
    std::mt19937 rng(12);
    double biorth = 0;
    for (int n : {2, 3, 4, 6, 10, 20}) {
      for (int trial = 0; trial < 20; ++trial) {
        biorth = std::max(biorth, eig_biorthogonal(oracle::random_matrix(n, rng)).biorthonormality_error());
      }
    }
    v.detail << " biorth=" << biorth;
    v.require(biorth <= 1e-10, "biorthonormality <= 1e-10");

    const BandTrajectories tr = track_bands(h2m, circle_path(h2m.point({0.0, 1.0}), "z", 2.0 * kI, 0.8, 128, 2));
    const BerryResult ref = wilson_loop(tr);
    std::uniform_real_distribution<double> ph(-oracle::pi, oracle::pi), mag(0.2, 5.0);
    double gauge = 0;
    for (int trial = 0; trial < 10; ++trial) {
      BandTrajectories g = tr;
      for (std::size_t l = 1; l + 1 < g.samples(); ++l) {
        for (int b = 0; b < g.n_bands; ++b) {
          const Complex c = std::polar(mag(rng), ph(rng));
          g.right[l].col(b) *= c;
          g.left[l].col(b) /= c;
        }
      }
      const BerryResult r = wilson_loop(g);
      gauge = std::max(gauge, std::abs(r.theta - ref.theta));
      for (int b = 0; b < g.n_bands; ++b) gauge = std::max(gauge, std::abs(r.band_phases[b] - ref.band_phases[b]));
    }
    v.detail << " gauge=" << gauge;
    v.require(gauge <= 1e-8, "Wilson loop gauge invariance <= 1e-8");

    bool integral = true;
    for (int steps : {16, 64, 256, 1024}) {
      for (Complex c : {Complex(0.0), 2.0 * kI, Complex(0.5, -1.5)}) {
        const ParamPath p = circle_path(h2m.point({0.0, 1.0}), "z", c, 0.8, steps);
        const double raw = eigenvalue_winding_raw(h2m, p, kI);
        integral = integral && std::abs(raw - std::round(raw)) < 1e-9;
        integral = integral && eigenvalue_winding(h2m, p, kI) == eigenvalue_winding(
                                                                     h2m, circle_path(h2m.point({0.0, 1.0}), "z", c, 0.8, 2048), kI);
      }
    }
    v.detail << " winding_integral=" << integral;
    v.require(integral, "winding integrality and refinement stability");

    std::vector<Complex> fig8, ring;
    for (int i = 0; i < 600; ++i) {
      const double s = 2 * oracle::pi * i / 600;
      fig8.emplace_back(std::sin(s), std::sin(s) * std::cos(s));
      ring.push_back(std::polar(1.0, s) + 3.0);
    }
    bool stable = true;
    for (int res : {128, 256, 512, 1024}) stable = stable && point_gap_regions({fig8, ring}, res).count == 3;
    v.detail << " raster_stable=" << stable;
    v.require(stable, "region count stable across resolutions");

    const ParamPath loop = plane_loop(h2m.point({2.0 * kI, 1.0}), Axis{"z", false}, Axis{"z", true}, 0.0, 2.0, 1.0, 256);
    ComplexVector psi0(2);
    psi0 << 1.0, 0.0;
    const double duration = 5.0;
    const ComplexVector want = oracle::magnus_propagate(
        [&](double t) { return h2m(loop.at(loop.u_end() * t / duration)); }, duration, psi0, 4000);
    double worst = 0, prev = 1e300;
    bool decreasing = true;
    for (int steps : {1000, 2000, 4000}) {
      EvolveOptions o;
      o.steps = steps;
      const double e = (evolve(h2m, loop, duration, psi0, o).states.back() - want).norm() / want.norm();
      decreasing = decreasing && e < prev;
      prev = e;
      if (steps >= 2000) worst = std::max(worst, e);
    }
    v.detail << " evolve_rel=" << worst;
    v.require(worst <= 1e-6 && decreasing, "step-halving convergence <= 1e-6");
  });

  std::printf("%d of 12 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
