#pragma once

#include <array>
#include <string>
#include <vector>

#include "nhtopo/winding.hpp"

namespace nhtopo {

/// Rectangle in the real plane spanned by two axes; every other parameter is taken from `base`.
struct Region {
  ParamPoint base;
  Axis x, y;
  double x0 = 0, x1 = 0, y0 = 0, y1 = 0;

  ParamPoint at(double xv, double yv) const { return set_axis(set_axis(base, x, xv), y, yv); }
};

struct EpTolerances {
  double ep_tol = 1e-8;       ///< on |discriminant|
  double cluster_tol = 1e-4;  ///< energy clustering at a degeneracy
  double fd_step = 1e-7;
};

struct EpRecord {
  ParamPoint location;
  Complex energy;
  int order = 0;
  double residual = 0.0;  ///< |discriminant| at location
  bool diabolic = false;
};

/// Argument-principle count of discriminant zeros inside the region (boundary run
/// counterclockwise with `resolution` samples per side).
int count_eps(const ParametricModel& model, const Region& region, int resolution = 64,
              const EpTolerances& tol = {});

/// Single EP in the region: winding-count bisection, then Newton polish on the discriminant.
EpRecord locate_ep(const ParametricModel& model, const Region& region, double tol = 1e-6,
                   const EpTolerances& eptol = {});

/// All EPs in the region, ordered by (x, y).
std::vector<EpRecord> locate_eps(const ParametricModel& model, const Region& region, double tol = 1e-6,
                                 const EpTolerances& eptol = {});

struct OrderProbe {
  int order = 0;          ///< 1 with diabolic = true for a diagonalizable degeneracy
  bool diabolic = false;
  int cluster_size = 0;   ///< eigenvalues within cluster_tol of the degenerate energy
  int cycle_length = 0;   ///< longest band cycle under the probe loop
  Complex energy;
};

/// Order from two probes: eigenvalue clustering at `at` and the permutation cycle of a
/// small loop of `probe_radius` around `at` in the (x, y) plane.
OrderProbe ep_order(const ParametricModel& model, const ParamPoint& at, const Axis& x, const Axis& y,
                    double probe_radius = 1e-3, const EpTolerances& tol = {});

enum class Observable { Splitting, PhaseRigidity };

struct ExponentFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  double delta_min = 0.0, delta_max = 0.0;
  std::vector<double> deltas;
  std::vector<double> values;
};

/// Log-log fit of the observable at location + delta * direction (along one complex
/// parameter). Splitting is the diameter of the `order` eigenvalues nearest the EP
/// energy; phase rigidity is the smallest |r| among them.
ExponentFit critical_exponent(const ParametricModel& model, const EpRecord& ep, const std::string& label,
                              Complex direction, double delta_min, double delta_max, Observable obs,
                              int samples = 9);

/// Least-squares line fit, exposed for tests.
ExponentFit fit_line(const std::vector<double>& x, const std::vector<double>& y);

struct ArcPoint {
  ParamPoint location;
  Complex energy;
  std::array<double, 3> current{};  ///< grad Re(disc) x grad Im(disc), normalized
};

struct ArcTrace {
  std::vector<ArcPoint> points;
  bool order_changed = false;  ///< stopped where the discriminant gradients lose rank
  std::string stop_reason;
};

/// Unnormalized grad Re(disc) x grad Im(disc) in the three real axes.
std::array<double, 3> ea_current(const ParametricModel& model, const ParamPoint& p, const std::array<Axis, 3>& axes,
                                 double h = 1e-6);

/// Pseudo-arclength continuation of the discriminant zero set through `seed`, moving
/// along (direction = +1) or against (-1) the current.
ArcTrace trace_ea(const ParametricModel& model, const std::array<Axis, 3>& axes, const ParamPoint& seed,
                  double step, int max_points, int direction = 1, const EpTolerances& tol = {});

}  // namespace nhtopo
