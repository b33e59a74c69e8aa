#pragma once

#include <vector>

#include "nhtopo/ep_finder.hpp"
#include "nhtopo/models.hpp"
#include "nhtopo/winding.hpp"

namespace nhtopo {

struct EvolveOptions {
  int steps = 0;                ///< RK4 steps; 0 picks max(2000, 40 * duration * scale)
  int record_every = 1;         ///< keep every n-th state in the trace
  double overflow_guard = 1e250;
  TrackOptions track;
};

struct EvolutionTrace {
  std::vector<double> times;
  std::vector<ComplexVector> states;       ///< unnormalized
  std::vector<Eigen::VectorXd> projections;  ///< |<psiL_n|psi(t)>| per tracked band
  BandTrajectories frames;
};

/// Integrates i dpsi/dt = H(path(u_end * t / duration)) psi with classical RK4.
/// The state is never renormalized.
EvolutionTrace evolve(const ParametricModel& model, const ParamPath& path, double duration,
                      const ComplexVector& psi0, const EvolveOptions& opt = {});

struct EncircleOutcome {
  int final_band = 0;          ///< index in the start-point band order (ascending Re E, Im E)
  double dominance_ratio = 1;  ///< largest / second projection at loop end
  int direction = 1;
  ParamPoint start_point;
  int initial_band = 0;
  bool switched() const { return final_band != initial_band; }
};

/// Circle of `radius` around `center` in the (x, y) plane, starting at `start_angle`,
/// traversed once in `direction`, starting in the given eigenstate.
EncircleOutcome encircle_outcome(const ParametricModel& model, const ParamPoint& center, Axis x, Axis y,
                                 double radius, int direction, double start_angle, double duration,
                                 int initial_band, const EvolveOptions& opt = {});

/// Same, centered on a located EP.
EncircleOutcome encircle_outcome(const ParametricModel& model, const EpRecord& ep, Axis x, Axis y, double radius,
                                 int direction, double start_angle, double duration, int initial_band,
                                 const EvolveOptions& opt = {});

/// Dominance ratio above which an outcome counts as a definite state.
inline constexpr double kDominanceThreshold = 10.0;

}  // namespace nhtopo
