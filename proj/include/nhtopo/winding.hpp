#pragma once

#include <functional>
#include <string>
#include <vector>

#include "nhtopo/models.hpp"

namespace nhtopo {

/// perm[b] is the band whose initial state band b arrives at after the loop.
using Permutation = std::vector<int>;

Permutation compose(const Permutation& first, const Permutation& second);  ///< apply first, then second
std::vector<std::vector<int>> perm_cycles(const Permutation& p);           ///< including fixed points
std::string cycle_notation(const Permutation& p);                           ///< 1-based, "()" for identity
/// Size of the group generated by the given permutations (closure by BFS).
std::size_t generated_group_order(const std::vector<Permutation>& gens);

struct TrackOptions {
  SpectralTolerances spectral;
  /// A step is accepted when every band moves less than this fraction of its gap.
  double gap_fraction = 0.3;
  int max_depth = 24;
};

/// Bands followed continuously along a path. Sample 0 is u = 0, the last sample is
/// u = path.u_end(); for a closed path the last sample reuses the first sample's
/// frames in permuted order so closure is exact.
struct BandTrajectories {
  int n_bands = 0;
  ParamPath path;
  std::vector<double> u;
  std::vector<ComplexVector> energies;  ///< energies[l](b)
  std::vector<ComplexMatrix> right;     ///< right[l].col(b)
  std::vector<ComplexMatrix> left;      ///< left[l].col(b) holds the row <psiL_b|
  double continuity_residual = 0.0;     ///< max over steps and bands of 1 - |<L_b(l)|R_b(l+1)>| / |<L_b(l)|R_b(l)>|-type deficit
  Permutation permutation;              ///< identity for open paths

  std::size_t samples() const { return u.size(); }
};

/// Initial band order is ascending (Re E, Im E) at u = 0.
BandTrajectories track_bands(const ParametricModel& model, const ParamPath& path, const TrackOptions& opt = {});

/// Total unwrapped arg change of f over [u0, u1], starting from `base_steps` uniform
/// samples and bisecting until every increment is below pi/2. Throws `zero_kind` when
/// |f| <= zero_tol at a sample.
double accumulated_phase(const std::function<Complex(double)>& f, double u0, double u1, int base_steps,
                         double zero_tol, ErrorKind zero_kind, int max_depth = 30);

/// Winding of det(H - E_r) along a closed path.
int eigenvalue_winding(const ParametricModel& model, const ParamPath& path, Complex e_ref);

/// Same quantity before rounding (for consistency checks).
double eigenvalue_winding_raw(const ParametricModel& model, const ParamPath& path, Complex e_ref);

/// Sum over ordered band pairs of vorticities, computed as minus the winding of the
/// discriminant. Needs no reference energy.
int vorticity_winding(const ParametricModel& model, const ParamPath& path);

/// -(1/2pi) * unwrapped arg change of E_i - E_j. Throws BandsCollide or BandNotClosed.
double vorticity(const BandTrajectories& traj, int i, int j);

struct BerryResult {
  ComplexMatrix U;                    ///< ordered product of overlap matrices
  double det_phase = 0.0;             ///< Im ln det U in (-pi, pi]
  double theta = 0.0;                 ///< extended orbit phase of band 0
  double vwn = 0.0;                   ///< theta / (cycles * pi)
  std::vector<double> band_phases;    ///< extended phase of the orbit containing each band
  std::vector<double> partial_phases; ///< cumulative phase along band 0's orbit
  double unitarity_error = 0.0;
  int cycles_used = 1;
};

struct BerryOptions {
  TrackOptions track;
  double unitary_tol = 1e-6;
};

BerryResult wilson_loop(const ParametricModel& model, const ParamPath& path, const BerryOptions& opt = {});
/// Same, on precomputed trajectories (frames may carry any gauge).
BerryResult wilson_loop(const BandTrajectories& traj, const BerryOptions& opt = {});

/// Extended phase of one band over `cycles` traversals; throws BandNotClosed if the band
/// does not return to itself.
double single_band_phase(const ParametricModel& model, const ParamPath& path, int band, int cycles,
                         const TrackOptions& opt = {});
double single_band_phase(const BandTrajectories& traj, int band);

/// -Im ln of the raw single-band overlap product (mod 2pi, in (-pi, pi]).
double single_band_raw_phase(const BandTrajectories& traj, int band);

Permutation loop_permutation(const ParametricModel& model, const ParamPath& path, const TrackOptions& opt = {});

struct BraidWord {
  /// Signed 1-based generator indices: +i is sigma_i, -i its inverse.
  std::vector<int> generators;
  /// Closed components of the braid closure (orbits of the permutation).
  std::vector<std::vector<int>> components;
  /// Linking numbers between components, summed from pairwise vorticities.
  Eigen::MatrixXi linking;
  /// Linking numbers counted from crossing signs (half the signed crossings).
  Eigen::MatrixXi crossing_linking;
  Permutation induced_permutation;

  std::string to_string() const;
};

/// Strands ordered by Re E; sigma_i^{+1} when the strand moving right has the larger Im E.
BraidWord braid_word(const BandTrajectories& traj);

}  // namespace nhtopo
