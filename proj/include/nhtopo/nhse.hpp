#pragma once

#include <optional>
#include <vector>

#include "nhtopo/spectral.hpp"

namespace nhtopo {

struct SshParams {
  double t1 = 1.0;
  double t2 = 0.5;
  double gamma = 4.0 / 3.0;
};

struct PbcSpectrum {
  std::vector<double> k;
  std::vector<std::vector<Complex>> bands;  ///< bands[b][i] at k[i]
  /// Closed loops traced by the bands over the zone (bands exchanged across the zone
  /// are joined into one loop).
  std::vector<std::vector<Complex>> loops;
};

/// Bloch spectrum on a uniform k grid over [-pi, pi), continuously tracked.
PbcSpectrum pbc_spectrum(const SshParams& p, int n_k);

/// Smallest |E| over the zone (half the PBC gap at E = 0), on a uniform k grid.
double pbc_gap(const SshParams& p, int n_k);

struct OpenChainSpectrum {
  int n_cells = 0;
  SshParams params;
  ComplexVector eigenvalues;
  Eigensystem eigensystem;
};

OpenChainSpectrum obc_spectrum(const SshParams& p, int n_cells);
/// Eigenvalues only.
ComplexVector obc_eigenvalues(const SshParams& p, int n_cells);

/// Spectrum of the Hermitian chain with hopping sqrt((t1-g/2)(t1+g/2)) and t2.
ComplexVector similar_hermitian_eigenvalues(const SshParams& p, int n_cells);

struct GbzCircle {
  double r = 1.0;
  std::vector<Complex> samples;  ///< beta on |beta| = r
};

/// r = sqrt|(t1 - g/2)/(t1 + g/2)|.
GbzCircle gbz_radius(double t1, double gamma, int n_samples = 256);

/// Bloch eigenvalues at k' = k + i log(1/r) for a uniform k grid.
std::vector<Complex> gbz_spectrum(const SshParams& p, int n_k);

struct ModeProfile {
  Complex energy;
  double center = 0;     ///< center of mass of |psiR|^2 in site units
  double kappa = 0;      ///< decay rate per unit cell from the bulk-window fit
  double r_squared = 0;
  bool extended = false; ///< fit rejected; kappa reported as 0
};

struct SkinProfile {
  std::vector<ModeProfile> modes;
  double left_fraction = 0;
};

SkinProfile skin_profile(const OpenChainSpectrum& spec);

/// sum |L R|^2 / (sum |L R|)^2 over sites.
double biorthogonal_ipr(const OpenChainSpectrum& spec, int mode);

/// OBC eigenvalues whose biorthogonal IPR stays below `ipr_cut` (default 10 / sites).
std::vector<Complex> bulk_eigenvalues(const OpenChainSpectrum& spec, double ipr_cut = 0);

/// Symmetric Hausdorff distance between two point clouds.
double hausdorff(const std::vector<Complex>& a, const std::vector<Complex>& b);

struct NhseVerdict {
  bool nhse = false;
  std::optional<Complex> witness;  ///< reference energy with nonzero winding
  int winding = 0;
  int regions = 0;                 ///< point-gap regions examined
};

/// Nonzero PBC winding for a reference inside some point-gap region of the Bloch loops.
NhseVerdict nhse_predicate(const SshParams& p, int n_k = 512);

/// OBC bulk spectrum vs PBC spectrum Hausdorff distance.
double obc_pbc_distance(const SshParams& p, int n_cells, int n_k = 512);

struct TransitionScan {
  std::vector<double> t2;
  std::vector<double> bulk_gap;   ///< third-smallest |E|
  std::vector<int> zero_modes;    ///< count of |E| < zero_tol
  double transition = 0;          ///< argmin of bulk_gap
};

/// Sweep t2 over [t2_min, t2_max] at fixed t1, gamma; the OBC transition is where the
/// bulk gap (third-smallest |E|, past a possible zero-mode pair) is smallest.
TransitionScan zero_mode_scan(double t1, double gamma, int n_cells, double t2_min, double t2_max, int n_points,
                              double zero_tol = 1e-4, int jobs = 1);

}  // namespace nhtopo
