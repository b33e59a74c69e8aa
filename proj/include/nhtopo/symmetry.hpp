#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "nhtopo/models.hpp"

namespace nhtopo {

/// The three relations and their dagger partners (H* <-> H^T, H <-> H^dagger).
enum class SymmetryKind { TRS, PHS, CS, TRSDagger, PHSDagger, CSDagger };

std::string_view to_string(SymmetryKind kind);
/// Accepts "TRS", "PHS", "CS", "TRS+", "PHS+", "CS+" (and the "dagger" spellings).
SymmetryKind symmetry_from_string(const std::string& s);

/// Max over the grid of the Frobenius norm of the relation's defect. TRS/PHS-type
/// relations compare k with -k, CS-type at the same k. The grid must map to itself under
/// k -> -k (mod 2pi). Pass an empty `k_label` for models without momentum (grid ignored).
double check_symmetry(const ParametricModel& model, const ParamPoint& base, const std::string& k_label,
                      const std::vector<double>& k_grid, const ComplexMatrix& u, SymmetryKind kind);

/// Symmetric grid of n points on [-pi, pi).
std::vector<double> symmetric_k_grid(int n);

struct LineGap {
  Complex point;      ///< a point on the separating line
  Complex direction;  ///< unit direction of the line
  double margin = 0;  ///< distance between the two sides along the normal
  std::vector<int> side;  ///< 0/1 per band
};

/// Straight line separating the bands into two non-empty groups, chosen for maximal
/// margin; empty if every split has overlapping convex hulls.
std::optional<LineGap> line_gap(const std::vector<std::vector<Complex>>& bands);

struct PointGapReport {
  int count = 0;  ///< bounded complement components M
  std::vector<Complex> representatives;
  int resolution = 0;
  double pixel = 0;  ///< larger pixel side length
};

/// Rasterizes closed band loops on a resolution^2 grid (10% margin), flood-fills the
/// complement from the border and returns one interior point per bounded region.
PointGapReport point_gap_regions(const std::vector<std::vector<Complex>>& loops, int resolution = 512);

/// Winding of (E - E_r)/|E - E_r| along a closed sampled loop.
int polar_winding(const std::vector<Complex>& loop, Complex e_ref);

}  // namespace nhtopo
