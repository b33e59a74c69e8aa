#pragma once

#include <complex>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "nhtopo/errors.hpp"

namespace nhtopo {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;

inline constexpr double kPi = 3.14159265358979323846;

struct SpectralTolerances {
  /// Threshold on the unit-vector bilinear denominator |<psiL|psiR>|.
  double defect_tol = 1e-7;
  double biorth_tol = 1e-10;
  /// Eigenvalues closer than this (relative to the matrix scale) are treated as one cluster.
  double cluster_rel_tol = 1e-9;
};

struct DefectReport {
  double min_vec_gap = 0.0;           ///< smallest principal angle between two right eigenvectors
  double norm_denominator_min = 0.0;  ///< min_n |<psiL_n|psiR_n>| for unit-norm raw vectors
  bool is_defective = false;
};

/// Eigenvalues with bilinear-normalized right and left eigenvectors.
///
/// Column n of `right` is |psiR_n>, column n of `left` holds the components of the
/// row vector <psiL_n|, so <psiL_m|psiR_n> = left.col(m).transpose() * right.col(n).
/// When `normalized` is false the vectors are unit-norm raw vectors and the matrix
/// is defective within tolerance.
struct Eigensystem {
  Eigen::Index dim = 0;
  ComplexVector values;
  ComplexMatrix right;
  ComplexMatrix left;
  bool normalized = false;
  double residual = 0.0;
  DefectReport defect;

  Complex bilinear(Eigen::Index m, Eigen::Index n) const {
    return left.col(m).transpose() * right.col(n);
  }
  /// Largest |<psiL_m|psiR_n> - delta_mn|.
  double biorthonormality_error() const;
};

/// Throws BadInput for non-square or non-finite matrices.
void require_valid(const ComplexMatrix& h);

/// Frobenius norm, floored at 1 so tolerances stay meaningful for tiny matrices.
double matrix_scale(const ComplexMatrix& h);

/// Diagonal similarity D that equalizes |a_ij| and |a_ji| in the log-least-squares
/// sense. Returns the log-scalings x with D = diag(exp(x)).
Eigen::VectorXd balancing_log_scales(const ComplexMatrix& h);

/// Full non-Hermitian eigendecomposition with biorthogonal (bilinear) normalization.
/// Defective input is reported through `normalized == false` and `defect`.
Eigensystem eig_biorthogonal(const ComplexMatrix& h, const SpectralTolerances& tol = {});

/// Same as eig_biorthogonal but throws DefectiveAtTolerance instead of returning raw vectors.
Eigensystem eig_biorthogonal_strict(const ComplexMatrix& h, const SpectralTolerances& tol = {});

/// r = <psiL|psiR> / <psiR|psiR> with the raw vectors split symmetrically before normalization.
Complex phase_rigidity(const Eigensystem& es, Eigen::Index band);

/// Product over i<j of (E_i - E_j)^2.
Complex discriminant(const ComplexMatrix& h);
Complex discriminant_from_values(const ComplexVector& values);

DefectReport defectiveness(const ComplexMatrix& h, const SpectralTolerances& tol = {});

/// Eigenvalues only (no eigenvectors), balanced.
ComplexVector eigenvalues(const ComplexMatrix& h);

}  // namespace nhtopo
