#include "nhtopo/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <Eigen/Eigenvalues>

#include "nhtopo/assignment.hpp"

namespace nhtopo {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::BadInput: return "BadInput";
    case ErrorKind::BadSize: return "BadSize";
    case ErrorKind::NotUnitary: return "NotUnitary";
    case ErrorKind::DivByZero: return "DivByZero";
    case ErrorKind::UnknownFigure: return "UnknownFigure";
    case ErrorKind::NonConvergence: return "NonConvergence";
    case ErrorKind::DefectiveAtTolerance: return "DefectiveAtTolerance";
    case ErrorKind::PathHitsEP: return "PathHitsEP";
    case ErrorKind::AmbiguousMatch: return "AmbiguousMatch";
    case ErrorKind::ReferenceOnSpectrum: return "ReferenceOnSpectrum";
    case ErrorKind::BandsCollide: return "BandsCollide";
    case ErrorKind::UnitarityLoss: return "UnitarityLoss";
    case ErrorKind::BandNotClosed: return "BandNotClosed";
    case ErrorKind::DegenerateCrossing: return "DegenerateCrossing";
    case ErrorKind::EpOnBoundary: return "EpOnBoundary";
    case ErrorKind::NoEp: return "NoEp";
    case ErrorKind::MultipleEps: return "MultipleEps";
    case ErrorKind::PolishDiverged: return "PolishDiverged";
    case ErrorKind::ProbesDisagree: return "ProbesDisagree";
    case ErrorKind::NotDegenerate: return "NotDegenerate";
    case ErrorKind::FitRejected: return "FitRejected";
    case ErrorKind::ContinuationStalled: return "ContinuationStalled";
    case ErrorKind::StepUnstable: return "StepUnstable";
    case ErrorKind::ResolutionTooCoarse: return "ResolutionTooCoarse";
  }
  return "Unknown";
}

bool is_validation_error(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::BadInput:
    case ErrorKind::BadSize:
    case ErrorKind::NotUnitary:
    case ErrorKind::DivByZero:
    case ErrorKind::UnknownFigure:
      return true;
    default:
      return false;
  }
}

void require_valid(const ComplexMatrix& h) {
  if (h.rows() == 0 || h.rows() != h.cols()) {
    throw Error(ErrorKind::BadInput, "matrix must be square and non-empty");
  }
  if (!h.allFinite()) throw Error(ErrorKind::BadInput, "matrix has non-finite entries");
}

double matrix_scale(const ComplexMatrix& h) { return std::max(1.0, h.norm()); }

double Eigensystem::biorthonormality_error() const {
  const ComplexMatrix g = left.transpose() * right;
  return (g - ComplexMatrix::Identity(dim, dim)).cwiseAbs().maxCoeff();
}

Eigen::VectorXd balancing_log_scales(const ComplexMatrix& h) {
  const Eigen::Index n = h.rows();
  Eigen::MatrixXd lap = Eigen::MatrixXd::Zero(n, n);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
  bool any = false;
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      if (i == j) continue;
      const double mag = std::abs(h(i, j));
      if (mag == 0.0) continue;
      any = true;
      // residual l_ij + x_j - x_i for the scaled entry a_ij * exp(x_j - x_i)
      const double l = std::log(mag);
      lap(i, i) += 1.0;
      lap(j, j) += 1.0;
      lap(i, j) -= 1.0;
      lap(j, i) -= 1.0;
      rhs(i) += l;
      rhs(j) -= l;
    }
  }
  if (!any) return Eigen::VectorXd::Zero(n);
  lap.diagonal().array() += 1e-10;
  Eigen::VectorXd x = lap.ldlt().solve(rhs);
  // remove the free global shift and keep exp() in range
  x.array() -= x.mean();
  return x.cwiseMax(-600.0).cwiseMin(600.0);
}

namespace {

ComplexMatrix apply_balance(const ComplexMatrix& h, const Eigen::VectorXd& x) {
  ComplexMatrix b = h;
  for (Eigen::Index i = 0; i < h.rows(); ++i) {
    for (Eigen::Index j = 0; j < h.cols(); ++j) {
      if (i != j) b(i, j) *= std::exp(x(j) - x(i));
    }
  }
  return b;
}

// Groups indices whose values lie within `tol` of each other (single linkage).
std::vector<std::vector<int>> clusters(const ComplexVector& w, double tol) {
  const int n = static_cast<int>(w.size());
  std::vector<int> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int a) {
    while (parent[a] != a) a = parent[a] = parent[parent[a]];
    return a;
  };
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      if (std::abs(w(i) - w(j)) <= tol) parent[find(i)] = find(j);
    }
  }
  std::vector<std::vector<int>> groups(n);
  for (int i = 0; i < n; ++i) groups[find(i)].push_back(i);
  std::vector<std::vector<int>> out;
  for (auto& g : groups) {
    if (!g.empty()) out.push_back(std::move(g));
  }
  return out;
}

}  // namespace

ComplexVector eigenvalues(const ComplexMatrix& h) {
  require_valid(h);
  const ComplexMatrix b = apply_balance(h, balancing_log_scales(h));
  Eigen::ComplexEigenSolver<ComplexMatrix> ces(b, false);
  if (ces.info() != Eigen::Success) throw Error(ErrorKind::NonConvergence, "eigenvalue iteration failed");
  return ces.eigenvalues();
}

Eigensystem eig_biorthogonal(const ComplexMatrix& h, const SpectralTolerances& tol) {
  require_valid(h);
  const Eigen::Index n = h.rows();
  const Eigen::VectorXd xs = balancing_log_scales(h);
  const ComplexMatrix b = apply_balance(h, xs);

  Eigen::ComplexEigenSolver<ComplexMatrix> right_solver(b, true);
  Eigen::ComplexEigenSolver<ComplexMatrix> left_solver(b.adjoint(), true);
  if (right_solver.info() != Eigen::Success || left_solver.info() != Eigen::Success) {
    throw Error(ErrorKind::NonConvergence, "eigenvalue iteration failed");
  }
  const ComplexVector w = right_solver.eigenvalues();
  ComplexMatrix y = right_solver.eigenvectors();
  const ComplexVector mu = left_solver.eigenvalues();
  // rows of the balanced matrix's left eigenvectors: conj of H^dagger right vectors
  const ComplexMatrix z = left_solver.eigenvectors().conjugate();
  for (Eigen::Index k = 0; k < n; ++k) y.col(k).normalize();

  // Pair each eigenvalue with the closest conjugated eigenvalue of the adjoint.
  Eigen::MatrixXd cost(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) cost(i, j) = std::abs(w(i) - std::conj(mu(j)));
  }
  std::vector<int> match = min_cost_assignment(cost);
  ComplexMatrix l(n, n);
  for (Eigen::Index i = 0; i < n; ++i) l.col(i) = z.col(match[i]).normalized();

  // Inside a near-degenerate cluster the pairing is arbitrary: rematch by overlap, then
  // biorthogonalize the block so that L_c^T Y_c = diag.
  const double scale = matrix_scale(b);
  for (const auto& group : clusters(w, tol.cluster_rel_tol * scale)) {
    if (group.size() < 2) continue;
    const auto m = static_cast<Eigen::Index>(group.size());
    Eigen::MatrixXd ocost(m, m);
    for (Eigen::Index a = 0; a < m; ++a) {
      for (Eigen::Index c = 0; c < m; ++c) {
        ocost(a, c) = -std::abs(Complex(l.col(group[c]).transpose() * y.col(group[a])));
      }
    }
    const std::vector<int> omatch = min_cost_assignment(ocost);
    ComplexMatrix lc(n, m), yc(n, m);
    for (Eigen::Index a = 0; a < m; ++a) {
      lc.col(a) = l.col(group[omatch[a]]);
      yc.col(a) = y.col(group[a]);
    }
    const ComplexMatrix g = lc.transpose() * yc;
    Eigen::JacobiSVD<ComplexMatrix> svd(g);
    const auto& sv = svd.singularValues();
    if (sv(m - 1) > tol.defect_tol * sv(0)) {
      // rows of G^{-1} L_c^T are biorthogonal to Y_c
      const ComplexMatrix lnew = (g.inverse() * lc.transpose()).transpose();
      for (Eigen::Index a = 0; a < m; ++a) l.col(group[a]) = lnew.col(a).normalized();
    } else {
      for (Eigen::Index a = 0; a < m; ++a) l.col(group[a]) = lc.col(a);
    }
  }

  Eigensystem es;
  es.dim = n;
  es.values = w;

  // Conditioning is judged in the balanced basis, where diagonal similarity is factored out.
  double min_den = std::numeric_limits<double>::infinity();
  for (Eigen::Index k = 0; k < n; ++k) {
    min_den = std::min(min_den, std::abs(Complex(l.col(k).transpose() * y.col(k))));
  }
  double min_angle = kPi / 2;
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const double c = std::min(1.0, std::abs(y.col(i).dot(y.col(j))));
      min_angle = std::min(min_angle, std::acos(c));
    }
  }
  es.defect.norm_denominator_min = min_den;
  es.defect.min_vec_gap = min_angle;
  es.defect.is_defective = min_den < tol.defect_tol;

  // Back to the original basis: R = D y, L = l D^{-1}.
  es.right.resize(n, n);
  es.left.resize(n, n);
  for (Eigen::Index k = 0; k < n; ++k) {
    for (Eigen::Index i = 0; i < n; ++i) {
      es.right(i, k) = y(i, k) * std::exp(xs(i));
      es.left(i, k) = l(i, k) * std::exp(-xs(i));
    }
    es.right.col(k).normalize();
    es.left.col(k).normalize();
  }

  double residual = 0.0;
  for (Eigen::Index k = 0; k < n; ++k) {
    residual = std::max(residual, (h * es.right.col(k) - w(k) * es.right.col(k)).norm());
  }
  es.residual = residual;

  if (!es.defect.is_defective) {
    for (Eigen::Index k = 0; k < n; ++k) {
      const Complex s = std::sqrt(Complex(es.left.col(k).transpose() * es.right.col(k)));
      es.right.col(k) /= s;
      es.left.col(k) /= s;
    }
    es.normalized = true;
  }
  return es;
}

Eigensystem eig_biorthogonal_strict(const ComplexMatrix& h, const SpectralTolerances& tol) {
  Eigensystem es = eig_biorthogonal(h, tol);
  if (!es.normalized) {
    throw Error(ErrorKind::DefectiveAtTolerance,
                "bilinear denominator " + std::to_string(es.defect.norm_denominator_min) +
                    " below defect tolerance");
  }
  return es;
}

Complex phase_rigidity(const Eigensystem& es, Eigen::Index band) {
  if (band < 0 || band >= es.dim) throw Error(ErrorKind::BadInput, "band index out of range");
  if (!es.normalized) throw Error(ErrorKind::DefectiveAtTolerance, "eigensystem is defective");
  const Complex num = es.bilinear(band, band);
  const Complex den = es.right.col(band).squaredNorm();
  return num / den;
}

Complex discriminant_from_values(const ComplexVector& values) {
  Complex d = 1.0;
  for (Eigen::Index i = 0; i < values.size(); ++i) {
    for (Eigen::Index j = i + 1; j < values.size(); ++j) {
      const Complex diff = values(i) - values(j);
      d *= diff * diff;
    }
  }
  return d;
}

Complex discriminant(const ComplexMatrix& h) {
  if (h.rows() < 2) throw Error(ErrorKind::BadSize, "discriminant needs dim >= 2");
  return discriminant_from_values(eigenvalues(h));
}

DefectReport defectiveness(const ComplexMatrix& h, const SpectralTolerances& tol) {
  if (h.rows() < 2) throw Error(ErrorKind::BadSize, "defectiveness needs dim >= 2");
  return eig_biorthogonal(h, tol).defect;
}

}  // namespace nhtopo
