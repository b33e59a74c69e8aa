#pragma once

#include <functional>
#include <string>
#include <vector>

#include "nhtopo/spectral.hpp"

namespace nhtopo {

/// A point in a model's parameter space: one complex coordinate per named parameter.
struct ParamPoint {
  std::vector<std::string> labels;
  std::vector<Complex> coords;

  /// Index of `label`, or -1.
  int index_of(const std::string& label) const;
  Complex get(const std::string& label) const;
  ParamPoint with(const std::string& label, Complex value) const;
};

class ParametricModel {
 public:
  using Evaluator = std::function<ComplexMatrix(const std::vector<Complex>&)>;

  ParametricModel(std::string name, Eigen::Index dim, std::vector<std::string> labels, Evaluator eval);

  const std::string& name() const { return name_; }
  Eigen::Index dim() const { return dim_; }
  std::size_t arity() const { return labels_.size(); }
  const std::vector<std::string>& labels() const { return labels_; }

  /// Point with the given coordinates in label order.
  ParamPoint point(std::vector<Complex> coords) const;
  /// Throws BadInput when labels do not match or coordinates are not finite.
  ComplexMatrix operator()(const ParamPoint& p) const;

 private:
  std::string name_;
  Eigen::Index dim_;
  std::vector<std::string> labels_;
  Evaluator eval_;
};

// Matrix builders.
ComplexMatrix h2(Complex z, Complex t);
ComplexMatrix h2_parabola(Complex dt, Complex dz);
ComplexMatrix h3(Complex lam, Complex xi);
ComplexMatrix ssh_bloch(Complex k, double t1, double t2, double gamma);
ComplexMatrix ssh_obc(int n_cells, double t1, double t2, double gamma);

// Model families. Parameter labels: h2 {z,t}; h2_parabola {dt,dz}; h3 {lam,xi};
// ssh_bloch {k,t1,t2,gamma}.
ParametricModel h2_model();
ParametricModel h2_parabola_model();
ParametricModel h3_model();
ParametricModel ssh_bloch_model();
/// H(p) = fixed matrix, with a single dummy parameter "s".
ParametricModel constant_model(const ComplexMatrix& h);

std::vector<std::string> model_names();
/// Throws BadInput for an unknown name.
ParametricModel model_by_name(const std::string& name);

/// Which real direction of a complex parameter an axis moves along.
struct Axis {
  std::string label;
  bool imag = false;
};

/// A discretized parameter path backed by an exact curve so callers can refine.
///
/// For a closed path, `curve(s)` with s in [0,1) traces one cycle; the path repeats
/// `cycles` times and `points()` holds steps*cycles samples (closure implied).
/// For an open path `points()` holds steps+1 samples including both ends.
struct ParamPath {
  std::function<ParamPoint(double)> curve;
  int steps = 0;
  int cycles = 1;
  bool closed = true;
  int orientation = 1;
  std::string plane;

  /// u in [0, cycles] for closed paths, [0, 1] for open ones.
  ParamPoint at(double u) const;
  double u_end() const { return closed ? static_cast<double>(cycles) : 1.0; }
  std::size_t size() const;
  std::vector<ParamPoint> points() const;
  /// Largest distance between consecutive samples, in parameter units.
  double max_step() const;
};

/// Circle of `radius` around (ca, cb) in the real plane spanned by axes a and b.
ParamPath plane_loop(const ParamPoint& base, Axis a, Axis b, double ca, double cb, double radius,
                     int steps, int cycles = 1, int orientation = 1);

/// Circle in the complex plane of `label`: value = center + radius*exp(+-i*phi).
ParamPath circle_path(const ParamPoint& base, const std::string& label, Complex center, double radius,
                      int steps, int cycles = 1, int orientation = 1);

/// Loop that leaves the base point (a0, b0), circles (ca, cb) once and returns along the
/// same segment.
ParamPath lollipop_path(const ParamPoint& base, Axis a, Axis b, double a0, double b0, double ca,
                        double cb, double radius, int steps, int orientation = 1);

/// Closed straight sweep of `label` from `from` to `to` (for periodic parameters such as k).
ParamPath periodic_sweep(const ParamPoint& base, const std::string& label, Complex from, Complex to,
                         int steps, int cycles = 1);

/// Straight open segment between two points with identical labels.
ParamPath segment_path(const ParamPoint& from, const ParamPoint& to, int steps);

/// Distance between two points with identical labels (Euclidean over all real components).
double param_distance(const ParamPoint& a, const ParamPoint& b);

/// Sets the real or imaginary part of an axis coordinate.
ParamPoint set_axis(const ParamPoint& p, const Axis& axis, double value);
double get_axis(const ParamPoint& p, const Axis& axis);

}  // namespace nhtopo
