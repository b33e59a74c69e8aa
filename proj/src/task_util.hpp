#pragma once

// Shared pieces of the task runner and the figure reproducers.

#include <functional>
#include <set>
#include <string>
#include <vector>

#include "nhtopo/ep_finder.hpp"
#include "nhtopo/models.hpp"
#include "nhtopo/tasks.hpp"
#include "nhtopo/winding.hpp"

namespace nhtopo::detail {

/// Reads keys out of a JSON object and remembers which ones were consumed, so that
/// anything left over can be reported as unknown.
class Fields {
 public:
  Fields(const json& j, std::string where);

  bool has(const std::string& key) const;
  double number(const std::string& key);
  double number(const std::string& key, double fallback);
  int integer(const std::string& key);
  int integer(const std::string& key, int fallback);
  bool boolean(const std::string& key, bool fallback);
  std::string text(const std::string& key);
  std::string text(const std::string& key, const std::string& fallback);
  Complex complex(const std::string& key);
  Complex complex(const std::string& key, Complex fallback);
  std::vector<double> numbers(const std::string& key);
  const json& raw(const std::string& key);
  Fields object(const std::string& key);

  /// Throws BadInput naming the first unconsumed key.
  void finish() const;
  const std::string& where() const { return where_; }

 private:
  const json& get(const std::string& key);
  const json* j_;
  std::string where_;
  std::set<std::string> used_;
};

[[noreturn]] void bad_input(const std::string& msg);

/// "z.re" / "z.im"; a bare label means the real part.
Axis parse_axis(const std::string& s);
std::string axis_name(const Axis& a);

json point_json(const ParamPoint& p);
json permutation_json(const Permutation& p);
json matrix_json(const Eigen::MatrixXi& m);

/// Columns u, re_E1, im_E1, ... over every tracked sample.
Table trajectory_table(const BandTrajectories& traj, const std::string& name);
/// One closed loop per permutation orbit (the closing sample is dropped).
std::vector<std::vector<Complex>> orbit_loops(const BandTrajectories& traj);
/// Columns loop, index, re_E, im_E.
Table loops_table(const std::vector<std::vector<Complex>>& loops, const std::string& name);
Table points_table(const std::vector<Complex>& pts, const std::string& name);

/// Winding, braid, Berry and gap summaries of one tracked loop.
json loop_summary(const ParametricModel& model, const ParamPath& path, const BandTrajectories& traj);
json braid_json(const BraidWord& w);
json berry_json(const BerryResult& b);
json ep_json(const EpRecord& e);

ParamPath path_from_json(const ParamPoint& base, Fields f);

/// Fixed notes attached to every envelope.
json convention_notes();

}  // namespace nhtopo::detail
