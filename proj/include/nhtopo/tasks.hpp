#pragma once

#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "nhtopo/errors.hpp"
#include "nhtopo/spectral.hpp"

namespace nhtopo {

using json = nlohmann::json;

inline constexpr const char* kArtifactVersion = "1.0.0";

/// One CSV series: header row plus numeric rows. Complex values are split into
/// re_<name>, im_<name> column pairs by the producer.
struct Table {
  std::string name;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;

  void add(std::vector<double> row);
};

struct TaskOutput {
  json summary = json::object();
  json notes = json::object();
  std::vector<Table> tables;
};

struct RunConfig {
  std::string task;
  json body;  ///< the validated document, echoed in the envelope
  std::string out;
  std::string format = "json";
  std::map<std::string, double> tolerances;
};

/// Task names with a one-line description each.
std::vector<std::pair<std::string, std::string>> task_catalog();

/// JSON schema of the run configuration.
json config_schema();

/// Validates a configuration document. Unknown keys anywhere are rejected with BadInput.
RunConfig parse_config(const json& doc);

/// Tolerance names accepted by --tol and the "tolerances" block.
std::vector<std::string> tolerance_names();

TaskOutput run_task(const RunConfig& cfg, int jobs = 1);

std::vector<std::pair<std::string, std::string>> figure_catalog();
/// Throws UnknownFigure.
TaskOutput reproduce_figure(const std::string& id, int jobs = 1);

/// {"task": ..., "version": ..., "payload": ..., "notes": ...}
json envelope(const json& task_echo, const TaskOutput& out);

std::string to_csv(const Table& t);

json complex_json(Complex z);
/// Accepts a number or {"re": .., "im": ..}.
Complex complex_from_json(const json& j, const std::string& where);

/// Process exit code for an error kind: 2 for validation, 3 for numerical failures.
int exit_code(ErrorKind kind);

}  // namespace nhtopo
