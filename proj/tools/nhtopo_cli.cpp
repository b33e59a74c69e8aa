// nhtopo command-line front end.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "nhtopo/models.hpp"
#include "nhtopo/tasks.hpp"

namespace fs = std::filesystem;
using nhtopo::json;

namespace {

int log_level() {
  const char* v = std::getenv("NHTOPO_LOG");
  if (!v) return 1;
  const std::string s(v);
  if (s == "quiet" || s == "0") return 0;
  if (s == "debug" || s == "2") return 2;
  return 1;
}

void log(int level, const std::string& msg) {
  if (level <= log_level()) std::cerr << "nhtopo: " << msg << '\n';
}

json series_json(const std::vector<nhtopo::Table>& tables) {
  json j = json::object();
  for (const auto& t : tables) j[t.name] = json{{"columns", t.columns}, {"rows", t.rows}};
  return j;
}

void write_file(const fs::path& p, const std::string& text) {
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream os(p, std::ios::binary);
  if (!os) throw nhtopo::Error(nhtopo::ErrorKind::BadInput, "cannot write " + p.string());
  os << text;
}

std::map<std::string, double> parse_tols(const std::vector<std::string>& items) {
  std::map<std::string, double> out;
  for (const auto& item : items) {
    const auto eq = item.find('=');
    if (eq == std::string::npos) throw nhtopo::Error(nhtopo::ErrorKind::BadInput, "--tol expects name=value, got " + item);
    try {
      std::size_t used = 0;
      const std::string value = item.substr(eq + 1);
      const double v = std::stod(value, &used);
      if (used != value.size()) throw std::invalid_argument(item);
      out[item.substr(0, eq)] = v;
    } catch (const std::logic_error&) {
      throw nhtopo::Error(nhtopo::ErrorKind::BadInput, "--tol value is not a number: " + item);
    }
  }
  return out;
}

json load_config(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw nhtopo::Error(nhtopo::ErrorKind::BadInput, "cannot read config " + path);
  try {
    return json::parse(is);
  } catch (const json::parse_error& e) {
    throw nhtopo::Error(nhtopo::ErrorKind::BadInput, std::string("config is not valid JSON: ") + e.what());
  }
}

void emit(const json& env, const std::vector<nhtopo::Table>& tables, const std::string& out,
          const std::string& format) {
  if (format == "json") {
    json full = env;
    full["series"] = series_json(tables);
    const std::string text = full.dump(2) + "\n";
    if (out.empty()) {
      std::cout << text;
    } else {
      write_file(out, text);
      log(1, "wrote " + out);
    }
    return;
  }
  if (out.empty()) {
    for (const auto& t : tables) std::cout << "# " << t.name << '\n' << nhtopo::to_csv(t);
    std::cout << "# summary\n" << env.dump(2) << '\n';
    return;
  }
  const fs::path dir(out);
  for (const auto& t : tables) write_file(dir / (t.name + ".csv"), nhtopo::to_csv(t));
  write_file(dir / "summary.json", env.dump(2) + "\n");
  log(1, "wrote " + std::to_string(tables.size()) + " series and summary.json to " + dir.string());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"non-Hermitian topology toolkit"};
  app.require_subcommand(1);

  std::string config_path, out_path, repro_dir, format;
  int jobs = 1;
  std::vector<std::string> tols;

  auto* run = app.add_subcommand("run", "run the task described by a config file");
  run->add_option("--config", config_path, "config file (JSON)")->required();
  run->add_option("--out", out_path, "output file (json) or directory (csv)");
  run->add_option("--format", format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
  run->add_option("--jobs", jobs, "worker threads for sweeps")->check(CLI::PositiveNumber);
  run->add_option("--tol", tols, "tolerance override name=value (repeatable)");

  std::string figure;
  auto* repro = app.add_subcommand("reproduce", "emit the data behind a figure");
  repro->add_option("figure", figure, "figure id (see list-figures)")->required();
  repro->add_option("--out", repro_dir, "output directory")->default_val("nhtopo_out");
  repro->add_option("--jobs", jobs, "worker threads for sweeps")->check(CLI::PositiveNumber);

  auto* validate = app.add_subcommand("validate-config", "check a config file against the schema");
  validate->add_option("--config", config_path, "config file (JSON)")->required();

  auto* models = app.add_subcommand("list-models", "list model families");
  auto* figures = app.add_subcommand("list-figures", "list reproducible figures");
  auto* tasks = app.add_subcommand("list-tasks", "list run tasks");
  auto* schema = app.add_subcommand("schema", "print the config JSON schema");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (*models) {
      for (const auto& name : nhtopo::model_names()) {
        const auto m = nhtopo::model_by_name(name);
        std::cout << name << "  dim=" << m.dim() << "  params=";
        for (std::size_t i = 0; i < m.labels().size(); ++i) std::cout << (i ? "," : "") << m.labels()[i];
        std::cout << '\n';
      }
      return 0;
    }
    if (*figures) {
      for (const auto& [id, desc] : nhtopo::figure_catalog()) std::cout << id << "  " << desc << '\n';
      return 0;
    }
    if (*tasks) {
      for (const auto& [id, desc] : nhtopo::task_catalog()) std::cout << id << "  " << desc << '\n';
      return 0;
    }
    if (*schema) {
      std::cout << nhtopo::config_schema().dump(2) << '\n';
      return 0;
    }
    if (*validate) {
      const nhtopo::RunConfig cfg = nhtopo::parse_config(load_config(config_path));
      std::cout << "ok: task " << cfg.task << '\n';
      return 0;
    }
    if (*run) {
      json doc = load_config(config_path);
      const auto overrides = parse_tols(tols);
      if (!overrides.empty()) {
        if (!doc.is_object()) throw nhtopo::Error(nhtopo::ErrorKind::BadInput, "configuration must be a JSON object");
        for (const auto& [k, v] : overrides) doc["tolerances"][k] = v;
      }
      nhtopo::RunConfig cfg = nhtopo::parse_config(doc);
      if (!out_path.empty()) cfg.out = out_path;
      if (!format.empty()) cfg.format = format;
      log(2, "task " + cfg.task + " with " + std::to_string(jobs) + " job(s)");
      const nhtopo::TaskOutput result = nhtopo::run_task(cfg, jobs);
      emit(nhtopo::envelope(cfg.body, result), result.tables, cfg.out, cfg.format);
      return 0;
    }
    if (*repro) {
      log(2, "reproducing figure " + figure);
      const nhtopo::TaskOutput result = nhtopo::reproduce_figure(figure, jobs);
      const json env = nhtopo::envelope(json{{"figure", figure}}, result);
      const fs::path dir(repro_dir);
      for (const auto& t : result.tables) write_file(dir / (figure + "_" + t.name + ".csv"), nhtopo::to_csv(t));
      write_file(dir / (figure + "_summary.json"), env.dump(2) + "\n");
      log(1, "wrote " + std::to_string(result.tables.size()) + " series to " + dir.string());
      std::cout << env["payload"].dump(2) << '\n';
      return 0;
    }
  } catch (const nhtopo::Error& e) {
    std::cerr << "nhtopo: error [" << nhtopo::to_string(e.kind()) << "]: " << e.what() << '\n';
    return nhtopo::exit_code(e.kind());
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "nhtopo: error [BadInput]: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "nhtopo: error [Internal]: " << e.what() << '\n';
    return 3;
  }
  return 0;
}
