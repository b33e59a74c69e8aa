#include <doctest.h>

#include "nhtopo/errors.hpp"
#include "nhtopo/tasks.hpp"

using namespace nhtopo;

namespace {

ErrorKind kind_of(const json& doc) {
  try {
    run_task(parse_config(doc));
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("no error raised");
  return ErrorKind::BadInput;
}

json h2_loop(const char* task, double im_center, int cycles = 1) {
  return json{{"task", task},
              {"model", {{"name", "h2"}}},
              {"path",
               {{"kind", "circle"}, {"label", "z"}, {"center", {{"re", 0}, {"im", im_center}}}, {"radius", 0.8},
                {"cycles", cycles}}}};
}

}  // namespace

TEST_CASE("winding task") {
  json doc = h2_loop("winding", 2.0);
  doc["options"] = {{"reference", {{"re", 0}, {"im", 2}}}};
  const TaskOutput out = run_task(parse_config(doc));
  CHECK(out.summary["ewn"] == -1);
  CHECK(out.summary["det_winding"] == 1);
  CHECK(run_task(parse_config(h2_loop("winding", 0.0))).summary["ewn"] == 0);
}

TEST_CASE("berry task") {
  const TaskOutput out = run_task(parse_config(h2_loop("berry", 2.0, 2)));
  CHECK(out.summary["theta"].get<double>() == doctest::Approx(3.14159265).epsilon(1e-6));
  CHECK(out.summary["vwn"].get<double>() == doctest::Approx(0.5).epsilon(1e-6));
}

TEST_CASE("validation errors") {
  json unknown = h2_loop("berry", 2.0);
  unknown["path"]["colour"] = 1;
  CHECK(kind_of(unknown) == ErrorKind::BadInput);
  json top = h2_loop("berry", 2.0);
  top["extra"] = true;
  CHECK(kind_of(top) == ErrorKind::BadInput);
  CHECK(kind_of(json{{"task", "dance"}}) == ErrorKind::BadInput);
  json badmodel = h2_loop("berry", 2.0);
  badmodel["model"]["name"] = "h9";
  CHECK(kind_of(badmodel) == ErrorKind::BadInput);
  json badtol = h2_loop("berry", 2.0);
  badtol["tolerances"] = {{"speed", 1.0}};
  CHECK(kind_of(badtol) == ErrorKind::BadInput);
  json badfmt = h2_loop("berry", 2.0);
  badfmt["output"] = {{"format", "xml"}};
  CHECK(kind_of(badfmt) == ErrorKind::BadInput);
  CHECK(kind_of(json::array()) == ErrorKind::BadInput);
  CHECK(kind_of(json{{"task", "ssh-spectra"}, {"model", {{"name", "h2"}}}}) == ErrorKind::BadInput);
}

TEST_CASE("numerical failure is typed") {
  json through = h2_loop("braid", 1.0);
  through["path"]["radius"] = 1.0;
  through["path"]["steps"] = 64;
  const ErrorKind k = kind_of(through);
  CHECK(k == ErrorKind::PathHitsEP);
  CHECK(exit_code(k) == 3);
  CHECK(exit_code(ErrorKind::BadInput) == 2);
  CHECK(exit_code(ErrorKind::UnknownFigure) == 2);
}

TEST_CASE("envelope is deterministic") {
  const RunConfig cfg = parse_config(h2_loop("braid", 2.0, 2));
  const std::string a = envelope(cfg.body, run_task(cfg)).dump();
  const std::string b = envelope(cfg.body, run_task(cfg, 2)).dump();
  CHECK(a == b);
  const json env = json::parse(a);
  CHECK(env["version"] == kArtifactVersion);
  CHECK(env["payload"]["word"] == "s1^-1 s1^-1");
  CHECK(env.contains("notes"));
}

TEST_CASE("sweep results do not depend on the worker count") {
  const json doc{{"task", "nhse-sweep"}, {"options", {{"t2", {0.3, 1.4}}, {"gamma", {0.0, 1.0}}, {"n_cells", 30}}}};
  const RunConfig cfg = parse_config(doc);
  CHECK(envelope(cfg.body, run_task(cfg, 1)).dump() == envelope(cfg.body, run_task(cfg, 3)).dump());
}

TEST_CASE("csv and complex json") {
  Table t;
  t.name = "x";
  t.columns = {"a", "b"};
  t.add({1.0, 0.5});
  CHECK(to_csv(t) == "a,b\n1,0.5\n");
  CHECK_THROWS_AS(t.add({1.0}), Error);
  const json c = complex_json(Complex(1.5, -2));
  CHECK(c["re"] == 1.5);
  CHECK(c["im"] == -2);
  CHECK(complex_from_json(c, "c") == Complex(1.5, -2));
  CHECK(complex_from_json(json(3.0), "c") == Complex(3.0, 0));
  CHECK_THROWS_AS(complex_from_json(json("x"), "c"), Error);
}

TEST_CASE("catalogues and schema") {
  CHECK(figure_catalog().size() == 18);
  CHECK_THROWS_AS(reproduce_figure("0x"), Error);
  const json s = config_schema();
  CHECK(s["additionalProperties"] == false);
  for (const auto& [name, desc] : task_catalog()) CHECK(s["x-task-options"].contains(name));
  CHECK(tolerance_names().size() == 8);
}
