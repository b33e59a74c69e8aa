#include <doctest.h>

#include "nhtopo/ep_finder.hpp"
#include "nhtopo/errors.hpp"
#include "support.hpp"

using namespace nhtopo;

namespace {

Region z_box(double x0, double x1, double y0, double y1) {
  Region r;
  r.base = h2_model().point({0.0, 1.0});
  r.x = Axis{"z", false};
  r.y = Axis{"z", true};
  r.x0 = x0;
  r.x1 = x1;
  r.y0 = y0;
  r.y1 = y1;
  return r;
}

}  // namespace

TEST_CASE("counting discriminant zeros") {
  const ParametricModel m = h2_model();
  // disc = z^2 + 4 t^2 vanishes at +-2i t
  CHECK(count_eps(m, z_box(-1, 1, 1, 3)) == 1);
  CHECK(count_eps(m, z_box(-1, 1, -3, 3)) == 2);
  CHECK(count_eps(m, z_box(1, 2, -1, 1)) == 0);
}

TEST_CASE("locating EPs of H2 against the closed form") {
  const ParametricModel m = h2_model();
  for (double t : {1.0, 0.5, 1.7}) {
    Region r = z_box(-1, 1.3, 0.2, 4);
    r.base = m.point({0.0, t});
    const EpRecord ep = locate_ep(m, r, 1e-8);
    CHECK(std::abs(ep.location.get("z") - Complex(0, 2 * t)) < 1e-6);
    CHECK(std::abs(ep.energy - Complex(0, t)) < 1e-4);
    CHECK(ep.order == 2);
    CHECK_FALSE(ep.diabolic);
  }
  const auto both = locate_eps(m, z_box(-1, 1.3, -3, 3.1), 1e-8);
  REQUIRE(both.size() == 2);
  CHECK(std::abs(both[0].location.get("z") - Complex(0, -2)) < 1e-6);
  CHECK(std::abs(both[1].location.get("z") - Complex(0, 2)) < 1e-6);
  CHECK_THROWS_AS(locate_ep(m, z_box(1, 2, -1, 1)), Error);
}

TEST_CASE("H3 has an order-3 EP at the origin") {
  const ParametricModel m = h3_model();
  const ParamPoint origin = m.point({0.0, 0.0});
  // characteristic polynomial at the origin is E^3
  const auto roots = oracle::poly_roots(oracle::charpoly3(m(origin)));
  for (const auto& r : roots) CHECK(std::abs(r) < 1e-4);
  const OrderProbe p = ep_order(m, origin, Axis{"xi", false}, Axis{"xi", true}, 1e-2);
  CHECK(p.order == 3);
  CHECK(p.cycle_length == 3);
}

TEST_CASE("diabolic point is not an EP") {
  ComplexMatrix d = ComplexMatrix::Zero(2, 2);
  const ParametricModel m("diag", 2, {"s"}, [](const std::vector<Complex>& x) {
    ComplexMatrix h = ComplexMatrix::Zero(2, 2);
    h(0, 0) = x[0];
    h(1, 1) = -x[0];
    return h;
  });
  const OrderProbe p = ep_order(m, m.point({0.0}), Axis{"s", false}, Axis{"s", true}, 1e-2);
  CHECK(p.diabolic);
  CHECK(p.order == 1);
}

TEST_CASE("splitting exponent near the H2 EP") {
  const ParametricModel m = h2_model();
  const EpRecord ep = locate_ep(m, z_box(-1, 1.3, 0.2, 4), 1e-10);
  const ExponentFit f = critical_exponent(m, ep, "z", 1.0, 1e-6, 1e-2, Observable::Splitting, 9);
  CHECK(f.slope == doctest::Approx(0.5).epsilon(0.04));
  CHECK(f.r_squared > 0.99);
  // splitting is 2 sqrt(|delta z|) to leading order
  for (std::size_t i = 0; i < f.deltas.size(); ++i) {
    CHECK(f.values[i] == doctest::Approx(2 * std::sqrt(f.deltas[i])).epsilon(0.05));
  }
}

TEST_CASE("line fit") {
  const ExponentFit f = fit_line({0, 1, 2, 3}, {1, 3, 5, 7});
  CHECK(f.slope == doctest::Approx(2));
  CHECK(f.intercept == doctest::Approx(1));
  CHECK(f.r_squared == doctest::Approx(1));
}

TEST_CASE("exceptional arc stays on the discriminant zero set") {
  // H2 with complex t: disc = z^2 + 4 t^2 = 0 on z = +-2 i t, a line in (Re z, Im z, Re t)
  const ParametricModel m = h2_model();
  const std::array<Axis, 3> axes{Axis{"z", false}, Axis{"z", true}, Axis{"t", false}};
  const ParamPoint seed = m.point({Complex(0, 2), 1.0});
  const ArcTrace tr = trace_ea(m, axes, seed, 0.05, 20);
  REQUIRE(tr.points.size() >= 10);
  for (const auto& p : tr.points) {
    const Complex z = p.location.get("z"), t = p.location.get("t");
    CHECK(std::abs(z * z + 4.0 * t * t) < 1e-6);
  }
  const auto cur = ea_current(m, seed, axes);
  CHECK(std::hypot(cur[0], cur[1], cur[2]) > 0);
}
