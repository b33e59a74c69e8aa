#include <doctest.h>

#include "nhtopo/errors.hpp"
#include "nhtopo/symmetry.hpp"
#include "nhtopo/winding.hpp"
#include "support.hpp"

using namespace nhtopo;

namespace {

const ParametricModel kH2 = h2_model();
const ParamPoint kBase = kH2.point({0.0, 1.0});

ParamPath z_circle(Complex center, double r, int cycles = 1, int orientation = 1, int steps = 256) {
  return circle_path(kBase, "z", center, r, steps, cycles, orientation);
}

// Winding of det(H - E_r) from dense samples, counted with ray crossings.
int det_winding_oracle(const ParametricModel& m, const ParamPath& path, Complex e_ref, int samples = 4000) {
  std::vector<Complex> loop;
  for (int i = 0; i < samples; ++i) {
    const double u = path.u_end() * i / samples;
    const ComplexMatrix h = m(path.at(u));
    loop.push_back((h - e_ref * ComplexMatrix::Identity(h.rows(), h.cols())).determinant());
  }
  return oracle::ray_crossings(loop, 0.0);
}

}  // namespace

TEST_CASE("permutation helpers") {
  const Permutation a{1, 0, 2}, b{0, 2, 1};
  CHECK(cycle_notation(a) == "(1 2)");
  CHECK(cycle_notation({0, 1, 2}) == "()");
  CHECK(cycle_notation(compose(a, b)) != cycle_notation(compose(b, a)));
  CHECK(generated_group_order({a, b}) == 6);
  CHECK(generated_group_order({a}) == 2);
  CHECK(generated_group_order({{1, 2, 0}}) == 3);
  CHECK(perm_cycles({1, 0, 2}).size() == 2);
}

TEST_CASE("accumulated phase of exp(i n 2 pi u)") {
  for (int n : {-3, -1, 0, 2, 5}) {
    const double ph = accumulated_phase([&](double u) { return std::exp(Complex(0, 2 * oracle::pi * n * u)); }, 0, 1, 8,
                                        1e-12, ErrorKind::ReferenceOnSpectrum);
    CHECK(ph == doctest::Approx(2 * oracle::pi * n).epsilon(1e-12));
  }
  CHECK_THROWS_AS(accumulated_phase([](double u) { return Complex(u - 0.5, 0); }, 0, 1, 4, 1e-12,
                                    ErrorKind::ReferenceOnSpectrum),
                  Error);
}

TEST_CASE("det winding matches a dense ray-crossing count") {
  struct Case {
    Complex center;
    double r;
    Complex e_ref;
  };
  for (const Case& c : {Case{Complex(0, 2), 0.8, Complex(0, 1)}, Case{0.0, 0.8, Complex(0, 1)},
                        Case{Complex(0, 2), 1.5, Complex(0.5, 0.2)}, Case{Complex(1, 1), 3.0, Complex(0, 1)}}) {
    const ParamPath p = z_circle(c.center, c.r);
    CHECK(eigenvalue_winding(kH2, p, c.e_ref) == det_winding_oracle(kH2, p, c.e_ref));
  }
}

TEST_CASE("winding integrality and refinement stability") {
  for (int steps : {32, 64, 256, 1024}) {
    const ParamPath p = z_circle(Complex(0, 2), 0.8, 1, 1, steps);
    const double raw = eigenvalue_winding_raw(kH2, p, Complex(0, 1));
    CHECK(std::abs(raw - std::round(raw)) < 1e-9);
    CHECK(eigenvalue_winding(kH2, p, Complex(0, 1)) == 1);
    CHECK(vorticity_winding(kH2, p) == -1);
  }
}

TEST_CASE("vorticity winding: zero away from EPs, -1 per order-2 EP, sign follows orientation") {
  CHECK(vorticity_winding(kH2, z_circle(0.0, 0.8)) == 0);
  CHECK(vorticity_winding(kH2, z_circle(Complex(0, 2), 0.8)) == -1);
  CHECK(vorticity_winding(kH2, z_circle(Complex(0, 2), 0.8, 1, -1)) == 1);
  CHECK(vorticity_winding(kH2, z_circle(Complex(0, -2), 0.8)) == -1);
  CHECK(vorticity_winding(kH2, z_circle(0.0, 3.0)) == -2);
}

TEST_CASE("tracking around an order-2 EP swaps the bands; twice restores them") {
  const BandTrajectories one = track_bands(kH2, z_circle(Complex(0, 2), 0.8));
  CHECK(cycle_notation(one.permutation) == "(1 2)");
  const BandTrajectories two = track_bands(kH2, z_circle(Complex(0, 2), 0.8, 2));
  CHECK(cycle_notation(two.permutation) == "()");
  // energies at every sample are the eigenvalues there
  for (std::size_t l = 0; l < one.samples(); l += 17) {
    const ComplexVector e = eigenvalues(kH2(one.path.at(one.u[l])));
    CHECK(oracle::set_distance({e(0), e(1)}, {one.energies[l](0), one.energies[l](1)}) < 1e-10);
  }
  // consecutive samples move by less than the gap
  for (std::size_t l = 0; l + 1 < one.samples(); ++l) {
    const double gap = std::abs(one.energies[l](0) - one.energies[l](1));
    for (int b = 0; b < 2; ++b) CHECK(std::abs(one.energies[l + 1](b) - one.energies[l](b)) < gap);
  }
  // -1/2 per traversal
  CHECK(vorticity(two, 0, 1) == doctest::Approx(-1.0).epsilon(1e-9));
}

TEST_CASE("path through the EP is reported") {
  CHECK_THROWS_AS(track_bands(kH2, z_circle(Complex(0, 1), 1.0, 1, 1, 64)), Error);
}

TEST_CASE("Berry phase: pi after two cycles around the order-2 EP, zero on a trivial loop") {
  const BerryResult b = wilson_loop(kH2, z_circle(Complex(0, 2), 1.0, 2));
  CHECK(b.theta == doctest::Approx(oracle::pi).epsilon(1e-6));
  CHECK(b.vwn == doctest::Approx(0.5).epsilon(1e-6));
  CHECK(b.unitarity_error < 1e-8);
  const BerryResult rev = wilson_loop(kH2, z_circle(Complex(0, 2), 1.0, 2, -1));
  CHECK(rev.theta == doctest::Approx(-oracle::pi).epsilon(1e-6));
  const BerryResult triv = wilson_loop(kH2, z_circle(Complex(3, 0), 0.5));
  CHECK(std::abs(triv.theta) < 1e-8);
}

TEST_CASE("Wilson loop is gauge invariant") {
  const BandTrajectories traj = track_bands(kH2, z_circle(Complex(0, 2), 1.0, 2, 1, 128));
  const BerryResult ref = wilson_loop(traj);
  std::mt19937 rng(42);
  std::uniform_real_distribution<double> ph(-oracle::pi, oracle::pi), mag(0.2, 5.0);
  for (int trial = 0; trial < 5; ++trial) {
    BandTrajectories g = traj;
    // interior samples get random complex rescalings c R, L / c; the closing sample keeps
    // its permuted copy of sample 0
    for (std::size_t l = 1; l + 1 < g.samples(); ++l) {
      for (int b = 0; b < g.n_bands; ++b) {
        const Complex c = std::polar(mag(rng), ph(rng));
        g.right[l].col(b) *= c;
        g.left[l].col(b) /= c;
      }
    }
    const BerryResult r = wilson_loop(g);
    CHECK(std::abs(r.theta - ref.theta) <= 1e-8);
    CHECK(std::abs(r.det_phase - ref.det_phase) <= 1e-8);
    for (int b = 0; b < g.n_bands; ++b) CHECK(std::abs(r.band_phases[b] - ref.band_phases[b]) <= 1e-8);
  }
}

TEST_CASE("single band phase needs a closed band") {
  const BandTrajectories one = track_bands(kH2, z_circle(Complex(0, 2), 1.0));
  CHECK_THROWS_AS(single_band_phase(one, 0), Error);
  const double raw = single_band_raw_phase(track_bands(kH2, z_circle(Complex(0, 2), 1.0, 2)), 0);
  CHECK(std::abs(std::abs(raw) - oracle::pi) < 1e-6);
}

TEST_CASE("braids") {
  // two disjoint loops: no crossings
  CHECK(braid_word(track_bands(kH2, z_circle(0.0, 0.8))).generators.empty());
  const BraidWord w = braid_word(track_bands(kH2, z_circle(Complex(0, 2), 1.0)));
  CHECK(w.to_string() == "s1^-1");
  CHECK(w.components.size() == 1);
  const BraidWord w2 = braid_word(track_bands(kH2, z_circle(Complex(0, 2), 1.0, 2)));
  CHECK(w2.generators == std::vector<int>{-1, -1});
  REQUIRE(w2.components.size() == 2);
  CHECK(std::abs(w2.linking(0, 1)) == 1);
  CHECK(w2.linking(0, 1) == w2.crossing_linking(0, 1));
  // reversing the loop inverts the word
  const BraidWord rev = braid_word(track_bands(kH2, z_circle(Complex(0, 2), 1.0, 2, -1)));
  CHECK(rev.generators == std::vector<int>{1, 1});
}

TEST_CASE("one-band loops: polar winding equals det winding") {
  std::mt19937 rng(2024);
  std::uniform_real_distribution<double> u(-1, 1);
  for (int trial = 0; trial < 10; ++trial) {
    const Complex a(u(rng), u(rng)), b(u(rng), u(rng)), c(0.3 * u(rng), 0.3 * u(rng));
    const int n = 1 + trial % 3;
    const ParametricModel one("one_band", 1, {"s"}, [=](const std::vector<Complex>& x) {
      ComplexMatrix h(1, 1);
      h(0, 0) = a + b * std::pow(x[0], n) + c * std::pow(x[0], -1);
      return h;
    });
    const ParamPath p = circle_path(one.point({1.0}), "s", 0.0, 1.0, 512);
    std::vector<Complex> loop;
    for (const auto& q : p.points()) loop.push_back(one(q)(0, 0));
    const Complex ref(0.1 * u(rng), 0.1 * u(rng));
    CHECK(polar_winding(loop, ref) == oracle::ray_crossings(loop, ref));
    CHECK(polar_winding(loop, ref) == eigenvalue_winding(one, p, ref));
  }
}
