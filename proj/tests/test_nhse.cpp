#include <doctest.h>

#include "nhtopo/errors.hpp"
#include "nhtopo/nhse.hpp"
#include "support.hpp"

using namespace nhtopo;

namespace {

std::vector<Complex> as_vec(const ComplexVector& v) { return {v.data(), v.data() + v.size()}; }

// Hermitian chain similar to the open nonreciprocal chain, diagonalized directly.
std::vector<Complex> similar_chain(const SshParams& p, int n_cells) {
  const int n = 2 * n_cells;
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(n, n);
  const double intra = std::sqrt((p.t1 - p.gamma / 2) * (p.t1 + p.gamma / 2));
  for (int c = 0; c < n_cells; ++c) {
    h(2 * c, 2 * c + 1) = h(2 * c + 1, 2 * c) = intra;
    if (c + 1 < n_cells) h(2 * c + 1, 2 * c + 2) = h(2 * c + 2, 2 * c + 1) = p.t2;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h);
  std::vector<Complex> out;
  for (int i = 0; i < n; ++i) out.emplace_back(es.eigenvalues()(i), 0.0);
  return out;
}

}  // namespace

TEST_CASE("open chain spectrum matches the similar Hermitian chain") {
  for (const SshParams p : {SshParams{1, 0.5, 4.0 / 3}, SshParams{1, 0.9, 0.6}, SshParams{1, 1.2, 1.0}}) {
    const auto want = similar_chain(p, 20);
    CHECK(oracle::set_distance(as_vec(obc_eigenvalues(p, 20)), want) < 1e-8);
    CHECK(oracle::set_distance(as_vec(similar_hermitian_eigenvalues(p, 20)), want) < 1e-10);
  }
}

TEST_CASE("GBZ radius closed form") {
  const GbzCircle c = gbz_radius(1.0, 4.0 / 3.0, 64);
  CHECK(c.r == doctest::Approx(std::sqrt((1 - 2.0 / 3) / (1 + 2.0 / 3))));
  CHECK(c.samples.size() == 64);
  for (const auto& b : c.samples) CHECK(std::abs(b) == doctest::Approx(c.r));
  CHECK(gbz_radius(1.0, 0.0).r == doctest::Approx(1.0));
  CHECK_THROWS_AS(gbz_radius(1.0, -2.0), Error);
}

TEST_CASE("Bloch spectrum: E^2 = h01 h10 on the zone") {
  const SshParams p{1, 0.3, 0.8};
  const PbcSpectrum s = pbc_spectrum(p, 128);
  REQUIRE(s.bands.size() == 2);
  for (std::size_t i = 0; i < s.k.size(); i += 9) {
    const Complex k = s.k[i];
    const Complex prod = (p.t1 + p.gamma / 2 + p.t2 * std::exp(Complex(0, -1) * k)) *
                         (p.t1 - p.gamma / 2 + p.t2 * std::exp(Complex(0, 1) * k));
    for (int b = 0; b < 2; ++b) CHECK(std::abs(s.bands[b][i] * s.bands[b][i] - prod) < 1e-10);
  }
  // the smallest |E| on a fine grid
  double gap = 1e300;
  for (int i = 0; i < 4096; ++i) {
    const double k = -oracle::pi + 2 * oracle::pi * i / 4096;
    const Complex prod = (p.t1 + p.gamma / 2 + p.t2 * std::exp(Complex(0, -k))) *
                         (p.t1 - p.gamma / 2 + p.t2 * std::exp(Complex(0, k)));
    gap = std::min(gap, std::sqrt(std::abs(prod)));
  }
  CHECK(pbc_gap(p, 4096) == doctest::Approx(gap).epsilon(1e-12));
}

TEST_CASE("Hausdorff distance against brute force") {
  std::mt19937 rng(1);
  std::normal_distribution<double> g;
  std::vector<Complex> a, b;
  for (int i = 0; i < 40; ++i) a.emplace_back(g(rng), g(rng));
  for (int i = 0; i < 25; ++i) b.emplace_back(g(rng), g(rng));
  CHECK(hausdorff(a, b) == doctest::Approx(oracle::set_distance(a, b)));
  CHECK(hausdorff(a, a) == 0.0);
}

TEST_CASE("skin modes pile up on the left with the GBZ decay rate") {
  const SshParams p{1, 0.5, 4.0 / 3};
  const OpenChainSpectrum spec = obc_spectrum(p, 60);
  const SkinProfile prof = skin_profile(spec);
  CHECK(prof.left_fraction == 1.0);
  const double want = std::log(1 / gbz_radius(p.t1, p.gamma).r);
  int fitted = 0;
  for (const auto& m : prof.modes) {
    if (m.extended) continue;
    ++fitted;
    CHECK(m.kappa == doctest::Approx(want).epsilon(0.05));
  }
  CHECK(fitted > 100);
}

TEST_CASE("Hermitian chain: no skin effect, OBC fills the PBC bands") {
  const SshParams p{1, 0.5, 0.0};
  CHECK_FALSE(nhse_predicate(p).nhse);
  CHECK(obc_pbc_distance(p, 60) < 0.05);
  const SkinProfile prof = skin_profile(obc_spectrum(p, 40));
  CHECK(prof.left_fraction == doctest::Approx(0.5).epsilon(0.1));
}

TEST_CASE("nonreciprocal chain with a point gap shows the skin effect") {
  const SshParams p{1, 0.2, 4.0 / 3};
  const NhseVerdict v = nhse_predicate(p);
  CHECK(v.nhse);
  CHECK(v.winding != 0);
  REQUIRE(v.witness.has_value());
  CHECK(obc_pbc_distance(p, 60) > 0.05);
}

TEST_CASE("biorthogonal IPR of an extended mode is small") {
  const OpenChainSpectrum spec = obc_spectrum(SshParams{1, 0.5, 4.0 / 3}, 40);
  const auto bulk = bulk_eigenvalues(spec);
  CHECK(bulk.size() >= 70);
  for (int m = 0; m < 80; m += 7) CHECK(biorthogonal_ipr(spec, m) > 0);
}

TEST_CASE("zero-mode scan finds the transition of the similar chain") {
  // t1' = sqrt(t1^2 - g^2/4) = sqrt(5)/3
  const TransitionScan s = zero_mode_scan(1.0, 4.0 / 3, 60, 0.6, 0.95, 71);
  CHECK(std::abs(s.transition - std::sqrt(5.0) / 3) <= 1.0 / 60);
  CHECK(s.zero_modes.front() == 0);
  CHECK(s.zero_modes.back() == 2);
}
