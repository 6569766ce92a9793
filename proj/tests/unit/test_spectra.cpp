#include <doctest.h>

#include <sstream>

#include "../oracles.hpp"
#include "tasep/errors.hpp"
#include "tasep/spectra.hpp"

using namespace tasep;

namespace {

Complex oracle_gap(int L, int na, int nb) {
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(
      oracle::brute_generator(oracle::sector_strings(L, na, nb)).cast<Complex>());
  Complex best(1e300, 0.0);
  for (int i = 0; i < es.eigenvalues().size(); ++i) {
    Complex v = es.eigenvalues()[i];
    if (v.real() <= 1e-10) continue;
    if (v.real() < best.real() - 1e-9 || (std::abs(v.real() - best.real()) <= 1e-9 && v.imag() > best.imag()))
      best = v;
  }
  return best;
}

}  // namespace

TEST_SUITE("spectra") {

TEST_CASE("steady state present") {
  auto r = dense_spectrum(build_hamiltonian_tasep(Sector{3, 1, 1, {}}));
  CHECK(r.zero_count == 1);
  CHECK(std::abs(r.eigenvalues.front()) < 1e-12);
}

TEST_CASE("two-site full space") {
  auto r = dense_spectrum(build_hamiltonian_tasep(2));
  REQUIRE(r.eigenvalues.size() == 9);
  for (int i = 0; i < 6; ++i) CHECK(std::abs(r.eigenvalues[i]) < 1e-12);
  for (int i = 6; i < 9; ++i) CHECK(std::abs(r.eigenvalues[i] - 2.0) < 1e-12);
  CHECK(r.zero_count == 6);
}

TEST_CASE("six-site equal-density sector") {
  auto r = dense_spectrum(build_hamiltonian_tasep(Sector{6, 2, 2, {}}));
  REQUIRE(r.eigenvalues.size() == 90);
  CHECK(r.zero_count == 1);
  for (std::size_t i = 1; i < r.eigenvalues.size(); ++i) CHECK(r.eigenvalues[i].real() > 1e-10);
  REQUIRE(r.gap);
  Complex ref = oracle_gap(6, 2, 2);
  CHECK(std::abs(*r.gap - ref) < 1e-10);
  CHECK(r.gap->imag() > 0.0);
}

TEST_CASE("smallest gap over all sectors") {
  // one mobile particle among an inert background relaxes like a single walker
  auto equal = *krylov_gap(build_hamiltonian_tasep(Sector{9, 3, 3, {}}), 1).gap;
  auto single = *dense_spectrum(build_hamiltonian_tasep(Sector{9, 4, 4, {}})).gap;
  const double pi = std::acos(-1.0);
  CHECK(std::abs(single.real() - (1.0 - std::cos(2.0 * pi / 9.0))) <= 1e-10);
  CHECK(single.real() < equal.real());
  MESSAGE("L=9 gap (4,4) " << single.real() << " below (3,3) " << equal.real());
}

TEST_CASE("frozen sector has no gap") {
  auto r = dense_spectrum(build_hamiltonian_tasep(Sector{3, 3, 0, {}}));
  CHECK_FALSE(r.gap.has_value());
  CHECK(r.zero_count == 1);
}

TEST_CASE("gap selection") {
  std::vector<Complex> v{{0.0, 0.0}, {0.5, -0.3}, {0.5, 0.3}, {0.7, 0.0}};
  CHECK(*select_gap(v) == Complex(0.5, 0.3));
  CHECK(*select_gap({{1.0, 0.0}, {0.2, 0.0}}) == Complex(0.2, 0.0));
  CHECK_FALSE(select_gap({{0.0, 0.0}, {1e-12, 0.0}}).has_value());

  std::vector<Complex> s{{1.0, 1.0}, {0.0, 0.0}, {1.0, -1.0}, {0.5, 2.0}};
  sort_spectrum(s);
  CHECK(s == std::vector<Complex>{{0.0, 0.0}, {0.5, 2.0}, {1.0, -1.0}, {1.0, 1.0}});
}

TEST_CASE("krylov agrees with dense") {
  for (int L : {6, 9}) {
    auto g = build_hamiltonian_tasep(Sector{L, L / 3, L / 3, {}});
    auto d = dense_spectrum(g);
    auto k1 = krylov_gap(g, 1);
    auto k2 = krylov_gap(g, 987654321);
    REQUIRE(k1.gap);
    REQUIRE(k2.gap);
    CHECK(std::abs(*k1.gap - *d.gap) <= 1e-10);
    CHECK(std::abs(*k1.gap - *k2.gap) <= 1e-10);
    CHECK(k1.method == SpectrumMethod::Krylov);
    CHECK(k1.steady_state_deflated);
    CHECK(k1.max_residual <= 1e-10);
  }
}

TEST_CASE("dense limit") {
  DenseOptions opt;
  opt.dense_limit = 50;
  CHECK_THROWS_AS(dense_spectrum(build_hamiltonian_tasep(Sector{6, 2, 2, {}}), opt), DomainError);
}

TEST_CASE("spectrum text") {
  std::ostringstream out;
  write_spectrum_text(out, {{0.5, -0.25}, {2.0, 0.0}});
  CHECK(out.str() == "0.5 -0.25\n2 0\n");
}

}
