#include "doctest.h"

#include <cmath>

#include "cvtf/error.hpp"
#include "cvtf/fock.hpp"
#include "gen.hpp"

using namespace cvtf;

namespace {

ErrorKind kind_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("no error thrown");
  return ErrorKind::InvalidArgument;
}

}  // namespace

TEST_CASE("schmidt spectrum validation") {
  auto vac = SchmidtSpectrum::make({1.0});
  CHECK(vac.truncation() == 0);
  CHECK(vac[0] == 1.0);

  auto half = SchmidtSpectrum::make({0.5, 0.5});
  CHECK(half.truncation() == 1);

  CHECK(kind_of([] { SchmidtSpectrum::make({0.5, 0.6}); }) == ErrorKind::NotNormalized);
  CHECK(kind_of([] { SchmidtSpectrum::make({1.2, -0.2}); }) == ErrorKind::NegativeEntry);
  CHECK(kind_of([] { SchmidtSpectrum::make({}); }) == ErrorKind::InvalidArgument);
  CHECK(kind_of([] { SchmidtSpectrum::make({NAN, 1.0}); }) == ErrorKind::InvalidArgument);
  CHECK(kind_of([] { SchmidtSpectrum::make(std::vector<double>(66, 1.0 / 66)); }) ==
        ErrorKind::InvalidArgument);

  // tiny drift gets renormalized
  auto drift = SchmidtSpectrum::make({0.5, 0.5 + 1e-10});
  CHECK(std::abs(drift[0] + drift[1] - 1.0) < 1e-15);
}

TEST_CASE("bipartite spectrum validation") {
  RMatrix g = RMatrix::Zero(2, 2);
  g(0, 0) = 1.0;
  CHECK(BipartiteSpectrum::make(g).truncation() == 1);
  CHECK(kind_of([] { BipartiteSpectrum::make(RMatrix::Constant(2, 3, 1.0 / 6)); }) ==
        ErrorKind::InvalidArgument);
  g(0, 0) = 0.9;
  CHECK(kind_of([&] { BipartiteSpectrum::make(g); }) == ErrorKind::NotNormalized);
}

TEST_CASE("mean photon numbers") {
  CHECK(mean_photon(SchmidtSpectrum::make({1.0})) == 0.0);
  CHECK(mean_photon(SchmidtSpectrum::make({0.5, 0.5})) == doctest::Approx(0.5));
  CHECK(mean_photon(SchmidtSpectrum::make({0.2, 0.0, 0.8})) == doctest::Approx(1.6));

  RMatrix g = RMatrix::Zero(2, 2);
  g(0, 0) = 1.0;
  CHECK(mean_total_photon(BipartiteSpectrum::make(g)) == 0.0);
  g << 0.0, 0.5, 0.5, 0.0;
  CHECK(mean_total_photon(BipartiteSpectrum::make(g)) == doctest::Approx(1.0));
  g << 0.6, 0.2, 0.2, 0.0;
  CHECK(mean_total_photon(BipartiteSpectrum::make(g)) == doctest::Approx(0.4));
}

TEST_CASE("reduced density is diag(p)") {
  auto r = reduced_density(SchmidtSpectrum::make({0.7, 0.3}));
  CHECK(r.entries()(0, 0).real() == doctest::Approx(0.7));
  CHECK(r.entries()(1, 1).real() == doctest::Approx(0.3));
  CHECK(std::abs(r.entries()(0, 1)) == 0.0);

  gen::Rng rng(11);
  for (int c = 0; c < 100; ++c) {
    const auto s = gen::spectrum(rng, 8);
    const auto rho = reduced_density(s);
    for (int n = 0; n < s.dim(); ++n) CHECK(rho.entries()(n, n).real() == s[n]);
    CHECK(rho.trace() == doctest::Approx(1.0).epsilon(1e-14));
  }
}

TEST_CASE("density matrix validation") {
  CMatrix m = CMatrix::Zero(2, 2);
  m(0, 0) = 1.0;
  CHECK_NOTHROW(DensityMatrix{m});
  m(0, 1) = 0.3;
  CHECK_THROWS_AS(DensityMatrix{m}, Error);  // not hermitian
  CMatrix low = CMatrix::Zero(2, 2);
  low(0, 0) = 0.99;
  CHECK_THROWS_AS(DensityMatrix{low}, Error);
  CHECK_NOTHROW(DensityMatrix(low, 0.02));
  CMatrix neg = CMatrix::Zero(2, 2);
  neg(0, 0) = 1.5;
  neg(1, 1) = -0.5;
  CHECK_THROWS_AS(DensityMatrix{neg}, Error);
}

TEST_CASE("pure state vectors") {
  auto v = pure_state_vector(SchmidtSpectrum::make({1.0}), 2);
  CHECK(v.size() == 4);
  CHECK(v(0).real() == 1.0);
  CHECK(v.norm() == doctest::Approx(1.0));

  auto h = pure_state_vector(SchmidtSpectrum::make({0.5, 0.5}), 2);
  CHECK(h(0).real() == doctest::Approx(std::sqrt(0.5)));
  CHECK(h(3).real() == doctest::Approx(std::sqrt(0.5)));
  CHECK(std::abs(h(1)) == 0.0);

  RMatrix g = RMatrix::Zero(2, 2);
  g << 0.8, 0.1, 0.1, 0.0;
  auto b = pure_state_vector(BipartiteSpectrum::make(g), 2);
  CHECK(b.size() == 16);
  // |m,n>_R |m,n>_AB with index ((m d + n) d + m) d + n
  CHECK(b(0).real() == doctest::Approx(std::sqrt(0.8)));
  CHECK(b(5).real() == doctest::Approx(std::sqrt(0.1)));   // m=0, n=1
  CHECK(b(10).real() == doctest::Approx(std::sqrt(0.1)));  // m=1, n=0
  CHECK(b.norm() == doctest::Approx(1.0));

  CHECK_THROWS_AS(pure_state_vector(SchmidtSpectrum::make({0.5, 0.5}), 1), Error);
}

TEST_CASE("json round trip") {
  gen::Rng rng(12);
  for (int c = 0; c < 50; ++c) {
    const auto s = gen::spectrum(rng, 10);
    CHECK(schmidt_from_json(to_json(s)) == s);
    const auto g = gen::grid(rng, 4);
    CHECK(bipartite_from_json(to_json(g)) == g);
    // also through text
    CHECK(schmidt_from_json(nlohmann::json::parse(to_json(s).dump())) == s);
  }
  CHECK_THROWS_AS(schmidt_from_json(nlohmann::json{{"p", 1}}), Error);
  CHECK_THROWS_AS(bipartite_from_json(nlohmann::json::parse("[[1.0, 0.0]]")), Error);
}

TEST_CASE("energy budget") {
  CHECK(EnergyBudget(0.3).value() == 0.3);
  CHECK_THROWS_AS(EnergyBudget{-0.1}, Error);
  CHECK_THROWS_AS(EnergyBudget{INFINITY}, Error);
}
