#include "doctest.h"

#include <cmath>

#include "cvtf/channels.hpp"
#include "cvtf/error.hpp"
#include "gen.hpp"

using namespace cvtf;

namespace {

CMatrix ket_bra(int d, int i, int j) {
  CMatrix m = CMatrix::Zero(d, d);
  m(i, j) = 1.0;
  return m;
}

double mean_n(const CMatrix& rho) {
  double s = 0.0;
  for (int n = 0; n < rho.rows(); ++n) s += n * rho(n, n).real();
  return s;
}

double min_eig(const CMatrix& m) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(0.5 * (m + m.adjoint()));
  return es.eigenvalues().minCoeff();
}

}  // namespace

TEST_CASE("binomial") {
  CHECK(binomial(0, 0) == 1.0);
  CHECK(binomial(5, 2) == 10.0);
  CHECK(binomial(30, 15) == 155117520.0);
  CHECK(binomial(4, 5) == 0.0);
  // lgamma branch continues Pascal's rule
  for (int n = 31; n < 60; ++n)
    for (int k = 1; k < n; ++k)
      CHECK(binomial(n, k) == doctest::Approx(binomial(n - 1, k - 1) + binomial(n - 1, k)).epsilon(1e-11));
}

TEST_CASE("channel params") {
  const auto p = ChannelParams::from_xi(0.25);
  CHECK(p.eta() == doctest::Approx(0.8));
  CHECK(p.gain() == doctest::Approx(1.25));
  CHECK(ChannelParams::from_xi(0.0).eta() == 1.0);
  CHECK_THROWS_AS(ChannelParams::from_xi(-0.1), Error);
  CHECK_THROWS_AS(ChannelParams::from_xi(NAN), Error);
}

TEST_CASE("pure loss examples") {
  const auto vac = apply_pure_loss(ket_bra(3, 0, 0), 0.3, 3);
  CHECK(vac(0, 0).real() == 1.0);
  CHECK(vac.cwiseAbs().sum() == doctest::Approx(1.0));

  const auto one = apply_pure_loss(ket_bra(2, 1, 1), 0.8, 2);
  CHECK(one(1, 1).real() == doctest::Approx(0.8));
  CHECK(one(0, 0).real() == doctest::Approx(0.2));

  const auto coh = apply_pure_loss(ket_bra(3, 2, 0), 0.9, 3);
  CHECK(coh(2, 0).real() == doctest::Approx(0.9));
  CHECK(coh.cwiseAbs().sum() == doctest::Approx(0.9));

  CHECK_THROWS_AS(apply_pure_loss(ket_bra(3, 0, 0), 0.5, 2), Error);
  CHECK_THROWS_AS(apply_pure_loss(ket_bra(2, 0, 0), 1.5, 2), Error);
}

TEST_CASE("amplifier examples") {
  const auto id = apply_amplifier(ket_bra(2, 1, 0), 1.0, 2);
  CHECK(id(1, 0).real() == 1.0);
  CHECK(id.cwiseAbs().sum() == 1.0);

  // vacuum goes to a thermal state with mean G - 1
  const int d = required_output_dim(0, 0.5);
  const auto th = apply_amplifier(ket_bra(1, 0, 0), 1.5, d);
  for (int n = 0; n < 10; ++n)
    CHECK(th(n, n).real() == doctest::Approx(std::pow(1.0 / 3.0, n) * 2.0 / 3.0));

  CHECK_THROWS_AS(apply_amplifier(ket_bra(3, 0, 0), 1.5, 2), Error);
  CHECK_THROWS_AS(apply_amplifier(ket_bra(1, 0, 0), 0.5, 4), Error);
  try {
    apply_amplifier(ket_bra(2, 1, 1), 3.0, 4);
    FAIL("expected ToleranceUnreachable");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::ToleranceUnreachable);
  }
}

TEST_CASE("additive noise examples") {
  CMatrix rho = ket_bra(3, 1, 1) * 0.5 + ket_bra(3, 0, 0) * 0.5;
  rho(0, 1) = rho(1, 0) = 0.5;
  const auto same = apply_additive_noise(rho, ChannelParams::from_xi(0.0), 3);
  CHECK((same - rho).norm() == 0.0);

  const auto p = ChannelParams::from_xi(0.5);
  const auto out = apply_additive_noise(ket_bra(1, 0, 0), p, required_output_dim(0, 0.5));
  CHECK(out(0, 0).real() == doctest::Approx(2.0 / 3.0));
  CHECK(out.imag().cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("trace preservation and positivity") {
  gen::Rng r(21);
  for (int c = 0; c < 60; ++c) {
    const int d = r.integer(1, 6);
    const double xi = gen::noise(r);
    const auto p = ChannelParams::from_xi(xi);
    const CMatrix rho = gen::density(r, d);
    const int D = required_output_dim(d - 1, xi);

    const auto lossy = apply_pure_loss(rho, p.eta(), d);
    CHECK(lossy.trace().real() == doctest::Approx(1.0).epsilon(1e-13));
    CHECK(min_eig(lossy) > -1e-13);

    const auto out = apply_additive_noise(DensityMatrix(rho), p, D);  // validates too
    CHECK(out.trace() <= 1.0 + 1e-13);
    CHECK(out.trace() >= 1.0 - 2e-12);
    CHECK(min_eig(out.entries()) > -1e-13);

    // photon number: loss scales by eta, additive noise adds xi
    CHECK(mean_n(lossy) == doctest::Approx(p.eta() * mean_n(rho)).epsilon(1e-12));
    CHECK(mean_n(out.entries()) == doctest::Approx(mean_n(rho) + xi).epsilon(1e-8));
  }
}

TEST_CASE("linearity and hermiticity preservation") {
  gen::Rng r(22);
  for (int c = 0; c < 40; ++c) {
    const int d = r.integer(1, 5);
    const double xi = gen::noise(r);
    const auto p = ChannelParams::from_xi(xi);
    const int D = required_output_dim(d - 1, xi);
    const CMatrix x = gen::op(r, d), y = gen::op(r, d);
    const std::complex<double> a{r.uniform(-1, 1), r.uniform(-1, 1)};
    const CMatrix lhs = apply_additive_noise(CMatrix(a * x + y), p, D);
    const CMatrix rhs = a * apply_additive_noise(x, p, D) + apply_additive_noise(y, p, D);
    CHECK((lhs - rhs).norm() < 1e-12);

    const CMatrix h = x + x.adjoint();
    const CMatrix out = apply_additive_noise(h, p, D);
    CHECK((out - out.adjoint()).norm() < 1e-13);
  }
}

TEST_CASE("loss composes multiplicatively") {
  gen::Rng r(23);
  for (int c = 0; c < 40; ++c) {
    const int d = r.integer(1, 7);
    const double a = r.uniform(0.05, 1.0), b = r.uniform(0.05, 1.0);
    const CMatrix x = gen::op(r, d);
    const CMatrix two = apply_pure_loss(apply_pure_loss(x, a, d), b, d);
    CHECK((two - apply_pure_loss(x, a * b, d)).norm() < 1e-12);
  }
}

TEST_CASE("amplifier is adjoint to loss") {
  // Tr[X A_G(Y)] = eta Tr[L_eta(X) Y] with eta = 1/G
  gen::Rng r(24);
  for (int c = 0; c < 40; ++c) {
    const int d = r.integer(1, 4);
    const double xi = r.uniform(0.01, 1.0);
    const double G = 1.0 + xi, eta = 1.0 / G;
    const int D = required_output_dim(d - 1, xi, 1e-15);
    const CMatrix y = gen::op(r, d);
    const CMatrix x = gen::op(r, D);
    const auto lhs = (x * apply_amplifier(y, G, D, 1e-15)).trace();
    const CMatrix lx = apply_pure_loss(x, eta, D).topLeftCorner(d, d);
    const auto rhs = eta * (lx * y).trace();
    CHECK(std::abs(lhs - rhs) < 1e-10 * (1.0 + std::abs(rhs)));
  }
}

TEST_CASE("overlap trace") {
  for (double xi : {0.0, 0.1, 0.7, 2.0}) {
    for (int k = 0; k < 8; ++k) {
      CHECK(overlap_trace(0, k, xi) == doctest::Approx(std::pow(1 + xi, -k)));
      CHECK(overlap_trace(1, k, xi) ==
            doctest::Approx((1.0 + k * xi * xi) / std::pow(1 + xi, k + 1)));
    }
  }
  CHECK(overlap_trace(1, 1, 0.1) == doctest::Approx(1.01 / 1.21));
  CHECK_THROWS_AS(overlap_trace(-1, 0, 0.1), Error);

  // against the loss channel directly
  for (double xi : {0.05, 0.5, 1.5}) {
    const double eta = 1.0 / (1.0 + xi);
    for (int m = 0; m <= 10; ++m) {
      for (int mp = 0; mp <= 10; ++mp) {
        const auto a = apply_pure_loss(ket_bra(11, m, mp), eta, 11);
        const auto b = apply_pure_loss(ket_bra(11, mp, m), eta, 11);
        CHECK((a * b).trace().real() == doctest::Approx(overlap_trace(m, mp, xi)).epsilon(1e-12));
      }
    }
  }

  const auto T = overlap_matrix(12, 0.3);
  CHECK((T - T.transpose()).norm() == 0.0);
  Eigen::SelfAdjointEigenSolver<RMatrix> es(T);
  CHECK(es.eigenvalues().minCoeff() > -1e-14);
}

TEST_CASE("amplifier cutoff") {
  CHECK(amplifier_cutoff(5, 1.0, 1e-12) == 0);
  int prev = 0;
  for (int n = 0; n < 10; ++n) {
    const int k = amplifier_cutoff(n, 1.2, 1e-12);
    CHECK(k >= prev);
    prev = k;
  }
  CHECK(amplifier_cutoff(0, 50.0, 1e-12, 10) == -1);
  CHECK(required_output_dim(3, 0.0) == 4);
}
