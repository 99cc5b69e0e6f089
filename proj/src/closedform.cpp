#include "cvtf/closedform.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <string>

#include "cvtf/channels.hpp"
#include "cvtf/error.hpp"
#include "cvtf/fidelity.hpp"

namespace cvtf {

namespace {

std::string fmt5(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.5f", v);
  return buf;
}

void check_inputs(double E, double xi) {
  if (!(E >= 0.0) || !std::isfinite(E)) throw Error(ErrorKind::InvalidArgument, "E must be >= 0");
  ChannelParams::from_xi(xi);
}

[[noreturn]] void regime_violation(const RegimeVerdict& v, double value, const char* what) {
  std::string msg = std::string(what) + " = " + fmt5(value) + " exceeds threshold " + fmt5(v.bound);
  if (v.clause == RegimeClause::BiAsymNoise) {
    msg += " (energy bound " + fmt5(v.energy_bound) + ", noise bound " + fmt5(v.noise_bound) + ")";
  }
  throw Error(ErrorKind::RegimeViolation, msg);
}

BipartiteSpectrum face_grid(double E, double p10) {
  if (p10 < -1e-12 || p10 > 2.0 * E + 1e-12) {
    throw Error(ErrorKind::OutOfRange, "split weight " + fmt5(p10) + " outside [0, 2E]");
  }
  p10 = std::clamp(p10, 0.0, 2.0 * E);
  RMatrix g = RMatrix::Zero(2, 2);
  g(0, 0) = 1.0 - 2.0 * E;
  g(0, 1) = std::max(0.0, 2.0 * E - p10);
  g(1, 0) = p10;
  return BipartiteSpectrum::make(std::move(g));
}

// Face quadratic c + b p + a p^2 (without the eta*eta' prefactor).
struct FaceQuadratic {
  double a, b, c;
};

FaceQuadratic face_quadratic(double E, double xi, double xp) {
  const double ga = (1.0 + xi) * (1.0 + xp);
  FaceQuadratic q{};
  q.a = 2.0 * (xp - xi) * (xp - xi) / (ga * ga) + 2.0 * xi * xp / ga;
  q.b = 2.0 * (xp - xi) / ga +
        4.0 * xp * (xi * (1.0 - xp) - 2.0 * xp) * E / ((1.0 + xi) * (1.0 + xp) * (1.0 + xp));
  q.c = 1.0 - 4.0 * xp * E / (1.0 + xp) + 8.0 * (xp * E) * (xp * E) / ((1.0 + xp) * (1.0 + xp));
  return q;
}

}  // namespace

const char* to_string(RegimeClause clause) noexcept {
  switch (clause) {
    case RegimeClause::UniSmallE: return "uni_small_E";
    case RegimeClause::BiEqualNoise: return "bi_equal_noise";
    case RegimeClause::BiAsymNoise: return "bi_asym_noise";
  }
  return "unknown";
}

RegimeVerdict uni_regime(double E, double xi) {
  check_inputs(E, xi);
  const double bound = (1.0 + xi) / (1.0 + 3.0 * xi);
  return {E <= bound + kRegimeSlack, bound, RegimeClause::UniSmallE};
}

RegimeVerdict bi_equal_regime(double E, double xi) {
  check_inputs(E, xi);
  const double bound = (1.0 + xi) / (2.0 + 3.0 * xi);
  return {2.0 * E <= bound + kRegimeSlack, bound, RegimeClause::BiEqualNoise};
}

RegimeVerdict bi_asym_regime(double E, double xi, double xi_prime) {
  check_inputs(E, xi);
  ChannelParams::from_xi(xi_prime);
  const double energy_bound =
      (xi_prime * xi_prime - 1.0) / (xi_prime * (3.0 * xi_prime - 1.0));
  const double noise_bound =
      xi > 0.0 ? (1.0 + xi) / (2.0 * xi) : std::numeric_limits<double>::infinity();
  const double bound = std::min(energy_bound, noise_bound);
  const bool valid = xi_prime >= 1.0 && 2.0 * E <= bound + kRegimeSlack;
  return {valid, bound, RegimeClause::BiAsymNoise, energy_bound, noise_bound};
}

double uni_closed_form(double E, double xi) {
  const double s = xi / (1.0 + xi);
  return (1.0 - 2.0 * s * E + 2.0 * s * s * E * E) / (1.0 + xi);
}

double bi_equal_closed_form(double E, double xi) {
  const double s = xi / (1.0 + xi);
  return (1.0 - 4.0 * s * E + 6.0 * s * s * E * E) / ((1.0 + xi) * (1.0 + xi));
}

OptimalSolution optimal_uni(double E, double xi) {
  const auto regime = uni_regime(E, xi);
  if (!regime.valid) regime_violation(regime, E, "E");
  const double e = std::min(E, 1.0);
  auto spectrum = E == 0.0 ? SchmidtSpectrum::make({1.0}) : SchmidtSpectrum::make({1.0 - e, e});
  return {std::move(spectrum), uni_closed_form(E, xi), regime, std::nullopt, xi > 0.0,
          SolutionSource::ClosedForm};
}

OptimalSolution optimal_bi_equal(double E, double xi) {
  const auto regime = bi_equal_regime(E, xi);
  if (!regime.valid) regime_violation(regime, 2.0 * E, "2E");
  RMatrix g = RMatrix::Zero(2, 2);
  g(0, 0) = 1.0 - 2.0 * E;
  g(0, 1) = E;
  g(1, 0) = E;
  return {BipartiteSpectrum::make(std::move(g)), bi_equal_closed_form(E, xi), regime,
          std::nullopt, xi > 0.0, SolutionSource::ClosedForm};
}

AsymSplit asym_split(double E, double xi, double xp) {
  const double e2 = 2.0 * E;
  const double t1 = (xi - xp) * (1.0 + xp) / (xp * xp * (1.0 + xi));
  if (e2 < t1) return {0.0, 1};
  const double t2 = (xp - xi) * (1.0 + xi) * (1.0 + xp) /
                    (xi * xi * (1.0 + xp) * (1.0 + xp) + (xi - xp) * (xi - xp));
  if (e2 < t2) return {e2, 2};
  const double num = (xi - xp) * (1.0 + xi) * (1.0 + xp) + e2 * xp * xp * (1.0 + xi) * (1.0 + xi);
  const double den = 2.0 * ((xi - xp) * (xi - xp) + xi * xp * (1.0 + xi) * (1.0 + xp));
  return {num / den, 3};
}

OptimalSolution optimal_bi_asym(double E, double xi, double xi_prime) {
  const auto regime = bi_asym_regime(E, xi, xi_prime);
  if (!regime.valid) {
    if (xi_prime < 1.0) {
      throw Error(ErrorKind::RegimeViolation,
                  "xi' = " + fmt5(xi_prime) + " below 1 (energy bound " + fmt5(regime.energy_bound) +
                      ", noise bound " + fmt5(regime.noise_bound) + ")");
    }
    regime_violation(regime, 2.0 * E, "2E");
  }
  const auto split = asym_split(E, xi, xi_prime);
  auto grid = face_grid(E, split.p_split);
  const double fidelity = exact_bi_fidelity(grid, xi, xi_prime);
  return {std::move(grid), fidelity, regime, split.p_split, !(xi == 0.0 && xi_prime == 0.0),
          SolutionSource::ClosedForm};
}

double asym_branch_fidelity(double E, double xi, double xi_prime) {
  const auto split = asym_split(E, xi, xi_prime);
  const auto q = face_quadratic(E, xi, xi_prime);
  const double prefactor = 1.0 / ((1.0 + xi) * (1.0 + xi_prime));
  switch (split.branch) {
    case 1: return prefactor * q.c;
    case 2: return prefactor * (q.c + q.b * 2.0 * E + q.a * 4.0 * E * E);
    default: return prefactor * (4.0 * q.a * q.c - q.b * q.b) / (4.0 * q.a);
  }
}

OptimalSolution bi_face_minimizer(double E, double xi, double xi_prime) {
  const auto regime = bi_asym_regime(E, xi, xi_prime);
  if (!regime.valid) regime_violation(regime, 2.0 * E, "2E");
  const auto q = face_quadratic(E, xi, xi_prime);
  const double p = q.a > 0.0 ? std::clamp(-q.b / (2.0 * q.a), 0.0, 2.0 * E) : E;
  auto grid = face_grid(E, p);
  const double fidelity = exact_bi_fidelity(grid, xi, xi_prime);
  return {std::move(grid), fidelity, regime, p, q.a > 0.0, SolutionSource::ClosedForm};
}

namespace {

FidelityBounds make_bounds(double upper, double bracket, int M) {
  if (M < 0) throw Error(ErrorKind::InvalidArgument, "M must be >= 0");
  const double root = bracket + std::sqrt(std::max(0.0, 1.0 - upper));
  double lower = 1.0 - root * root;
  FidelityBounds b{lower, upper, M, false};
  if (lower < 0.0) {
    b.lower = 0.0;
    b.lower_floored = true;
  }
  return b;
}

}  // namespace

FidelityBounds sandwich_uni(double E, double xi, int M) {
  const double upper = optimal_uni(E, xi).fidelity;
  return make_bounds(upper, 2.0 * std::sqrt(E / (M + 1.0)), M);
}

FidelityBounds sandwich_bi(double E, double xi, double xi_prime, int M) {
  const double upper =
      xi == xi_prime ? optimal_bi_equal(E, xi).fidelity : optimal_bi_asym(E, xi, xi_prime).fidelity;
  const double shrink = 1.0 - 2.0 * E / (M + 1.0);
  return make_bounds(upper, 2.0 * std::sqrt(std::max(0.0, 1.0 - shrink * shrink)), M);
}

double submult_gap(double E, double xi) {
  const auto bi = optimal_bi_equal(E, xi);
  const auto uni = optimal_uni(E, xi);
  return uni.fidelity * uni.fidelity - bi.fidelity;
}

}  // namespace cvtf
