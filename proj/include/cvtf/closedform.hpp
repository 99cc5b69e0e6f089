#pragma once

// Closed-form optimal inputs and fidelities for the identity and SWAP
// channels against additive-noise approximations, their validity regimes, the
// truncation sandwich bounds, and the sub-multiplicativity gap.

#include <optional>
#include <variant>

#include "cvtf/fock.hpp"

namespace cvtf {

enum class RegimeClause { UniSmallE, BiEqualNoise, BiAsymNoise };

const char* to_string(RegimeClause clause) noexcept;

struct RegimeVerdict {
  bool valid;
  double bound;  // threshold on E (uni) or 2E (bi)
  RegimeClause clause;
  // BiAsymNoise only: the two thresholds whose minimum is `bound`.
  double energy_bound = 0.0;
  double noise_bound = 0.0;
};

enum class SolutionSource { ClosedForm, Numerical };

struct OptimalSolution {
  std::variant<SchmidtSpectrum, BipartiteSpectrum> spectrum;
  double fidelity;
  RegimeVerdict regime;
  std::optional<double> p_split;
  // false at xi = 0, where every input is optimal and the state returned is
  // only the canonical representative.
  bool unique = true;
  SolutionSource source = SolutionSource::ClosedForm;
};

struct FidelityBounds {
  double lower;
  double upper;
  int M;
  bool lower_floored = false;
};

inline constexpr double kRegimeSlack = 1e-12;

// Regimes (boundaries inclusive):
//   uni:      E  <= (1+xi)/(1+3xi)
//   bi-equal: 2E <= (1+xi)/(2+3xi)
//   bi-asym:  xi' >= 1 and 2E <= min{(xi'^2-1)/(xi'(3xi'-1)), (1+xi)/(2xi)}
RegimeVerdict uni_regime(double E, double xi);
RegimeVerdict bi_equal_regime(double E, double xi);
RegimeVerdict bi_asym_regime(double E, double xi, double xi_prime);

/// (1/(1+xi)) [1 - 2 s E + 2 s^2 E^2], s = xi/(1+xi). No regime check.
double uni_closed_form(double E, double xi);
/// (1/(1+xi)^2) [1 - 4 s E + 6 s^2 E^2]. No regime check.
double bi_equal_closed_form(double E, double xi);

/// Optimal input {1-E, E} and its fidelity. Throws RegimeViolation.
OptimalSolution optimal_uni(double E, double xi);
/// Optimal grid {p00 = 1-2E, p01 = p10 = E}. Throws RegimeViolation.
OptimalSolution optimal_bi_equal(double E, double xi);

struct AsymSplit {
  double p_split;  // weight on |1,0>
  int branch;      // 1, 2 or 3
};

/// Three-branch weight p_E on |1,0> (branches tested in order).
AsymSplit asym_split(double E, double xi, double xi_prime);

/// Grid {p00 = 1-2E, p01 = 2E - p_E, p10 = p_E}; fidelity from exact_bi_fidelity.
/// Throws RegimeViolation.
OptimalSolution optimal_bi_asym(double E, double xi, double xi_prime);

/// Branch value of the asymmetric fidelity written via the quadratic
/// c + b p + a p^2 in p = p_{1,0} on the face {m + n <= 1}, times eta*eta'.
/// Branches 1 and 2 evaluate the face at p = 0 and p = 2E; branch 3 returns
/// the face minimum (4ac - b^2)/(4a).
double asym_branch_fidelity(double E, double xi, double xi_prime);

/// Exact minimizer of the bidirectional fidelity restricted to the face
/// {p00 = 1-2E, p01 + p10 = 2E}: p10 = clamp(-b/(2a), 0, 2E).
/// Throws RegimeViolation outside the asymmetric regime.
OptimalSolution bi_face_minimizer(double E, double xi, double xi_prime);

FidelityBounds sandwich_uni(double E, double xi, int M);
/// Upper bound from optimal_bi_equal when xi == xi', else optimal_bi_asym.
FidelityBounds sandwich_bi(double E, double xi, double xi_prime, int M);

/// optimal_uni(E, xi)^2 - optimal_bi_equal(E, xi). Throws RegimeViolation.
double submult_gap(double E, double xi);

}  // namespace cvtf
