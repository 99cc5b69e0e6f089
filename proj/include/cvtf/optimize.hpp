#pragma once

// Minimization of the twin-Fock fidelity functionals over the energy-capped
// probability simplex {p >= 0, sum p = 1, sum w_i p_i <= cap}, with w_i = n
// (Uni) or m + n (Bi, flat index i = m (M+1) + n).

#include <cstdint>
#include <optional>
#include <variant>
#include <vector>

#include "cvtf/fock.hpp"

namespace cvtf {

enum class PolytopeMode { Uni, Bi };

struct PolytopeSpec {
  int M;
  double energy_cap;  // E (Uni) or 2E (Bi)
  PolytopeMode mode;

  int size() const noexcept { return mode == PolytopeMode::Uni ? M + 1 : (M + 1) * (M + 1); }
  double weight(int i) const noexcept {
    return mode == PolytopeMode::Uni ? i : (i / (M + 1)) + (i % (M + 1));
  }
  void validate() const;
};

/// A vertex of the polytope: a single index, or a two-index mixture on the
/// energy hyperplane (weight_first on `first`, the rest on `second`).
struct Vertex {
  int first;
  int second = -1;
  double weight_first = 1.0;

  Eigen::VectorXd dense(int size) const;
  bool operator==(const Vertex&) const = default;
};

/// Exact minimizer of <gradient, p> over the polytope. Scans feasible single
/// indices, then every cap-saturating pair; ties go to the lowest index, then
/// the lowest second index. Throws Infeasible for a negative cap.
Vertex lp_vertex_oracle(const Eigen::VectorXd& gradient, const PolytopeSpec& spec);

struct MinimizeOptions {
  int max_iterations = 10000;
  double gap_tol = 1e-12;
  int starts = 20;
  std::uint64_t seed = 0xC0FFEE;
  bool away_steps = true;
  bool parallel = true;
  double consensus_tol = 1e-6;
};

/// One Frank-Wolfe run on f(p) = p^T Q p from a feasible start.
struct FrankWolfeRun {
  Eigen::VectorXd point;
  double value;
  double gap;
  int iterations;
  bool converged;
  std::vector<double> history;  // objective after each iteration
};

FrankWolfeRun run_frank_wolfe(const RMatrix& Q, const PolytopeSpec& spec,
                              const Eigen::VectorXd& start, const MinimizeOptions& opts);

/// Dirichlet-uniform point on the simplex, mixed with vacuum until the energy
/// cap holds. Deterministic in (seed, stream).
Eigen::VectorXd random_feasible_point(const PolytopeSpec& spec, std::uint64_t seed,
                                      std::uint64_t stream);

/// Quadratic forms of the two functionals: eta T_xi, and
/// eta eta' (T_xi kron T_xi').
RMatrix uni_quadratic_form(int M, double xi);
RMatrix bi_quadratic_form(int M, double xi, double xi_prime);

struct MinimizeResult {
  std::variant<SchmidtSpectrum, BipartiteSpectrum> minimizer;
  Eigen::VectorXd point;
  double value;
  int iterations;
  bool converged;
  int starts_agreeing;
  double gap;
  std::vector<double> history;  // of the winning run
};

/// Multistart minimization of exact_uni_fidelity. Non-convergence is reported
/// through `converged`, not thrown.
MinimizeResult minimize_uni(const PolytopeSpec& spec, double xi, const MinimizeOptions& opts = {});
MinimizeResult minimize_bi(const PolytopeSpec& spec, double xi, double xi_prime,
                           const MinimizeOptions& opts = {});

inline constexpr double kDefaultGridBudget = 1e7;

/// Exhaustive search over the lattice {k * step} of the simplex; points over
/// the energy cap are pulled onto it by mixing with vacuum. Throws
/// BudgetExceeded when the lattice is larger than `budget`.
MinimizeResult grid_oracle(const PolytopeSpec& spec, double xi, std::optional<double> xi_prime,
                           double step, double budget = kDefaultGridBudget);

}  // namespace cvtf
