#include "cvtf/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <string>

#include "cvtf/channels.hpp"
#include "cvtf/error.hpp"
#include "cvtf/fidelity.hpp"

namespace cvtf {

namespace {

constexpr double kWeightSlack = 1e-12;

std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

double uniform01(std::uint64_t& state) {
  // 53 random bits in (0, 1].
  return (static_cast<double>(splitmix64(state) >> 11) + 1.0) * 0x1.0p-53;
}

struct Atom {
  Vertex vertex;  // first == -2 marks the start point
  Eigen::VectorXd point;
  double alpha;
};

bool lex_less(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    if (a(i) != b(i)) return a(i) < b(i);
  }
  return false;
}

// Clips roundoff negatives so the spectrum constructors accept the point.
Eigen::VectorXd cleaned(const Eigen::VectorXd& p) {
  Eigen::VectorXd q = p.cwiseMax(0.0);
  return q / q.sum();
}

SchmidtSpectrum as_spectrum(const Eigen::VectorXd& p) {
  return SchmidtSpectrum::make(std::vector<double>(p.data(), p.data() + p.size()));
}

BipartiteSpectrum as_grid(const Eigen::VectorXd& p, int M) {
  RMatrix g(M + 1, M + 1);
  for (int m = 0; m <= M; ++m)
    for (int n = 0; n <= M; ++n) g(m, n) = p(m * (M + 1) + n);
  return BipartiteSpectrum::make(std::move(g));
}

struct Multistart {
  FrankWolfeRun best;
  int agreeing;
};

Multistart multistart(const RMatrix& Q, const PolytopeSpec& spec, const MinimizeOptions& opts) {
  const int starts = std::max(1, opts.starts);
  std::vector<FrankWolfeRun> runs(static_cast<std::size_t>(starts));
  auto run_one = [&](int i) {
    const auto x0 = random_feasible_point(spec, opts.seed, static_cast<std::uint64_t>(i));
    return run_frank_wolfe(Q, spec, x0, opts);
  };
  if (opts.parallel) {
    std::vector<std::future<FrankWolfeRun>> futures;
    futures.reserve(runs.size());
    for (int i = 0; i < starts; ++i) futures.push_back(std::async(std::launch::async, run_one, i));
    for (int i = 0; i < starts; ++i) runs[static_cast<std::size_t>(i)] = futures[static_cast<std::size_t>(i)].get();
  } else {
    for (int i = 0; i < starts; ++i) runs[static_cast<std::size_t>(i)] = run_one(i);
  }

  std::size_t best = 0;
  for (std::size_t i = 1; i < runs.size(); ++i) {
    if (runs[i].value < runs[best].value ||
        (runs[i].value == runs[best].value && lex_less(runs[i].point, runs[best].point))) {
      best = i;
    }
  }
  int agreeing = 0;
  for (const auto& r : runs) {
    if ((r.point - runs[best].point).cwiseAbs().maxCoeff() <= opts.consensus_tol) ++agreeing;
  }
  return {runs[best], agreeing};
}

}  // namespace

void PolytopeSpec::validate() const {
  if (M < 0 || M > kMaxTruncation) throw Error(ErrorKind::InvalidArgument, "M must lie in [0, 64]");
  if (!(energy_cap >= 0.0) || !std::isfinite(energy_cap)) {
    throw Error(ErrorKind::Infeasible, "energy cap must be finite and non-negative");
  }
}

Eigen::VectorXd Vertex::dense(int size) const {
  Eigen::VectorXd v = Eigen::VectorXd::Zero(size);
  v(first) = weight_first;
  if (second >= 0) v(second) = 1.0 - weight_first;
  return v;
}

Vertex lp_vertex_oracle(const Eigen::VectorXd& gradient, const PolytopeSpec& spec) {
  spec.validate();
  const int size = spec.size();
  if (gradient.size() != size) {
    throw Error(ErrorKind::DimensionMismatch, "gradient size does not match the polytope");
  }
  const double cap = spec.energy_cap;
  std::optional<Vertex> best;
  double best_value = std::numeric_limits<double>::infinity();

  for (int i = 0; i < size; ++i) {
    if (spec.weight(i) <= cap + kWeightSlack && gradient(i) < best_value) {
      best_value = gradient(i);
      best = Vertex{i};
    }
  }
  for (int i = 0; i < size; ++i) {
    const double wi = spec.weight(i);
    if (wi >= cap) continue;
    for (int j = 0; j < size; ++j) {
      const double wj = spec.weight(j);
      if (wj <= cap) continue;
      const double lam = (wj - cap) / (wj - wi);
      const double value = lam * gradient(i) + (1.0 - lam) * gradient(j);
      if (value < best_value) {
        best_value = value;
        best = Vertex{i, j, lam};
      }
    }
  }
  if (!best) throw Error(ErrorKind::Infeasible, "polytope has no vertex");
  return *best;
}

Eigen::VectorXd random_feasible_point(const PolytopeSpec& spec, std::uint64_t seed,
                                      std::uint64_t stream) {
  spec.validate();
  std::uint64_t state = seed ^ (0xD1B54A32D192ED03ULL * (stream + 1));
  const int size = spec.size();
  Eigen::VectorXd p(size);
  for (int i = 0; i < size; ++i) p(i) = -std::log(uniform01(state));
  p /= p.sum();
  double energy = 0.0;
  for (int i = 0; i < size; ++i) energy += spec.weight(i) * p(i);
  if (energy > spec.energy_cap) {
    const double t = spec.energy_cap / energy;
    p *= t;
    p(0) += 1.0 - t;
  }
  return p;
}

FrankWolfeRun run_frank_wolfe(const RMatrix& Q, const PolytopeSpec& spec,
                              const Eigen::VectorXd& start, const MinimizeOptions& opts) {
  spec.validate();
  const int size = spec.size();
  if (Q.rows() != size || Q.cols() != size || start.size() != size) {
    throw Error(ErrorKind::DimensionMismatch, "objective and start must match the polytope");
  }

  std::vector<Atom> atoms{{Vertex{-2}, start, 1.0}};
  Eigen::VectorXd x = start;
  FrankWolfeRun run{x, x.dot(Q * x), std::numeric_limits<double>::infinity(), 0, false, {}};

  for (int it = 0; it < opts.max_iterations; ++it) {
    const Eigen::VectorXd grad = 2.0 * (Q * x);
    const Vertex v = lp_vertex_oracle(grad, spec);
    const Eigen::VectorXd s = v.dense(size);
    const double fw_gap = grad.dot(x - s);
    run.gap = fw_gap;
    if (fw_gap <= opts.gap_tol) {
      run.converged = true;
      break;
    }

    std::size_t away = 0;
    double away_gap = -std::numeric_limits<double>::infinity();
    if (opts.away_steps) {
      for (std::size_t a = 0; a < atoms.size(); ++a) {
        const double g = grad.dot(atoms[a].point - x);
        if (g > away_gap) {
          away_gap = g;
          away = a;
        }
      }
    }

    const bool use_away = opts.away_steps && away_gap > fw_gap && atoms[away].alpha < 1.0;
    Eigen::VectorXd d;
    double gamma_max;
    if (use_away) {
      d = x - atoms[away].point;
      gamma_max = atoms[away].alpha / (1.0 - atoms[away].alpha);
    } else {
      d = s - x;
      gamma_max = 1.0;
    }

    // f(x + g d) = f(x) + 2 g x'Qd + g^2 d'Qd
    const Eigen::VectorXd qd = Q * d;
    const double slope = x.dot(qd);
    const double curvature = d.dot(qd);
    double gamma;
    if (curvature > 0.0) {
      gamma = std::clamp(-slope / curvature, 0.0, gamma_max);
    } else {
      gamma = slope < 0.0 ? gamma_max : 0.0;
    }

    if (use_away) {
      for (auto& atom : atoms) atom.alpha *= (1.0 + gamma);
      atoms[away].alpha -= gamma;
      if (gamma >= gamma_max) atoms.erase(atoms.begin() + static_cast<std::ptrdiff_t>(away));
      x += gamma * d;
    } else if (gamma >= 1.0) {
      atoms.assign(1, Atom{v, s, 1.0});
      x = s;
    } else {
      for (auto& atom : atoms) atom.alpha *= (1.0 - gamma);
      auto found = std::find_if(atoms.begin(), atoms.end(),
                                [&](const Atom& a) { return a.vertex == v; });
      if (found != atoms.end()) {
        found->alpha += gamma;
      } else if (gamma > 0.0) {
        atoms.push_back(Atom{v, s, gamma});
      }
      x += gamma * d;
    }
    std::erase_if(atoms, [](const Atom& a) { return a.alpha <= 0.0; });

    run.iterations = it + 1;
    run.history.push_back(x.dot(Q * x));
  }
  run.point = x;
  run.value = x.dot(Q * x);
  return run;
}

RMatrix uni_quadratic_form(int M, double xi) {
  const auto params = ChannelParams::from_xi(xi);
  return params.eta() * overlap_matrix(M, xi);
}

RMatrix bi_quadratic_form(int M, double xi, double xi_prime) {
  const auto pa = ChannelParams::from_xi(xi);
  const auto pb = ChannelParams::from_xi(xi_prime);
  const RMatrix ta = overlap_matrix(M, xi);
  const RMatrix tb = overlap_matrix(M, xi_prime);
  const int d = M + 1;
  RMatrix q(d * d, d * d);
  for (int m = 0; m < d; ++m)
    for (int n = 0; n < d; ++n)
      for (int mp = 0; mp < d; ++mp)
        for (int np = 0; np < d; ++np) q(m * d + n, mp * d + np) = ta(m, mp) * tb(n, np);
  return pa.eta() * pb.eta() * q;
}

MinimizeResult minimize_uni(const PolytopeSpec& spec, double xi, const MinimizeOptions& opts) {
  if (spec.mode != PolytopeMode::Uni) throw Error(ErrorKind::InvalidArgument, "expected a Uni polytope");
  spec.validate();
  const auto ms = multistart(uni_quadratic_form(spec.M, xi), spec, opts);
  const auto p = cleaned(ms.best.point);
  auto spectrum = as_spectrum(p);
  const double value = exact_uni_fidelity(spectrum, xi);
  return {std::move(spectrum), p, value, ms.best.iterations, ms.best.converged, ms.agreeing,
          ms.best.gap, ms.best.history};
}

MinimizeResult minimize_bi(const PolytopeSpec& spec, double xi, double xi_prime,
                           const MinimizeOptions& opts) {
  if (spec.mode != PolytopeMode::Bi) throw Error(ErrorKind::InvalidArgument, "expected a Bi polytope");
  spec.validate();
  const auto ms = multistart(bi_quadratic_form(spec.M, xi, xi_prime), spec, opts);
  const auto p = cleaned(ms.best.point);
  auto grid = as_grid(p, spec.M);
  const double value = exact_bi_fidelity(grid, xi, xi_prime);
  return {std::move(grid), p, value, ms.best.iterations, ms.best.converged, ms.agreeing,
          ms.best.gap, ms.best.history};
}

MinimizeResult grid_oracle(const PolytopeSpec& spec, double xi, std::optional<double> xi_prime,
                           double step, double budget) {
  spec.validate();
  if (!(step > 0.0)) throw Error(ErrorKind::InvalidArgument, "step must be positive");
  const bool bi = spec.mode == PolytopeMode::Bi;
  if (bi && !xi_prime) throw Error(ErrorKind::InvalidArgument, "Bi grid search needs xi'");
  const RMatrix Q = bi ? bi_quadratic_form(spec.M, xi, *xi_prime) : uni_quadratic_form(spec.M, xi);
  const int size = spec.size();
  const int units = static_cast<int>(std::floor(1.0 / step + 1e-9));

  // Lattice size C(units + size - 1, size - 1).
  const double count =
      std::exp(std::lgamma(units + size) - std::lgamma(size) - std::lgamma(units + 1.0));
  if (count > budget * (1.0 + 1e-9)) {
    throw Error(ErrorKind::BudgetExceeded,
                "lattice has ~" + std::to_string(count) + " points, budget " + std::to_string(budget));
  }

  Eigen::VectorXd best = Eigen::VectorXd::Zero(size);
  best(0) = 1.0;
  double best_value = best.dot(Q * best);
  long long evaluated = 1;

  if (units > 0) {
    std::vector<int> counts(static_cast<std::size_t>(size), 0);
    Eigen::VectorXd p(size);
    // Enumerate compositions of `units` into `size` parts, last part implied.
    auto visit = [&](auto&& self, int index, int remaining) -> void {
      if (index == size - 1) {
        counts[static_cast<std::size_t>(index)] = remaining;
        double energy = 0.0;
        for (int i = 0; i < size; ++i) {
          p(i) = static_cast<double>(counts[static_cast<std::size_t>(i)]) / units;
          energy += spec.weight(i) * p(i);
        }
        if (energy > spec.energy_cap) {
          const double t = spec.energy_cap / energy;
          p *= t;
          p(0) += 1.0 - t;
        }
        const double value = p.dot(Q * p);
        ++evaluated;
        if (value < best_value) {
          best_value = value;
          best = p;
        }
        return;
      }
      for (int c = remaining; c >= 0; --c) {
        counts[static_cast<std::size_t>(index)] = c;
        self(self, index + 1, remaining - c);
      }
    };
    visit(visit, 0, units);
  }

  const auto p = cleaned(best);
  MinimizeResult result{SchmidtSpectrum::make({1.0}), p, 0.0, static_cast<int>(evaluated), true, 1,
                        0.0, {}};
  if (bi) {
    auto grid = as_grid(p, spec.M);
    result.value = exact_bi_fidelity(grid, xi, *xi_prime);
    result.minimizer = std::move(grid);
  } else {
    auto spectrum = as_spectrum(p);
    result.value = exact_uni_fidelity(spectrum, xi);
    result.minimizer = std::move(spectrum);
  }
  return result;
}

}  // namespace cvtf
