#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>

#include "cvtf/channels.hpp"
#include "cvtf/cli.hpp"
#include "cvtf/closedform.hpp"
#include "cvtf/error.hpp"
#include "cvtf/fidelity.hpp"
#include "cvtf/optimize.hpp"

namespace cvtf {

namespace {

struct Tolerances {
  double value = 1e-8;        // closed form vs optimizer
  double coordinate = 1e-6;   // minimizer weights
  double oracle = 1e-9;       // functional vs Kraus oracle
  double saturation = 1e-12;  // lower bound equality, gap at E = 0
  double exact = 1e-10;       // asymmetric analytic values
};

Tolerances tolerances(const VerifyOptions& o) {
  Tolerances t;
  if (o.tol) t = {*o.tol, *o.tol, *o.tol, *o.tol, *o.tol};
  return t;
}

std::string sci(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}

SubCheck at_most(std::string name, double measured, double threshold, std::string detail = {}) {
  return {std::move(name), measured <= threshold, measured, threshold, std::move(detail)};
}

std::vector<double> uni_grid_xi() { return {0.05, 0.1, 0.2, 0.5, 1.0}; }
std::vector<double> uni_grid_frac() { return {0.1, 0.3, 0.5, 0.7}; }
std::vector<double> bi_grid_xi() { return {0.05, 0.1, 0.3}; }
std::vector<double> bi_grid_frac() { return {0.1, 0.5, 0.9}; }

double uni_E(double xi, double frac) { return frac * uni_regime(0.0, xi).bound; }
double bi_E(double xi, double frac) { return frac * bi_equal_regime(0.0, xi).bound / 2.0; }

SchmidtSpectrum random_spectrum(int M, std::uint64_t seed, std::uint64_t stream) {
  const auto p = random_feasible_point({M, static_cast<double>(M), PolytopeMode::Uni}, seed, stream);
  return SchmidtSpectrum::make(std::vector<double>(p.data(), p.data() + p.size()));
}

BipartiteSpectrum random_grid(int M, std::uint64_t seed, std::uint64_t stream) {
  const auto p =
      random_feasible_point({M, 2.0 * M, PolytopeMode::Bi}, seed, stream);
  RMatrix g(M + 1, M + 1);
  for (int m = 0; m <= M; ++m)
    for (int n = 0; n <= M; ++n) g(m, n) = p(m * (M + 1) + n);
  return BipartiteSpectrum::make(std::move(g));
}

CriterionResult uni_closed_form_check(const VerifyOptions& o, const Tolerances& t) {
  CriterionResult r{1, "uni", "unidirectional closed form vs minimize_uni (M = 10)", {}, 0, 10.0};
  double worst_value = 0.0, worst_coord = 0.0;
  int unconverged = 0;
  MinimizeOptions opts;
  opts.seed = o.seed;
  for (double xi : uni_grid_xi()) {
    for (double f : uni_grid_frac()) {
      const double E = uni_E(xi, f);
      const auto res = minimize_uni({10, E, PolytopeMode::Uni}, xi, opts);
      if (!res.converged) ++unconverged;
      worst_value = std::max(worst_value, std::abs(res.value - uni_closed_form(E, xi)));
      Eigen::VectorXd expect = Eigen::VectorXd::Zero(11);
      expect(0) = 1.0 - E;
      expect(1) = E;
      worst_coord = std::max(worst_coord, (res.point - expect).cwiseAbs().maxCoeff());
    }
  }
  r.checks.push_back(at_most("value", worst_value, t.value, "20 grid points"));
  r.checks.push_back(at_most("minimizer", worst_coord, t.coordinate));
  r.checks.push_back(at_most("unconverged runs", unconverged, 0));
  return r;
}

CriterionResult oracle_check(const VerifyOptions& o, const Tolerances& t) {
  CriterionResult r{2, "oracle", "functional vs Kraus-composition oracle", {}, 0, 30.0};
  double worst_uni = 0.0;
  for (int i = 0; i < 50; ++i) {
    const auto s = random_spectrum(i % 7, o.seed, static_cast<std::uint64_t>(1000 + i));
    for (double xi : {0.1, 0.5, 1.0, 2.0}) {
      worst_uni = std::max(worst_uni, std::abs(exact_uni_fidelity(s, xi) - kraus_oracle_uni(s, xi)));
    }
  }
  r.checks.push_back(at_most("uni (50 spectra x 4 xi)", worst_uni, t.oracle));

  const double xis[] = {0.1, 1.0, 2.0};
  double worst_bi = 0.0;
  for (int i = 0; i < 20; ++i) {
    const auto g = random_grid(i % 4, o.seed, static_cast<std::uint64_t>(2000 + i));
    const double xi = xis[i % 3];
    const double xp = xis[(i / 3) % 3];
    worst_bi = std::max(worst_bi, std::abs(exact_bi_fidelity(g, xi, xp) - kraus_oracle_bi(g, xi, xp)));
  }
  r.checks.push_back(at_most("bi (20 grids)", worst_bi, t.oracle));
  return r;
}

CriterionResult lower_bound_check(const VerifyOptions& o, const Tolerances& t) {
  CriterionResult r{3, "bound", "lower bound saturation", {}, 0, 0.0};
  double worst_excess = 0.0;
  for (int i = 0; i < 50; ++i) {
    const auto s = random_spectrum(i % 7, o.seed, static_cast<std::uint64_t>(1000 + i));
    for (double xi : {0.1, 0.5, 1.0, 2.0}) {
      worst_excess = std::max(worst_excess, lower_bound_uni(s, xi) - exact_uni_fidelity(s, xi));
    }
  }
  r.checks.push_back(at_most("bound <= exact (excess)", worst_excess, 1e-15));

  double worst_eq = 0.0;
  for (int i = 0; i < 20; ++i) {
    const auto s = random_spectrum(1, o.seed, static_cast<std::uint64_t>(3000 + i));
    for (double xi : {0.1, 0.5, 1.0, 2.0}) {
      worst_eq = std::max(worst_eq, std::abs(lower_bound_uni(s, xi) - exact_uni_fidelity(s, xi)));
    }
  }
  r.checks.push_back(at_most("equality on support {0,1}", worst_eq, t.saturation));

  const auto two = SchmidtSpectrum::make({0.0, 0.0, 1.0});
  const double xi = 1.0 / 9.0;
  const double gap = exact_uni_fidelity(two, xi) - lower_bound_uni(two, xi);
  r.checks.push_back({"strict gap at p_2 = 1, eta = 0.9", gap > 1e-6, gap, 1e-6,
                      "exact " + sci(exact_uni_fidelity(two, xi)) + ", bound " +
                          sci(lower_bound_uni(two, xi))});
  return r;
}

CriterionResult bi_equal_check(const VerifyOptions& o, const Tolerances& t) {
  CriterionResult r{4, "bi-equal", "bidirectional equal noise vs minimize_bi (M = 6)", {}, 0, 60.0};
  double worst_value = 0.0, worst_coord = 0.0;
  MinimizeOptions opts;
  opts.seed = o.seed;
  for (double xi : bi_grid_xi()) {
    for (double f : bi_grid_frac()) {
      const double E = bi_E(xi, f);
      const auto res = minimize_bi({6, 2.0 * E, PolytopeMode::Bi}, xi, xi, opts);
      worst_value = std::max(worst_value, std::abs(res.value - bi_equal_closed_form(E, xi)));
      Eigen::VectorXd expect = Eigen::VectorXd::Zero(49);
      expect(0) = 1.0 - 2.0 * E;
      expect(1) = E;  // (0, 1)
      expect(7) = E;  // (1, 0)
      worst_coord = std::max(worst_coord, (res.point - expect).cwiseAbs().maxCoeff());
    }
  }
  r.checks.push_back(at_most("value", worst_value, t.value, "9 grid points"));
  r.checks.push_back(at_most("minimizer support and weights", worst_coord, t.coordinate));
  return r;
}

CriterionResult bi_asym_check(const VerifyOptions& o, const Tolerances& t) {
  CriterionResult r{5, "bi-asym", "asymmetric noise", {}, 0, 0.0};
  MinimizeOptions opts;
  opts.seed = o.seed;
  {
    const double E = 0.1, xi = 0.0, xp = 2.0;
    const auto sol = optimal_bi_asym(E, xi, xp);
    const auto& grid = std::get<BipartiteSpectrum>(sol.spectrum);
    const auto num = minimize_bi({6, 2.0 * E, PolytopeMode::Bi}, xi, xp, opts);
    const auto face = bi_face_minimizer(E, xi, xp);
    r.checks.push_back(at_most("(0,2) p_E = 0.2", std::abs(*sol.p_split - 0.2), t.exact));
    r.checks.push_back(at_most("(0,2) fidelity = 1/3", std::abs(sol.fidelity - 1.0 / 3.0), t.exact));
    r.checks.push_back(at_most("(0,2) kraus oracle = 1/3",
                               std::abs(kraus_oracle_bi(grid, xi, xp) - 1.0 / 3.0), t.exact));
    r.checks.push_back(at_most("(0,2) minimize_bi = 1/3", std::abs(num.value - 1.0 / 3.0), t.value,
                               "minimize_bi " + sci(num.value) + ", face minimizer " +
                                   sci(face.fidelity)));
  }
  {
    const double E = 0.1, xi = 5.0, xp = 2.0;
    const auto split = asym_split(E, xi, xp);
    const auto sol = optimal_bi_asym(E, xi, xp);
    const auto num = minimize_bi({6, 2.0 * E, PolytopeMode::Bi}, xi, xp, opts);
    const auto face = bi_face_minimizer(E, xi, xp);
    r.checks.push_back({"(5,2) branch 1, p_E = 0", split.branch == 1 && split.p_split == 0.0,
                        static_cast<double>(split.branch), 1.0, ""});
    r.checks.push_back(at_most("(5,2) evaluator = minimize_bi", std::abs(num.value - sol.fidelity),
                               t.value,
                               "evaluator " + sci(sol.fidelity) + ", minimize_bi " +
                                   sci(num.value) + ", face minimizer " + sci(face.fidelity)));
  }
  return r;
}

CriterionResult gap_check(const VerifyOptions&, const Tolerances& t) {
  CriterionResult r{6, "gap", "sub-multiplicativity gap, xi = 0.1", {}, 0, 1.0};
  const double xi = 0.1;
  std::vector<double> delta;
  for (int k = 0; k <= 100; ++k) delta.push_back(submult_gap(k * (11.0 / 46.0) / 100.0, xi));
  r.checks.push_back(at_most("delta(0) = 0", std::abs(delta[0]), t.saturation));
  double min_positive = delta[1];
  double min_increment = delta[1] - delta[0];
  for (int k = 1; k <= 100; ++k) {
    min_positive = std::min(min_positive, delta[static_cast<std::size_t>(k)]);
    min_increment = std::min(min_increment, delta[static_cast<std::size_t>(k)] -
                                                delta[static_cast<std::size_t>(k - 1)]);
  }
  r.checks.push_back({"delta > 0 for k >= 1", min_positive > 0.0, min_positive, 0.0, ""});
  r.checks.push_back({"delta increasing", min_increment > 0.0, min_increment, 0.0, ""});
  return r;
}

CriterionResult sandwich_check(const VerifyOptions&, const Tolerances&) {
  CriterionResult r{7, "sandwich", "truncation sandwich bounds", {}, 0, 0.0};
  double worst_order = -1.0;   // max of lower - closed and closed - upper
  double worst_change = 0.0;   // |upper(M) - upper(10)|
  double worst_width = 0.0;    // upper - lower at M = 1000, E <= 0.5
  auto visit = [&](double closed, const std::function<FidelityBounds(int)>& bounds, double E) {
    const double upper10 = bounds(10).upper;
    for (int M : {10, 100, 1000}) {
      const auto b = bounds(M);
      worst_order = std::max({worst_order, b.lower - closed, closed - b.upper});
      worst_change = std::max(worst_change, std::abs(b.upper - upper10));
      if (M == 1000 && E <= 0.5) worst_width = std::max(worst_width, b.upper - b.lower);
    }
  };
  for (double xi : uni_grid_xi()) {
    for (double f : uni_grid_frac()) {
      const double E = uni_E(xi, f);
      visit(uni_closed_form(E, xi), [&](int M) { return sandwich_uni(E, xi, M); }, E);
    }
  }
  for (double xi : bi_grid_xi()) {
    for (double f : bi_grid_frac()) {
      const double E = bi_E(xi, f);
      visit(bi_equal_closed_form(E, xi), [&](int M) { return sandwich_bi(E, xi, xi, M); }, E);
    }
  }
  r.checks.push_back(at_most("lower <= closed form <= upper", worst_order, 0.0));
  r.checks.push_back(at_most("upper independent of M", worst_change, 0.0));
  r.checks.push_back(at_most("width at M = 1000, E <= 0.5", worst_width, 0.15));
  return r;
}

CriterionResult baseline_check(const VerifyOptions&, const Tolerances&) {
  CriterionResult r{8, "baseline", "optimal <= TMSV <= coherent", {}, 0, 0.0};
  int order_failures = 0, closeness_failures = 0, points = 0;
  auto visit = [&](double opt, double tmsv, double coh) {
    ++points;
    if (!(opt <= tmsv && tmsv <= coh)) ++order_failures;
    if (!(tmsv - opt < coh - opt)) ++closeness_failures;
  };
  for (double xi : uni_grid_xi()) {
    for (double f : uni_grid_frac()) {
      const double E = uni_E(xi, f);
      visit(optimal_uni(E, xi).fidelity, tmsv_fidelity(E, xi), coherent_fidelity(xi));
    }
  }
  for (double xi : bi_grid_xi()) {
    for (double f : bi_grid_frac()) {
      const double E = bi_E(xi, f);
      const double t = tmsv_fidelity(E, xi);
      const double c = coherent_fidelity(xi);
      visit(optimal_bi_equal(E, xi).fidelity, t * t, c * c);
    }
  }
  r.checks.push_back(at_most("ordering violations", order_failures, 0, std::to_string(points) + " points"));
  r.checks.push_back(at_most("TMSV closer than coherent (violations)", closeness_failures, 0));
  return r;
}

CriterionResult determinism_check(const VerifyOptions& o, const Tolerances&) {
  CriterionResult r{9, "determinism", "byte-identical reruns", {}, 0, 0.0};
  SweepConfig gap;
  gap.mode = SweepMode::Gap;
  gap.xi = 0.1;
  gap.E_grid = {0.0, 11.0 / 46.0, 101};
  gap.seed = o.seed;
  SweepConfig uni;
  uni.mode = SweepMode::Uni;
  uni.xi_grid = GridSpec{0.01, 0.5, 25};
  uni.E_grid = {0.9, 0.9, 1};
  uni.E_relative = true;
  uni.seed = o.seed;
  for (auto* cfg : {&gap, &uni}) {
    const auto a = render_sweep(*cfg, compute_sweep(*cfg));
    const auto b = render_sweep(*cfg, compute_sweep(*cfg));
    r.checks.push_back({std::string(to_string(cfg->mode)) + " sweep", a == b, a == b ? 0.0 : 1.0, 0.0, ""});
  }
  MinimizeOptions opts;
  opts.seed = o.seed;
  const auto m1 = minimize_bi({3, 0.2, PolytopeMode::Bi}, 0.1, 0.1, opts);
  const auto m2 = minimize_bi({3, 0.2, PolytopeMode::Bi}, 0.1, 0.1, opts);
  const bool same = m1.point == m2.point && m1.value == m2.value;
  r.checks.push_back({"minimize_bi multistart", same, same ? 0.0 : 1.0, 0.0, ""});
  return r;
}

using CheckFn = CriterionResult (*)(const VerifyOptions&, const Tolerances&);

struct Entry {
  const char* group;
  CheckFn fn;
};

constexpr Entry kEntries[] = {
    {"uni", uni_closed_form_check},   {"oracle", oracle_check},     {"bound", lower_bound_check},
    {"bi-equal", bi_equal_check},     {"bi-asym", bi_asym_check},   {"gap", gap_check},
    {"sandwich", sandwich_check},     {"baseline", baseline_check}, {"determinism", determinism_check},
};

}  // namespace

bool CriterionResult::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const SubCheck& c) { return c.passed; });
}

std::vector<std::string> verify_groups() {
  std::vector<std::string> names;
  for (const auto& e : kEntries) names.emplace_back(e.group);
  return names;
}

std::vector<CriterionResult> run_verification(const VerifyOptions& options) {
  if (options.only) {
    const auto groups = verify_groups();
    if (std::find(groups.begin(), groups.end(), *options.only) == groups.end()) {
      throw Error(ErrorKind::InvalidArgument, "unknown verification group '" + *options.only + "'");
    }
  }
  const auto tol = tolerances(options);
  std::vector<CriterionResult> results;
  for (const auto& e : kEntries) {
    if (options.only && *options.only != e.group) continue;
    const auto t0 = std::chrono::steady_clock::now();
    auto res = e.fn(options, tol);
    res.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    results.push_back(std::move(res));
  }
  return results;
}

std::string render_verification(const std::vector<CriterionResult>& results) {
  std::ostringstream out;
  int failed = 0;
  for (const auto& r : results) {
    const bool ok = r.passed();
    if (!ok) ++failed;
    char line[256];
    std::snprintf(line, sizeof line, "[%s] %d %-12s %s\n", ok ? "PASS" : "FAIL", r.id, r.group.c_str(),
                  r.title.c_str());
    out << line;
    for (const auto& c : r.checks) {
      std::snprintf(line, sizeof line, "    %-4s %-44s measured %-10s limit %-10s", c.passed ? "ok" : "FAIL",
                    c.name.c_str(), sci(c.measured).c_str(), sci(c.threshold).c_str());
      out << line;
      if (!c.detail.empty()) out << "  " << c.detail;
      out << '\n';
    }
  }
  out << (failed == 0 ? "all criteria passed" : std::to_string(failed) + " criterion(s) failed") << '\n';
  return out.str();
}

}  // namespace cvtf
