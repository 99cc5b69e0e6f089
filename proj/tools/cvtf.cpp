// cvtf: point / sweep / verify front end.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"

#include "cvtf/cli.hpp"
#include "cvtf/error.hpp"

namespace {

using nlohmann::json;

struct Args {
  std::string mode = "uni";
  double xi = 0.1;
  std::optional<double> xi_prime;
  std::optional<double> E;
  int M = 12;
  double tol = 1e-8;
  std::string out;
  std::string format = "csv";
  std::uint64_t seed = 0xC0FFEE;
  bool verify = false;
  bool allow_out_of_regime = false;
  std::optional<std::string> only;
  std::optional<double> E_start, E_stop, xi_start, xi_stop;
  int E_count = 1, xi_count = 1;
  bool E_relative = false;
  bool numeric_fallback = false;
  std::string config;
};

// register the shared flags on a subcommand
void add_common(CLI::App* app, Args& a) {
  app->add_option("--mode", a.mode, "uni | bi-equal | bi-asym | gap");
  app->add_option("--xi", a.xi, "noise on the first direction");
  app->add_option("--xi-prime", a.xi_prime, "noise on the second direction");
  app->add_option("--E", a.E, "energy per mode");
  app->add_option("--M", a.M, "Fock truncation")->check(CLI::Range(0, 64));
  app->add_option("--tol", a.tol, "equality tolerance");
  app->add_option("--out", a.out, "output path (stdout if omitted)");
  app->add_option("--format", a.format, "csv | json");
  app->add_option("--seed", a.seed, "RNG seed");
  app->add_option("--config", a.config, "JSON config file (flags win)");
}

// config values fill in anything not given on the command line
template <class T>
void fill(const CLI::App* app, const json& cfg, const char* flag, const char* key, T& dst) {
  if (app->count(flag) == 0 && cfg.contains(key)) dst = cfg.at(key).get<T>();
}

template <class T>
void fill(const CLI::App* app, const json& cfg, const char* flag, const char* key, std::optional<T>& dst) {
  if (app->count(flag) == 0 && cfg.contains(key) && !cfg.at(key).is_null()) dst = cfg.at(key).get<T>();
}

void apply_config(const CLI::App* app, Args& a) {
  if (!a.config.empty()) {
    std::ifstream in(a.config);
    if (!in) throw cvtf::Error(cvtf::ErrorKind::InvalidArgument, "cannot open config '" + a.config + "'");
    json cfg;
    try {
      cfg = json::parse(in);
    } catch (const json::exception& e) {
      throw cvtf::Error(cvtf::ErrorKind::InvalidArgument, std::string("bad config: ") + e.what());
    }
    try {
      fill(app, cfg, "--mode", "mode", a.mode);
      fill(app, cfg, "--xi", "xi", a.xi);
      fill(app, cfg, "--xi-prime", "xi_prime", a.xi_prime);
      fill(app, cfg, "--E", "E", a.E);
      fill(app, cfg, "--M", "M", a.M);
      fill(app, cfg, "--tol", "tol", a.tol);
      fill(app, cfg, "--out", "out", a.out);
      fill(app, cfg, "--format", "format", a.format);
      fill(app, cfg, "--seed", "seed", a.seed);
      if (cfg.contains("E_grid")) {
        const auto& g = cfg.at("E_grid");
        fill(app, g, "--E-start", "start", a.E_start);
        fill(app, g, "--E-stop", "stop", a.E_stop);
        fill(app, g, "--E-count", "count", a.E_count);
      }
      if (cfg.contains("xi_grid")) {
        const auto& g = cfg.at("xi_grid");
        fill(app, g, "--xi-start", "start", a.xi_start);
        fill(app, g, "--xi-stop", "stop", a.xi_stop);
        fill(app, g, "--xi-count", "count", a.xi_count);
      }
    } catch (const json::exception& e) {
      throw cvtf::Error(cvtf::ErrorKind::InvalidArgument, std::string("bad config: ") + e.what());
    }
  }
  if (const char* env = std::getenv("CVTF_SEED")) {
    try {
      a.seed = std::stoull(env, nullptr, 0);
    } catch (const std::exception&) {
      throw cvtf::Error(cvtf::ErrorKind::InvalidArgument, std::string("bad CVTF_SEED '") + env + "'");
    }
  }
}

// stdout unless --out
int emit(const std::string& path, const std::string& text) {
  if (path.empty()) {
    std::cout << text;
    return 0;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) {
    std::cerr << "error: cannot write '" << path << "'\n";
    return 1;
  }
  f << text;
  return f ? 0 : 1;
}

int do_point(const CLI::App* app, Args& a) {
  apply_config(app, a);
  if (!a.E) throw cvtf::Error(cvtf::ErrorKind::InvalidArgument, "point requires --E");
  cvtf::PointConfig c;
  c.mode = cvtf::parse_mode(a.mode);
  c.E = *a.E;
  c.xi = a.xi;
  c.xi_prime = a.xi_prime;
  c.M = a.M;
  c.verify = a.verify;
  c.allow_out_of_regime = a.allow_out_of_regime;
  c.format = cvtf::parse_format(a.format);
  c.seed = a.seed;
  std::ostringstream out;
  const int rc = cvtf::run_point(c, out, std::cerr);
  if (rc != 0) return rc;
  return emit(a.out, out.str());
}

int do_sweep(const CLI::App* app, Args& a) {
  apply_config(app, a);
  cvtf::SweepConfig c;
  c.mode = cvtf::parse_mode(a.mode);
  c.xi = a.xi;
  c.xi_prime = a.xi_prime;
  if (a.E_start || a.E_stop) {
    c.E_grid = {a.E_start.value_or(0.0), a.E_stop.value_or(a.E_start.value_or(0.0)), a.E_count};
  } else if (a.E) {
    c.E_grid = {*a.E, *a.E, 1};
  } else {
    throw cvtf::Error(cvtf::ErrorKind::InvalidArgument, "empty E grid (give --E or --E-start/--E-stop)");
  }
  if (a.xi_start || a.xi_stop) {
    c.xi_grid = cvtf::GridSpec{a.xi_start.value_or(a.xi), a.xi_stop.value_or(a.xi_start.value_or(a.xi)),
                               a.xi_count};
  }
  c.E_relative = a.E_relative;
  c.M = a.M;
  c.format = cvtf::parse_format(a.format);
  c.seed = a.seed;
  c.numeric_fallback = a.numeric_fallback;
  c.validate();
  const auto rows = cvtf::compute_sweep(c);
  return emit(a.out, cvtf::render_sweep(c, rows));
}

int do_verify(const CLI::App* app, Args& a) {
  apply_config(app, a);
  cvtf::VerifyOptions o;
  if (app->count("--tol") > 0) o.tol = a.tol;
  o.only = a.only;
  o.seed = a.seed;
  const auto results = cvtf::run_verification(o);
  const int rc = emit(a.out, cvtf::render_verification(results));
  if (rc != 0) return rc;
  for (const auto& r : results)
    if (!r.passed()) return 3;
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"cvtf: energy-constrained fidelity of additive-noise channels"};
  app.require_subcommand(1);
  Args a;

  auto* point = app.add_subcommand("point", "closed form, baselines and bounds at one point");
  add_common(point, a);
  point->add_flag("--verify", a.verify, "also run the optimizer and the Kraus oracle");
  point->add_flag("--allow-out-of-regime", a.allow_out_of_regime, "report instead of failing");

  auto* sweep = app.add_subcommand("sweep", "tabulate fidelities over a grid");
  add_common(sweep, a);
  sweep->add_option("--E-start", a.E_start);
  sweep->add_option("--E-stop", a.E_stop);
  sweep->add_option("--E-count", a.E_count);
  sweep->add_option("--xi-start", a.xi_start);
  sweep->add_option("--xi-stop", a.xi_stop);
  sweep->add_option("--xi-count", a.xi_count);
  sweep->add_flag("--E-relative", a.E_relative, "E values are fractions of the regime bound");
  sweep->add_flag("--numeric-fallback", a.numeric_fallback, "optimizer values outside the regime");

  auto* verify = app.add_subcommand("verify", "run the certification suite");
  add_common(verify, a);
  verify->add_option("--only", a.only, "run a single group");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }

  try {
    if (point->parsed()) return do_point(point, a);
    if (sweep->parsed()) return do_sweep(sweep, a);
    return do_verify(verify, a);
  } catch (const cvtf::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return e.kind() == cvtf::ErrorKind::RegimeViolation ? 2 : 1;
  }
}
