#include <algorithm>
#include <cmath>
#include <cstdio>
#include <future>
#include <ostream>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "cvtf/cli.hpp"
#include "cvtf/closedform.hpp"
#include "cvtf/error.hpp"
#include "cvtf/fidelity.hpp"
#include "cvtf/optimize.hpp"

namespace cvtf {

namespace {

using ojson = nlohmann::ordered_json;

double regime_bound(SweepMode mode, double xi, std::optional<double> xi_prime) {
  switch (mode) {
    case SweepMode::Uni: return uni_regime(0.0, xi).bound;
    case SweepMode::BiEqual:
    case SweepMode::Gap: return bi_equal_regime(0.0, xi).bound / 2.0;
    case SweepMode::BiAsym: return bi_asym_regime(0.0, xi, *xi_prime).bound / 2.0;
  }
  return 0.0;
}

double numeric_uni(double E, double xi, int M, std::uint64_t seed) {
  MinimizeOptions opts;
  opts.seed = seed;
  return minimize_uni({M, E, PolytopeMode::Uni}, xi, opts).value;
}

double numeric_bi(double E, double xi, double xi_prime, int M, std::uint64_t seed) {
  MinimizeOptions opts;
  opts.seed = seed;
  return minimize_bi({M, 2.0 * E, PolytopeMode::Bi}, xi, xi_prime, opts).value;
}

SweepRow compute_row(const SweepConfig& c, double e_value, double xi) {
  SweepRow row{};
  row.xi = xi;
  const double xp = c.mode == SweepMode::BiAsym ? *c.xi_prime : xi;
  if (c.mode == SweepMode::BiAsym || c.mode == SweepMode::BiEqual) row.xi_prime = xp;
  const double E = c.E_relative ? e_value * regime_bound(c.mode, xi, c.xi_prime) : e_value;
  row.E = E;

  switch (c.mode) {
    case SweepMode::Uni: {
      row.coherent = coherent_fidelity(xi);
      row.tmsv = tmsv_fidelity(E, xi);
      row.in_regime = uni_regime(E, xi).valid;
      if (row.in_regime) {
        row.value = optimal_uni(E, xi).fidelity;
      } else if (c.numeric_fallback) {
        row.value = numeric_uni(E, xi, c.M, c.seed);
      }
      break;
    }
    case SweepMode::BiEqual: {
      row.coherent = coherent_fidelity(xi) * coherent_fidelity(xi);
      row.tmsv = tmsv_fidelity(E, xi) * tmsv_fidelity(E, xi);
      row.in_regime = bi_equal_regime(E, xi).valid;
      if (row.in_regime) {
        row.value = optimal_bi_equal(E, xi).fidelity;
      } else if (c.numeric_fallback) {
        row.value = numeric_bi(E, xi, xi, c.M, c.seed);
      }
      break;
    }
    case SweepMode::BiAsym: {
      row.coherent = coherent_fidelity(xi) * coherent_fidelity(xp);
      row.tmsv = tmsv_fidelity(E, xi) * tmsv_fidelity(E, xp);
      row.in_regime = bi_asym_regime(E, xi, xp).valid;
      if (row.in_regime) {
        const auto sol = optimal_bi_asym(E, xi, xp);
        row.value = sol.fidelity;
        row.p_split = sol.p_split;
      } else if (c.numeric_fallback) {
        row.value = numeric_bi(E, xi, xp, c.M, c.seed);
      }
      break;
    }
    case SweepMode::Gap: {
      row.in_regime = bi_equal_regime(E, xi).valid;
      if (row.in_regime) {
        row.value = submult_gap(E, xi);
      } else if (c.numeric_fallback) {
        const double uni = numeric_uni(E, xi, c.M, c.seed);
        row.value = uni * uni - numeric_bi(E, xi, xi, c.M, c.seed);
      }
      break;
    }
  }
  if (row.value) row.source = row.in_regime ? "closed_form" : "numeric";
  return row;
}

std::string opt_field(const std::optional<double>& v) { return v ? format_double(*v) : ""; }

ojson opt_json(const std::optional<double>& v) { return v ? ojson(*v) : ojson(nullptr); }

std::string fmt8(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.8g", v);
  return buf;
}

}  // namespace

SweepMode parse_mode(const std::string& name) {
  if (name == "uni") return SweepMode::Uni;
  if (name == "bi-equal") return SweepMode::BiEqual;
  if (name == "bi-asym") return SweepMode::BiAsym;
  if (name == "gap") return SweepMode::Gap;
  throw Error(ErrorKind::InvalidArgument, "unknown mode '" + name + "'");
}

const char* to_string(SweepMode mode) noexcept {
  switch (mode) {
    case SweepMode::Uni: return "uni";
    case SweepMode::BiEqual: return "bi-equal";
    case SweepMode::BiAsym: return "bi-asym";
    case SweepMode::Gap: return "gap";
  }
  return "unknown";
}

OutputFormat parse_format(const std::string& name) {
  if (name == "csv") return OutputFormat::CSV;
  if (name == "json") return OutputFormat::JSON;
  throw Error(ErrorKind::InvalidArgument, "unknown format '" + name + "'");
}

std::vector<double> GridSpec::values() const {
  if (count < 1) throw Error(ErrorKind::InvalidArgument, "grid count must be >= 1");
  if (!(start <= stop)) throw Error(ErrorKind::InvalidArgument, "grid start must not exceed stop");
  std::vector<double> v(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    v[static_cast<std::size_t>(i)] =
        count == 1 ? start : start + (stop - start) * static_cast<double>(i) / (count - 1);
  }
  if (count > 1) v.back() = stop;
  return v;
}

void SweepConfig::validate() const {
  E_grid.values();
  if (xi_grid) xi_grid->values();
  if (mode == SweepMode::BiAsym && !xi_prime) {
    throw Error(ErrorKind::InvalidArgument, "bi-asym mode requires --xi-prime");
  }
  if (M < 0 || M > 64) throw Error(ErrorKind::InvalidArgument, "M must lie in [0, 64]");
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::vector<SweepRow> compute_sweep(const SweepConfig& config) {
  config.validate();
  const auto es = config.E_grid.values();
  const auto xis = config.xi_grid ? config.xi_grid->values() : std::vector<double>{config.xi};

  std::vector<std::pair<double, double>> points;
  for (double e : es)
    for (double x : xis) points.emplace_back(e, x);

  std::vector<SweepRow> rows(points.size());
  const std::size_t workers =
      config.parallel ? std::max<std::size_t>(1, std::thread::hardware_concurrency()) : 1;
  auto work = [&](std::size_t begin) {
    for (std::size_t i = begin; i < points.size(); i += workers) {
      rows[i] = compute_row(config, points[i].first, points[i].second);
    }
  };
  if (workers == 1) {
    work(0);
  } else {
    std::vector<std::future<void>> tasks;
    for (std::size_t w = 0; w < workers; ++w) tasks.push_back(std::async(std::launch::async, work, w));
    for (auto& t : tasks) t.get();
  }
  return rows;
}

std::string csv_header(SweepMode mode) {
  switch (mode) {
    case SweepMode::Uni: return "E,xi,F_coherent,F_tmsv,F_optimal,in_regime,source";
    case SweepMode::BiEqual: return "E,xi,xi_prime,F_coherent,F_tmsv,F_optimal,in_regime,source";
    case SweepMode::BiAsym:
      return "E,xi,xi_prime,F_coherent,F_tmsv,F_optimal,p_split,in_regime,source";
    case SweepMode::Gap: return "E,xi,delta,in_regime,source";
  }
  return "";
}

std::string render_sweep(const SweepConfig& config, const std::vector<SweepRow>& rows) {
  std::ostringstream out;
  const auto mode = config.mode;
  if (config.format == OutputFormat::CSV) {
    out << csv_header(mode) << '\n';
    for (const auto& r : rows) {
      out << format_double(r.E) << ',' << format_double(r.xi) << ',';
      if (mode == SweepMode::BiEqual || mode == SweepMode::BiAsym) out << opt_field(r.xi_prime) << ',';
      if (mode != SweepMode::Gap) out << opt_field(r.coherent) << ',' << opt_field(r.tmsv) << ',';
      out << opt_field(r.value) << ',';
      if (mode == SweepMode::BiAsym) out << opt_field(r.p_split) << ',';
      out << (r.in_regime ? 1 : 0) << ',' << r.source << '\n';
    }
    return out.str();
  }

  auto array = ojson::array();
  for (const auto& r : rows) {
    ojson o;
    o["E"] = r.E;
    o["xi"] = r.xi;
    if (mode == SweepMode::BiEqual || mode == SweepMode::BiAsym) o["xi_prime"] = opt_json(r.xi_prime);
    if (mode != SweepMode::Gap) {
      o["F_coherent"] = opt_json(r.coherent);
      o["F_tmsv"] = opt_json(r.tmsv);
      o["F_optimal"] = opt_json(r.value);
    } else {
      o["delta"] = opt_json(r.value);
    }
    if (mode == SweepMode::BiAsym) o["p_split"] = opt_json(r.p_split);
    o["in_regime"] = r.in_regime;
    o["source"] = r.source;
    array.push_back(std::move(o));
  }
  out << array.dump(2) << '\n';
  return out.str();
}

int run_point(const PointConfig& c, std::ostream& out, std::ostream& err) {
  ojson report;
  report["mode"] = to_string(c.mode);
  report["E"] = c.E;
  report["xi"] = c.xi;
  const double xp = c.mode == SweepMode::BiAsym ? c.xi_prime.value_or(-1.0) : c.xi;
  if (c.mode == SweepMode::BiAsym && !c.xi_prime) {
    err << "error: bi-asym mode requires --xi-prime\n";
    return 1;
  }
  if (c.mode == SweepMode::BiAsym || c.mode == SweepMode::BiEqual) report["xi_prime"] = xp;

  MinimizeOptions opts;
  opts.seed = c.seed;
  const bool bi = c.mode != SweepMode::Uni;

  try {
    RegimeVerdict regime{};
    switch (c.mode) {
      case SweepMode::Uni: regime = uni_regime(c.E, c.xi); break;
      case SweepMode::BiEqual:
      case SweepMode::Gap: regime = bi_equal_regime(c.E, c.xi); break;
      case SweepMode::BiAsym: regime = bi_asym_regime(c.E, c.xi, xp); break;
    }
    report["regime_valid"] = regime.valid;
    report["regime_bound"] = regime.bound;

    if (c.mode == SweepMode::Uni) {
      report["F_coherent"] = coherent_fidelity(c.xi);
      report["F_tmsv"] = tmsv_fidelity(c.E, c.xi);
    } else if (c.mode != SweepMode::Gap) {
      report["F_coherent"] = coherent_fidelity(c.xi) * coherent_fidelity(xp);
      report["F_tmsv"] = tmsv_fidelity(c.E, c.xi) * tmsv_fidelity(c.E, xp);
    }

    if (!regime.valid) {
      if (!c.allow_out_of_regime) {
        // Re-run the closed form to surface its own message.
        switch (c.mode) {
          case SweepMode::Uni: optimal_uni(c.E, c.xi); break;
          case SweepMode::BiEqual:
          case SweepMode::Gap: optimal_bi_equal(c.E, c.xi); break;
          case SweepMode::BiAsym: optimal_bi_asym(c.E, c.xi, xp); break;
        }
      }
      const PolytopeSpec spec{c.M, bi ? 2.0 * c.E : c.E, bi ? PolytopeMode::Bi : PolytopeMode::Uni};
      if (c.mode == SweepMode::Uni) {
        report["F_numeric"] = minimize_uni(spec, c.xi, opts).value;
      } else if (c.mode == SweepMode::Gap) {
        const double uni = minimize_uni({c.M, c.E, PolytopeMode::Uni}, c.xi, opts).value;
        report["delta_numeric"] = uni * uni - minimize_bi(spec, c.xi, c.xi, opts).value;
      } else {
        report["F_numeric"] = minimize_bi(spec, c.xi, xp, opts).value;
      }
      report["source"] = "numeric";
    } else {
      report["source"] = "closed_form";
      switch (c.mode) {
        case SweepMode::Uni: {
          const auto sol = optimal_uni(c.E, c.xi);
          const auto bounds = sandwich_uni(c.E, c.xi, c.M);
          report["F_optimal"] = sol.fidelity;
          report["sine_distance"] = sine_distance(sol.fidelity);
          report["sandwich_lower"] = bounds.lower;
          report["sandwich_upper"] = bounds.upper;
          if (c.verify) {
            const auto num = minimize_uni({c.M, c.E, PolytopeMode::Uni}, c.xi, opts);
            const double oracle =
                kraus_oracle_uni(std::get<SchmidtSpectrum>(sol.spectrum), c.xi);
            report["F_minimize"] = num.value;
            report["delta_minimize"] = num.value - sol.fidelity;
            report["F_kraus_oracle"] = oracle;
            report["delta_kraus_oracle"] = oracle - sol.fidelity;
          }
          break;
        }
        case SweepMode::BiEqual:
        case SweepMode::BiAsym: {
          const auto sol = c.mode == SweepMode::BiEqual ? optimal_bi_equal(c.E, c.xi)
                                                        : optimal_bi_asym(c.E, c.xi, xp);
          const auto bounds = sandwich_bi(c.E, c.xi, xp, c.M);
          report["F_optimal"] = sol.fidelity;
          if (sol.p_split) {
            report["p_split"] = *sol.p_split;
            report["branch"] = asym_split(c.E, c.xi, xp).branch;
          }
          report["sine_distance"] = sine_distance(sol.fidelity);
          report["sandwich_lower"] = bounds.lower;
          report["sandwich_upper"] = bounds.upper;
          if (c.verify) {
            const auto num = minimize_bi({c.M, 2.0 * c.E, PolytopeMode::Bi}, c.xi, xp, opts);
            const double oracle =
                kraus_oracle_bi(std::get<BipartiteSpectrum>(sol.spectrum), c.xi, xp);
            report["F_minimize"] = num.value;
            report["delta_minimize"] = num.value - sol.fidelity;
            report["F_kraus_oracle"] = oracle;
            report["delta_kraus_oracle"] = oracle - sol.fidelity;
            if (c.mode == SweepMode::BiAsym) {
              report["F_face_minimizer"] = bi_face_minimizer(c.E, c.xi, xp).fidelity;
            }
          }
          break;
        }
        case SweepMode::Gap: {
          report["F_uni"] = optimal_uni(c.E, c.xi).fidelity;
          report["F_bi"] = optimal_bi_equal(c.E, c.xi).fidelity;
          report["delta"] = submult_gap(c.E, c.xi);
          if (c.verify) {
            const double uni = minimize_uni({c.M, c.E, PolytopeMode::Uni}, c.xi, opts).value;
            const double bi_value =
                minimize_bi({c.M, 2.0 * c.E, PolytopeMode::Bi}, c.xi, c.xi, opts).value;
            report["delta_minimize"] = uni * uni - bi_value;
          }
          break;
        }
      }
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return e.kind() == ErrorKind::RegimeViolation ? 2 : 1;
  }

  if (c.format == OutputFormat::JSON) {
    out << report.dump(2) << '\n';
    return 0;
  }
  for (const auto& [key, value] : report.items()) {
    out << key << ": ";
    if (value.is_number_float()) {
      out << fmt8(value.get<double>());
    } else if (value.is_string()) {
      out << value.get<std::string>();
    } else {
      out << value.dump();
    }
    out << '\n';
  }
  return 0;
}

}  // namespace cvtf
