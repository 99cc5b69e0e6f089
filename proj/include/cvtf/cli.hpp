#pragma once

// Library side of the command-line front end: sweep tables, single-point
// reports and the certification suite. tools/cvtf.cpp only parses flags.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace cvtf {

enum class SweepMode { Uni, BiEqual, BiAsym, Gap };
enum class OutputFormat { CSV, JSON };

/// Throws InvalidArgument on an unknown name. Names: uni, bi-equal, bi-asym, gap.
SweepMode parse_mode(const std::string& name);
const char* to_string(SweepMode mode) noexcept;
OutputFormat parse_format(const std::string& name);

struct GridSpec {
  double start = 0.0;
  double stop = 0.0;
  int count = 1;

  /// count points from start to stop inclusive (start only when count == 1).
  std::vector<double> values() const;
};

struct SweepConfig {
  SweepMode mode = SweepMode::Uni;
  double xi = 0.1;
  std::optional<double> xi_prime;
  GridSpec E_grid;
  std::optional<GridSpec> xi_grid;
  bool E_relative = false;  // E grid values are fractions of the regime bound
  int M = 12;
  OutputFormat format = OutputFormat::CSV;
  std::uint64_t seed = 0xC0FFEE;
  bool numeric_fallback = false;
  bool parallel = true;

  /// Throws InvalidArgument (empty grid, start > stop, missing xi').
  void validate() const;
};

struct SweepRow {
  double E;
  double xi;
  std::optional<double> xi_prime;
  std::optional<double> coherent;
  std::optional<double> tmsv;
  std::optional<double> value;  // F_optimal, or delta in Gap mode
  std::optional<double> p_split;
  bool in_regime;
  std::string source;  // "closed_form", "numeric" or ""
};

/// Rows in E-major order (E outer, xi inner).
std::vector<SweepRow> compute_sweep(const SweepConfig& config);

std::string csv_header(SweepMode mode);
std::string render_sweep(const SweepConfig& config, const std::vector<SweepRow>& rows);

/// %.17g (binary64 round-trip).
std::string format_double(double v);

struct PointConfig {
  SweepMode mode = SweepMode::Uni;
  double E = 0.0;
  double xi = 0.1;
  std::optional<double> xi_prime;
  int M = 12;
  bool verify = false;
  bool allow_out_of_regime = false;
  OutputFormat format = OutputFormat::CSV;  // CSV renders as "key: value" text
  std::uint64_t seed = 0xC0FFEE;
};

/// Writes the report to `out`; returns 0, or 2 on a regime violation (message
/// on `err`) unless allow_out_of_regime is set.
int run_point(const PointConfig& config, std::ostream& out, std::ostream& err);

// ---------------------------------------------------------------------------
// Certification suite

struct SubCheck {
  std::string name;
  bool passed;
  double measured;   // worst deviation or observed value
  double threshold;  // tolerance the measurement is held to
  std::string detail;
};

struct CriterionResult {
  int id;
  std::string group;
  std::string title;
  std::vector<SubCheck> checks;
  double seconds = 0.0;     // wall time; not rendered in the table
  double time_limit = 0.0;  // 0 = unlimited

  bool passed() const;
};

struct VerifyOptions {
  std::optional<double> tol;  // overrides every equality tolerance when set
  std::optional<std::string> only;
  std::uint64_t seed = 0xC0FFEE;
};

/// Group names accepted by VerifyOptions::only.
std::vector<std::string> verify_groups();

std::vector<CriterionResult> run_verification(const VerifyOptions& options);

/// Deterministic pass/fail table (no timings).
std::string render_verification(const std::vector<CriterionResult>& results);

}  // namespace cvtf
