#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "bfi/config.hpp"
#include "bfi/potentials.hpp"

namespace bfi {

/// 12 significant digits; "inf", "-inf", "nan" for non-finite values.
std::string format_number(double v);

/// RFC-4180 field: quoted when it contains a comma, quote, CR or LF.
std::string csv_field(const std::string& s);

/// Header plus string rows, rendered verbatim.
struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  void add(std::vector<std::string> row) { rows.push_back(std::move(row)); }
};

/// CSV with CRLF-free LF line endings.
std::string render_csv(const Table& table);
std::string render_markdown(const Table& table);

struct SweepOptions {
  double resolution = 400.0;     // grid points per unit for μ_t
  double pl_resolution = 1000.0;  // static PL grid
  std::size_t lsi_iters = 500;
  double lsi_step = 0.05;
  double lyapunov_k = 1.0;
  std::size_t threads = 0;  // 0: hardware concurrency

  static SweepOptions from_config(const Config& config);
};

struct SweepRow {
  double t = 0.0;
  double poincare_spectral = 0.0;
  double poincare_over_t = 0.0;
  double lyapunov_bound = 0.0;
  double ls_lower = 0.0;
  double ls_variational = 0.0;
  double ls_upper = 0.0;
  double ls_variational_over_t = 0.0;
  double laplace_gap = 0.0;
  double rescaled_var = 0.0;
  double x0 = 0.0;
  double sigma = 0.0;
  bool ok = true;
  std::string error;  // set when a component failed for this row
};

struct SweepSummary {
  double cbls_estimate = 0.0;
  double cap_estimate = 0.0;
  double cpl_static = 0.0;
  double lambda_min = 0.0;
  bool cbls_clamped = false;
  std::string note;
};

struct SweepResult {
  std::string potential;
  std::vector<SweepRow> rows;
  SweepSummary summary;
};

/// One row per temperature (computed concurrently), then a summary that
/// extrapolates the _over_t columns linearly in t from the two smallest
/// temperatures. Refuses with PreconditionError when C_PL is divergent,
/// before any measure is built. Row failures are recorded, not thrown.
SweepResult run_sweep(PotentialPtr p, const std::vector<double>& temperatures, const SweepOptions& options);
SweepResult run_sweep(const Config& config);

/// v(0) from values at t1 < t2 under v(t) = a + b t; v1 when only one point.
double richardson_zero(double t1, double v1, double t2, double v2);

Table sweep_table(const SweepResult& result);
Table summary_table(const SweepResult& result);

enum class OutputFormat { csv, gnuplot, markdown };

/// Deterministic rendering of the sweep rows.
std::string render_sweep(const SweepResult& result, OutputFormat format);

/// Writes sweep.csv, sweep.dat, sweep.md and summary.csv into `dir`;
/// throws PreconditionError when the directory is unwritable.
std::vector<std::string> render_outputs(const SweepResult& result, const std::string& dir);

}  // namespace bfi
