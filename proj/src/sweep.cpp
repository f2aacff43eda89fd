#include "bfi/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <thread>

#include "bfi/error.hpp"
#include "bfi/logsobolev.hpp"
#include "bfi/measures.hpp"
#include "bfi/pl.hpp"
#include "bfi/poincare.hpp"

namespace bfi {

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  std::ostringstream os;
  os << std::setprecision(12) << v;
  return os.str();
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

std::string render_csv(const Table& table) {
  std::ostringstream os;
  auto line = [&](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) os << (i ? "," : "") << csv_field(cells[i]);
    os << '\n';
  };
  line(table.header);
  for (const auto& r : table.rows) line(r);
  return os.str();
}

std::string render_markdown(const Table& table) {
  std::ostringstream os;
  auto line = [&](const std::vector<std::string>& cells) {
    os << '|';
    for (const auto& c : cells) {
      std::string cell = c;
      std::replace(cell.begin(), cell.end(), '|', '/');
      std::replace(cell.begin(), cell.end(), '\n', ' ');
      os << ' ' << cell << " |";
    }
    os << '\n';
  };
  line(table.header);
  os << '|';
  for (std::size_t i = 0; i < table.header.size(); ++i) os << " --- |";
  os << '\n';
  for (const auto& r : table.rows) line(r);
  return os.str();
}

SweepOptions SweepOptions::from_config(const Config& c) {
  SweepOptions o;
  o.resolution = c.number("grid.resolution", o.resolution);
  o.pl_resolution = c.number("pl.resolution", o.pl_resolution);
  o.lsi_iters = c.count("lsi.iters", o.lsi_iters);
  o.lsi_step = c.number("lsi.step", o.lsi_step);
  o.lyapunov_k = c.number("lyapunov.k", o.lyapunov_k);
  o.threads = c.count("threads", o.threads);
  require(o.resolution > 0.0 && o.pl_resolution > 0.0, "config: resolutions must be > 0");
  return o;
}

double richardson_zero(double t1, double v1, double t2, double v2) {
  if (t1 == t2) return v1;
  return (t1 * v2 - t2 * v1) / (t1 - t2);
}

namespace {

SweepRow compute_row(const PotentialPtr& p, double t, double c_pl, const SweepOptions& o) {
  SweepRow row;
  row.t = t;
  try {
    GibbsGrid mu = build_gibbs(p, t, o.resolution, RadiusPolicy::automatic(), c_pl);
    row.poincare_spectral = poincare_spectral(mu).value;
    row.poincare_over_t = row.poincare_spectral / t;
    auto lp = select_lyapunov_params(*p, t, o.lyapunov_k, c_pl);
    if (!lp) throw PreconditionError("no admissible Lyapunov parameters at this temperature");
    row.lyapunov_bound = lyapunov_bound_formula(*lp);
    ConstantEstimate lo = ls_lower_bound_search(mu);
    row.ls_lower = lo.value;
    row.x0 = lo.diagnostics.at("x0");
    row.sigma = lo.diagnostics.at("sigma");
    row.ls_variational = ls_variational(mu, TestDensity::gaussian(mu, row.x0, row.sigma), o.lsi_iters, o.lsi_step).value;
    row.ls_variational_over_t = row.ls_variational / t;
    row.ls_upper = ls_upper_bound(mu, c_pl).value;
    row.laplace_gap = laplace_gap(mu);
    row.rescaled_var = rescaled_moments(mu).var_z[0];
  } catch (const std::exception& e) {
    row.ok = false;
    row.error = e.what();
  }
  return row;
}

}  // namespace

SweepResult run_sweep(PotentialPtr p, const std::vector<double>& temperatures, const SweepOptions& o) {
  require(p != nullptr, "run_sweep: null potential");
  require(!temperatures.empty(), "run_sweep: empty temperature ladder");
  const double c_pl = require_finite_c_pl(*p, o.pl_resolution);

  SweepResult result;
  result.potential = p->name;
  result.summary.cpl_static = pl_constant_static(*p, p->dim == 1 ? o.pl_resolution : 50.0).value;
  result.summary.lambda_min =
      p->minimizer ? p->hessian_lambda_min(*p->minimizer) : std::numeric_limits<double>::quiet_NaN();

  result.rows.resize(temperatures.size());
  std::size_t workers = o.threads ? o.threads : std::max(1u, std::thread::hardware_concurrency());
  workers = std::min(workers, temperatures.size());
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < temperatures.size();)
      result.rows[i] = compute_row(p, temperatures[i], c_pl, o);
  };
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
  }

  std::vector<const SweepRow*> good;
  for (const auto& r : result.rows)
    if (r.ok) good.push_back(&r);
  SweepSummary& s = result.summary;
  if (good.empty()) {
    s.cbls_estimate = s.cap_estimate = std::numeric_limits<double>::quiet_NaN();
    s.note = "every row failed";
    return result;
  }
  std::sort(good.begin(), good.end(), [](const SweepRow* a, const SweepRow* b) { return a->t < b->t; });
  const SweepRow& r1 = *good[0];
  const SweepRow& r2 = good.size() > 1 ? *good[1] : r1;
  s.cap_estimate = richardson_zero(r1.t, r1.poincare_over_t, r2.t, r2.poincare_over_t);
  double cbls = richardson_zero(r1.t, r1.ls_variational_over_t, r2.t, r2.ls_variational_over_t);
  const double lo = r1.ls_lower / r1.t, hi = r1.ls_upper / r1.t;
  s.cbls_estimate = std::clamp(cbls, lo, std::max(lo, hi));
  s.cbls_clamped = s.cbls_estimate != cbls;
  s.note = "heuristic: first-order Richardson extrapolation in t from the two smallest temperatures";
  return result;
}

SweepResult run_sweep(const Config& config) {
  return run_sweep(config_potential(config), config_temperatures(config), SweepOptions::from_config(config));
}

Table sweep_table(const SweepResult& result) {
  Table t;
  t.header = {"t",      "poincare_spectral", "poincare_over_t", "lyapunov_bound",        "ls_lower",
              "ls_variational", "ls_upper", "ls_variational_over_t", "laplace_gap", "rescaled_var",
              "x0",     "sigma",             "status"};
  for (const auto& r : result.rows) {
    std::vector<std::string> cells;
    for (double v : {r.t, r.poincare_spectral, r.poincare_over_t, r.lyapunov_bound, r.ls_lower, r.ls_variational,
                     r.ls_upper, r.ls_variational_over_t, r.laplace_gap, r.rescaled_var, r.x0, r.sigma})
      cells.push_back(r.ok || v == r.t ? format_number(v) : "nan");
    cells.push_back(r.ok ? "ok" : r.error);
    t.add(std::move(cells));
  }
  return t;
}

Table summary_table(const SweepResult& result) {
  const auto& s = result.summary;
  Table t;
  t.header = {"potential", "cbls_estimate", "cap_estimate", "cpl_static", "lambda_min", "cbls_clamped", "note"};
  t.add({result.potential, format_number(s.cbls_estimate), format_number(s.cap_estimate),
         format_number(s.cpl_static), format_number(s.lambda_min), s.cbls_clamped ? "true" : "false", s.note});
  return t;
}

std::string render_sweep(const SweepResult& result, OutputFormat format) {
  switch (format) {
    case OutputFormat::csv:
      return render_csv(sweep_table(result));
    case OutputFormat::markdown:
      return render_markdown(sweep_table(result));
    case OutputFormat::gnuplot: {
      std::ostringstream os;
      os << "# " << result.potential << "\n# block 0: t poincare_over_t\n";
      for (const auto& r : result.rows)
        if (r.ok) os << format_number(r.t) << ' ' << format_number(r.poincare_over_t) << '\n';
      os << "\n\n# block 1: t ls_lower_over_t ls_variational_over_t ls_upper_over_t\n";
      for (const auto& r : result.rows)
        if (r.ok)
          os << format_number(r.t) << ' ' << format_number(r.ls_lower / r.t) << ' '
             << format_number(r.ls_variational_over_t) << ' ' << format_number(r.ls_upper / r.t) << '\n';
      return os.str();
    }
  }
  return {};
}

std::vector<std::string> render_outputs(const SweepResult& result, const std::string& dir) {
  require(!result.rows.empty(), "render_outputs: no rows");
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(dir, ec);
  std::vector<std::pair<std::string, std::string>> files = {
      {"sweep.csv", render_sweep(result, OutputFormat::csv)},
      {"sweep.dat", render_sweep(result, OutputFormat::gnuplot)},
      {"sweep.md", render_sweep(result, OutputFormat::markdown)},
      {"summary.csv", render_csv(summary_table(result))},
  };
  std::vector<std::string> written;
  for (const auto& [name, body] : files) {
    fs::path path = fs::path(dir) / name;
    std::ofstream out(path, std::ios::binary);
    if (!out || !(out << body)) throw PreconditionError("render_outputs: cannot write '" + path.string() + "'");
    written.push_back(path.string());
  }
  return written;
}

}  // namespace bfi
