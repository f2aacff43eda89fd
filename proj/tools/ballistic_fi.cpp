// ballistic-fi: command-line front end for the estimators.

#include <CLI11.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>

#include "bfi/config.hpp"
#include "bfi/dynamics.hpp"
#include "bfi/error.hpp"
#include "bfi/logsobolev.hpp"
#include "bfi/measures.hpp"
#include "bfi/pl.hpp"
#include "bfi/poincare.hpp"
#include "bfi/sweep.hpp"

namespace fs = std::filesystem;
using namespace bfi;

namespace {

struct Common {
  std::string config;
  std::string out;
  bool dump_measure = false;
};

void write_file(const fs::path& path, const std::string& body) {
  std::ofstream f(path, std::ios::binary);
  if (!f || !(f << body)) throw PreconditionError("cannot write '" + path.string() + "'");
}

fs::path out_dir(const Common& c) {
  std::error_code ec;
  fs::create_directories(c.out, ec);
  if (!fs::is_directory(c.out)) throw PreconditionError("cannot create output directory '" + c.out + "'");
  return fs::path(c.out);
}

/// Writes `<out>/<name>.csv`, or prints to stdout without --out.
void emit(const Common& c, const std::string& name, const Table& table) {
  std::string body = render_csv(table);
  if (c.out.empty()) {
    std::cout << body;
  } else {
    write_file(out_dir(c) / (name + ".csv"), body);
  }
}

void dump_measure(const Common& c, const GibbsGrid& mu) {
  if (!c.dump_measure) return;
  std::ostringstream os;
  mu.write_csv(os);
  fs::path dir = c.out.empty() ? fs::path(".") : out_dir(c);
  write_file(dir / ("measure_t" + format_number(mu.temperature()) + ".csv"), os.str());
}

std::string num(double v) { return format_number(v); }

void run_pl(const Common& c) {
  Config cfg = Config::load(c.config);
  PotentialPtr p = config_potential(cfg);
  const double res = cfg.number("pl.resolution", p->dim == 1 ? 1000.0 : 50.0);
  Table t;
  t.header = {"method", "value", "lower", "upper", "divergent", "argmax", "resolution"};
  auto add = [&](const ConstantEstimate& e, double r) {
    double arg = e.diagnostics.count("argmax") ? e.diagnostics.at("argmax")
                                               : (e.diagnostics.count("witness_init") ? e.diagnostics.at("witness_init")
                                                                                       : std::nan(""));
    t.add({to_string(e.method), num(e.value), num(e.lower), num(e.upper), e.divergent ? "true" : "false", num(arg),
           num(r)});
  };
  ConstantEstimate st = pl_constant_static(*p, res);
  add(st, res);
  if (!st.divergent) {
    add(pl_constant_static(*p, 2.0 * res), 2.0 * res);
    if (p->dim == 1 && (p->f_star || p->minimizer) && cfg.flag("pl.dynamic", true)) {
      std::vector<Point> inits;
      for (double x : cfg.numbers("pl.inits")) inits.push_back({x});
      if (inits.empty()) {
        const double c0 = p->minimizer ? (*p->minimizer)[0] : 0.0;
        for (int i = -40; i <= 40; ++i)
          if (i != 0) inits.push_back({c0 + 0.1 * i});
      }
      add(pl_constant_dynamic(*p, inits, cfg.number("pl.horizon", 2.0), cfg.number("pl.step", 1e-3)),
          std::nan(""));
    }
  }
  emit(c, "pl", t);
}

void run_poincare(const Common& c) {
  Config cfg = Config::load(c.config);
  PotentialPtr p = config_potential(cfg);
  const double c_pl = require_finite_c_pl(*p, cfg.number("pl.resolution", 1000.0));
  const double res = cfg.number("grid.resolution", 400.0);
  const double k = cfg.number("lyapunov.k", 1.0);
  Table t;
  t.header = {"t", "spectral", "spectral_over_t", "bracket_lower", "bracket_upper",
              "lyapunov_bound", "criterion_margin", "r0", "alpha"};
  for (double temp : config_temperatures(cfg)) {
    GibbsGrid mu = build_gibbs(p, temp, res, RadiusPolicy::automatic(), c_pl);
    dump_measure(c, mu);
    ConstantEstimate sp = poincare_spectral(mu);
    double blo = std::nan(""), bhi = std::nan("");
    if (mu.dim() == 1) {
      auto b = muckenhoupt_bracket(mu);
      blo = b.lower;
      bhi = b.upper;
    }
    double bound = std::nan(""), margin = std::nan(""), r0 = std::nan(""), alpha = std::nan("");
    if (auto lp = select_lyapunov_params(*p, temp, k, c_pl)) {
      bound = lyapunov_bound_formula(*lp);
      margin = lyapunov_criterion_verify(mu, *lp).min_margin;
      r0 = lp->r0;
      alpha = lp->alpha;
    }
    t.add({num(temp), num(sp.value), num(sp.value / temp), num(blo), num(bhi), num(bound), num(margin), num(r0),
           num(alpha)});
  }
  emit(c, "poincare", t);
}

void run_lsi(const Common& c) {
  Config cfg = Config::load(c.config);
  PotentialPtr p = config_potential(cfg);
  const double c_pl = require_finite_c_pl(*p, cfg.number("pl.resolution", 1000.0));
  const double res = cfg.number("grid.resolution", 400.0);
  const std::size_t iters = cfg.count("lsi.iters", 500);
  const double step = cfg.number("lsi.step", 0.05);
  Table t;
  t.header = {"t", "testfamily_lower", "variational", "tightened_upper", "x0", "sigma"};
  for (double temp : config_temperatures(cfg)) {
    GibbsGrid mu = build_gibbs(p, temp, res, RadiusPolicy::automatic(), c_pl);
    dump_measure(c, mu);
    ConstantEstimate lo = ls_lower_bound_search(mu);
    double x0 = lo.diagnostics.at("x0"), sigma = lo.diagnostics.at("sigma");
    ConstantEstimate var = ls_variational(mu, TestDensity::gaussian(mu, x0, sigma), iters, step);
    ConstantEstimate up = ls_upper_bound(mu, c_pl);
    t.add({num(temp), num(lo.value), num(var.value), num(up.value), num(x0), num(sigma)});
  }
  emit(c, "lsi", t);
}

EnsembleInit parse_init(const Config& cfg) {
  std::string kind = cfg.get("langevin.init", "stationary");
  if (kind == "stationary") return EnsembleInit::stationary();
  Point mean = cfg.numbers("langevin.init.mean");
  require(!mean.empty(), "config: langevin.init.mean is required for point/gaussian initializations");
  if (kind == "point") return EnsembleInit::at(mean);
  if (kind == "gaussian") return EnsembleInit::normal(mean, cfg.number("langevin.init.variance", 1.0));
  throw PreconditionError("config: langevin.init must be stationary, point or gaussian");
}

void run_langevin(const Common& c) {
  Config cfg = Config::load(c.config);
  PotentialPtr p = config_potential(cfg);
  EnsembleConfig ec;
  ec.particles = cfg.count("langevin.particles", ec.particles);
  ec.dt = cfg.number("langevin.dt", ec.dt);
  ec.burn_in = cfg.number("langevin.burn_in", ec.burn_in);
  ec.seed = cfg.count("langevin.seed", ec.seed);
  ec.resolution = cfg.number("grid.resolution", ec.resolution);
  ec.init = parse_init(cfg);
  const std::vector<double> checkpoints = cfg.numbers("langevin.checkpoints");

  Table t;
  t.header = {"t", "particles", "mean", "variance", "quadrature_mean", "quadrature_variance",
              "mean_se", "variance_se", "escaped"};
  Table kl;
  kl.header = {"t", "time", "kl", "bias_floor", "mean", "variance", "outside"};
  for (double temp : config_temperatures(cfg)) {
    GibbsGrid mu = build_gibbs(p, temp, ec.resolution);
    dump_measure(c, mu);
    double qm = 0.0, qv = 0.0;
    for (std::size_t i = 0; i < mu.size(); ++i) qm += mu.weights()[i] * mu.geometry().coordinate(i, 0);
    for (std::size_t i = 0; i < mu.size(); ++i) {
      double z = mu.geometry().coordinate(i, 0) - qm;
      qv += mu.weights()[i] * z * z;
    }
    ParticleEnsemble e = langevin_run(p, temp, ec);
    const std::size_t n = e.size();
    double m = 0.0, v = 0.0;
    for (std::size_t i = 0; i < n; ++i) m += e.particles[i * e.dim];
    m /= static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) v += (e.particles[i * e.dim] - m) * (e.particles[i * e.dim] - m);
    v /= static_cast<double>(n);
    t.add({num(temp), num(static_cast<double>(n)), num(m), num(v), num(qm), num(qv),
           num(std::sqrt(qv / static_cast<double>(n))), num(qv * std::sqrt(2.0 / static_cast<double>(n))),
           num(static_cast<double>(e.escaped))});
    if (!checkpoints.empty()) {
      KlDecay d = empirical_kl_decay(p, temp, ec, checkpoints, cfg.count("langevin.bin_cells", 8));
      for (const auto& ck : d.checkpoints)
        kl.add({num(temp), num(ck.time), num(ck.kl), num(ck.bias_floor), num(ck.mean), num(ck.variance),
                num(static_cast<double>(ck.outside))});
    }
  }
  emit(c, "langevin", t);
  if (!checkpoints.empty()) {
    if (c.out.empty()) {
      std::cout << '\n';
      std::cout << render_csv(kl);
    } else {
      emit(c, "langevin_kl", kl);
    }
  }
}

void run_laplace(const Common& c) {
  Config cfg = Config::load(c.config);
  PotentialPtr p = config_potential(cfg);
  const double res = cfg.number("grid.resolution", 400.0);
  Table t;
  t.header = {"t", "log_Z", "laplace_gap", "mean_z", "var_z"};
  for (double temp : config_temperatures(cfg)) {
    GibbsGrid mu = build_gibbs(p, temp, res);
    dump_measure(c, mu);
    double gap = laplace_gap(mu);
    RescaledMoments m = rescaled_moments(mu);
    t.add({num(temp), num(mu.log_Z()), num(gap), num(m.mean_z[0]), num(m.var_z[0])});
  }
  emit(c, "laplace", t);
}

void run_sweep_cmd(const Common& c) {
  Config cfg = Config::load(c.config);
  SweepResult r = run_sweep(cfg);
  if (c.dump_measure) {
    PotentialPtr p = config_potential(cfg);
    for (double temp : config_temperatures(cfg))
      dump_measure(c, build_gibbs(p, temp, cfg.number("grid.resolution", 400.0)));
  }
  if (c.out.empty()) {
    std::cout << render_sweep(r, OutputFormat::csv);
    std::cerr << render_csv(summary_table(r));
  } else {
    render_outputs(r, out_dir(c).string());
  }
  for (const auto& row : r.rows)
    if (!row.ok) std::cerr << "row t=" << num(row.t) << " failed: " << row.error << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Ballistic functional-inequality estimators"};
  app.require_subcommand(1);
  Common common;
  std::function<void(const Common&)> action;

  auto add = [&](const std::string& name, const std::string& help, std::function<void(const Common&)> fn) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("--config", common.config, "key = value configuration file")->required();
    sub->add_option("--out", common.out, "output directory (default: stdout)");
    sub->add_flag("--dump-measure", common.dump_measure, "write the Gibbs grid as CSV");
    sub->callback([&action, fn] { action = fn; });
  };
  add("pl", "static and dynamic PL constant", run_pl);
  add("poincare", "spectral Poincare constant, Muckenhoupt bracket, Lyapunov bound", run_poincare);
  add("lsi", "log-Sobolev lower and upper bounds", run_lsi);
  add("langevin", "Euler-Maruyama particle moments and KL decay", run_langevin);
  add("sweep", "temperature sweep with summary", run_sweep_cmd);
  add("laplace", "Laplace approximation gap", run_laplace);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }
  try {
    action(common);
  } catch (const PreconditionError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
