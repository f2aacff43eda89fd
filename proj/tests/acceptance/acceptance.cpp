// Acceptance checks AC1..AC10. One PASS/FAIL line per criterion; INFO lines
// carry recorded-but-not-asserted quantities. Exits 1 if any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "bfi/dynamics.hpp"
#include "bfi/logsobolev.hpp"
#include "bfi/measures.hpp"
#include "bfi/pl.hpp"
#include "bfi/poincare.hpp"
#include "bfi/sweep.hpp"

using namespace bfi;

namespace {

constexpr double kSineCplOracle = 0.930902155620974;
const std::vector<double> kLadder{0.2, 0.1, 0.05, 0.02, 0.01};

struct Check {
  bool ok = true;
  std::ostringstream detail;

  void expect(bool cond, const std::string& what) {
    if (!cond) {
      ok = false;
      detail << " [violated: " << what << "]";
    }
  }
};

int failures = 0;

void run(const char* id, double budget_s, const std::function<void(Check&)>& body) {
  Check c;
  auto start = std::chrono::steady_clock::now();
  try {
    body(c);
  } catch (const std::exception& e) {
    c.ok = false;
    c.detail << " [exception: " << e.what() << "]";
  }
  double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (budget_s > 0.0) c.expect(secs < budget_s, "runtime < " + format_number(budget_s) + " s");
  if (!c.ok) ++failures;
  std::printf("%s %s (%.2f s)%s\n", id, c.ok ? "PASS" : "FAIL", secs, c.detail.str().c_str());
  std::fflush(stdout);
}

void info(const std::string& line) {
  std::printf("  INFO %s\n", line.c_str());
  std::fflush(stdout);
}

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

ConstantEstimate variational_from_search(const GibbsGrid& mu, const ConstantEstimate& lo) {
  auto init = TestDensity::gaussian(mu, lo.diagnostics.at("x0"), lo.diagnostics.at("sigma"));
  return ls_variational(mu, init, 500, 0.05);
}

struct Moments {
  double mean, var, mean_se, var_se;
};

Moments sample_moments(const std::vector<double>& x) {
  const double n = static_cast<double>(x.size());
  double m = 0.0;
  for (double v : x) m += v;
  m /= n;
  double m2 = 0.0, m4 = 0.0;
  for (double v : x) {
    double d = (v - m) * (v - m);
    m2 += d;
    m4 += d * d;
  }
  m2 /= n;
  m4 /= n;
  return {m, m2, std::sqrt(m2 / n), std::sqrt(std::max(m4 - m2 * m2, 0.0) / n)};
}

std::pair<double, double> quadrature_moments(const GibbsGrid& mu) {
  double m = 0.0, v = 0.0;
  for (std::size_t i = 0; i < mu.size(); ++i) m += mu.weights()[i] * mu.geometry().coordinate(i, 0);
  for (std::size_t i = 0; i < mu.size(); ++i) {
    double z = mu.geometry().coordinate(i, 0) - m;
    v += mu.weights()[i] * z * z;
  }
  return {m, v};
}

int cli(const std::string& args) {
  std::string cmd = std::string(BFI_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

int main() {
  run("AC1", 10.0, [](Check& c) {
    for (double a : {0.5, 1.0, 2.0})
      for (double t : {1.0, 0.1}) {
        const double exact = t / a;
        auto mu = build_gibbs(make_quadratic(a), t, 200);
        double cp = poincare_spectral(mu).value;
        auto lo = ls_lower_bound_search(mu);
        double var = variational_from_search(mu, lo).value;
        double up = ls_upper_bound(mu).value;
        double gap = laplace_gap(mu);
        std::string tag = "alpha=" + format_number(a) + " t=" + format_number(t);
        c.expect(rel(cp, exact) <= 1e-3, tag + " poincare");
        c.expect(rel(lo.value, exact) <= 1e-2, tag + " ls_lower");
        c.expect(rel(var, exact) <= 1e-2, tag + " ls_variational");
        c.expect(rel(up, exact) <= 1e-2, tag + " ls_upper");
        c.expect(std::abs(gap) <= 1e-8, tag + " laplace_gap");
      }
  });

  run("AC2", 30.0, [](Check& c) {
    double r = poincare_spectral(build_gibbs(make_sine_squared(1.0), 0.01, 400)).value / 0.01;
    c.detail << " poincare/t=" << format_number(r);
    c.expect(r >= 0.2425 && r <= 0.2575, "poincare/t in [0.2425, 0.2575]");
  });

  run("AC3", 300.0, [](Check& c) {
    auto p = make_sine_squared(1.0);
    double c1 = pl_constant_static(*p, 1000.0).value;
    double c2 = pl_constant_static(*p, 2000.0).value;
    c.detail << " C_PL=" << format_number(c1) << "/" << format_number(c2);
    char a[32], b[32];
    std::snprintf(a, sizeof a, "%.2e", c1);
    std::snprintf(b, sizeof b, "%.2e", c2);
    c.expect(std::string(a) == b, "3 significant digits stable under doubling");
    c.expect(rel(c1, kSineCplOracle) <= 1e-6, "matches brute-force oracle");
    const double t = 0.01;
    auto mu = build_gibbs(p, t, 400);
    auto lo = ls_lower_bound_search(mu);
    double var = variational_from_search(mu, lo).value;
    c.detail << " ls_variational/t=" << format_number(var / t) << " ls_lower/t=" << format_number(lo.value / t);
    c.expect(rel(var / t, c1) <= 0.1, "ls_variational/t within 10% of C_PL");
    c.expect(lo.value / t >= 0.9 * c1, "ls_lower/t >= 0.9 C_PL");
  });

  run("AC4", 0.0, [](Check& c) {
    SweepOptions o;
    auto r = run_sweep(make_sine_squared(1.0), kLadder, o);
    for (const auto& row : r.rows) {
      std::string tag = "t=" + format_number(row.t);
      c.expect(row.ok, tag + " row ok: " + row.error);
      if (!row.ok) continue;
      c.expect(row.ls_lower <= row.ls_variational, tag + " ls_lower <= ls_variational");
      c.expect(row.ls_variational <= row.ls_upper + 1e-6, tag + " ls_variational <= ls_upper");
      c.expect(row.poincare_spectral <= row.ls_upper + 1e-6, tag + " poincare <= ls_upper");
    }
    c.detail << " rows=" << r.rows.size() << " cbls=" << format_number(r.summary.cbls_estimate)
             << " cap=" << format_number(r.summary.cap_estimate);
  });

  run("AC5", 60.0, [](Check& c) {
    std::vector<Point> inits;
    for (int i = -40; i <= 40; ++i)
      if (i != 0) inits.push_back({0.1 * i});
    for (auto p : {make_quadratic(1.0), make_quadratic(2.0), make_sine_squared(1.0)}) {
      double st = pl_constant_static(*p, 1000.0).value;
      double dy = pl_constant_dynamic(*p, inits, 2.0, 1e-3).value;
      c.detail << " " << p->name << ":" << format_number(rel(dy, st));
      c.expect(rel(dy, st) <= 0.02, p->name + " dynamic within 2% of static");
    }
  });

  run("AC6", 0.0, [](Check& c) {
    auto p = make_sine_squared(1.0);
    for (double t : {0.05, 0.02}) {
      auto lp = select_lyapunov_params(*p, t, 1.0, kSineCplOracle);
      c.expect(lp.has_value(), "admissible parameters at t=" + format_number(t));
      if (!lp) continue;
      auto mu = build_gibbs(p, t, 400);
      auto chk = lyapunov_criterion_verify(mu, *lp);
      double bound = lyapunov_bound_formula(*lp);
      double cp = poincare_spectral(mu).value;
      c.detail << " t=" << format_number(t) << ":margin=" << format_number(chk.min_margin)
               << ",bound/cp=" << format_number(bound / cp);
      c.expect(chk.min_margin >= -1e-9, "criterion margin at t=" + format_number(t));
      c.expect(bound >= cp, "bound >= poincare at t=" + format_number(t));
    }
    // bound/t at t0/100 against its t -> 0 limit.
    auto limit_error = [](double cpl, double L0, double alpha, double r0, double k) {
      auto lp = LyapunovParams::make(cpl, L0, 0.0, alpha, r0, k, 1.0);
      lp.t = lp.t0() / 100.0;
      return rel(lyapunov_bound_formula(lp) / lp.t, cpl / k + 1.0 / alpha);
    };
    const double alpha = local_convexity(*p, 1.0);
    for (double k : {3.0, 4.0}) {
      double e = limit_error(kSineCplOracle, 4.0, alpha, 1.0, k);
      c.detail << " sine k=" << k << ":limit_err=" << format_number(e);
      c.expect(e <= 0.01, "sine limit within 1% at k=" + format_number(k));
    }
    double eq = limit_error(1.0, 1.0, 1.0, 1.0, 2.0);
    c.detail << " quadratic k=2:limit_err=" << format_number(eq);
    c.expect(eq <= 0.01, "quadratic limit within 1% at k=2");
    for (double k : {1.0, 2.0})
      info("AC6 sine k=" + format_number(k) + " limit error at t0/100 = " +
           format_number(limit_error(kSineCplOracle, 4.0, alpha, 1.0, k)) + " (not asserted)");
  });

  run("AC7", 0.0, [](Check& c) {
    const double cpl = kSineCplOracle, beta = 4.0, d = 1.0;
    auto lp = LyapunovParams::make(cpl, beta * d, 0.0, 1.0 / (2.0 * cpl), 1.0, 1.0, 1.0);
    const double t_end = lp.delta / (cpl * beta * d);
    const double t_half = t_end / 2.0;
    double worst = 0.0;
    for (int i = 1; i <= 20; ++i) {
      lp.t = t_half * i / 20.0;
      double ratio = lyapunov_bound_formula(lp) / (cpl * lp.t);
      worst = std::max(worst, ratio);
      c.expect(ratio <= 5.0, "bound <= 5 C_PL t at t=" + format_number(lp.t));
    }
    lp.t = t_end;
    double endpoint = lyapunov_bound_formula(lp) / (cpl * lp.t);
    c.detail << " max bound/(C_PL t)=" << format_number(worst);
    info("AC7 endpoint t=" + format_number(t_end) + " bound/(C_PL t) = " + format_number(endpoint) +
         " (recorded, not asserted)");
  });

  run("AC8", 0.0, [](Check& c) {
    auto p = make_sine_squared(1.0);
    double g1 = std::abs(laplace_gap(p, 0.1, 400));
    double g2 = std::abs(laplace_gap(p, 0.01, 400));
    c.detail << " |gap| t=0.1:" << format_number(g1) << " t=0.01:" << format_number(g2);
    c.expect(g2 < 0.05, "|gap| < 0.05 at t=0.01");
    c.expect(g2 < g1, "gap shrinks");
  });

  run("AC9", 0.0, [](Check& c) {
    auto est = pl_constant_static(*make_double_well(), 200.0);
    c.expect(est.divergent, "static PL divergent flag");
    const std::string cfg = std::string(" --config ") + BFI_DATA_DIR + "/double_well.cfg";
    for (const char* sub : {"poincare", "lsi", "sweep"}) {
      int rc = cli(std::string(sub) + cfg);
      c.detail << " " << sub << ":" << rc;
      c.expect(rc == 2, std::string(sub) + " exits 2");
    }
  });

  run("AC10", 120.0, [](Check& c) {
    struct Case {
      PotentialPtr p;
      double t, dt, burn_in, x0;
    };
    for (const auto& k : {Case{make_quadratic(1.0), 0.5, 2e-3, 10.0, 1.0},
                          Case{make_sine_squared(1.0), 0.1, 1e-3, 3.0, 0.5}}) {
      EnsembleConfig cfg;
      cfg.particles = 100000;
      cfg.dt = k.dt;
      cfg.burn_in = k.burn_in;
      cfg.seed = 7;
      cfg.init = EnsembleInit::at({k.x0});
      auto ens = langevin_run(k.p, k.t, cfg);
      auto s = sample_moments(ens.particles);
      auto [qm, qv] = quadrature_moments(build_gibbs(k.p, k.t, 400));
      double zm = (s.mean - qm) / s.mean_se, zv = (s.var - qv) / s.var_se;
      c.detail << " " << k.p->name << ":z_mean=" << format_number(zm) << ",z_var=" << format_number(zv);
      c.expect(std::abs(zm) <= 4.0 && std::abs(zv) <= 4.0, k.p->name + " moments within 4 SE");
    }
    EnsembleConfig cfg;
    cfg.particles = 20000;
    cfg.dt = 2e-3;
    cfg.seed = 11;
    cfg.init = EnsembleInit::normal({2.0}, 0.5);
    auto decay = empirical_kl_decay(make_quadratic(1.0), 1.0, cfg, {0.0, 0.25, 0.5, 0.75, 1.0}, 8);
    double rate = fitted_decay_rate(decay);
    c.detail << " OU KL rate=" << format_number(rate) << " (closed form 2)";
    c.expect(rate >= 1.0 && rate <= 4.0, "OU decay rate within factor 2");
  });

  std::printf("%d criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
