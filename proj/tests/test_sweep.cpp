#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "bfi/config.hpp"
#include "bfi/error.hpp"
#include "bfi/sweep.hpp"

using namespace bfi;

namespace {

std::size_t count_lines(const std::string& s) { return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n')); }

SweepResult quadratic_sweep() {
  SweepOptions o;
  o.resolution = 200.0;
  o.lsi_iters = 50;
  return run_sweep(make_quadratic(1.0), {1.0, 0.5, 0.1}, o);
}

}  // namespace

TEST(Config, ParsesKeysCommentsAndLists) {
  auto c = Config::parse_string(
      "# comment\npotential = sine_squared\npotential.c = 0.5  # trailing\n"
      "temperatures = 0.2, 0.1 0.05\nlsi.iters = 20\nflag = yes\n");
  EXPECT_EQ(c.require_string("potential"), "sine_squared");
  EXPECT_DOUBLE_EQ(c.number("potential.c", 0.0), 0.5);
  EXPECT_EQ(config_temperatures(c), (std::vector<double>{0.2, 0.1, 0.05}));
  EXPECT_EQ(c.count("lsi.iters", 1), 20u);
  EXPECT_TRUE(c.flag("flag", false));
  EXPECT_EQ(c.section("potential").at("c"), "0.5");
  EXPECT_EQ(config_potential(c)->name, make_sine_squared(0.5)->name);
}

TEST(Config, Errors) {
  EXPECT_THROW(Config::parse_string("no equals sign\n"), PreconditionError);
  EXPECT_THROW(Config::parse_string("= 3\n"), PreconditionError);
  auto c = Config::parse_string("x = abc\nn = 1.5\ntemperatures = -1\n");
  EXPECT_THROW(c.number("x", 0.0), PreconditionError);
  EXPECT_THROW(c.count("n", 0), PreconditionError);
  EXPECT_THROW(c.require_string("potential"), PreconditionError);
  EXPECT_THROW(config_temperatures(c), PreconditionError);
  EXPECT_THROW(Config::load("/nonexistent/file.cfg"), PreconditionError);
}

TEST(Output, NumberFormatting) {
  EXPECT_EQ(format_number(1.0 / 3.0), "0.333333333333");
  EXPECT_EQ(format_number(0.5), "0.5");
  EXPECT_EQ(format_number(std::numeric_limits<double>::infinity()), "inf");
  EXPECT_EQ(format_number(-std::numeric_limits<double>::infinity()), "-inf");
  EXPECT_EQ(format_number(std::nan("")), "nan");
}

TEST(Output, CsvQuoting) {
  EXPECT_EQ(csv_field("plain"), "plain");
  EXPECT_EQ(csv_field("a,b"), "\"a,b\"");
  EXPECT_EQ(csv_field("say \"hi\""), "\"say \"\"hi\"\"\"");
  EXPECT_EQ(csv_field("two\nlines"), "\"two\nlines\"");
  Table t{{"a", "b"}, {{"1", "x,y"}}};
  EXPECT_EQ(render_csv(t), "a,b\n1,\"x,y\"\n");
}

TEST(Output, MarkdownLayout) {
  Table t{{"a", "b"}, {{"1", "2"}}};
  std::string md = render_markdown(t);
  EXPECT_EQ(count_lines(md), 3u);
  EXPECT_NE(md.find("| a | b |"), std::string::npos);
}

TEST(Sweep, RichardsonExtrapolation) {
  EXPECT_DOUBLE_EQ(richardson_zero(0.1, 1.1, 0.2, 1.2), 1.0);
  EXPECT_DOUBLE_EQ(richardson_zero(0.1, 3.0, 0.1, 4.0), 3.0);
}

TEST(Sweep, QuadraticConstantsAreRecovered) {
  auto r = quadratic_sweep();
  ASSERT_EQ(r.rows.size(), 3u);
  for (const auto& row : r.rows) {
    ASSERT_TRUE(row.ok) << row.error;
    EXPECT_NEAR(row.poincare_over_t, 1.0, 1e-6);
    EXPECT_NEAR(row.ls_upper / row.t, 1.0, 1e-5);
    EXPECT_GE(row.lyapunov_bound, row.poincare_spectral * (1.0 - 1e-9));
  }
  EXPECT_NEAR(r.summary.cap_estimate, 1.0, 0.01);
  EXPECT_NEAR(r.summary.cbls_estimate, 1.0, 0.01);
  EXPECT_DOUBLE_EQ(r.summary.lambda_min, 1.0);
}

TEST(Sweep, CsvHasOneRowPerTemperatureAndIsDeterministic) {
  auto a = render_sweep(quadratic_sweep(), OutputFormat::csv);
  auto b = render_sweep(quadratic_sweep(), OutputFormat::csv);
  EXPECT_EQ(a, b);
  EXPECT_EQ(count_lines(a), 4u);
  EXPECT_EQ(a.substr(0, a.find(',')), "t");
}

TEST(Sweep, ThreadCountDoesNotChangeResults) {
  SweepOptions o;
  o.resolution = 100.0;
  o.lsi_iters = 20;
  o.threads = 1;
  auto one = render_sweep(run_sweep(make_sine_squared(1.0), {0.2, 0.1}, o), OutputFormat::csv);
  o.threads = 2;
  auto two = render_sweep(run_sweep(make_sine_squared(1.0), {0.2, 0.1}, o), OutputFormat::csv);
  EXPECT_EQ(one, two);
}

TEST(Sweep, GnuplotHasTwoBlocks) {
  auto dat = render_sweep(quadratic_sweep(), OutputFormat::gnuplot);
  auto split = dat.find("\n\n\n");
  ASSERT_NE(split, std::string::npos);
  EXPECT_EQ(dat.find("\n\n\n", split + 1), std::string::npos);
}

TEST(Sweep, RefusesDivergentPlConstant) {
  try {
    run_sweep(make_double_well(), {0.1}, SweepOptions{});
    FAIL() << "expected PreconditionError";
  } catch (const PreconditionError& e) {
    EXPECT_NE(std::string(e.what()).find("PL constant divergent"), std::string::npos);
  }
}

TEST(Sweep, RowFailureIsRecorded) {
  SweepOptions o;
  o.resolution = 100.0;
  o.lsi_iters = 10;
  auto r = run_sweep(make_quartic(1.0, 0.5), {0.1}, o);
  ASSERT_EQ(r.rows.size(), 1u);
  EXPECT_FALSE(r.rows[0].ok);
  EXPECT_FALSE(r.rows[0].error.empty());
  auto csv = render_sweep(r, OutputFormat::csv);
  EXPECT_NE(csv.find("nan"), std::string::npos);
}

TEST(Sweep, OutputFilesAndUnwritablePath) {
  auto r = quadratic_sweep();
  auto dir = std::filesystem::temp_directory_path() / "bfi_sweep_test";
  std::filesystem::remove_all(dir);
  auto files = render_outputs(r, dir.string());
  EXPECT_EQ(files.size(), 4u);
  for (const auto& f : files) EXPECT_TRUE(std::filesystem::exists(f)) << f;
  std::filesystem::remove_all(dir);
  EXPECT_THROW(render_outputs(r, "/proc/bfi_no_such_dir"), PreconditionError);
}
