// qgverify: command-line driver for the exact verification suites.
//
// Exit codes: 0 all non-skipped checks pass, 1 at least one check fails or
// errors, 2 on configuration or internal error.

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>

#include "qgv/report.hpp"
#include "qgv/suites.hpp"

namespace {

// "var=p/q" -> (var, mpq)
std::pair<std::string, mpq_class> parse_assign(const std::string& s) {
  auto eq = s.find('=');
  if (eq == std::string::npos || eq == 0)
    throw std::invalid_argument("--assign expects var=rational, got: " + s);
  std::string name = s.substr(0, eq), val = s.substr(eq + 1);
  mpq_class v;
  if (v.set_str(val, 10) != 0)
    throw std::invalid_argument("--assign: cannot parse rational: " + val);
  v.canonicalize();
  return {name, v};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"qgverify: exact symbolic verification of bicovariant calculi"};
  std::string series = "SL", sign = "+", metric = "symbolic", suite = "all";
  std::string out_path, format = "json";
  int N = 3;
  bool timings = false;
  std::vector<std::string> assigns;
  app.add_option("--series", series, "series: SL, O or Sp")
      ->check(CLI::IsMember({"SL", "O", "Sp"}));
  app.add_option("--N", N, "rank of the fundamental corepresentation");
  app.add_option("--sign", sign, "calculus sign")->check(CLI::IsMember({"+", "-"}));
  app.add_option("--metric", metric, "metric parameter mode")
      ->check(CLI::IsMember({"symbolic", "sample"}));
  app.add_option("--assign", assigns,
                 "rational assignment var=p/q for sample mode (repeatable)");
  app.add_option("--suite", suite, "suite selection")
      ->check(CLI::IsMember(
          {"all", "sigma", "mor", "metric", "lc", "classical", "rosso", "starb"}));
  app.add_option("--out", out_path, "output path (default: stdout)");
  app.add_option("--format", format, "report format")
      ->check(CLI::IsMember({"json", "md"}));
  app.add_flag("--timings", timings,
               "keep measured runtimes in the report (breaks byte determinism)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 2;  // --help exits 0, parse errors are config errors
  }

  qgv::GroupSpec spec;
  spec.N = N;
  spec.sign = (sign == "-") ? -1 : +1;
  bool valid = false;
  if (series == "SL") { spec.series = qgv::Series::SL; valid = (N == 2 || N == 3); }
  if (series == "O") { spec.series = qgv::Series::O; valid = (N == 3); }
  if (series == "Sp") { spec.series = qgv::Series::Sp; valid = (N == 4); }
  if (!valid) {
    std::fprintf(stderr,
                 "unsupported spec %s_q(%d); targets: SL N=2,3; O N=3; Sp N=4\n",
                 series.c_str(), N);
    return 2;
  }
  if (!assigns.empty() && metric != "sample") {
    std::fprintf(stderr, "--assign requires --metric sample\n");
    return 2;
  }

  qgv::SuiteOptions opt;
  opt.suite = suite;
  opt.sample_mode = (metric == "sample");
  opt.timings = timings;
  try {
    for (const auto& a : assigns) opt.assignments.push_back(parse_assign(a));
  } catch (const std::exception& e) {
    std::fprintf(stderr, "%s\n", e.what());
    return 2;
  }

  qgv::Report rep;
  rep.config.series = series;
  rep.config.N = N;
  rep.config.sign = sign;
  rep.config.metric_mode = metric;
  rep.config.assignments = assigns;
  rep.config.suite = suite;
  rep.config.out_path = out_path;
  rep.config.format = format;
  rep.config.timings = timings;

  try {
    rep.checks = qgv::run_suites(spec, opt);
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "configuration error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "internal error: %s\n", e.what());
    return 2;
  }
  rep.sort_by_id();
  if (!rep.emit()) {
    std::fprintf(stderr, "failed to write report to %s\n", rep.config.out_path.c_str());
    return 2;
  }
  return rep.all_passed() ? 0 : 1;
}
