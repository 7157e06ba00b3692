#include <cstdio>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "wlss/config.hpp"
#include "wlss/core.hpp"
#include "wlss/experiments.hpp"
#include "wlss/report.hpp"
#include "wlss/suites.hpp"

namespace {

void print_report(const wlss::Report& r) {
  for (const auto& m : r.metrics) {
    std::printf("%-4s %-52s emp=%-13.6g pred=%-13.6g se=%-10.3g tol=%-10.3g %s", m.pass ? "ok" : "FAIL",
                m.name.c_str(), m.empirical, m.predicted, m.standard_error, m.tolerance, m.comparison.c_str());
    if (!m.error.empty()) std::printf("  error: %s", m.error.c_str());
    std::printf("\n");
  }
  std::printf("%s: %zu metrics, %s, %.1f s\n", r.kind.c_str(), r.metrics.size(),
              r.all_pass() ? "all pass" : "FAILURES", r.wall_clock_seconds);
}

void write_outputs(const wlss::Report& r, const std::string& out, const std::string& csv) {
  if (!out.empty()) wlss::write_report(r, out);
  if (!csv.empty()) wlss::write_report(r, csv, wlss::ReportFormat::kCsv);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Monte Carlo and exact-kernel checks for linear spectral statistics of Wigner matrices"};
  app.set_version_flag("--version", wlss::version());
  app.require_subcommand(1);

  std::string config_path, out, csv;
  long long n = 0, trials = 0, threads = -1;
  std::string seed;
  std::vector<std::string> sets;

  for (const auto& kind : wlss::experiment_kinds()) {
    auto* sub = app.add_subcommand(kind, "run the " + kind + " experiment");
    sub->add_option("--config", config_path, "flat key = value config file")->check(CLI::ExistingFile);
    sub->add_option("--n", n, "matrix dimension");
    sub->add_option("--trials", trials, "Monte Carlo trials");
    sub->add_option("--seed", seed, "base seed");
    sub->add_option("--threads", threads, "worker threads (0 = all cores)");
    sub->add_option("--out", out, "report path (.json or .csv)");
    sub->add_option("--csv", csv, "additional flat CSV metric table");
    sub->add_option("--set", sets, "override any config key: key=value");
  }
  auto* validate = app.add_subcommand("validate", "run the fast invariant suite");
  validate->add_option("--threads", threads, "worker threads (0 = all cores)");
  validate->add_option("--out", out, "report path (.json or .csv)");
  validate->add_option("--csv", csv, "additional flat CSV metric table");

  CLI11_PARSE(app, argc, argv);

  try {
    if (validate->parsed()) {
      const auto r = wlss::validation_suite(threads < 0 ? 0u : unsigned(threads));
      print_report(r);
      write_outputs(r, out, csv);
      return r.all_pass() ? 0 : 1;
    }
    const std::string kind = app.get_subcommands().front()->get_name();
    wlss::Config cfg = config_path.empty() ? wlss::Config{} : wlss::Config::load(config_path);
    if (cfg.has("kind") && cfg.get_string("kind", "") != kind)
      throw wlss::InvalidInput("config kind '" + cfg.get_string("kind", "") + "' does not match subcommand '" +
                               kind + "'");
    cfg.set_json("kind", kind);
    for (const auto& s : sets) {
      const auto eq = s.find('=');
      if (eq == std::string::npos) throw wlss::InvalidInput("--set expects key=value, got " + s);
      cfg.set(s.substr(0, eq), s.substr(eq + 1));
    }
    if (n > 0) cfg.set_json("n", n);
    if (trials > 0) cfg.set_json("trials", trials);
    if (!seed.empty()) cfg.set_json("seed", std::stoull(seed));
    if (threads >= 0) cfg.set_json("threads", threads);
    if (!out.empty()) cfg.set_json("out", out);
    const auto r = wlss::run_experiment(cfg);
    print_report(r);
    write_outputs(r, out, csv);
    return r.all_pass() ? 0 : 1;
  } catch (const wlss::InvalidInput& e) {
    std::cerr << "invalid input: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  }
}
