// conserv-stat: build, verify and round-trip conservative statistical
// structures from cubic and abelian differentials.
//
//   conserv-stat solve     --config job.json [--out DIR] [--grid N] [--quiet]
//   conserv-stat verify    --input DUMPDIR   [--config job.json] [--out DIR]
//   conserv-stat roundtrip --config job.json [--out DIR] [--grid N]
//
// Exit codes: 0 ok, 2 Newton did not converge, 3 obstruction,
// 4 config or parse error, 5 I/O error.

#include <cstdio>
#include <exception>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "cstat/errors.hpp"
#include "cstat/pipeline.hpp"

namespace {

struct Options {
  std::string config;
  std::string out;
  std::string input;
  int grid = 0;
  bool quiet = false;
};

void print_summary(const cstat::DiagnosticsReport& r) {
  const cstat::ChartSpec& g = r.grid;
  std::printf("%s on %s %dx%d\n", r.command.c_str(), g.kind == cstat::ChartKind::Torus ? "torus" : "disk", g.nx,
              g.ny);
  if (r.solver.ran)
    std::printf("  solver: %s after %d iterations, sup|R| = %.3e%s%s\n", cstat::to_string(r.solver.status),
                r.solver.iterations, r.solver.residual_history.empty() ? 0.0 : r.solver.residual_history.back(),
                r.solver.message.empty() ? "" : ", ", r.solver.message.c_str());
  const auto row = [](const char* name, const cstat::NormPair& p) {
    std::printf("  %-24s sup %.3e  l2 %.3e\n", name, p.sup, p.l2);
  };
  const cstat::ResidualPanel& p = r.panel;
  row("hitchin_residual", p.hitchin_residual);
  row("normalization_residual", p.normalization_residual);
  row("field_equation_residual", p.field_equation_residual);
  row("dtau", p.dtau);
  row("divtau", p.divtau);
  row("dbar_q", p.dbar_q);
  row("dbar_w", p.dbar_w);
  row("torsion", p.torsion);
  row("nabla_g_plus_C", p.nabla_g_plus_C);
  if (r.roundtrip_reference) {
    row("roundtrip_w_error", p.roundtrip_w_error);
    row("roundtrip_q_error", p.roundtrip_q_error);
  }
  std::printf("  conservative: %s  normalized: %s\n", r.verdict.conservative ? "yes" : "no",
              r.verdict.normalized ? "yes" : "no");
  if (r.roundtrip)
    std::printf("  roundtrip: |w'-w| %.3e  |q'-q| %.3e  recovered: %s\n", r.roundtrip->w_error_sup,
                r.roundtrip->q_error_sup, r.roundtrip->recovered ? "yes" : "no");
}

cstat::JobConfig make_config(const Options& o) {
  cstat::JobConfig cfg = o.config.empty() ? cstat::JobConfig{} : cstat::load_job_config(o.config);
  if (o.grid > 0) cfg.chart.nx = cfg.chart.ny = o.grid;
  if (!o.out.empty()) cfg.outputs.dir = o.out;
  if (!o.input.empty()) cfg.input_dir = o.input;
  return cfg;
}

int run(const std::string& command, const Options& o) {
  const cstat::JobConfig cfg = make_config(o);
  cstat::JobResult r = command == "solve"       ? cstat::run_forward(cfg)
                       : command == "roundtrip" ? cstat::run_roundtrip(cfg)
                                                : cstat::run_verify(cfg);
  if (!o.quiet) print_summary(r.report);
  return r.report.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Conservative statistical structures from Higgs bundle data"};
  app.require_subcommand(1);
  Options opt;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", opt.config, "JSON job config");
    sub->add_option("--out", opt.out, "output directory for report.json and dumps");
    sub->add_option("--grid", opt.grid, "override nx = ny = N")->check(CLI::Range(16, 1 << 14));
    sub->add_flag("--quiet", opt.quiet, "suppress the summary on stdout");
  };
  CLI::App* solve = app.add_subcommand("solve", "solve for the metric and build the structure");
  CLI::App* verify = app.add_subcommand("verify", "recheck dumped fields without solving");
  CLI::App* roundtrip = app.add_subcommand("roundtrip", "build the structure and recover its moduli");
  for (CLI::App* sub : {solve, verify, roundtrip}) add_common(sub);
  verify->add_option("--input", opt.input, "directory holding fields.json and .f64 dumps");
  solve->add_option("--input", opt.input, "ignored by solve")->group("");
  roundtrip->add_option("--input", opt.input, "ignored by roundtrip")->group("");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return cstat::kExitConfigError;
  }

  const std::string command = app.get_subcommands().front()->get_name();
  try {
    return run(command, opt);
  } catch (const cstat::IoError& e) {
    std::cerr << "conserv-stat: " << e.what() << "\n";
    return cstat::kExitIoError;
  } catch (const cstat::ParseError& e) {
    std::cerr << "conserv-stat: " << e.what() << "\n";
    return cstat::kExitConfigError;
  } catch (const std::invalid_argument& e) {
    std::cerr << "conserv-stat: invalid configuration: " << e.what() << "\n";
    return cstat::kExitConfigError;
  } catch (const cstat::ContractViolation& e) {
    std::cerr << "conserv-stat: invalid configuration: " << e.what() << "\n";
    return cstat::kExitConfigError;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "conserv-stat: " << e.what() << "\n";
    return cstat::kExitIoError;
  } catch (const std::exception& e) {
    std::cerr << "conserv-stat: " << e.what() << "\n";
    return 1;
  }
}
