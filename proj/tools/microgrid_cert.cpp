#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "mgc/cli.hpp"
#include "mgc/errors.hpp"

namespace {

void add_certify_flags(CLI::App* cmd, mgc::cli::CertifyFlags& flags, std::string& g_text,
                       std::string& objective, bool& optimize) {
  auto* opt = cmd->add_flag("--optimize", optimize, "optimize the modal weights g (default)");
  cmd->add_option("--g", g_text, "comma-separated weights g_1..g_{n-1}")->excludes(opt);
  cmd->add_option("--zeta0", flags.zeta0, "starting level inside the certified interval");
  cmd->add_option("--objective", objective, "optimizer objective: b or margin")
      ->check(CLI::IsMember({"b", "margin"}));
  cmd->add_option("--seed", flags.seed, "optimizer / sampler seed (env MGC_SEED)");
}

void finish_certify_flags(mgc::cli::CertifyFlags& flags, const std::string& g_text,
                          const std::string& objective) {
  if (!g_text.empty()) flags.g = mgc::cli::parse_list(g_text);
  flags.objective = objective == "margin" ? mgc::Objective::Margin : mgc::Objective::MinB;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Stability certificate for droop-controlled microgrids"};
  app.set_version_flag("--version", std::string(MGC_VERSION));
  app.require_subcommand(1);

  const std::uint64_t seed = mgc::cli::default_seed();

  mgc::cli::AnalyzeOptions analyze;
  std::string analyze_csv;
  auto* a = app.add_subcommand("analyze", "print the modal decomposition");
  a->add_option("config", analyze.config, "network JSON")->required();
  a->add_option("--csv", analyze_csv, "directory for full-precision CSV matrices");

  std::filesystem::path certify_config;
  mgc::cli::CertifyFlags certify;
  certify.seed = seed;
  std::string certify_g, certify_obj = "b", certify_out;
  bool certify_opt = false;
  auto* c = app.add_subcommand("certify", "check contractivity and compute the ultimate bound");
  c->add_option("config", certify_config, "network JSON")->required();
  add_certify_flags(c, certify, certify_g, certify_obj, certify_opt);
  c->add_option("--out", certify_out, "write JSON here instead of stdout");

  mgc::cli::SimulateOptions simulate;
  simulate.certify.seed = seed;
  std::string sim_x0, sim_modal, sim_out;
  auto* s = app.add_subcommand("simulate", "integrate the nonlinear closed loop");
  s->add_option("config", simulate.config, "network JSON")->required();
  s->add_option("--t-final", simulate.t_final, "end time [s]")->check(CLI::PositiveNumber);
  s->add_option("--dt", simulate.dt, "RK4 step [s]")->check(CLI::PositiveNumber);
  s->add_option("--stride", simulate.stride, "record every k-th step")->check(CLI::PositiveNumber);
  s->add_option("--x0", sim_x0, "CSV with the 2n initial state [theta; p]");
  s->add_option("--modal", sim_modal, "comma-separated 2n modal coordinates z");
  s->add_flag("--random-admissible", simulate.random_admissible,
              "draw a start inside the certified region");
  s->add_option("--seed", simulate.certify.seed, "sampler seed (env MGC_SEED)");
  s->add_option("--out", sim_out, "trajectory CSV path (default stdout)");

  mgc::cli::ReportOptions report;
  report.certify.seed = seed;
  std::string report_g, report_obj = "b", report_out, report_plots;
  bool report_opt = false, no_validate = false;
  auto* r = app.add_subcommand("report", "full JSON report with simulation validation");
  r->add_option("config", report.config, "network JSON")->required();
  add_certify_flags(r, report.certify, report_g, report_obj, report_opt);
  r->add_option("--samples", report.samples, "number of validation starts");
  r->add_option("--t-final", report.t_final, "validation horizon [s]")->check(CLI::PositiveNumber);
  r->add_flag("--no-validate", no_validate, "skip the simulation validation");
  r->add_option("--out", report_out, "write JSON here instead of stdout");
  r->add_option("--plot-dir", report_plots, "directory for phase/frequency CSV series");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : static_cast<int>(mgc::ExitCode::Usage);
  }

  try {
    if (*a) {
      if (!analyze_csv.empty()) analyze.csv_dir = analyze_csv;
      return mgc::cli::cmd_analyze(analyze, std::cout, std::cerr);
    }
    if (*c) {
      finish_certify_flags(certify, certify_g, certify_obj);
      if (certify_out.empty()) return mgc::cli::cmd_certify(certify_config, certify, std::cout, std::cerr);
      std::ofstream f(certify_out);
      if (!f) {
        std::cerr << "error: cannot write '" << certify_out << "'\n";
        return static_cast<int>(mgc::ExitCode::Validation);
      }
      return mgc::cli::cmd_certify(certify_config, certify, f, std::cerr);
    }
    if (*s) {
      if (!sim_x0.empty()) simulate.x0_csv = sim_x0;
      if (!sim_modal.empty()) simulate.modal = mgc::cli::parse_list(sim_modal);
      if (!sim_out.empty()) simulate.out = sim_out;
      return mgc::cli::cmd_simulate(simulate, std::cout, std::cerr);
    }
    if (*r) {
      finish_certify_flags(report.certify, report_g, report_obj);
      report.validate = !no_validate;
      if (!report_out.empty()) report.out = report_out;
      if (!report_plots.empty()) report.plot_dir = report_plots;
      return mgc::cli::cmd_report(report, std::cout, std::cerr);
    }
  } catch (const mgc::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return static_cast<int>(e.code());
  }
  return static_cast<int>(mgc::ExitCode::Usage);
}
