#include <cstdio>
#include <exception>
#include <string>

#include <CLI11.hpp>

#include "cuspflow/harness.hpp"

using namespace cuspflow;

int main(int argc, char** argv) {
  CLI::App app{"cuspflow: numerical experiments for the contracting-cusp Ricci flow"};
  app.require_subcommand(1);

  std::string config_path, out_dir, format, r0_csv, t_samples_csv;
  int grid_n = 0;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "flat key=value configuration file");
    sub->add_option("--out", out_dir, "output directory (default: .)");
    sub->add_option("--format", format, "csv | json | both");
    sub->add_option("--grid", grid_n, "grid intervals N");
    sub->add_option("--r0", r0_csv, "comma list of cap radii (floats or e-30 form)");
    sub->add_option("--t-samples", t_samples_csv, "comma list of sample times");
  };
  CLI::App* lemmas = app.add_subcommand("lemmas", "closed-form lemma battery (no PDE)");
  CLI::App* validate = app.add_subcommand("validate", "solver validation against exact flows");
  CLI::App* contract = app.add_subcommand("contract", "contracting-cusp asymptotics runs");
  add_common(lemmas);
  add_common(validate);
  add_common(contract);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);  // --help is not an error
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  harness::ExperimentConfig cfg;
  try {
    if (!config_path.empty()) cfg = harness::load_config_file(config_path);
    cfg.experiment = app.get_subcommands().front()->get_name();
    if (!out_dir.empty()) cfg.out_dir = out_dir;
    if (!format.empty()) cfg.format = format;
    if (grid_n > 0) cfg.grid_n = grid_n;
    if (!r0_csv.empty()) cfg.r0_list = harness::parse_list(r0_csv, true);
    if (!t_samples_csv.empty()) cfg.t_samples = harness::parse_list(t_samples_csv, false);
    if (cfg.r0_list.empty()) cfg.r0_list = {9.357622968840175e-14};  // e^{-30}
    cfg.validate();
  } catch (const harness::ConfigError& e) {
    std::fprintf(stderr, "configuration error: %s\n", e.what());
    return 2;
  }

  try {
    const harness::RunReport report = harness::run_experiment(cfg);
    harness::emit_report(report, cfg.format, cfg.out_dir);
    for (const auto& a : report.assertions)
      std::printf("[%s] %s: %s\n", a.passed ? "PASS" : "FAIL", a.name.c_str(), a.detail.c_str());
    if (!report.first_failure.empty()) {
      std::printf("first failing assertion: %s\n", report.first_failure.c_str());
      return 1;
    }
    return 0;
  } catch (const harness::ConfigError& e) {
    std::fprintf(stderr, "configuration error: %s\n", e.what());
    return 2;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "configuration error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "solver failure: %s\n", e.what());
    return 3;
  }
}
