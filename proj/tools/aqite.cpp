// Command-line front end: run, sweep, plot, verify.

#include <filesystem>
#include <iostream>
#include <thread>

#include "CLI11.hpp"
#include "aqite/config.hpp"
#include "aqite/errors.hpp"
#include "aqite/plot.hpp"
#include "aqite/runner.hpp"
#include "aqite/verify.hpp"

namespace fs = std::filesystem;
using namespace aqite;

namespace {

int fail(const std::exception& e) {
  std::cerr << error_json(e).dump() << "\n";
  return exit_code_for(e);
}

int cmd_run(const std::string& file, const std::string& out_override) {
  const ExperimentSpec spec = experiment_from_config(Config::load(file));
  const fs::path dir =
      resolve_output_dir(out_override.empty() ? spec.output_dir : out_override);
  const RunResult r = run_to_directory(spec, dir);
  std::cout << summary_json(spec, r).dump() << "\n";
  return kExitOk;
}

int cmd_sweep(const std::string& file, int jobs, const std::string& out_override) {
  const Config config = Config::load(file);
  const SweepSpec sweep = sweep_from_config(config);
  std::string dir = out_override;
  if (dir.empty()) {
    dir = sweep.base.has("output.dir") ? sweep.base.at("output.dir").get<std::string>()
                                       : "sweep";
  }
  const fs::path root = resolve_output_dir(dir);
  const SweepOutcome o = run_sweep(sweep, jobs, root);
  std::cout << (root / "index.json").string() << ": "
            << o.index["n_points"] << " points, " << o.index["n_failed"]
            << " failed\n";
  return o.all_ok ? kExitOk : kExitFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Adiabatic imaginary-time evolution laboratory"};
  app.require_subcommand(1);

  std::string run_file, run_out;
  auto* run = app.add_subcommand("run", "Integrate one experiment");
  run->add_option("spec", run_file, "Experiment config file")->required();
  run->add_option("-o,--output", run_out, "Output directory (overrides output.dir)");

  std::string sweep_file, sweep_out;
  int jobs = 1;
  auto* sweep = app.add_subcommand("sweep", "Run a parameter sweep");
  sweep->add_option("sweep", sweep_file, "Sweep config file")->required();
  sweep->add_option("-j,--jobs", jobs, "Worker threads")
      ->check(CLI::PositiveNumber);
  sweep->add_option("-o,--output", sweep_out, "Output root (overrides output.dir)");

  std::string plot_input, plot_out;
  int figure = 1;
  auto* plot = app.add_subcommand("plot", "Render an SVG figure");
  plot->add_option("input", plot_input, "records.csv, run directory or index.json")
      ->required();
  plot->add_option("-f,--figure", figure, "Figure layout 1-5")
      ->check(CLI::Range(1, 5));
  plot->add_option("-o,--output", plot_out, "Directory for the SVG");

  int max_length = 6;
  auto* verify = app.add_subcommand("verify", "Run the invariant suite");
  verify->add_option("-L,--max-length", max_length, "Largest chain length")
      ->check(CLI::Range(4, 6));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (*run) return cmd_run(run_file, run_out);
    if (*sweep) return cmd_sweep(sweep_file, jobs, sweep_out);
    if (*plot) {
      fs::path input(plot_input);
      fs::path out = plot_out.empty()
                         ? (fs::is_directory(input) ? input : input.parent_path())
                         : fs::path(plot_out);
      std::cout << emit_plot(input, figure, out).string() << "\n";
      return kExitOk;
    }
    if (*verify) {
      const auto checks = run_invariant_suite(max_length);
      return print_checks(std::cout, checks) ? kExitOk : kExitFailure;
    }
  } catch (const std::exception& e) {
    return fail(e);
  }
  return kExitFailure;
}
