#include "maslov/run.hpp"

#include <CLI11.hpp>

#include <string>

int main(int argc, char** argv) {
  CLI::App app{"morse: count negative eigenvalues of half-line Sturm-Liouville systems "
               "by spectral flow of Lagrangian frame paths"};
  app.set_version_flag("--version", maslov::cli::version_string());
  app.require_subcommand(1);

  maslov::cli::Overrides o;
  std::string config_path;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("config", config_path, "problem/run configuration (JSON)")->required();
    cmd->add_option("--out", o.out_dir, "output directory (default .)");
    cmd->add_option("--jobs", o.jobs, "max concurrent sweep cells (default: hardware)");
    cmd->add_option("--tol", o.tol, "override base integration tolerance");
    cmd->add_flag("--keep-going", o.keep_going, "continue a sweep past failing cells");
  };

  CLI::App* run = app.add_subcommand("run", "run the configured methods once");
  add_common(run);
  CLI::App* sweep = app.add_subcommand("sweep", "run over the configured parameter grid");
  add_common(sweep);

  CLI11_PARSE(app, argc, argv);

  if (app.got_subcommand(run)) return maslov::cli::run_command(config_path, o);
  return maslov::cli::sweep_command(config_path, o);
}
