// reactor-solve: configured runs of the reaction-diffusion solver.
// Exit codes: 0 ok, 2 bad config/usage, 3 blow-up (informational),
// 4 verification failure, 5 solver/i/o error.

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "nrrd/config.hpp"
#include "nrrd/errors.hpp"
#include "nrrd/runner.hpp"

int main(int argc, char** argv) {
  CLI::App app{"reaction-diffusion reactor solver"};
  std::string config_path;
  std::string outdir_override;
  bool print_config = false;
  app.add_option("config", config_path, "path to the run configuration file")
      ->required();
  app.add_option("--outdir", outdir_override,
                 "override the output directory from the config");
  app.add_flag("--print-config", print_config,
               "print the parsed configuration in canonical form and exit");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  std::ifstream in(config_path, std::ios::binary);
  if (!in) {
    std::cerr << "error: cannot read config '" << config_path << "'\n";
    return 2;
  }
  std::ostringstream buf;
  buf << in.rdbuf();

  nrrd::RunConfig cfg;
  try {
    cfg = nrrd::parse_config(buf.str());
  } catch (const nrrd::ConfigError& e) {
    std::cerr << "config error";
    if (e.line > 0) std::cerr << " (line " << e.line << ")";
    std::cerr << ": " << e.what() << "\n";
    return 2;
  }
  if (!outdir_override.empty()) cfg.outdir = outdir_override;

  if (print_config) {
    std::cout << nrrd::serialize_config(cfg);
    return 0;
  }
  return nrrd::run(cfg);
}
