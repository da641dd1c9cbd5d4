#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "harness/config.hpp"
#include "harness/dispatch.hpp"
#include "harness/report_io.hpp"
#include "lojvar/error.hpp"

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw lojvar::Error(lojvar::ErrorCode::io_error, "cannot open config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

int main(int argc, char** argv) {
  using namespace lojvar::harness;

  CLI::App app{"Discrete harmonic-map energy, gradient flow and Lojasiewicz exponent experiments"};
  app.set_version_flag("--version", std::string(kVersionString));
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  std::optional<std::uint64_t> seed;
  for (const auto& name : subcommands()) {
    auto* sub = app.add_subcommand(name);
    sub->add_option("--config", config_path, "JSON run configuration")->required();
    sub->add_option("--out", out_dir, "output directory (overrides LOJVAR_OUT_DIR and the config)");
    sub->add_option("--seed", seed, "perturbation seed override");
  }

  CLI11_PARSE(app, argc, argv);
  const std::string subcommand = app.get_subcommands().front()->get_name();

  try {
    RunConfig config = parse_config(slurp(config_path));
    if (seed) {
      config.perturbation.seed = *seed;
      config.flow.seed = *seed;
    }
    std::string dir = config.output.directory;
    if (const char* env = std::getenv("LOJVAR_OUT_DIR"); env && *env) dir = env;
    if (!out_dir.empty()) dir = out_dir;
    dispatch(subcommand, config, dir, std::cout);
  } catch (const std::exception& e) {
    std::cerr << error_record(e, subcommand) << "\n";
    const auto* le = dynamic_cast<const lojvar::Error*>(&e);
    if (le && le->code() == lojvar::ErrorCode::config_error) return 2;
    return 1;
  }
  return 0;
}
