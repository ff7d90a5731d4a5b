#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "unwind/sweep.hpp"

namespace {

constexpr int exit_config_invalid = 2;

int fail_config(const std::exception& e) {
  std::cerr << "config error: " << e.what() << "\n";
  return exit_config_invalid;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Effective Floquet-Lindbladian search by spectral unwinding"};
  app.require_subcommand(1);

  std::string config_path;
  int i = 0;
  int j = 0;
  std::size_t max_candidates = 5000;
  std::string output;

  auto* run = app.add_subcommand("run", "evaluate every grid point and write CSV");
  run->add_option("config", config_path, "JSON config file")->required();
  run->add_option("-o,--output", output, "override output path (- for stdout)");

  auto* report = app.add_subcommand("report", "diagnostic JSON document for one grid point");
  report->add_option("config", config_path, "JSON config file")->required();
  report->add_option("--i", i, "axis1 index")->required();
  report->add_option("--j", j, "axis2 index")->required();
  report->add_option("--max-candidates", max_candidates, "candidate rows to include");

  auto* validate = app.add_subcommand("validate", "parse the config and print a summary");
  validate->add_option("config", config_path, "JSON config file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : exit_config_invalid;
  }

  unwind::SweepConfig cfg;
  try {
    cfg = unwind::load_config(config_path);
  } catch (const unwind::Error& e) {
    return fail_config(e);
  }

  try {
    if (*run) {
      if (!output.empty()) cfg.output_path = output;
      return unwind::run_sweep(cfg);
    }
    if (*report) {
      std::cout << unwind::point_report(cfg, i, j, max_candidates).dump(2) << "\n";
      return 0;
    }
    char hash[32];
    std::snprintf(hash, sizeof(hash), "%016llx", static_cast<unsigned long long>(unwind::config_hash(cfg)));
    std::cout << "ok " << hash << " grid " << cfg.axis1.name << "[" << cfg.axis1.count << "] x "
              << cfg.axis2.name << "[" << cfg.axis2.count << "] workers " << unwind::resolve_workers(cfg)
              << "\n";
    return 0;
  } catch (const unwind::Error& e) {
    if (e.code() == unwind::ErrorCode::ConfigInvalid || e.code() == unwind::ErrorCode::IndexOutOfRange)
      return fail_config(e);
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
