#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "entlab_cli/config.hpp"
#include "entlab_cli/experiments.hpp"
#include "entlab_cli/report.hpp"

using namespace entlab::cli;

namespace {

void list_experiments(std::ostream& out)
{
  for (const auto& e : experiments()) {
    out << e.name << ": " << e.summary << '\n';
    for (const auto& p : e.params)
      out << "    " << p.key << " = " << p.default_value << "    # " << p.help << '\n';
  }
}

} // namespace

int main(int argc, char** argv)
{
  CLI::App app{"entlab: entanglement, DMRG and angular-quantization experiments"};
  std::string experiment, config_path, out, format;
  std::uint64_t seed = 0;
  unsigned threads = 1;
  std::vector<std::string> sets;
  bool timing = false, list = false;
  auto* exp_opt = app.add_option("--experiment", experiment, "experiment name (see --list)");
  app.add_option("--config", config_path, "flat key = value file; flags override its values");
  auto* seed_opt = app.add_option("--seed", seed, "64-bit seed for the mt19937_64 trial streams");
  auto* out_opt = app.add_option("--out", out, "output path (default: standard output)");
  auto* format_opt = app.add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  auto* threads_opt =
      app.add_option("--threads", threads, "worker threads for independent trials; output is deterministic at 1")
          ->check(CLI::PositiveNumber);
  app.add_option("--set", sets, "override an experiment parameter, key=value (repeatable)");
  app.add_flag("--timing", timing, "include wall-clock seconds in JSON output");
  app.add_flag("--list", list, "list experiments and their parameters with defaults");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  if (list) {
    list_experiments(std::cout);
    return 0;
  }

  try {
    ExperimentConfig cfg = config_path.empty() ? ExperimentConfig{} : config_from_key_values(read_key_values(config_path));
    if (*exp_opt)
      cfg.experiment = experiment;
    if (*seed_opt)
      cfg.seed = seed;
    if (*out_opt)
      cfg.out = out;
    if (*format_opt)
      cfg.format = parse_format(format);
    if (*threads_opt)
      cfg.threads = threads;
    cfg.timing = timing;
    for (const auto& s : sets) {
      auto [k, v] = split_assignment(s);
      cfg.params[k] = v;
    }

    const RunReport report = run_experiment(cfg);
    emit(report, cfg);
    write_summary(cfg.out.empty() ? std::cerr : std::cout, report);
    return report.passed() ? 0 : 1;
  } catch (const UsageError& e) {
    std::cerr << "entlab: " << e.what() << '\n';
    return 2;
  } catch (const IoError& e) {
    std::cerr << "entlab: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    // Solver failures inside an experiment count as failed assertions.
    std::cerr << "entlab: experiment failed: " << e.what() << '\n';
    return 1;
  }
}
