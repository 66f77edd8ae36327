#include <cstdio>
#include <string>

#include <CLI11.hpp>

#include "blockade/config.hpp"
#include "blockade/experiment.hpp"
#include "blockade/types.hpp"

namespace {

struct CliArgs {
  std::string config_path;
  std::string out_dir = ".";
  blockade::RunKind kind = blockade::RunKind::Steady;
  blockade::Overrides overrides;
};

void add_run_command(CLI::App& app, const std::string& name,
                     const std::string& help, blockade::RunKind kind,
                     CliArgs& args) {
  CLI::App* sub = app.add_subcommand(name, help);
  sub->add_option("--config", args.config_path, "run description file")
      ->required()
      ->check(CLI::ExistingFile);
  sub->add_option("--dim", args.overrides.dim,
                  "override the Fock-space dimension")
      ->check(CLI::PositiveNumber);
  sub->add_option("--out", args.out_dir, "output directory (default .)");
  sub->add_option("--model", args.overrides.model,
                  "override the model preset: 1, 2, 3, 3p, 4, 5 or kl:K,L");
  sub->add_option("--delta", args.overrides.delta,
                  "override epsilon/chi by rescaling chi");
  sub->add_option("--delta-prime", args.overrides.delta_prime,
                  "override loss/epsilon for the preset's loss channel");
  sub->callback([kind, &args] { args.kind = kind; });
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Driven Kerr resonator with engineered one- and two-photon "
      "absorption: time evolution, steady states, Wigner maps and "
      "parameter scans on a truncated Fock space"};
  app.require_subcommand(1);

  CliArgs args;
  add_run_command(app, "evolve",
                  "integrate the master equation on a time grid",
                  blockade::RunKind::Evolve, args);
  add_run_command(app, "steady", "solve for the steady state",
                  blockade::RunKind::Steady, args);
  add_run_command(app, "wigner", "Wigner function on a phase-space grid",
                  blockade::RunKind::Wigner, args);
  add_run_command(app, "scan", "steady-state sweep along one parameter axis",
                  blockade::RunKind::Scan, args);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& err) {
    int code = app.exit(err);
    return code == 0 ? 0 : 2;
  }

  try {
    blockade::ExperimentConfig cfg = blockade::load_config(args.config_path);
    cfg.kind = args.kind;  // the subcommand wins over [run] kind
    blockade::apply_overrides(cfg, args.overrides);
    blockade::RunOutputs outputs = blockade::run_experiment(cfg, args.out_dir);
    for (const std::string& file : outputs.files) {
      std::printf("wrote %s\n", file.c_str());
    }
    return 0;
  } catch (const blockade::TruncationError& err) {
    std::fprintf(stderr, "error: %s\n", err.what());
    return 4;
  } catch (const blockade::ConfigError& err) {
    std::fprintf(stderr, "error: %s\n", err.what());
    return 2;
  } catch (const blockade::DimensionError& err) {
    std::fprintf(stderr, "error: %s\n", err.what());
    return 2;
  } catch (const std::invalid_argument& err) {
    std::fprintf(stderr, "error: %s\n", err.what());
    return 2;
  } catch (const std::length_error& err) {
    std::fprintf(stderr, "error: %s\n", err.what());
    return 2;
  } catch (const std::exception& err) {
    std::fprintf(stderr, "error: %s\n", err.what());
    return 3;
  }
}
