// Command-line front end: run scenarios or experiment files, validate
// configuration text, and compile morphologies onto chip configurations.
#include <CLI11.hpp>

#include <cstdio>
#include <exception>
#include <filesystem>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "mcsim/config_io.hpp"
#include "mcsim/experiment.hpp"
#include "mcsim/kernels.hpp"
#include "mcsim/morphology.hpp"
#include "mcsim/scenarios.hpp"
#include "mcsim/text.hpp"

namespace {

// Exit codes, one per error category so scripts can branch on them.
constexpr int kExitOk = 0;
constexpr int kExitRuntime = 1;       // unexpected failure
constexpr int kExitUsage = 2;         // bad invocation (CLI11 default)
constexpr int kExitParse = 3;         // malformed input text
constexpr int kExitInvalid = 4;       // configuration violates chip rules
constexpr int kExitInfeasible = 5;    // no placement exists
constexpr int kExitOverflow = 6;      // simulation left the guard band

// First keyword of a configuration file, ignoring comments and blanks;
// used to dispatch `validate` on chip / morphology / experiment text.
std::string first_keyword(const std::string& content) {
  std::istringstream in(content);
  std::string line;
  while (std::getline(in, line)) {
    std::istringstream ls(line);
    std::string word;
    if (ls >> word && word[0] != '#') return word;
  }
  return "";
}

int apply_backend(const std::string& name) {
  using mcsim::kernels::Backend;
  if (name.empty() || name == "auto") return kExitOk;
  Backend b = Backend::Scalar;
  if (name == "scalar")
    b = Backend::Scalar;
  else if (name == "avx2")
    b = Backend::Avx2;
  else if (name == "neon")
    b = Backend::Neon;
  else {
    std::fprintf(stderr, "unknown backend '%s' (scalar, avx2, neon, auto)\n",
                 name.c_str());
    return kExitUsage;
  }
  if (!mcsim::kernels::force_backend(b)) {
    std::fprintf(stderr, "backend '%s' is not available on this host\n",
                 name.c_str());
    return kExitUsage;
  }
  return kExitOk;
}

int print_violations(const std::vector<mcsim::Violation>& violations) {
  for (const auto& v : violations)
    std::fprintf(stderr, "  %s: %s\n", v.field.c_str(), v.rule.c_str());
  std::fprintf(stderr, "%zu violation(s)\n", violations.size());
  return kExitInvalid;
}

int cmd_list_scenarios() {
  std::size_t width = 0;
  for (const auto& s : mcsim::list_scenarios())
    width = std::max(width, s.id.size());
  for (const auto& s : mcsim::list_scenarios())
    std::printf("%-*s  %s\n", static_cast<int>(width), s.id.c_str(),
                s.summary.c_str());
  return kExitOk;
}

struct RunArgs {
  std::string scenario;
  std::string experiment;
  std::string out;
  std::string backend = "auto";
  std::optional<double> t_end;
  std::optional<double> dt;
  std::optional<std::uint64_t> seed;
  bool quiet = false;
};

int cmd_run(const RunArgs& args) {
  if (const int rc = apply_backend(args.backend); rc != kExitOk) return rc;

  mcsim::ExperimentSpec spec = args.scenario.empty()
                                   ? mcsim::load_experiment_file(args.experiment)
                                   : mcsim::make_scenario(args.scenario);
  if (args.t_end) spec.t_end = *args.t_end;
  if (args.dt) spec.engine.dt = *args.dt;
  if (args.seed) {
    if (!spec.plasticity) {
      std::fprintf(stderr,
                   "--seed has no effect: the experiment has no plasticity "
                   "plan\n");
      return kExitUsage;
    }
    spec.plasticity->seed = *args.seed;
  }

  const std::string out_dir =
      args.out.empty() ? (std::filesystem::path("out") / spec.name).string()
                       : args.out;
  mcsim::run_experiment(spec, out_dir);
  if (!args.quiet) {
    const std::string summary =
        mcsim::read_file((std::filesystem::path(out_dir) / "summary.txt")
                             .string());
    std::fputs(summary.c_str(), stdout);
    std::printf("artifacts: %s\n", out_dir.c_str());
  }
  return kExitOk;
}

int cmd_validate(const std::string& path) {
  const std::string content = mcsim::read_file(path);
  const std::string kind = first_keyword(content);
  std::vector<mcsim::Violation> violations;
  if (kind == "chip") {
    violations = mcsim::validate_config(mcsim::load_chip_text(content, path));
  } else if (kind == "morphology") {
    violations =
        mcsim::validate_morphology(mcsim::load_morphology_text(content, path));
  } else if (kind == "experiment") {
    // The experiment loader already validates the chip and every stimulus
    // reference as part of parsing.
    mcsim::load_experiment_text(content, path);
  } else {
    std::fprintf(stderr,
                 "%s: unrecognized file (expected a chip, morphology or "
                 "experiment block)\n",
                 path.c_str());
    return kExitParse;
  }
  if (!violations.empty()) return print_violations(violations);
  std::printf("%s: ok (%s)\n", path.c_str(),
              kind == "experiment" ? "experiment" : kind.c_str());
  return kExitOk;
}

int cmd_compile(const std::string& path, int columns, int rows,
                const std::string& out) {
  const mcsim::Morphology m = mcsim::load_morphology_file(path);
  if (const auto v = mcsim::validate_morphology(m); !v.empty())
    return print_violations(v);
  mcsim::ChipDims dims;
  dims.n_columns = columns;
  dims.rows_per_block = rows;
  const mcsim::Placement placement = mcsim::compile_morphology(m, dims);
  for (std::size_t i = 0; i < placement.slot_of.size(); ++i) {
    const mcsim::Slot s = placement.slot_of[i];
    std::fprintf(stderr, "  %s -> %s\n", m.nodes[i].label.c_str(),
                 mcsim::comp_name(s.block, s.column).c_str());
  }
  const std::string text = mcsim::save_chip_text(placement.config);
  if (out.empty())
    std::fputs(text.c_str(), stdout);
  else
    mcsim::write_file(out, text);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Behavioral simulator for a multi-compartment neuromorphic "
               "neuron chip"};
  app.require_subcommand(1);

  app.add_subcommand("list-scenarios", "List the built-in scenarios");

  auto* run = app.add_subcommand("run", "Run a scenario or experiment file");
  RunArgs run_args;
  auto* opt_scenario =
      run->add_option("--scenario", run_args.scenario, "Built-in scenario id");
  auto* opt_experiment = run->add_option(
      "--experiment", run_args.experiment, "Experiment description file");
  opt_scenario->excludes(opt_experiment);
  opt_experiment->excludes(opt_scenario);
  run->add_option("--out", run_args.out,
                  "Artifact directory (default: out/<name>)");
  run->add_option("--t-end", run_args.t_end, "Override run duration, seconds");
  run->add_option("--dt", run_args.dt, "Override time step, seconds");
  run->add_option("--seed", run_args.seed, "Override the plasticity seed");
  run->add_option("--backend", run_args.backend,
                  "Kernel backend: auto, scalar, avx2, neon");
  run->add_flag("--quiet", run_args.quiet, "Suppress the run summary");

  auto* validate =
      app.add_subcommand("validate", "Validate a configuration file");
  std::string validate_path;
  validate->add_option("file", validate_path, "chip / morphology / experiment")
      ->required();

  auto* compile = app.add_subcommand(
      "compile-morphology", "Compile a morphology onto a chip configuration");
  std::string compile_path, compile_out;
  int compile_columns = 4, compile_rows = 8;
  compile->add_option("file", compile_path, "morphology file")->required();
  compile->add_option("--columns", compile_columns,
                      "Compartments per block row");
  compile->add_option("--rows", compile_rows, "Synapse rows per block");
  compile->add_option("--out", compile_out,
                      "Write the chip text here instead of stdout");

  CLI11_PARSE(app, argc, argv);

  try {
    if (app.got_subcommand("list-scenarios")) return cmd_list_scenarios();
    if (app.got_subcommand(run)) {
      if (run_args.scenario.empty() && run_args.experiment.empty()) {
        std::fprintf(stderr, "run needs --scenario or --experiment\n");
        return kExitUsage;
      }
      return cmd_run(run_args);
    }
    if (app.got_subcommand(validate)) return cmd_validate(validate_path);
    if (app.got_subcommand(compile))
      return cmd_compile(compile_path, compile_columns, compile_rows,
                         compile_out);
  } catch (const mcsim::ParseError& e) {
    std::fprintf(stderr, "%s\n", e.what());
    return kExitParse;
  } catch (const mcsim::Infeasible& e) {
    std::fprintf(stderr, "infeasible: %s\n", e.what());
    return kExitInfeasible;
  } catch (const mcsim::MorphologyError& e) {
    std::fprintf(stderr, "%s\n", e.what());
    return kExitInvalid;
  } catch (const mcsim::SimError& e) {
    std::fprintf(stderr, "%s\n", e.what());
    return e.kind() == mcsim::SimErrorKind::NumericalOverflow ? kExitOverflow
                                                              : kExitInvalid;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "%s\n", e.what());
    return kExitUsage;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitRuntime;
  }
  return kExitUsage;
}
