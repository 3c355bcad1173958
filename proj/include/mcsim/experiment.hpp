#pragma once

#include <optional>
#include <string>
#include <vector>

#include "mcsim/chip.hpp"
#include "mcsim/engine.hpp"
#include "mcsim/router.hpp"

namespace mcsim {

// Procedural stimulus: `count` volleys, one every `period`, each consisting
// of `events_per` bus events spaced `gap` apart. All times in seconds.
struct TrainSpec {
  Block block = Block::Upper;
  int row_group = 0;
  int address = 0;
  double start = 0;
  double period = 0;
  int count = 1;
  int events_per = 1;
  double gap = 0;
};

std::vector<PresynEvent> expand_train(const TrainSpec& t);

// A complete, self-contained run description: the chip, the engine settings,
// every stimulus source, the probes, and an optional plasticity schedule.
struct ExperimentSpec {
  std::string name = "experiment";
  ChipConfig chip;
  EngineConfig engine;
  double t_end = 0;
  std::vector<Probe> probes;
  std::vector<PresynEvent> events;  // explicit pre-synaptic events
  std::vector<TrainSpec> trains;
  std::vector<CurrentPulse> currents;
  RoutingTable routing;
  double loop_delay = 0;  // feedback delay for routed spikes; 0 -> one step
  BusModel bus;
  std::optional<PlasticityPlan> plasticity;
};

// Text form. Times are in seconds throughout. The saved form is always
// self-contained (chip and routing inline); the loader additionally accepts
// `chip_file`, `stimulus_file` and `routing_file` references, resolved
// relative to the experiment file's directory. Malformed input raises
// ParseError with the offending line.
std::string save_experiment_text(const ExperimentSpec& spec);
ExperimentSpec load_experiment_text(const std::string& content,
                                    const std::string& filename = "<string>");
ExperimentSpec load_experiment_file(const std::string& path);

// Columnar plot file: hardware time [us] and biological time [ms] (the
// acceleration factor makes the two columns numerically equal), then one
// column per probe in declaration order. Header-only when there are no
// samples.
std::string plot_data_text(const Trace& trace);

// Runs the experiment and writes the artifact set into out_dir (created if
// missing): trace.txt, spikes.txt, plateaus.txt, rewiring.txt,
// plot_data.txt, summary.txt. Returns the in-memory result. Deterministic:
// the artifact bytes depend only on the spec.
RunResult run_experiment(const ExperimentSpec& spec,
                         const std::string& out_dir);

}  // namespace mcsim
