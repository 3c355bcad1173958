#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <queue>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

#include "mcsim/chip.hpp"
#include "mcsim/detmath.hpp"
#include "mcsim/plasticity.hpp"
#include "mcsim/router.hpp"
#include "mcsim/types.hpp"

namespace mcsim {

enum class SimErrorKind {
  InvalidConfig,
  MultipleBypassConflict,
  NumericalOverflow,
  InvalidArgument,
};

class SimError : public std::runtime_error {
 public:
  SimError(SimErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  SimErrorKind kind() const { return kind_; }

 private:
  SimErrorKind kind_;
};

// Correlation sensor constants shared by every synapse of a run.
struct SensorParams {
  double a_plus = 1.0;
  double a_minus = 1.0;
  double tau_plus = 2e-6;
  double tau_minus = 2e-6;
};

struct EngineConfig {
  // Step width [s]. Must not exceed a tenth of the smallest synaptic time
  // constant, so the per-step line decay stays well resolved.
  double dt = 1e-8;
  // Clamp on the exponential term current [A]; the default slews a default
  // membrane by about 1 V/us.
  double i_exp_max = 2e-6;
  // Abort bound: any node leaving [-v_guard, v_guard] raises an error.
  double v_guard = 10.0;
  SensorParams sensor;
};

struct CurrentPulse {
  Block block = Block::Upper;
  int column = 0;
  double t0 = 0;        // seconds
  double duration = 0;  // seconds; active over [t0, t0 + duration)
  double amplitude = 0; // amperes
};

struct SpikeRecord {
  double time = 0;
  Block block = Block::Upper;
  int column = 0;
  SpikeType type = SpikeType::Na;
};

// One mono-flop hold interval (plateau / up-state / refractory period).
struct PlateauRecord {
  Block block = Block::Upper;
  int column = 0;
  SpikeType type = SpikeType::Na;
  double begin = 0;
  double end = 0;
  bool completed = false;  // false if the run ended while still held
};

struct RewireRecord {
  double time = 0;
  Block block = Block::Upper;
  int row = 0;
  int column = 0;
  std::uint8_t old_address = 0;
  std::uint8_t new_address = 0;
  std::uint8_t old_weight = 0;
  std::uint8_t new_weight = 0;
};

enum class ProbeKind : std::uint8_t {
  NodeVoltage,     // membrane node of a compartment [V]
  LineDeviationA,  // dendritic line A deviation of a compartment [V]
  LineDeviationB,  // dendritic line B deviation of a compartment [V]
  SomaLine,        // somatic-line segment the compartment lies on [V]
};

struct Probe {
  ProbeKind kind = ProbeKind::NodeVoltage;
  Block block = Block::Upper;
  int column = 0;
};

std::string probe_label(const Probe& p);

struct Trace {
  std::vector<std::string> labels;           // one per value column
  std::vector<double> time;                  // seconds
  std::vector<std::vector<double>> values;   // [column][sample]
};

struct RowRef {
  Block block = Block::Upper;
  int row = 0;
};

// Periodic on-chip plasticity: every `period` seconds the processor reads
// and resets the listed rows' correlation accumulators and runs the
// configured kernels (weight update first, then structural rewiring).
struct PlasticityPlan {
  double period = 100e-6;
  std::vector<RowRef> rows;
  std::optional<StdpParams> stdp;
  std::optional<StructuralParams> structural;
  std::uint64_t seed = 1;
};

struct RunResult {
  Trace trace;
  std::vector<SpikeRecord> spikes;
  std::vector<PlateauRecord> plateaus;
  std::vector<RewireRecord> rewires;
  std::uint64_t dropped_events = 0;
  std::uint64_t kernel_invocations = 0;
  double t_end = 0;
  std::uint64_t steps = 0;
};

// Behavioral simulator of the two-block compartment array.
//
// Per step (width dt), in this order: deliver due bus events, decay the
// dendritic lines, solve the somatic line rails, advance every membrane node
// one exponential-Euler step (linear terms folded into the decay, nonlinear
// terms frozen at the step start), update the comparator/mono-flop circuits,
// run scheduled plasticity, record probes. All state advances in fixed index
// order, so runs are reproducible bit for bit.
class Simulation {
 public:
  Simulation(ChipConfig cfg, EngineConfig ecfg);

  void add_probe(const Probe& p);
  void add_events(const std::vector<PresynEvent>& events);
  void add_current_pulse(const CurrentPulse& pulse);
  void set_routing(RoutingTable table, double loop_delay = 0);  // 0 -> dt
  void set_bus_model(const BusModel& bus);
  void set_plasticity(const PlasticityPlan& plan);

  // Advances until t_end (quantized to the step grid). May be called
  // repeatedly with growing horizons.
  void run(double t_end);
  void step();

  const RunResult& result() const { return result_; }
  double time() const { return static_cast<double>(step_) * ecfg_.dt; }
  double dt() const { return ecfg_.dt; }

  double node_voltage(Block b, int col) const;
  double line_deviation(Block b, int col, LineId line) const;
  // NaN when the segment floats (no engaged attachment).
  double soma_line_voltage(Block b, int col) const;
  bool in_alt_mode(Block b, int col) const;
  double monoflop_remaining(Block b, int col) const;
  const CircuitGraph& network() const { return graph_; }
  const ChipConfig& chip() const { return chip_; }

  SynapseCell synapse(Block b, int row, int col) const;
  const CorrelationState& correlation(Block b, int row, int col) const;
  CorrelationState& correlation(Block b, int row, int col);

  // Plasticity write interface. Writes take effect immediately and are
  // recorded in the rewiring log with the current time.
  void apply_synapse_write(const SynapseWrite& w);
  void apply_param_write(const ParamWrite& w);

  // Snapshot + reset of the listed rows' accumulators (other rows are
  // untouched). Timestamps survive, so pending pairings continue.
  KernelView kernel_read_reset(const std::vector<RowRef>& rows);

 private:
  struct CompState {
    Mode mode = Mode::Disabled;
    bool exp_term = false;
    AnalogParams p;
    int node = -1;
    int segment = -1;
    bool soma_connect = false;
    bool bypass = false;
    bool alt = false;
    bool high = false;
    long long remaining = 0;    // mono-flop steps left
    long long pulse_steps = 0;  // llround(t_pulse / dt)
    int open_plateau = -1;      // index into result_.plateaus
  };

  struct QueuedEvent {
    long long step;
    int block;
    int group;
    int address;
    friend bool operator>(const QueuedEvent& a, const QueuedEvent& b) {
      return std::tie(a.step, a.block, a.group, a.address) >
             std::tie(b.step, b.block, b.group, b.address);
    }
  };

  int comp_index(Block b, int col) const {
    return chip_.compartment_index(b, col);
  }
  const SynapseRow* live_row(Block b, int row) const {
    return chip_.find_row(b, row);
  }
  SynapseRow* live_row(Block b, int row);
  CorrelationState& sensor(Block b, int row, int col);
  long long step_of(double t) const;
  void check_comp(Block b, int col, const char* what) const;
  void solve_lines();
  void deliver_due_events();
  void integrate();
  void update_circuits();
  void run_plasticity();
  void record_sample();
  void ensure_initial_sample();
  [[noreturn]] void overflow(int node) const;

  ChipConfig chip_;  // live copy: rows and params mutate under plasticity
  EngineConfig ecfg_;
  CircuitGraph graph_;

  std::vector<CompState> comps_;
  // Hot per-compartment arrays (index = compartment index).
  std::vector<double> s_a_, s_b_, decay_a_, decay_b_;
  std::vector<double> scale_a_, scale_b_, gs_a_, gs_b_, unit_dv_;
  // Per-node arrays.
  std::vector<double> v_, cap_, glin_, bacc_, alpha_, vinf_;
  // Per-segment solution.
  std::vector<double> vline_;
  std::vector<std::uint8_t> line_floating_;
  std::vector<int> bypass_node_;

  std::priority_queue<QueuedEvent, std::vector<QueuedEvent>,
                      std::greater<QueuedEvent>>
      queue_;
  std::map<std::pair<int, int>, long long> bus_last_step_;
  BusModel bus_;
  RoutingTable routing_;
  double loop_delay_ = 0;
  std::vector<CurrentPulse> pulses_;
  int stim_comp_ = -1;

  std::map<std::pair<int, int>, std::vector<CorrelationState>> sensors_;
  std::optional<PlasticityPlan> plan_;
  long long period_steps_ = 0;
  Rng plastic_rng_;

  std::vector<Probe> probes_;
  std::vector<int> probe_slot_;  // resolved index per probe (comp/node/segment)

  RunResult result_;
  long long step_ = 0;
  bool initial_sample_done_ = false;
};

}  // namespace mcsim
