#include "mcsim/scenarios.hpp"

#include <stdexcept>

#include "mcsim/morphology.hpp"

namespace mcsim {

namespace {

SynapseRow& row_ref(ChipConfig& cfg, Block b, int index) {
  for (auto& row : cfg.rows)
    if (row.block == b && row.index == index) return row;
  throw std::logic_error("scenario references a missing synapse row");
}

TrainSpec volley(Block b, int group, int address, double t, int n_events) {
  TrainSpec t_spec;
  t_spec.block = b;
  t_spec.row_group = group;
  t_spec.address = address;
  t_spec.start = t;
  t_spec.count = 1;
  t_spec.events_per = n_events;
  t_spec.gap = 5e-8;
  return t_spec;
}

// Clustered input triggers a plateau potential: the mono-flop holds the
// high-conductance pair (g_alt, v_alt) for t_pulse, then the membrane
// relaxes back to the leak potential with tau = c_mem / g_leak.
ExperimentSpec nmda_plateau() {
  ExperimentSpec spec;
  spec.name = "nmda-plateau";
  spec.chip = default_chip(1, 2);
  auto& c = spec.chip.comp(Block::Upper, 0);
  c.mode = Mode::Nmda;
  c.params.v_th = 0.9;
  c.params.v_alt = 1.1;
  c.params.g_alt = 5e-6;
  c.params.t_pulse = 30e-6;
  row_ref(spec.chip, Block::Upper, 0).cells[0] = SynapseCell{7, 63};
  spec.trains.push_back(volley(Block::Upper, 0, 7, 10e-6, 4));
  spec.probes.push_back({ProbeKind::NodeVoltage, Block::Upper, 0});
  spec.probes.push_back({ProbeKind::LineDeviationA, Block::Upper, 0});
  spec.t_end = 100e-6;
  return spec;
}

// A sodium compartment with the exponential spike-initiation term enabled
// receives a weak and a strong input; only the strong one drives the
// membrane into the regenerative region and fires. A passive neighbor on
// the same somatic-line segment follows both deflections attenuated.
ExperimentSpec na_pair() {
  ExperimentSpec spec;
  spec.name = "na-pair";
  spec.chip = default_chip(2, 2);
  auto& a = spec.chip.comp(Block::Upper, 0);
  a.mode = Mode::Na;
  a.exp_term = true;
  a.params.v_exp_th = 0.8;
  a.params.delta_t = 0.05;
  a.params.v_th = 0.95;
  a.params.v_alt = 0.45;
  a.params.g_alt = 5e-6;
  a.params.t_pulse = 2e-6;
  a.soma_connect = true;
  a.params.g_ic = 1e-6;
  auto& b = spec.chip.comp(Block::Upper, 1);
  b.mode = Mode::Passive;
  b.soma_connect = true;
  b.params.g_ic = 1e-6;
  row_ref(spec.chip, Block::Upper, 0).cells[0] = SynapseCell{5, 25};
  row_ref(spec.chip, Block::Upper, 1).cells[0] = SynapseCell{7, 63};
  spec.trains.push_back(volley(Block::Upper, 0, 5, 10e-6, 1));
  spec.trains.push_back(volley(Block::Upper, 0, 7, 40e-6, 3));
  spec.probes.push_back({ProbeKind::NodeVoltage, Block::Upper, 0});
  spec.probes.push_back({ProbeKind::NodeVoltage, Block::Upper, 1});
  spec.t_end = 80e-6;
  return spec;
}

// Reset potential above threshold: after the trigger the compartment is
// held at v_alt for t_pulse (an up-state), acting as extra input current to
// the passive neighbor, which is pulled up for exactly that interval.
ExperimentSpec up_state(const std::string& name, double t_pulse) {
  ExperimentSpec spec;
  spec.name = name;
  spec.chip = default_chip(2, 2);
  auto& a = spec.chip.comp(Block::Upper, 0);
  a.mode = Mode::Na;
  a.params.v_th = 0.9;
  a.params.v_alt = 1.1;  // above threshold: hold, not reset
  a.params.g_alt = 5e-6;
  a.params.t_pulse = t_pulse;
  a.soma_connect = true;
  a.params.g_ic = 1e-6;
  auto& b = spec.chip.comp(Block::Upper, 1);
  b.mode = Mode::Passive;
  b.soma_connect = true;
  b.params.g_ic = 1e-6;
  row_ref(spec.chip, Block::Upper, 0).cells[0] = SynapseCell{7, 63};
  spec.trains.push_back(volley(Block::Upper, 0, 7, 10e-6, 3));
  spec.probes.push_back({ProbeKind::NodeVoltage, Block::Upper, 0});
  spec.probes.push_back({ProbeKind::NodeVoltage, Block::Upper, 1});
  spec.probes.push_back({ProbeKind::SomaLine, Block::Upper, 0});
  spec.t_end = 120e-6;
  return spec;
}

// Directed coincidence detection: a sodium compartment is coupled to a
// plateau compartment. Its single synaptic inputs fire it only while the
// plateau compartment holds its high state, which raises the sodium
// compartment's operating point just below threshold.
ExperimentSpec coincidence_gate() {
  ExperimentSpec spec;
  spec.name = "coincidence-gate";
  spec.chip = default_chip(2, 4);
  auto& n = spec.chip.comp(Block::Upper, 0);
  n.mode = Mode::Nmda;
  n.params.v_th = 0.9;
  n.params.v_alt = 1.1;
  n.params.g_alt = 5e-6;
  n.params.t_pulse = 40e-6;
  n.soma_connect = true;
  n.params.g_ic = 1e-6;
  auto& s = spec.chip.comp(Block::Upper, 1);
  s.mode = Mode::Na;
  s.params.v_th = 0.9;
  s.params.v_alt = 0.5;
  s.params.g_alt = 5e-6;
  s.params.t_pulse = 2e-6;
  s.soma_connect = true;
  s.params.g_ic = 2e-7;  // weak coupling: elevated but subthreshold baseline
  row_ref(spec.chip, Block::Upper, 0).cells[0] = SynapseCell{7, 63};
  row_ref(spec.chip, Block::Upper, 2).cells[1] = SynapseCell{9, 26};
  for (const double t : {50e-6, 250e-6, 400e-6})
    spec.trains.push_back(volley(Block::Upper, 0, 7, t, 3));
  for (const double t : {20e-6, 62e-6, 80e-6, 150e-6, 265e-6, 310e-6,
                         345e-6, 415e-6, 435e-6, 470e-6})
    spec.trains.push_back(volley(Block::Upper, 1, 9, t, 1));
  spec.probes.push_back({ProbeKind::NodeVoltage, Block::Upper, 0});
  spec.probes.push_back({ProbeKind::NodeVoltage, Block::Upper, 1});
  spec.t_end = 500e-6;
  return spec;
}

// Layer-5-style coincidence detector: an apical plateau compartment and the
// soma sandwich a calcium bridge spanning both halves. The three stimulus
// variants share one chip configuration byte for byte.
struct PyramidalParts {
  ExperimentSpec spec;
  Slot tuft;
  Slot soma;
};

PyramidalParts pyramidal_base() {
  Morphology m;
  MorphNode tuft;
  tuft.label = "tuft";
  tuft.mode = Mode::Nmda;
  tuft.params.v_th = 0.95;
  tuft.params.g_leak = 1e-6;  // stiff tuft: the bridge cannot drag it up,
                              // so only real input moves this compartment
  tuft.params.v_alt = 1.1;
  tuft.params.g_alt = 5e-6;
  tuft.params.t_pulse = 40e-6;
  tuft.params.g_ic = 1e-6;
  MorphNode ca_a;
  ca_a.label = "ca_a";
  ca_a.mode = Mode::Ca;
  ca_a.params.v_th = 0.855;
  ca_a.params.v_alt = 1.35;  // plateau level chosen so that, even with the
                             // coupling load sagging the node, the stiff
                             // tuft is pulled past its own threshold
  ca_a.params.g_alt = 5e-6;
  ca_a.params.t_pulse = 15e-6;
  ca_a.params.g_ic = 1e-6;
  MorphNode ca_b;
  ca_b.label = "ca_b";
  ca_b.mode = Mode::Passive;
  ca_b.params.g_ic = 1e-6;
  MorphNode soma;
  soma.label = "soma";
  soma.mode = Mode::Na;
  soma.params.v_th = 0.9;
  soma.params.v_alt = 0.7;  // reset to rest keeps the line un-hyperpolarized
  soma.params.g_alt = 5e-6;
  soma.params.t_pulse = 5e-6;
  soma.is_output = true;
  m.nodes = {tuft, ca_a, ca_b, soma};

  MorphEdge merge;
  merge.a = 1;
  merge.b = 2;
  merge.kind = EdgeKind::DirectMerge;
  MorphEdge apical_a{0, 1, EdgeKind::SomaLine, 2e-6, false};
  MorphEdge apical_b{1, 0, EdgeKind::SomaLine, 2e-6, false};
  MorphEdge basal_a{2, 3, EdgeKind::SomaLine, 1.1e-6, false};
  MorphEdge basal_b{3, 2, EdgeKind::SomaLine, 0, true};  // soma drives line
  m.edges = {merge, apical_a, apical_b, basal_a, basal_b};

  Placement p = compile_morphology(m, ChipDims{4, 8});
  PyramidalParts parts;
  parts.tuft = p.slot_of[0];
  parts.soma = p.slot_of[3];
  parts.spec.chip = p.config;
  parts.spec.chip.comp(parts.soma.block, parts.soma.column).current_input =
      true;
  row_ref(parts.spec.chip, parts.tuft.block, 0)
      .cells[static_cast<std::size_t>(parts.tuft.column)] = SynapseCell{7, 63};
  const Slot bridge = p.slot_of[1];
  parts.spec.probes.push_back(
      {ProbeKind::NodeVoltage, parts.tuft.block, parts.tuft.column});
  parts.spec.probes.push_back(
      {ProbeKind::NodeVoltage, bridge.block, bridge.column});
  parts.spec.probes.push_back(
      {ProbeKind::NodeVoltage, parts.soma.block, parts.soma.column});
  parts.spec.probes.push_back(
      {ProbeKind::SomaLine, parts.tuft.block, parts.tuft.column});
  parts.spec.t_end = 160e-6;
  return parts;
}

TrainSpec pyramidal_volley(const PyramidalParts& parts) {
  return volley(parts.tuft.block, 0, 7, 100.6e-6, 4);
}

CurrentPulse pyramidal_current(const PyramidalParts& parts) {
  CurrentPulse c;
  c.block = parts.soma.block;
  c.column = parts.soma.column;
  c.t0 = 100e-6;
  c.duration = 3e-6;
  c.amplitude = 1.5e-6;
  return c;
}

ExperimentSpec pyramidal_dendritic() {
  PyramidalParts parts = pyramidal_base();
  parts.spec.name = "pyramidal-dendritic";
  parts.spec.trains.push_back(pyramidal_volley(parts));
  return parts.spec;
}

ExperimentSpec pyramidal_somatic() {
  PyramidalParts parts = pyramidal_base();
  parts.spec.name = "pyramidal-somatic";
  parts.spec.currents.push_back(pyramidal_current(parts));
  return parts.spec;
}

ExperimentSpec pyramidal_both() {
  PyramidalParts parts = pyramidal_base();
  parts.spec.name = "pyramidal-both";
  parts.spec.currents.push_back(pyramidal_current(parts));
  parts.spec.trains.push_back(pyramidal_volley(parts));
  return parts.spec;
}

// Structural plasticity: sixteen searching synapses listen to a 64-address
// pool of which eight addresses fire just before a teacher-driven somatic
// spike. Periodic kernel passes establish correlated synapses and redraw
// the rest until the learner wires itself to the correlated group.
ExperimentSpec structural_demo() {
  ExperimentSpec spec;
  spec.name = "structural-demo";
  spec.chip = default_chip(1, 16);
  auto& c = spec.chip.comp(Block::Upper, 0);
  c.mode = Mode::Na;
  c.params.v_th = 0.9;
  c.params.v_alt = 0.45;
  c.params.g_alt = 5e-6;
  c.params.t_pulse = 2e-6;
  c.current_input = true;
  for (int r = 0; r < 16; ++r)
    row_ref(spec.chip, Block::Upper, r).cells[0] =
        SynapseCell{static_cast<std::uint8_t>((7 * r + 32) % 64), 0};

  constexpr int kCycles = 250;
  constexpr double kCycle = 40e-6;
  for (int a = 0; a < 8; ++a)
    for (int g = 0; g < 8; ++g) {
      TrainSpec t;
      t.block = Block::Upper;
      t.row_group = g;
      t.address = a;
      t.start = 10e-6;
      t.period = kCycle;
      t.count = kCycles;
      spec.trains.push_back(t);
    }
  for (int a = 32; a < 40; ++a)
    for (int g = 0; g < 8; ++g) {
      TrainSpec t;
      t.block = Block::Upper;
      t.row_group = g;
      t.address = a;
      t.start = 15e-6;
      t.period = kCycle;
      t.count = kCycles;
      spec.trains.push_back(t);
    }
  for (int k = 0; k < kCycles; ++k) {
    CurrentPulse teacher;
    teacher.block = Block::Upper;
    teacher.column = 0;
    teacher.t0 = 11e-6 + k * kCycle;
    teacher.duration = 5e-7;
    teacher.amplitude = 1.5e-6;
    spec.currents.push_back(teacher);
  }

  PlasticityPlan plan;
  plan.period = 400e-6;
  for (int r = 0; r < 16; ++r) plan.rows.push_back({Block::Upper, r});
  plan.stdp = StdpParams{1.0};
  StructuralParams sp;
  sp.theta_corr = 3.0;
  sp.w_init = 32;
  sp.w_min = 8;
  for (int a = 0; a < 64; ++a)
    sp.pool.push_back(static_cast<std::uint8_t>(a));
  plan.structural = sp;
  plan.seed = 12345;
  spec.plasticity = plan;
  spec.t_end = 10e-3;
  return spec;
}

}  // namespace

const std::vector<ScenarioInfo>& list_scenarios() {
  static const std::vector<ScenarioInfo> kScenarios = {
      {"nmda-plateau",
       "clustered synaptic volley triggers a timed plateau potential that "
       "relaxes back to the leak potential"},
      {"na-pair",
       "exponential-term sodium compartment fires on the strong of two "
       "inputs while a coupled neighbor follows attenuated"},
      {"up-state-short",
       "reset above threshold holds a 9 us up-state that pulls a passive "
       "neighbor up for exactly that interval"},
      {"up-state-medium",
       "reset above threshold holds a 30 us up-state that pulls a passive "
       "neighbor up for exactly that interval"},
      {"up-state-long",
       "reset above threshold holds a 70 us up-state that pulls a passive "
       "neighbor up for exactly that interval"},
      {"coincidence-gate",
       "single inputs fire the sodium compartment only while the coupled "
       "plateau compartment holds its high state"},
      {"pyramidal-dendritic",
       "apical volley alone: an attenuated PSP reaches the calcium bridge "
       "and soma without firing anything"},
      {"pyramidal-somatic",
       "brief 1.5 uA somatic current alone initiates exactly one sodium "
       "spike"},
      {"pyramidal-both",
       "coincident apical volley and somatic current ignite calcium and "
       "plateau spikes and a somatic burst"},
      {"structural-demo",
       "periodic rewiring kernel concentrates sixteen searching synapses "
       "onto the correlated eight-address group"},
  };
  return kScenarios;
}

ExperimentSpec make_scenario(const std::string& id) {
  if (id == "nmda-plateau") return nmda_plateau();
  if (id == "na-pair") return na_pair();
  if (id == "up-state-short") return up_state("up-state-short", 9e-6);
  if (id == "up-state-medium") return up_state("up-state-medium", 30e-6);
  if (id == "up-state-long") return up_state("up-state-long", 70e-6);
  if (id == "coincidence-gate") return coincidence_gate();
  if (id == "pyramidal-dendritic") return pyramidal_dendritic();
  if (id == "pyramidal-somatic") return pyramidal_somatic();
  if (id == "pyramidal-both") return pyramidal_both();
  if (id == "structural-demo") return structural_demo();
  throw std::invalid_argument("unknown scenario '" + id + "'");
}

}  // namespace mcsim
