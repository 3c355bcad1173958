#include "mcsim/engine.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "mcsim/kernels.hpp"
#include "mcsim/text.hpp"

namespace mcsim {

std::string probe_label(const Probe& p) {
  const std::string comp = comp_name(p.block, p.column);
  switch (p.kind) {
    case ProbeKind::NodeVoltage: return "v:" + comp;
    case ProbeKind::LineDeviationA: return "sa:" + comp;
    case ProbeKind::LineDeviationB: return "sb:" + comp;
    case ProbeKind::SomaLine: return "vsoma:" + comp;
  }
  return "?:" + comp;
}

namespace {

std::string violation_text(const std::vector<Violation>& violations) {
  std::string msg = "invalid chip configuration (" +
                    std::to_string(violations.size()) + " violation(s)):";
  for (const auto& v : violations) msg += "\n  " + v.field + ": " + v.rule;
  return msg;
}

}  // namespace

Simulation::Simulation(ChipConfig cfg, EngineConfig ecfg)
    : chip_(std::move(cfg)), ecfg_(ecfg) {
  const auto violations = validate_config(chip_);
  if (!violations.empty())
    throw SimError(SimErrorKind::InvalidConfig, violation_text(violations));
  if (!(ecfg_.dt > 0))
    throw SimError(SimErrorKind::InvalidArgument, "dt must be positive");

  double min_tau = std::numeric_limits<double>::infinity();
  for (const auto& c : chip_.compartments)
    min_tau = std::min({min_tau, c.params.tau_syn_a, c.params.tau_syn_b});
  if (ecfg_.dt > min_tau / 10.0)
    throw SimError(SimErrorKind::InvalidArgument,
                   "dt must not exceed a tenth of the smallest synaptic time "
                   "constant (" +
                       std::to_string(min_tau) + " s)");

  graph_ = derive_network(chip_);
  const int m = 2 * chip_.n_columns;
  const int n = static_cast<int>(graph_.nodes.size());
  const int segs = static_cast<int>(graph_.segments.size());

  comps_.resize(m);
  s_a_.assign(m, 0.0);
  s_b_.assign(m, 0.0);
  decay_a_.resize(m);
  decay_b_.resize(m);
  scale_a_.resize(m);
  scale_b_.resize(m);
  gs_a_.assign(m, 0.0);
  gs_b_.assign(m, 0.0);
  unit_dv_.resize(m);

  for (int i = 0; i < m; ++i) {
    const auto& cc = chip_.compartments[i];
    CompState& cs = comps_[i];
    cs.mode = cc.mode;
    cs.exp_term = cc.exp_term;
    cs.p = cc.params;
    cs.node = graph_.node_of[i];
    cs.segment = graph_.segment_of[i];
    cs.soma_connect = cc.soma_connect;
    cs.bypass = cc.soma_bypass;
    cs.pulse_steps = std::max<long long>(1, std::llround(cc.params.t_pulse / ecfg_.dt));
    decay_a_[i] = det_exp(-ecfg_.dt / cc.params.tau_syn_a);
    decay_b_[i] = det_exp(-ecfg_.dt / cc.params.tau_syn_b);
    scale_a_[i] = cc.params.g_syn_scale_a;
    scale_b_[i] = cc.params.g_syn_scale_b;
    unit_dv_[i] = cc.params.i_unit * kSynPulseSeconds / kLineCapacitanceFarad;
    if (cc.current_input) stim_comp_ = i;
  }

  // Node start voltage: capacitance-weighted mean of member rest levels.
  v_.resize(n);
  cap_.resize(n);
  glin_.assign(n, 0.0);
  bacc_.assign(n, 0.0);
  alpha_.assign(n, 1.0);
  vinf_.assign(n, 0.0);
  for (int k = 0; k < n; ++k) {
    const auto& node = graph_.nodes[k];
    cap_[k] = node.capacitance;
    if (node.members.size() == 1) {
      // Exactly the rest level; merged membranes share charge instead.
      v_[k] = chip_.compartments[node.members.front()].params.v_leak;
    } else {
      double weighted = 0;
      for (const int ci : node.members)
        weighted += chip_.compartments[ci].params.c_mem *
                    chip_.compartments[ci].params.v_leak;
      v_[k] = weighted / node.capacitance;
    }
  }

  // Somatic-line rails: resolve bypass shorts, reject ill-posed ones.
  vline_.assign(segs, 0.0);
  line_floating_.assign(segs, 1);
  bypass_node_.assign(segs, -1);
  for (int s = 0; s < segs; ++s) {
    for (const auto& at : graph_.segments[s].attachments) {
      if (!at.bypass) continue;
      if (bypass_node_[s] >= 0 && bypass_node_[s] != at.node)
        throw SimError(
            SimErrorKind::MultipleBypassConflict,
            "somatic line segment " + std::string(to_string(graph_.segments[s].block)) +
                " columns " + std::to_string(graph_.segments[s].col_begin) + ".." +
                std::to_string(graph_.segments[s].col_end - 1) +
                " is shorted to two distinct membrane nodes");
      bypass_node_[s] = at.node;
    }
  }

  // One sensor per synapse, preset with the run's pairing constants.
  CorrelationState proto;
  proto.a_plus = ecfg_.sensor.a_plus;
  proto.a_minus = ecfg_.sensor.a_minus;
  proto.tau_plus = ecfg_.sensor.tau_plus;
  proto.tau_minus = ecfg_.sensor.tau_minus;
  for (const auto& row : chip_.rows)
    sensors_[{static_cast<int>(row.block), row.index}]
        .assign(chip_.n_columns, proto);
}

SynapseRow* Simulation::live_row(Block b, int row) {
  for (auto& r : chip_.rows)
    if (r.block == b && r.index == row) return &r;
  return nullptr;
}

CorrelationState& Simulation::sensor(Block b, int row, int col) {
  return sensors_.at({static_cast<int>(b), row})[col];
}

long long Simulation::step_of(double t) const {
  return std::llround(t / ecfg_.dt);
}

void Simulation::check_comp(Block b, int col, const char* what) const {
  if (col < 0 || col >= chip_.n_columns)
    throw SimError(SimErrorKind::InvalidArgument,
                   std::string(what) + ": column out of range for " +
                       comp_name(b, col));
}

void Simulation::add_probe(const Probe& p) {
  check_comp(p.block, p.column, "add_probe");
  const int ci = comp_index(p.block, p.column);
  probes_.push_back(p);
  switch (p.kind) {
    case ProbeKind::NodeVoltage: probe_slot_.push_back(comps_[ci].node); break;
    case ProbeKind::SomaLine: probe_slot_.push_back(comps_[ci].segment); break;
    default: probe_slot_.push_back(ci); break;
  }
  result_.trace.labels.push_back(probe_label(p));
  result_.trace.values.emplace_back();
}

void Simulation::add_events(const std::vector<PresynEvent>& events) {
  for (const auto& ev : events) {
    if (ev.address < 0 || ev.address > kAddressMax)
      throw SimError(SimErrorKind::InvalidArgument,
                     "event address out of range");
    queue_.push({step_of(ev.time), static_cast<int>(ev.block), ev.row_group,
                 ev.address});
  }
}

void Simulation::add_current_pulse(const CurrentPulse& pulse) {
  check_comp(pulse.block, pulse.column, "add_current_pulse");
  const int ci = comp_index(pulse.block, pulse.column);
  if (ci != stim_comp_)
    throw SimError(SimErrorKind::InvalidArgument,
                   "current pulse targets " + comp_name(pulse.block, pulse.column) +
                       " but that compartment has no current input enabled");
  pulses_.push_back(pulse);
}

void Simulation::set_routing(RoutingTable table, double loop_delay) {
  routing_ = std::move(table);
  loop_delay_ = loop_delay > 0 ? loop_delay : ecfg_.dt;
}

void Simulation::set_bus_model(const BusModel& bus) { bus_ = bus; }

void Simulation::set_plasticity(const PlasticityPlan& plan) {
  if (!(plan.period > 0))
    throw SimError(SimErrorKind::InvalidArgument,
                   "plasticity period must be positive");
  for (const auto& r : plan.rows)
    if (!live_row(r.block, r.row))
      throw SimError(SimErrorKind::InvalidArgument,
                     "plasticity plan references missing row " +
                         std::string(to_string(r.block)) + " " +
                         std::to_string(r.row));
  plan_ = plan;
  period_steps_ = std::max<long long>(1, std::llround(plan.period / ecfg_.dt));
  plastic_rng_.reseed(plan.seed);
}

double Simulation::node_voltage(Block b, int col) const {
  check_comp(b, col, "node_voltage");
  return v_[comps_[comp_index(b, col)].node];
}

double Simulation::line_deviation(Block b, int col, LineId line) const {
  check_comp(b, col, "line_deviation");
  const int ci = comp_index(b, col);
  return line == LineId::A ? s_a_[ci] : s_b_[ci];
}

double Simulation::soma_line_voltage(Block b, int col) const {
  check_comp(b, col, "soma_line_voltage");
  const int s = comps_[comp_index(b, col)].segment;
  return line_floating_[s] ? std::numeric_limits<double>::quiet_NaN()
                           : vline_[s];
}

bool Simulation::in_alt_mode(Block b, int col) const {
  check_comp(b, col, "in_alt_mode");
  return comps_[comp_index(b, col)].alt;
}

double Simulation::monoflop_remaining(Block b, int col) const {
  check_comp(b, col, "monoflop_remaining");
  return static_cast<double>(comps_[comp_index(b, col)].remaining) * ecfg_.dt;
}

SynapseCell Simulation::synapse(Block b, int row, int col) const {
  const SynapseRow* r = live_row(b, row);
  if (!r || col < 0 || col >= static_cast<int>(r->cells.size()))
    throw SimError(SimErrorKind::InvalidArgument, "no such synapse");
  return r->cells[col];
}

const CorrelationState& Simulation::correlation(Block b, int row,
                                                int col) const {
  return const_cast<Simulation*>(this)->correlation(b, row, col);
}

CorrelationState& Simulation::correlation(Block b, int row, int col) {
  const auto it = sensors_.find({static_cast<int>(b), row});
  if (it == sensors_.end() || col < 0 ||
      col >= static_cast<int>(it->second.size()))
    throw SimError(SimErrorKind::InvalidArgument, "no such synapse");
  return it->second[col];
}

void Simulation::apply_synapse_write(const SynapseWrite& w) {
  SynapseRow* row = live_row(w.block, w.row);
  if (!row || w.column < 0 || w.column >= static_cast<int>(row->cells.size()))
    throw SimError(SimErrorKind::InvalidArgument, "synapse write out of range");
  if (w.address > kAddressMax || w.weight > kWeightMax)
    throw SimError(SimErrorKind::InvalidArgument,
                   "synapse write exceeds 6-bit range");
  SynapseCell& cell = row->cells[w.column];
  if (cell.address == w.address && cell.weight == w.weight) return;
  result_.rewires.push_back({time(), w.block, w.row, w.column, cell.address,
                             w.address, cell.weight, w.weight});
  cell.address = w.address;
  cell.weight = w.weight;
}

void Simulation::apply_param_write(const ParamWrite& w) {
  check_comp(w.block, w.column, "apply_param_write");
  const int ci = comp_index(w.block, w.column);
  CompState& cs = comps_[ci];
  AnalogParams& live = chip_.comp(w.block, w.column).params;
  switch (w.field) {
    case AnalogField::VLeak: cs.p.v_leak = live.v_leak = w.value; break;
    case AnalogField::GLeak: cs.p.g_leak = live.g_leak = w.value; break;
    case AnalogField::VAlt: cs.p.v_alt = live.v_alt = w.value; break;
    case AnalogField::GAlt: cs.p.g_alt = live.g_alt = w.value; break;
    case AnalogField::VTh: cs.p.v_th = live.v_th = w.value; break;
    case AnalogField::TPulse:
      cs.p.t_pulse = live.t_pulse = w.value;
      cs.pulse_steps =
          std::max<long long>(1, std::llround(w.value / ecfg_.dt));
      break;
    case AnalogField::GIc:
      cs.p.g_ic = live.g_ic = w.value;
      for (auto& seg : graph_.segments)
        for (auto& at : seg.attachments)
          if (at.comp == ci) at.g = w.value;
      break;
  }
}

KernelView Simulation::kernel_read_reset(const std::vector<RowRef>& rows) {
  KernelView view;
  for (const auto& ref : rows) {
    const SynapseRow* row = live_row(ref.block, ref.row);
    if (!row)
      throw SimError(SimErrorKind::InvalidArgument,
                     "read_reset references missing row");
    auto& row_sensors = sensors_.at({static_cast<int>(ref.block), ref.row});
    for (int col = 0; col < static_cast<int>(row->cells.size()); ++col) {
      CorrelationState& cs = row_sensors[col];
      view.synapses.push_back({ref.block, ref.row, col,
                               row->cells[col].address, row->cells[col].weight,
                               cs.c_causal, cs.c_acausal});
      cs.c_causal = 0;
      cs.c_acausal = 0;
    }
  }
  return view;
}

void Simulation::deliver_due_events() {
  const long long k = step_;
  const double t = time();
  while (!queue_.empty() && queue_.top().step <= k) {
    const QueuedEvent ev = queue_.top();
    queue_.pop();

    if (bus_.enforce) {
      const auto key = std::make_pair(ev.block, ev.group);
      const auto it = bus_last_step_.find(key);
      if (it != bus_last_step_.end() &&
          static_cast<double>(k - it->second) * ecfg_.dt * bus_.max_rate <
              1.0) {
        ++result_.dropped_events;
        continue;
      }
      bus_last_step_[key] = k;
    }

    PresynEvent pe;
    pe.time = t;
    pe.block = static_cast<Block>(ev.block);
    pe.row_group = ev.group;
    pe.address = ev.address;
    for (const SynapseHit& hit : match_event(chip_, pe)) {
      sensor(pe.block, hit.row_index, hit.column).on_pre(t);
      if (hit.weight == 0) continue;
      const int ci = comp_index(pe.block, hit.column);
      const double dv = static_cast<double>(hit.weight) * unit_dv_[ci];
      if (hit.line == LineId::A)
        s_a_[ci] += dv;
      else
        s_b_[ci] += dv;
    }
  }
}

void Simulation::solve_lines() {
  for (std::size_t s = 0; s < graph_.segments.size(); ++s) {
    if (bypass_node_[s] >= 0) {
      vline_[s] = v_[bypass_node_[s]];
      line_floating_[s] = 0;
      continue;
    }
    double num = 0, den = 0;
    for (const auto& at : graph_.segments[s].attachments) {
      num += at.g * v_[at.node];
      den += at.g;
    }
    if (den > 0) {
      vline_[s] = num / den;
      line_floating_[s] = 0;
    } else {
      vline_[s] = 0;
      line_floating_[s] = 1;
    }
  }
}

void Simulation::integrate() {
  const int m = 2 * chip_.n_columns;
  const int n = static_cast<int>(v_.size());
  const auto& ops = kernels::active();

  // Synaptic conductances from the line deviations.
  ops.mul(gs_a_.data(), scale_a_.data(), s_a_.data(), m);
  ops.mul(gs_b_.data(), scale_b_.data(), s_b_.data(), m);

  std::fill(glin_.begin(), glin_.end(), 0.0);
  std::fill(bacc_.begin(), bacc_.end(), 0.0);

  const double t = time();
  double i_stim = 0;
  if (stim_comp_ >= 0) {
    for (const auto& p : pulses_)
      if (t >= p.t0 && t < p.t0 + p.duration) i_stim += p.amplitude;
  }

  for (int c = 0; c < m; ++c) {
    const CompState& cs = comps_[c];
    const int node = cs.node;

    if (cs.mode != Mode::Disabled) {
      const double g_active = cs.alt ? cs.p.g_alt : cs.p.g_leak;
      const double v_active = cs.alt ? cs.p.v_alt : cs.p.v_leak;
      glin_[node] += g_active;
      bacc_[node] += g_active * v_active;

      if (cs.exp_term) {
        // Sharp spike-initiation current, frozen over the step and clamped.
        const double raw = cs.p.g_leak * cs.p.delta_t *
                           det_exp((v_[node] - cs.p.v_exp_th) / cs.p.delta_t);
        bacc_[node] += std::min(raw, ecfg_.i_exp_max);
      }
    }

    glin_[node] += gs_a_[c];
    bacc_[node] += gs_a_[c] * cs.p.e_rev_a;
    glin_[node] += gs_b_[c];
    bacc_[node] += gs_b_[c] * cs.p.e_rev_b;

    if (cs.soma_connect && !line_floating_[cs.segment]) {
      const int bp = bypass_node_[cs.segment];
      if (bp != node) {
        glin_[node] += cs.p.g_ic;
        bacc_[node] += cs.p.g_ic * vline_[cs.segment];
      }
    }

    if (c == stim_comp_) bacc_[node] += i_stim;
  }

  // A bypassed node carries the rail: the other attachments' coupling
  // currents flow into it directly.
  for (std::size_t s = 0; s < graph_.segments.size(); ++s) {
    const int bp = bypass_node_[s];
    if (bp < 0) continue;
    for (const auto& at : graph_.segments[s].attachments) {
      if (at.node == bp) continue;
      glin_[bp] += at.g;
      bacc_[bp] += at.g * v_[at.node];
    }
  }

  for (int k = 0; k < n; ++k) {
    if (glin_[k] > 0) {
      alpha_[k] = det_exp(-ecfg_.dt * glin_[k] / cap_[k]);
      vinf_[k] = bacc_[k] / glin_[k];
    } else {
      alpha_[k] = 1.0;
      vinf_[k] = v_[k];
    }
  }

  ops.exp_euler(v_.data(), vinf_.data(), alpha_.data(), n);

  for (int k = 0; k < n; ++k) {
    if (glin_[k] <= 0 && bacc_[k] != 0)
      v_[k] += ecfg_.dt * bacc_[k] / cap_[k];
    if (!(std::abs(v_[k]) <= ecfg_.v_guard)) overflow(k);
  }
}

void Simulation::overflow(int node) const {
  std::string members;
  for (const int ci : graph_.nodes[node].members) {
    const Block b = ci < chip_.n_columns ? Block::Upper : Block::Lower;
    const int col = ci % chip_.n_columns;
    if (!members.empty()) members += ",";
    members += comp_name(b, col);
  }
  throw SimError(SimErrorKind::NumericalOverflow,
                 "membrane node {" + members + "} left the +-" +
                     format_double(ecfg_.v_guard) +
                     " V guard band at t = " + std::to_string(time() * 1e6) +
                     " us");
}

void Simulation::update_circuits() {
  const int m = 2 * chip_.n_columns;
  const double t_next = static_cast<double>(step_ + 1) * ecfg_.dt;

  for (int c = 0; c < m; ++c) {
    CompState& cs = comps_[c];
    if (cs.mode != Mode::Na && cs.mode != Mode::Ca && cs.mode != Mode::Nmda)
      continue;

    if (cs.alt && --cs.remaining == 0) {
      cs.alt = false;
      if (cs.open_plateau >= 0) {
        result_.plateaus[cs.open_plateau].end = t_next;
        result_.plateaus[cs.open_plateau].completed = true;
        cs.open_plateau = -1;
      }
    }

    const bool high = v_[cs.node] >= cs.p.v_th;
    if (high && !cs.high && !cs.alt) {
      cs.alt = true;
      cs.remaining = cs.pulse_steps;
      const Block b = c < chip_.n_columns ? Block::Upper : Block::Lower;
      const int col = c % chip_.n_columns;
      const SpikeType type = cs.mode == Mode::Na   ? SpikeType::Na
                             : cs.mode == Mode::Ca ? SpikeType::Ca
                                                   : SpikeType::Nmda;
      result_.spikes.push_back({t_next, b, col, type});
      cs.open_plateau = static_cast<int>(result_.plateaus.size());
      result_.plateaus.push_back({b, col, type, t_next, t_next, false});

      // The post event reaches every sensor of this compartment's column.
      for (const auto& row : chip_.rows)
        if (row.block == b) sensor(b, row.index, col).on_post(t_next);

      // Feed the spike back through the routing fabric.
      for (const auto& ev :
           route_spike(b, col, type, t_next, routing_, loop_delay_))
        queue_.push({step_of(ev.time), static_cast<int>(ev.block),
                     ev.row_group, ev.address});
    }
    cs.high = high;
  }
}

void Simulation::run_plasticity() {
  if (!plan_ || step_ % period_steps_ != 0) return;
  ++result_.kernel_invocations;

  KernelView view = kernel_read_reset(plan_->rows);
  if (plan_->stdp) {
    stdp_kernel(view, *plan_->stdp);
    for (const auto& w : view.writes) {
      apply_synapse_write(w);
      // Keep the snapshot coherent for the structural pass below.
      for (auto& s : view.synapses)
        if (s.block == w.block && s.row == w.row && s.column == w.column) {
          s.weight = w.weight;
          s.address = w.address;
        }
    }
    view.writes.clear();
  }
  if (plan_->structural) {
    structural_step(view, *plan_->structural, plastic_rng_);
    for (const auto& w : view.writes) apply_synapse_write(w);
    view.writes.clear();
  }
  for (const auto& pw : view.param_writes) apply_param_write(pw);
}

void Simulation::record_sample() {
  if (probes_.empty()) return;
  result_.trace.time.push_back(time());
  for (std::size_t i = 0; i < probes_.size(); ++i) {
    double value = 0;
    const int slot = probe_slot_[i];
    switch (probes_[i].kind) {
      case ProbeKind::NodeVoltage: value = v_[slot]; break;
      case ProbeKind::LineDeviationA: value = s_a_[slot]; break;
      case ProbeKind::LineDeviationB: value = s_b_[slot]; break;
      case ProbeKind::SomaLine:
        value = line_floating_[slot]
                    ? std::numeric_limits<double>::quiet_NaN()
                    : vline_[slot];
        break;
    }
    result_.trace.values[i].push_back(value);
  }
}

void Simulation::ensure_initial_sample() {
  if (initial_sample_done_) return;
  initial_sample_done_ = true;
  solve_lines();  // so line probes are defined at t = 0
  record_sample();
}

void Simulation::step() {
  ensure_initial_sample();
  deliver_due_events();
  const auto& ops = kernels::active();
  const int m = 2 * chip_.n_columns;
  ops.mul_inplace(s_a_.data(), decay_a_.data(), m);
  ops.mul_inplace(s_b_.data(), decay_b_.data(), m);
  solve_lines();
  integrate();
  update_circuits();
  ++step_;
  // The on-chip processor acts on the period boundary it just completed,
  // so its writes carry the boundary timestamp.
  run_plasticity();
  // Line probes report the rail consistent with the post-step voltages.
  solve_lines();
  record_sample();
  result_.steps = static_cast<std::uint64_t>(step_);
  result_.t_end = time();
}

void Simulation::run(double t_end) {
  const long long target = step_of(t_end);
  ensure_initial_sample();
  while (step_ < target) step();
}

}  // namespace mcsim
