#include "mcsim/experiment.hpp"

#include <array>
#include <filesystem>
#include <sstream>
#include <utility>

#include "mcsim/config_io.hpp"
#include "mcsim/text.hpp"

namespace mcsim {

namespace {

std::string time_us(double seconds) { return format_fixed(seconds * 1e6, 4); }

std::string indent_lines(const std::string& text, const char* indent) {
  std::string out;
  std::size_t pos = 0;
  while (pos < text.size()) {
    const std::size_t nl = text.find('\n', pos);
    const std::size_t end = nl == std::string::npos ? text.size() : nl;
    if (end > pos) out += indent;
    out.append(text, pos, end - pos);
    out += '\n';
    pos = end + 1;
  }
  return out;
}

const char* probe_kind_word(ProbeKind k) {
  switch (k) {
    case ProbeKind::NodeVoltage: return "v";
    case ProbeKind::LineDeviationA: return "sa";
    case ProbeKind::LineDeviationB: return "sb";
    case ProbeKind::SomaLine: return "vsoma";
  }
  return "?";
}

bool parse_probe_kind(const std::string& s, ProbeKind& out) {
  if (s == "v") { out = ProbeKind::NodeVoltage; return true; }
  if (s == "sa") { out = ProbeKind::LineDeviationA; return true; }
  if (s == "sb") { out = ProbeKind::LineDeviationB; return true; }
  if (s == "vsoma") { out = ProbeKind::SomaLine; return true; }
  return false;
}

std::string trace_text(const Trace& trace) {
  std::ostringstream out;
  out << "time_us";
  for (const auto& label : trace.labels) out << " " << label;
  out << "\n";
  for (std::size_t i = 0; i < trace.time.size(); ++i) {
    out << time_us(trace.time[i]);
    for (const auto& column : trace.values)
      out << " " << format_double(column[i]);
    out << "\n";
  }
  return out.str();
}

std::string spikes_text(const std::vector<SpikeRecord>& spikes) {
  std::ostringstream out;
  out << "time_us compartment type\n";
  for (const auto& s : spikes)
    out << time_us(s.time) << " " << comp_name(s.block, s.column) << " "
        << to_string(s.type) << "\n";
  return out.str();
}

std::string plateaus_text(const std::vector<PlateauRecord>& plateaus) {
  std::ostringstream out;
  out << "begin_us end_us duration_us compartment type completed\n";
  for (const auto& p : plateaus)
    out << time_us(p.begin) << " " << time_us(p.end) << " "
        << time_us(p.end - p.begin) << " " << comp_name(p.block, p.column)
        << " " << to_string(p.type) << " " << (p.completed ? "true" : "false")
        << "\n";
  return out.str();
}

std::string rewiring_text(const std::vector<RewireRecord>& rewires) {
  std::ostringstream out;
  out << "time_us block row column old_address new_address old_weight "
         "new_weight\n";
  for (const auto& r : rewires)
    out << time_us(r.time) << " " << to_string(r.block) << " " << r.row << " "
        << r.column << " " << int(r.old_address) << " " << int(r.new_address)
        << " " << int(r.old_weight) << " " << int(r.new_weight) << "\n";
  return out.str();
}

std::string summary_text(const ExperimentSpec& spec, const RunResult& r,
                         const std::string& abort_reason) {
  std::ostringstream out;
  out << "experiment " << spec.name << "\n";
  out << "t_end_us " << time_us(r.t_end) << "\n";
  out << "steps " << r.steps << "\n";
  out << "dropped_events " << r.dropped_events << "\n";
  out << "kernel_invocations " << r.kernel_invocations << "\n";
  out << "rewiring_writes " << r.rewires.size() << "\n";
  if (!abort_reason.empty()) out << "aborted " << abort_reason << "\n";

  out << "\nspike_counts\n";
  const int n_comps = 2 * spec.chip.n_columns;
  constexpr std::array<SpikeType, 3> kTypes = {SpikeType::Na, SpikeType::Ca,
                                               SpikeType::Nmda};
  std::vector<std::array<int, 3>> counts(n_comps, {0, 0, 0});
  for (const auto& s : r.spikes) {
    const int ci = spec.chip.compartment_index(s.block, s.column);
    for (std::size_t k = 0; k < kTypes.size(); ++k)
      if (s.type == kTypes[k]) ++counts[ci][k];
  }
  int total = 0;
  for (int ci = 0; ci < n_comps; ++ci)
    for (std::size_t k = 0; k < kTypes.size(); ++k)
      if (counts[ci][k] > 0) {
        const Block b = ci < spec.chip.n_columns ? Block::Upper : Block::Lower;
        out << "  " << comp_name(b, ci % spec.chip.n_columns) << " "
            << to_string(kTypes[k]) << " " << counts[ci][k] << "\n";
        total += counts[ci][k];
      }
  out << "  total " << total << "\n";

  out << "\nplateau_intervals\n";
  for (const auto& p : r.plateaus)
    out << "  " << comp_name(p.block, p.column) << " " << to_string(p.type)
        << " " << time_us(p.begin) << ".." << time_us(p.end) << " duration "
        << time_us(p.end - p.begin) << (p.completed ? "" : " (unfinished)")
        << "\n";
  out << "  total " << r.plateaus.size() << "\n";
  return out.str();
}

// ---- text form ----------------------------------------------------------

void save_sensor(std::ostringstream& out, const SensorParams& s) {
  out << "  sensor { a_plus " << format_double(s.a_plus) << " a_minus "
      << format_double(s.a_minus) << " tau_plus " << format_double(s.tau_plus)
      << " tau_minus " << format_double(s.tau_minus) << " }\n";
}

void save_train(std::ostringstream& out, const TrainSpec& t) {
  out << "  train { block " << to_string(t.block) << " group " << t.row_group
      << " address " << t.address << " start " << format_double(t.start)
      << " period " << format_double(t.period) << " count " << t.count
      << " events_per " << t.events_per << " gap " << format_double(t.gap)
      << " }\n";
}

void save_current(std::ostringstream& out, const CurrentPulse& c) {
  out << "  current { block " << to_string(c.block) << " column " << c.column
      << " t0 " << format_double(c.t0) << " duration "
      << format_double(c.duration) << " amplitude "
      << format_double(c.amplitude) << " }\n";
}

void save_plasticity(std::ostringstream& out, const PlasticityPlan& p) {
  out << "  plasticity {\n";
  out << "    period " << format_double(p.period) << "\n";
  out << "    seed " << p.seed << "\n";
  for (const auto& row : p.rows)
    out << "    row " << to_string(row.block) << " " << row.row << "\n";
  if (p.stdp)
    out << "    stdp { eta " << format_double(p.stdp->eta) << " }\n";
  if (p.structural) {
    out << "    structural { theta " << format_double(p.structural->theta_corr)
        << " w_init " << int(p.structural->w_init) << " w_min "
        << int(p.structural->w_min) << " pool {";
    for (const auto a : p.structural->pool) out << " " << int(a);
    out << " } }\n";
  }
  out << "  }\n";
}

struct LoaderState {
  bool have_chip = false;
};

void require_chip(TokenStream& ts, const LoaderState& st) {
  if (!st.have_chip)
    ts.fail("the chip must be declared before stimuli and probes");
}

Block parse_block_word(TokenStream& ts) {
  const std::string word = ts.next_word();
  Block b{};
  if (!parse_block(word, b)) ts.fail("unknown block '" + word + "'");
  return b;
}

int parse_column(TokenStream& ts, const ChipConfig& chip) {
  const long long col = ts.next_int();
  if (col < 0 || col >= chip.n_columns) ts.fail("column out of range");
  return static_cast<int>(col);
}

int parse_address(TokenStream& ts) {
  const long long a = ts.next_int();
  if (a < 0 || a > kAddressMax) ts.fail("address out of range");
  return static_cast<int>(a);
}

void parse_sensor(TokenStream& ts, SensorParams& s) {
  ts.expect("{");
  while (ts.peek().text != "}") {
    const std::string key = ts.next_word();
    if (key == "a_plus") s.a_plus = ts.next_double();
    else if (key == "a_minus") s.a_minus = ts.next_double();
    else if (key == "tau_plus") s.tau_plus = ts.next_double();
    else if (key == "tau_minus") s.tau_minus = ts.next_double();
    else ts.fail("unknown sensor field '" + key + "'");
  }
  ts.expect("}");
  if (s.tau_plus <= 0 || s.tau_minus <= 0)
    ts.fail("sensor time constants must be positive");
}

void parse_bus(TokenStream& ts, BusModel& bus) {
  ts.expect("{");
  while (ts.peek().text != "}") {
    const std::string key = ts.next_word();
    if (key == "max_rate") bus.max_rate = ts.next_double();
    else if (key == "enforce") bus.enforce = ts.next_bool();
    else ts.fail("unknown bus field '" + key + "'");
  }
  ts.expect("}");
  if (bus.max_rate <= 0) ts.fail("bus max_rate must be positive");
}

void parse_train(TokenStream& ts, TrainSpec& t) {
  ts.expect("{");
  while (ts.peek().text != "}") {
    const std::string key = ts.next_word();
    if (key == "block") t.block = parse_block_word(ts);
    else if (key == "group") t.row_group = static_cast<int>(ts.next_int());
    else if (key == "address") t.address = parse_address(ts);
    else if (key == "start") t.start = ts.next_double();
    else if (key == "period") t.period = ts.next_double();
    else if (key == "count") t.count = static_cast<int>(ts.next_int());
    else if (key == "events_per") t.events_per = static_cast<int>(ts.next_int());
    else if (key == "gap") t.gap = ts.next_double();
    else ts.fail("unknown train field '" + key + "'");
  }
  ts.expect("}");
  if (t.row_group < 0) ts.fail("train group must be non-negative");
  if (t.start < 0 || t.period < 0 || t.gap < 0)
    ts.fail("train times must be non-negative");
  if (t.count < 1 || t.events_per < 1)
    ts.fail("train count and events_per must be at least 1");
  if (t.count > 1 && t.period <= 0)
    ts.fail("a multi-volley train needs a positive period");
}

void parse_current(TokenStream& ts, const ChipConfig& chip, CurrentPulse& c) {
  ts.expect("{");
  while (ts.peek().text != "}") {
    const std::string key = ts.next_word();
    if (key == "block") c.block = parse_block_word(ts);
    else if (key == "column") c.column = static_cast<int>(ts.next_int());
    else if (key == "t0") c.t0 = ts.next_double();
    else if (key == "duration") c.duration = ts.next_double();
    else if (key == "amplitude") c.amplitude = ts.next_double();
    else ts.fail("unknown current field '" + key + "'");
  }
  ts.expect("}");
  if (c.column < 0 || c.column >= chip.n_columns)
    ts.fail("current column out of range");
  if (c.t0 < 0 || c.duration < 0)
    ts.fail("current times must be non-negative");
}

void parse_route(TokenStream& ts, const ChipConfig& chip, RoutingTable& table) {
  RoutingEntry entry;
  entry.source_block = parse_block_word(ts);
  entry.source_column = parse_column(ts, chip);
  const std::string type = ts.next_word();
  if (!parse_spike_type(type, entry.type))
    ts.fail("unknown spike type '" + type + "'");
  ts.expect("{");
  while (ts.peek().text != "}") {
    RoutingTarget target;
    target.block = parse_block_word(ts);
    const long long group = ts.next_int();
    if (group < 0) ts.fail("target group must be non-negative");
    target.row_group = static_cast<int>(group);
    target.address = parse_address(ts);
    entry.targets.push_back(target);
  }
  ts.expect("}");
  table.entries.push_back(std::move(entry));
}

void parse_plasticity(TokenStream& ts, const ChipConfig& chip,
                      PlasticityPlan& plan) {
  ts.expect("{");
  while (ts.peek().text != "}") {
    const std::string key = ts.next_word();
    if (key == "period") {
      plan.period = ts.next_double();
    } else if (key == "seed") {
      plan.seed = static_cast<std::uint64_t>(ts.next_int());
    } else if (key == "row") {
      RowRef ref;
      ref.block = parse_block_word(ts);
      const long long row = ts.next_int();
      if (row < 0 || row >= chip.row_count(ref.block))
        ts.fail("plasticity row out of range");
      ref.row = static_cast<int>(row);
      plan.rows.push_back(ref);
    } else if (key == "stdp") {
      StdpParams stdp;
      ts.expect("{");
      while (ts.peek().text != "}") {
        const std::string field = ts.next_word();
        if (field == "eta") stdp.eta = ts.next_double();
        else ts.fail("unknown stdp field '" + field + "'");
      }
      ts.expect("}");
      plan.stdp = stdp;
    } else if (key == "structural") {
      StructuralParams sp;
      sp.pool.clear();
      ts.expect("{");
      while (ts.peek().text != "}") {
        const std::string field = ts.next_word();
        if (field == "theta") sp.theta_corr = ts.next_double();
        else if (field == "w_init")
          sp.w_init = static_cast<std::uint8_t>(parse_address(ts));
        else if (field == "w_min")
          sp.w_min = static_cast<std::uint8_t>(parse_address(ts));
        else if (field == "pool") {
          ts.expect("{");
          while (ts.peek().text != "}")
            sp.pool.push_back(static_cast<std::uint8_t>(parse_address(ts)));
          ts.expect("}");
        } else {
          ts.fail("unknown structural field '" + field + "'");
        }
      }
      ts.expect("}");
      plan.structural = sp;
    } else {
      ts.fail("unknown plasticity field '" + key + "'");
    }
  }
  ts.expect("}");
  if (plan.period <= 0) ts.fail("plasticity period must be positive");
  if (plan.structural && plan.structural->pool.empty())
    ts.fail("structural pool must not be empty");
}

std::string resolve_ref(const std::string& base_file, const std::string& ref) {
  const std::filesystem::path base =
      std::filesystem::path(base_file).parent_path();
  if (base.empty()) return ref;
  return (base / ref).string();
}

std::string read_ref(TokenStream& ts, const std::string& base_file,
                     const std::string& what, std::string& resolved) {
  const std::string ref = ts.next_word();
  resolved = resolve_ref(base_file, ref);
  try {
    return read_file(resolved);
  } catch (const std::exception& ex) {
    ts.fail("cannot read " + what + " '" + resolved + "': " + ex.what());
  }
}

}  // namespace

std::vector<PresynEvent> expand_train(const TrainSpec& t) {
  std::vector<PresynEvent> events;
  events.reserve(static_cast<std::size_t>(t.count) *
                 static_cast<std::size_t>(t.events_per));
  for (int v = 0; v < t.count; ++v)
    for (int e = 0; e < t.events_per; ++e)
      events.push_back(PresynEvent{t.start + v * t.period + e * t.gap,
                                   t.block, t.row_group, t.address});
  return events;
}

std::string save_experiment_text(const ExperimentSpec& spec) {
  std::ostringstream out;
  out << "# experiment: run description for the compartment-array simulator\n";
  out << "experiment {\n";
  out << "  name " << spec.name << "\n";
  out << "  t_end " << format_double(spec.t_end) << "\n";
  out << "  dt " << format_double(spec.engine.dt) << "\n";
  out << "  i_exp_max " << format_double(spec.engine.i_exp_max) << "\n";
  out << "  v_guard " << format_double(spec.engine.v_guard) << "\n";
  save_sensor(out, spec.engine.sensor);
  out << "  loop_delay " << format_double(spec.loop_delay) << "\n";
  out << "  bus { max_rate " << format_double(spec.bus.max_rate)
      << " enforce " << (spec.bus.enforce ? "true" : "false") << " }\n";
  out << indent_lines(save_chip_text(spec.chip), "  ");
  for (const auto& p : spec.probes)
    out << "  probe " << probe_kind_word(p.kind) << " " << to_string(p.block)
        << " " << p.column << "\n";
  for (const auto& e : spec.events)
    out << "  event " << format_double(e.time) << " " << to_string(e.block)
        << " " << e.row_group << " " << e.address << "\n";
  for (const auto& t : spec.trains) save_train(out, t);
  for (const auto& c : spec.currents) save_current(out, c);
  for (const auto& entry : spec.routing.entries) {
    out << "  route " << to_string(entry.source_block) << " "
        << entry.source_column << " " << to_string(entry.type) << " {";
    for (const auto& target : entry.targets)
      out << " " << to_string(target.block) << " " << target.row_group << " "
          << target.address;
    out << " }\n";
  }
  if (spec.plasticity) save_plasticity(out, *spec.plasticity);
  out << "}\n";
  return out.str();
}

ExperimentSpec load_experiment_text(const std::string& content,
                                    const std::string& filename) {
  TokenStream ts(filename, tokenize(content));
  ExperimentSpec spec;
  LoaderState st;
  bool have_current = false;
  CurrentPulse first_current;

  ts.expect("experiment");
  ts.expect("{");
  while (ts.peek().text != "}") {
    if (ts.peek().text == "chip") {
      spec.chip = parse_chip_block(ts);
      st.have_chip = true;
      continue;
    }
    const std::string key = ts.next_word();
    if (key == "name") {
      spec.name = ts.next_word();
    } else if (key == "t_end") {
      spec.t_end = ts.next_double();
      if (spec.t_end < 0) ts.fail("t_end must be non-negative");
    } else if (key == "dt") {
      spec.engine.dt = ts.next_double();
      if (spec.engine.dt <= 0) ts.fail("dt must be positive");
    } else if (key == "i_exp_max") {
      spec.engine.i_exp_max = ts.next_double();
    } else if (key == "v_guard") {
      spec.engine.v_guard = ts.next_double();
    } else if (key == "sensor") {
      parse_sensor(ts, spec.engine.sensor);
    } else if (key == "loop_delay") {
      spec.loop_delay = ts.next_double();
      if (spec.loop_delay < 0) ts.fail("loop_delay must be non-negative");
    } else if (key == "bus") {
      parse_bus(ts, spec.bus);
    } else if (key == "chip_file") {
      std::string resolved;
      const std::string text = read_ref(ts, filename, "chip file", resolved);
      spec.chip = load_chip_text(text, resolved);
      st.have_chip = true;
    } else if (key == "probe") {
      require_chip(ts, st);
      Probe p;
      const std::string kind = ts.next_word();
      if (!parse_probe_kind(kind, p.kind))
        ts.fail("unknown probe kind '" + kind +
                "' (expected v, sa, sb or vsoma)");
      p.block = parse_block_word(ts);
      p.column = parse_column(ts, spec.chip);
      spec.probes.push_back(p);
    } else if (key == "event") {
      require_chip(ts, st);
      PresynEvent e;
      e.time = ts.next_double();
      if (e.time < 0) ts.fail("event time must be non-negative");
      e.block = parse_block_word(ts);
      const long long group = ts.next_int();
      if (group < 0) ts.fail("event group must be non-negative");
      e.row_group = static_cast<int>(group);
      e.address = parse_address(ts);
      spec.events.push_back(e);
    } else if (key == "stimulus_file") {
      require_chip(ts, st);
      std::string resolved;
      const std::string text =
          read_ref(ts, filename, "stimulus file", resolved);
      const auto events = load_stimulus_text(text, resolved);
      spec.events.insert(spec.events.end(), events.begin(), events.end());
    } else if (key == "train") {
      require_chip(ts, st);
      TrainSpec t;
      parse_train(ts, t);
      spec.trains.push_back(t);
    } else if (key == "current") {
      require_chip(ts, st);
      CurrentPulse c;
      parse_current(ts, spec.chip, c);
      if (!have_current) {
        first_current = c;
        have_current = true;
      } else if (c.block != first_current.block ||
                 c.column != first_current.column) {
        ts.fail("current stimulus must target a single compartment");
      }
      spec.currents.push_back(c);
    } else if (key == "route") {
      require_chip(ts, st);
      parse_route(ts, spec.chip, spec.routing);
    } else if (key == "routing_file") {
      require_chip(ts, st);
      std::string resolved;
      const std::string text = read_ref(ts, filename, "routing file", resolved);
      RoutingTable table = load_routing_text(text, resolved);
      for (auto& entry : table.entries)
        spec.routing.entries.push_back(std::move(entry));
    } else if (key == "plasticity") {
      require_chip(ts, st);
      PlasticityPlan plan;
      parse_plasticity(ts, spec.chip, plan);
      spec.plasticity = plan;
    } else {
      ts.fail("unknown experiment field '" + key + "'");
    }
  }
  ts.expect("}");
  if (!ts.done()) ts.fail("trailing content after experiment block");
  if (!st.have_chip) ts.fail("experiment declares no chip");
  if (have_current) {
    const auto& cc = spec.chip.comp(first_current.block, first_current.column);
    if (!cc.current_input)
      ts.fail("the current-stimulus compartment " +
              comp_name(first_current.block, first_current.column) +
              " is not flagged current_input in the chip");
  }
  return spec;
}

ExperimentSpec load_experiment_file(const std::string& path) {
  return load_experiment_text(read_file(path), path);
}

std::string plot_data_text(const Trace& trace) {
  std::ostringstream out;
  out << "time_us time_ms_bio";
  for (const auto& label : trace.labels) out << " " << label;
  out << "\n";
  for (std::size_t i = 0; i < trace.time.size(); ++i) {
    const double hw_us = trace.time[i] * 1e6;
    const double bio_ms = trace.time[i] * kAccelerationFactor * 1e3;
    out << format_fixed(hw_us, 4) << " " << format_fixed(bio_ms, 4);
    for (const auto& column : trace.values)
      out << " " << format_double(column[i]);
    out << "\n";
  }
  return out.str();
}

RunResult run_experiment(const ExperimentSpec& spec,
                         const std::string& out_dir) {
  std::filesystem::create_directories(out_dir);
  Simulation sim(spec.chip, spec.engine);
  for (const auto& p : spec.probes) sim.add_probe(p);
  sim.add_events(spec.events);
  for (const auto& t : spec.trains) sim.add_events(expand_train(t));
  for (const auto& c : spec.currents) sim.add_current_pulse(c);
  if (!spec.routing.entries.empty())
    sim.set_routing(spec.routing, spec.loop_delay);
  sim.set_bus_model(spec.bus);
  if (spec.plasticity) sim.set_plasticity(*spec.plasticity);

  const auto write_artifacts = [&](const std::string& abort_reason) {
    const RunResult& r = sim.result();
    const std::filesystem::path dir(out_dir);
    write_file((dir / "trace.txt").string(), trace_text(r.trace));
    write_file((dir / "spikes.txt").string(), spikes_text(r.spikes));
    write_file((dir / "plateaus.txt").string(), plateaus_text(r.plateaus));
    write_file((dir / "rewiring.txt").string(), rewiring_text(r.rewires));
    write_file((dir / "plot_data.txt").string(), plot_data_text(r.trace));
    write_file((dir / "summary.txt").string(),
               summary_text(spec, r, abort_reason));
  };

  try {
    sim.run(spec.t_end);
  } catch (const SimError& ex) {
    write_artifacts(ex.what());
    if (ex.kind() == SimErrorKind::NumericalOverflow) {
      std::string probes;
      for (const auto& p : spec.probes) {
        if (!probes.empty()) probes += " ";
        probes += probe_label(p);
      }
      throw SimError(ex.kind(), std::string(ex.what()) + " [experiment '" +
                                    spec.name + "', probes: " +
                                    (probes.empty() ? "none" : probes) + "]");
    }
    throw;
  }
  write_artifacts("");
  return sim.result();
}

}  // namespace mcsim
