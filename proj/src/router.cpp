#include "mcsim/router.hpp"

#include <sstream>

#include "mcsim/text.hpp"

namespace mcsim {

std::vector<SynapseHit> match_event(const ChipConfig& cfg,
                                    const PresynEvent& ev) {
  std::vector<SynapseHit> hits;
  for (int r = 0; r < kRowsPerGroup; ++r) {
    const int row_index = ev.row_group * kRowsPerGroup + r;
    const SynapseRow* row = cfg.find_row(ev.block, row_index);
    if (!row) continue;
    for (int col = 0; col < static_cast<int>(row->cells.size()); ++col) {
      const auto& cell = row->cells[col];
      if (cell.address != ev.address) continue;
      hits.push_back({row_index, col, row->target_line, cell.weight});
    }
  }
  return hits;
}

const RoutingEntry* RoutingTable::find(Block b, int column,
                                       SpikeType t) const {
  for (const auto& e : entries)
    if (e.source_block == b && e.source_column == column && e.type == t)
      return &e;
  return nullptr;
}

std::vector<PresynEvent> route_spike(Block block, int column, SpikeType type,
                                     double spike_time,
                                     const RoutingTable& table,
                                     double loop_delay) {
  std::vector<PresynEvent> out;
  const RoutingEntry* entry = table.find(block, column, type);
  if (!entry) return out;
  out.reserve(entry->targets.size());
  for (const auto& t : entry->targets)
    out.push_back({spike_time + loop_delay, t.block, t.row_group, t.address});
  return out;
}

std::vector<PresynEvent> load_stimulus_text(const std::string& content,
                                            const std::string& filename) {
  TokenStream ts(filename, tokenize(content));
  std::vector<PresynEvent> events;
  while (!ts.done()) {
    PresynEvent ev;
    ev.time = ts.next_double() * 1e-6;  // file carries microseconds
    if (!parse_block(ts.peek().text, ev.block))
      ts.fail("expected a block name");
    ts.next();
    ev.row_group = static_cast<int>(ts.next_int());
    ev.address = static_cast<int>(ts.next_int());
    if (ev.row_group < 0) ts.fail("row group must be non-negative");
    if (ev.address < 0 || ev.address > kAddressMax)
      ts.fail("address must be within 0..63");
    events.push_back(ev);
  }
  return events;
}

std::vector<PresynEvent> load_stimulus_file(const std::string& path) {
  return load_stimulus_text(read_file(path), path);
}

std::string save_stimulus_text(const std::vector<PresynEvent>& events) {
  std::ostringstream out;
  out << "# time_us block row_group address\n";
  for (const auto& ev : events)
    out << format_double(ev.time * 1e6) << " " << to_string(ev.block) << " "
        << ev.row_group << " " << ev.address << "\n";
  return out.str();
}

RoutingTable load_routing_text(const std::string& content,
                               const std::string& filename) {
  TokenStream ts(filename, tokenize(content));
  RoutingTable table;
  while (!ts.done()) {
    RoutingEntry entry;
    if (!parse_block(ts.peek().text, entry.source_block))
      ts.fail("expected a block name");
    ts.next();
    entry.source_column = static_cast<int>(ts.next_int());
    if (!parse_spike_type(ts.peek().text, entry.type))
      ts.fail("expected a spike type (na/ca/nmda)");
    ts.next();
    ts.expect("->");
    // Targets are triples up to the ';' terminator (or end of file).
    while (!ts.done() && ts.peek().text != ";") {
      RoutingTarget t;
      if (!parse_block(ts.peek().text, t.block))
        ts.fail("expected a block name in routing target");
      ts.next();
      t.row_group = static_cast<int>(ts.next_int());
      t.address = static_cast<int>(ts.next_int());
      if (t.address < 0 || t.address > kAddressMax)
        ts.fail("address must be within 0..63");
      entry.targets.push_back(t);
    }
    if (!ts.done()) ts.expect(";");
    table.entries.push_back(std::move(entry));
  }
  return table;
}

RoutingTable load_routing_file(const std::string& path) {
  return load_routing_text(read_file(path), path);
}

std::string save_routing_text(const RoutingTable& table) {
  std::ostringstream out;
  out << "# block column spike_type -> (block row_group address)+ ;\n";
  for (const auto& e : table.entries) {
    out << to_string(e.source_block) << " " << e.source_column << " "
        << to_string(e.type) << " ->";
    for (const auto& t : e.targets)
      out << " " << to_string(t.block) << " " << t.row_group << " "
          << t.address;
    out << " ;\n";
  }
  return out.str();
}

}  // namespace mcsim
