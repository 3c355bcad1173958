#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mcsim/chip.hpp"
#include "mcsim/types.hpp"

namespace mcsim {

// One pre-synaptic event arriving on a row-pair bus.
struct PresynEvent {
  double time = 0;  // seconds (emulation time)
  Block block = Block::Upper;
  int row_group = 0;
  int address = 0;

  bool operator==(const PresynEvent&) const = default;
};

// A matched synapse: the hook target, and an injection when weight > 0.
struct SynapseHit {
  int row_index = 0;  // row index within the block
  int column = 0;
  LineId line = LineId::A;
  std::uint8_t weight = 0;
};

// Address comparison across both rows of the event's bus group. Matches are
// ordered by (row, column); zero-weight matches are reported too, because
// the correlation sensor observes the pre-synaptic event regardless of the
// weight driving the line.
std::vector<SynapseHit> match_event(const ChipConfig& cfg,
                                    const PresynEvent& ev);

struct RoutingTarget {
  Block block = Block::Upper;
  int row_group = 0;
  int address = 0;
};

// On-chip spike routing: compartment spikes re-enter the synapse array.
struct RoutingEntry {
  Block source_block = Block::Upper;
  int source_column = 0;
  SpikeType type = SpikeType::Na;
  std::vector<RoutingTarget> targets;
};

struct RoutingTable {
  std::vector<RoutingEntry> entries;

  const RoutingEntry* find(Block b, int column, SpikeType t) const;
};

// Expands a spike into bus events at spike_time + loop_delay.
std::vector<PresynEvent> route_spike(Block block, int column, SpikeType type,
                                     double spike_time,
                                     const RoutingTable& table,
                                     double loop_delay);

// Shared-bus throughput model. Each row-pair bus carries at most max_rate
// events per second; when enforcement is on, an event arriving closer than
// 1/max_rate after the previous delivery on the same bus is dropped and
// counted. Enforcement is off by default so scenario playback is lossless.
struct BusModel {
  double max_rate = 125e6;
  bool enforce = false;
};

// Stimulus file: one event per line, "time_us block row_group address".
std::vector<PresynEvent> load_stimulus_text(const std::string& content,
                                            const std::string& filename);
std::vector<PresynEvent> load_stimulus_file(const std::string& path);
std::string save_stimulus_text(const std::vector<PresynEvent>& events);

// Routing table file: one entry per line,
// "block column spike_type -> (block row_group address)+".
RoutingTable load_routing_text(const std::string& content,
                               const std::string& filename);
RoutingTable load_routing_file(const std::string& path);
std::string save_routing_text(const RoutingTable& table);

}  // namespace mcsim
