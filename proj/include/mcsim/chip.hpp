#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mcsim/types.hpp"

namespace mcsim {

// Analog parameter set of one compartment. The hardware stores at most 24
// analog values per compartment; the model must stay within that budget.
struct AnalogParams {
  double v_leak = 0.7;         // resting reversal [V]
  double g_leak = 2e-7;        // leak conductance [S]
  double v_alt = 1.1;          // reversal while the mono-flop holds [V]
  double g_alt = 5e-6;         // conductance while the mono-flop holds [S]
  double v_th = 0.9;           // comparator threshold [V]
  double t_pulse = 30e-6;      // mono-flop hold time [s]
  double c_mem = 2e-12;        // membrane capacitance [F]
  double e_rev_a = 1.2;        // synaptic reversal, line A [V]
  double e_rev_b = 0.3;        // synaptic reversal, line B [V]
  double tau_syn_a = 2e-6;     // line A recharge time constant [s]
  double tau_syn_b = 2e-6;     // line B recharge time constant [s]
  double g_syn_scale_a = 5e-6; // line deviation to conductance, line A [S/V]
  double g_syn_scale_b = 5e-6; // line deviation to conductance, line B [S/V]
  double i_unit = 5e-7;        // weight-LSB synaptic pulse current [A]
  double v_exp_th = 0.9;       // exponential term onset voltage [V]
  double delta_t = 0.03;       // exponential term slope [V]
  double g_ic = 1e-6;          // conductance to the block's somatic line [S]

  bool operator==(const AnalogParams&) const = default;
};

static_assert(sizeof(AnalogParams) / sizeof(double) <= 24,
              "per-compartment analog parameter budget exceeded");

struct CompartmentConfig {
  Mode mode = Mode::Disabled;
  bool exp_term = false;       // exponential (spike-initiation) term enabled
  AnalogParams params;
  bool merge_right = false;    // membrane switch to the right neighbor
  bool merge_vertical = false; // membrane switch to the other block, same column
  bool soma_connect = false;   // g_ic engaged towards the somatic line
  bool soma_bypass = false;    // zero-resistance short to the somatic line
  bool current_input = false;  // receives the chip-wide current stimulus

  bool operator==(const CompartmentConfig&) const = default;
};

struct SynapseCell {
  std::uint8_t address = 0;
  std::uint8_t weight = 0;

  bool operator==(const SynapseCell&) const = default;
};

// One synapse row. Rows 2k and 2k+1 of a block share pre-synaptic bus
// group k; each row drives either line A or line B of its column.
struct SynapseRow {
  Block block = Block::Upper;
  int index = 0;
  LineId target_line = LineId::A;
  std::vector<SynapseCell> cells;  // one per column

  int group() const { return index / kRowsPerGroup; }
  bool operator==(const SynapseRow&) const = default;
};

struct ChipConfig {
  int n_columns = 0;
  // Upper block columns 0..n-1, then lower block columns 0..n-1.
  std::vector<CompartmentConfig> compartments;
  // Sorted by (block, index).
  std::vector<SynapseRow> rows;
  // true = switch closed (line continuous across the boundary). Boundary i
  // separates columns [0, (i+1)*kSomaSegmentPeriod) from the rest.
  std::vector<std::uint8_t> soma_switch_upper;
  std::vector<std::uint8_t> soma_switch_lower;

  int compartment_index(Block b, int col) const {
    return (b == Block::Upper ? 0 : n_columns) + col;
  }
  CompartmentConfig& comp(Block b, int col) {
    return compartments[compartment_index(b, col)];
  }
  const CompartmentConfig& comp(Block b, int col) const {
    return compartments[compartment_index(b, col)];
  }
  // Number of segment switches per block for this column count.
  int n_segment_switches() const {
    return n_columns > 0 ? (n_columns - 1) / kSomaSegmentPeriod : 0;
  }
  const std::vector<std::uint8_t>& soma_switches(Block b) const {
    return b == Block::Upper ? soma_switch_upper : soma_switch_lower;
  }
  const SynapseRow* find_row(Block b, int index) const;
  int row_count(Block b) const;

  bool operator==(const ChipConfig&) const = default;
};

// Small simulation-scale chip: every compartment disabled, rows zeroed.
ChipConfig default_chip(int n_columns = 4, int rows_per_block = 8);

// Full-array geometry: 256 rows per block (128 bus groups x 64 addresses =
// 8192 pre-synaptic sources per block), 32 columns.
ChipConfig full_chip();

struct Violation {
  std::string field;  // offending field, e.g. "compartment upper 2 params.c_mem"
  std::string rule;   // violated rule in plain words
};

// Structural validation; returns every violation instead of stopping at the
// first. An empty result means the config is electrically well-formed.
std::vector<Violation> validate_config(const ChipConfig& cfg);

// ---- Derived electrical network -------------------------------------------

struct MembraneNode {
  std::vector<int> members;  // compartment indices, ascending
  double capacitance = 0;    // sum of member membrane capacitances [F]
};

struct SomaAttachment {
  int comp = -1;        // compartment index
  int node = -1;        // membrane node index
  double g = 0;         // inter-compartment conductance [S]
  bool bypass = false;  // short: the line rail follows this node's voltage
};

struct SomaSegment {
  Block block = Block::Upper;
  int col_begin = 0;
  int col_end = 0;  // half-open column span
  std::vector<SomaAttachment> attachments;
};

struct CircuitGraph {
  std::vector<MembraneNode> nodes;
  std::vector<int> node_of;      // compartment index -> node index
  std::vector<SomaSegment> segments;
  std::vector<int> segment_of;   // compartment index -> segment index

  int node_index(const ChipConfig& cfg, Block b, int col) const {
    return node_of[(b == Block::Upper ? 0 : cfg.n_columns) + col];
  }
};

// Resolves closed merge switches into membrane nodes (capacitances summed)
// and segment switches into somatic-line spans with their attachments.
// Deterministic: nodes are ordered by smallest member compartment index.
CircuitGraph derive_network(const ChipConfig& cfg);

}  // namespace mcsim
