#include "mcsim/chip.hpp"

#include <algorithm>
#include <numeric>
#include <set>

namespace mcsim {

const SynapseRow* ChipConfig::find_row(Block b, int index) const {
  for (const auto& r : rows)
    if (r.block == b && r.index == index) return &r;
  return nullptr;
}

int ChipConfig::row_count(Block b) const {
  int n = 0;
  for (const auto& r : rows) n += (r.block == b);
  return n;
}

ChipConfig default_chip(int n_columns, int rows_per_block) {
  ChipConfig cfg;
  cfg.n_columns = n_columns;
  cfg.compartments.assign(2 * n_columns, CompartmentConfig{});
  cfg.soma_switch_upper.assign(cfg.n_segment_switches(), 0);
  cfg.soma_switch_lower.assign(cfg.n_segment_switches(), 0);
  for (Block b : {Block::Upper, Block::Lower}) {
    for (int i = 0; i < rows_per_block; ++i) {
      SynapseRow row;
      row.block = b;
      row.index = i;
      row.target_line = LineId::A;
      row.cells.assign(n_columns, SynapseCell{});
      cfg.rows.push_back(std::move(row));
    }
  }
  return cfg;
}

ChipConfig full_chip() { return default_chip(32, 256); }

namespace {

void require(std::vector<Violation>& out, bool ok, std::string field,
             std::string rule) {
  if (!ok) out.push_back({std::move(field), std::move(rule)});
}

std::string comp_field(Block b, int col, const char* sub) {
  return "compartment " + std::string(to_string(b)) + " " +
         std::to_string(col) + (sub[0] ? std::string(" ") + sub : "");
}

}  // namespace

std::vector<Violation> validate_config(const ChipConfig& cfg) {
  std::vector<Violation> v;
  require(v, cfg.n_columns >= 1, "n_columns", "must be at least 1");
  if (cfg.n_columns < 1) return v;

  require(v, static_cast<int>(cfg.compartments.size()) == 2 * cfg.n_columns,
          "compartments", "must hold exactly two blocks of n_columns entries");
  if (static_cast<int>(cfg.compartments.size()) != 2 * cfg.n_columns) return v;

  int current_inputs = 0;
  for (Block b : {Block::Upper, Block::Lower}) {
    for (int col = 0; col < cfg.n_columns; ++col) {
      const auto& c = cfg.comp(b, col);
      const auto& p = c.params;
      require(v, p.c_mem > 0, comp_field(b, col, "params.c_mem"),
              "membrane capacitance must be positive");
      require(v, p.g_leak >= 0, comp_field(b, col, "params.g_leak"),
              "conductance must be non-negative");
      require(v, p.g_alt >= 0, comp_field(b, col, "params.g_alt"),
              "conductance must be non-negative");
      require(v, p.g_ic >= 0, comp_field(b, col, "params.g_ic"),
              "conductance must be non-negative");
      require(v, p.g_syn_scale_a >= 0 && p.g_syn_scale_b >= 0,
              comp_field(b, col, "params.g_syn_scale"),
              "conductance scale must be non-negative");
      require(v, p.tau_syn_a > 0 && p.tau_syn_b > 0,
              comp_field(b, col, "params.tau_syn"),
              "synaptic time constants must be positive");
      require(v, p.t_pulse > 0, comp_field(b, col, "params.t_pulse"),
              "mono-flop hold time must be positive");
      require(v, p.i_unit >= 0, comp_field(b, col, "params.i_unit"),
              "pulse current must be non-negative");
      require(v, !c.exp_term || p.delta_t > 0,
              comp_field(b, col, "params.delta_t"),
              "exponential slope must be positive when the term is enabled");
      require(v, !c.soma_bypass || c.soma_connect,
              comp_field(b, col, "soma_bypass"),
              "bypass requires the somatic-line connection to be engaged");
      require(v, !c.merge_right || col + 1 < cfg.n_columns,
              comp_field(b, col, "merge_right"),
              "no right neighbor exists at the last column");
      current_inputs += c.current_input;
    }
  }
  require(v, current_inputs <= 1, "current_input",
          "at most one compartment may receive the current stimulus");

  const auto switches = static_cast<std::size_t>(cfg.n_segment_switches());
  require(v, cfg.soma_switch_upper.size() == switches, "soma_switch upper",
          "one flag per segment boundary required");
  require(v, cfg.soma_switch_lower.size() == switches, "soma_switch lower",
          "one flag per segment boundary required");

  std::set<std::pair<int, int>> seen;
  int per_block[2] = {0, 0};
  for (std::size_t i = 0; i < cfg.rows.size(); ++i) {
    const auto& r = cfg.rows[i];
    const std::string field = "row " + std::string(to_string(r.block)) + " " +
                              std::to_string(r.index);
    require(v, r.index >= 0, field, "row index must be non-negative");
    require(v, seen.insert({static_cast<int>(r.block), r.index}).second, field,
            "duplicate row");
    require(v, static_cast<int>(r.cells.size()) == cfg.n_columns, field,
            "row must hold one synapse per column");
    for (std::size_t col = 0; col < r.cells.size(); ++col) {
      require(v, r.cells[col].address <= kAddressMax,
              field + " cell " + std::to_string(col), "address exceeds 6 bits");
      require(v, r.cells[col].weight <= kWeightMax,
              field + " cell " + std::to_string(col), "weight exceeds 6 bits");
    }
    per_block[static_cast<int>(r.block)]++;
    if (i > 0) {
      const auto& prev = cfg.rows[i - 1];
      require(v, std::pair(prev.block, prev.index) < std::pair(r.block, r.index),
              field, "rows must be sorted by (block, index)");
    }
  }
  require(v, per_block[0] % kRowsPerGroup == 0, "rows upper",
          "rows pair into bus groups of two");
  require(v, per_block[1] % kRowsPerGroup == 0, "rows lower",
          "rows pair into bus groups of two");
  return v;
}

CircuitGraph derive_network(const ChipConfig& cfg) {
  const int m = 2 * cfg.n_columns;
  // Union-find over compartments joined by closed merge switches.
  std::vector<int> parent(m);
  std::iota(parent.begin(), parent.end(), 0);
  const auto find = [&](int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  const auto unite = [&](int a, int b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  };

  for (Block b : {Block::Upper, Block::Lower}) {
    for (int col = 0; col < cfg.n_columns; ++col) {
      const auto& c = cfg.comp(b, col);
      const int idx = cfg.compartment_index(b, col);
      if (c.merge_right && col + 1 < cfg.n_columns) unite(idx, idx + 1);
      if (c.merge_vertical)
        unite(idx, cfg.compartment_index(
                       b == Block::Upper ? Block::Lower : Block::Upper, col));
    }
  }

  CircuitGraph g;
  g.node_of.assign(m, -1);
  for (int i = 0; i < m; ++i) {
    const int root = find(i);
    if (g.node_of[root] < 0) {
      g.node_of[root] = static_cast<int>(g.nodes.size());
      g.nodes.emplace_back();
    }
    const int node = g.node_of[root];
    g.node_of[i] = node;
    g.nodes[node].members.push_back(i);
    g.nodes[node].capacitance += cfg.compartments[i].params.c_mem;
  }

  g.segment_of.assign(m, -1);
  for (Block b : {Block::Upper, Block::Lower}) {
    const auto& switches = cfg.soma_switches(b);
    const int n_bound = cfg.n_segment_switches();
    int begin = 0;
    // Walk segment boundaries left to right; an open switch (or the block
    // edge) terminates the current span.
    for (int boundary = 0; boundary <= n_bound; ++boundary) {
      const bool at_edge = boundary == n_bound;
      if (!at_edge && switches[boundary] != 0) continue;  // closed: span grows
      const int end = at_edge ? cfg.n_columns
                              : (boundary + 1) * kSomaSegmentPeriod;
      SomaSegment seg;
      seg.block = b;
      seg.col_begin = begin;
      seg.col_end = end;
      for (int col = begin; col < end; ++col) {
        const int ci = cfg.compartment_index(b, col);
        g.segment_of[ci] = static_cast<int>(g.segments.size());
        const auto& c = cfg.compartments[ci];
        if (!c.soma_connect) continue;
        SomaAttachment at;
        at.comp = ci;
        at.node = g.node_of[ci];
        at.g = c.params.g_ic;
        at.bypass = c.soma_bypass;
        seg.attachments.push_back(at);
      }
      g.segments.push_back(std::move(seg));
      begin = end;
    }
  }
  return g;
}

}  // namespace mcsim
