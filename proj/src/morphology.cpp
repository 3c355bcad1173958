#include "mcsim/morphology.hpp"

#include <algorithm>
#include <charconv>
#include <map>
#include <set>
#include <sstream>
#include <string>

#include "mcsim/text.hpp"

namespace mcsim {

namespace {

bool label_printable(const std::string& s) {
  if (s.empty()) return false;
  for (char c : s) {
    if (c == ':' || c == '{' || c == '}' || c == '#') return false;
    if (static_cast<unsigned char>(c) <= ' ') return false;
  }
  return true;
}

struct UnionFind {
  std::vector<int> parent;

  explicit UnionFind(int n) : parent(n) {
    for (int i = 0; i < n; ++i) parent[i] = i;
  }
  int find(int a) {
    while (parent[a] != a) {
      parent[a] = parent[parent[a]];
      a = parent[a];
    }
    return a;
  }
  void unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }
};

// Per-node view of the edge lists: which line / merge component a node
// belongs to and how it attaches to its line.
struct Structure {
  std::vector<int> line_of;           // node -> line group id, -1 detached
  std::vector<std::vector<int>> lines;  // group id -> members, ascending
  std::vector<double> att_g;          // per node, valid when line_of >= 0
  std::vector<char> att_bypass;
  std::vector<int> att_count;         // first-endpoint occurrences per node
  std::vector<int> merge_of;          // node -> merge component id
  std::vector<std::vector<int>> merges;  // component id -> members, ascending
};

Structure analyze(const Morphology& m) {
  const int n = static_cast<int>(m.nodes.size());
  Structure s;
  s.att_g.assign(n, 0.0);
  s.att_bypass.assign(n, 0);
  s.att_count.assign(n, 0);

  UnionFind line_uf(n);
  UnionFind merge_uf(n);
  for (const MorphEdge& e : m.edges) {
    if (e.a < 0 || e.a >= n || e.b < 0 || e.b >= n) continue;
    if (e.kind == EdgeKind::SomaLine) {
      line_uf.unite(e.a, e.b);
      s.att_count[e.a]++;
      s.att_g[e.a] = e.g;
      s.att_bypass[e.a] = e.bypass ? 1 : 0;
    } else {
      merge_uf.unite(e.a, e.b);
    }
  }

  s.line_of.assign(n, -1);
  std::map<int, int> line_id;
  for (const MorphEdge& e : m.edges) {
    if (e.kind != EdgeKind::SomaLine) continue;
    if (e.a < 0 || e.a >= n || e.b < 0 || e.b >= n) continue;
    for (int node : {e.a, e.b}) {
      const int root = line_uf.find(node);
      auto [it, fresh] = line_id.try_emplace(root, static_cast<int>(s.lines.size()));
      if (fresh) s.lines.emplace_back();
      if (s.line_of[node] < 0) {
        s.line_of[node] = it->second;
        s.lines[it->second].push_back(node);
      }
    }
  }
  for (auto& members : s.lines) std::sort(members.begin(), members.end());

  s.merge_of.assign(n, -1);
  std::map<int, int> merge_id;
  for (int node = 0; node < n; ++node) {
    const int root = merge_uf.find(node);
    auto [it, fresh] = merge_id.try_emplace(root, static_cast<int>(s.merges.size()));
    if (fresh) s.merges.emplace_back();
    s.merge_of[node] = it->second;
    s.merges[it->second].push_back(node);
  }
  return s;
}

std::string join_text(const std::vector<Violation>& v) {
  std::string text;
  for (const auto& viol : v) {
    if (!text.empty()) text += "; ";
    text += viol.field + ": " + viol.rule;
  }
  return text;
}

}  // namespace

std::vector<Violation> validate_morphology(const Morphology& m) {
  std::vector<Violation> v;
  const auto flag = [&](const std::string& field, const std::string& rule) {
    v.push_back({field, rule});
  };

  const int n = static_cast<int>(m.nodes.size());
  if (n == 0) {
    flag("nodes", "morphology must contain at least one node");
    return v;
  }

  std::set<std::string> labels;
  int outputs = 0;
  for (int i = 0; i < n; ++i) {
    const MorphNode& node = m.nodes[i];
    const std::string field = "node " + (label_printable(node.label)
                                             ? node.label
                                             : std::to_string(i));
    if (!label_printable(node.label))
      flag(field, "label must be non-empty without ':', '{', '}' or '#'");
    else if (!labels.insert(node.label).second)
      flag(field, "duplicate label");
    if (node.fan_in < 0) flag(field, "fan-in demand must be non-negative");
    outputs += node.is_output;

    // The chip applies its parameter rules per configured compartment; run
    // them against a one-column probe so morphology and chip agree exactly.
    ChipConfig probe = default_chip(1, 2);
    CompartmentConfig& c = probe.comp(Block::Upper, 0);
    c.mode = node.mode;
    c.exp_term = node.exp_term;
    c.params = node.params;
    for (Violation pv : validate_config(probe)) {
      const std::string prefix = "compartment upper 0 ";
      if (pv.field.rfind(prefix, 0) == 0)
        pv.field = field + " " + pv.field.substr(prefix.size());
      v.push_back(std::move(pv));
    }
  }
  if (outputs > 1)
    flag("output", "at most one node may be the spike output");

  bool edges_in_range = true;
  for (std::size_t i = 0; i < m.edges.size(); ++i) {
    const MorphEdge& e = m.edges[i];
    const std::string field = "edge " + std::to_string(i);
    if (e.a < 0 || e.a >= n || e.b < 0 || e.b >= n) {
      flag(field, "endpoint index out of range");
      edges_in_range = false;
      continue;
    }
    if (e.kind == EdgeKind::DirectMerge) {
      if (e.a == e.b) flag(field, "a merge edge needs two distinct nodes");
      if (e.g != 0 || e.bypass)
        flag(field, "merge edges carry no line attachment");
    } else {
      if (e.bypass && e.g != 0)
        flag(field, "a bypass short carries no conductance");
      if (!e.bypass && !(e.g > 0))
        flag(field, "attachment conductance must be positive");
    }
  }
  if (!edges_in_range) return v;

  const Structure s = analyze(m);
  for (int i = 0; i < n; ++i) {
    if (s.line_of[i] >= 0 && s.att_count[i] != 1)
      flag("node " + m.nodes[i].label,
           "a line member needs exactly one attachment, found " +
               std::to_string(s.att_count[i]));
  }
  for (std::size_t g = 0; g < s.lines.size(); ++g) {
    int bypasses = 0;
    for (int node : s.lines[g]) bypasses += s.att_bypass[node];
    if (bypasses > 1)
      flag("line " + std::to_string(g),
           "a somatic line can host at most one bypass short");
  }

  // The whole structure must hang together: walk every edge kind at once.
  UnionFind uf(n);
  for (const MorphEdge& e : m.edges) uf.unite(e.a, e.b);
  for (int i = 1; i < n; ++i) {
    if (uf.find(i) != uf.find(0)) {
      flag("nodes", "morphology must be a single connected structure");
      break;
    }
  }
  return v;
}

namespace {

// Backtracking placement search. Slots are numbered upper block first,
// columns ascending, so the first solution found is the leftmost one.
struct Searcher {
  const Morphology& m;
  const Structure& s;
  int n_columns;
  int n_nodes;

  std::vector<int> slot_of;     // node -> slot, -1 unplaced
  std::vector<char> taken;      // slot occupancy
  std::vector<int> line_block;  // line group -> bound block, -1 free
  std::vector<int> line_count;  // placed members per line group
  std::vector<int> merge_left;  // unplaced members per merge component

  Searcher(const Morphology& mm, const Structure& ss, int cols)
      : m(mm),
        s(ss),
        n_columns(cols),
        n_nodes(static_cast<int>(mm.nodes.size())),
        slot_of(mm.nodes.size(), -1),
        taken(2 * cols, 0),
        line_block(ss.lines.size(), -1),
        line_count(ss.lines.size(), 0),
        merge_left(ss.merges.size(), 0) {
    for (std::size_t c = 0; c < ss.merges.size(); ++c)
      merge_left[c] = static_cast<int>(ss.merges[c].size());
  }

  int block_of(int slot) const { return slot / n_columns; }
  int col_of(int slot) const { return slot % n_columns; }

  bool merge_connected(int comp) const {
    const auto& members = s.merges[comp];
    if (members.size() <= 1) return true;
    std::set<int> slots;
    for (int node : members) slots.insert(slot_of[node]);
    std::vector<int> queue{*slots.begin()};
    std::set<int> seen{*slots.begin()};
    while (!queue.empty()) {
      const int at = queue.back();
      queue.pop_back();
      const int b = block_of(at), c = col_of(at);
      const int neighbors[3] = {c > 0 ? at - 1 : -1,
                                c + 1 < n_columns ? at + 1 : -1,
                                (1 - b) * n_columns + c};
      for (int nb : neighbors) {
        if (nb < 0 || !slots.count(nb) || !seen.insert(nb).second) continue;
        queue.push_back(nb);
      }
    }
    return seen.size() == slots.size();
  }

  // With every node placed, check that each block's line groups can share
  // its somatic rail: spans must not interleave and consecutive spans need
  // a segment boundary (a multiple of four columns) in the gap to open.
  bool lines_separable() const {
    for (int b = 0; b < 2; ++b) {
      std::vector<std::pair<int, int>> spans;
      for (const auto& members : s.lines) {
        if (block_of(slot_of[members.front()]) != b) continue;
        int lo = n_columns, hi = -1;
        for (int node : members) {
          lo = std::min(lo, col_of(slot_of[node]));
          hi = std::max(hi, col_of(slot_of[node]));
        }
        spans.emplace_back(lo, hi);
      }
      std::sort(spans.begin(), spans.end());
      for (std::size_t i = 1; i < spans.size(); ++i) {
        if (spans[i - 1].second >= spans[i].first) return false;
        const int boundary =
            (spans[i - 1].second / kSomaSegmentPeriod + 1) * kSomaSegmentPeriod;
        if (boundary > spans[i].first) return false;
      }
    }
    return true;
  }

  bool admissible(int node, int slot) const {
    const int line = s.line_of[node];
    if (line >= 0 && line_block[line] >= 0 &&
        line_block[line] != block_of(slot))
      return false;
    return true;
  }

  bool dfs(int node) {
    if (node == n_nodes) return lines_separable();
    for (int slot = 0; slot < 2 * n_columns; ++slot) {
      if (taken[slot] || !admissible(node, slot)) continue;
      place(node, slot);
      const int comp = s.merge_of[node];
      if ((merge_left[comp] > 0 || merge_connected(comp)) && dfs(node + 1))
        return true;
      remove(node, slot);
    }
    return false;
  }

  void place(int node, int slot) {
    slot_of[node] = slot;
    taken[slot] = 1;
    merge_left[s.merge_of[node]]--;
    const int line = s.line_of[node];
    if (line >= 0) {
      if (line_count[line]++ == 0) line_block[line] = block_of(slot);
    }
  }

  void remove(int node, int slot) {
    slot_of[node] = -1;
    taken[slot] = 0;
    merge_left[s.merge_of[node]]++;
    const int line = s.line_of[node];
    if (line >= 0) {
      if (--line_count[line] == 0) line_block[line] = -1;
    }
  }
};

std::string label_list(const Morphology& m, const std::vector<int>& nodes) {
  std::string out;
  for (int node : nodes) {
    if (!out.empty()) out += ", ";
    out += m.nodes[node].label;
  }
  return out;
}

}  // namespace

Placement compile_morphology(const Morphology& m, const ChipDims& dims) {
  if (dims.n_columns < 1)
    throw std::invalid_argument("chip needs at least one column");
  if (dims.rows_per_block < 0 || dims.rows_per_block % kRowsPerGroup != 0)
    throw std::invalid_argument("rows per block must pair into bus groups");

  const std::vector<Violation> violations = validate_morphology(m);
  if (!violations.empty())
    throw MorphologyError("invalid morphology: " + join_text(violations));

  const int n = static_cast<int>(m.nodes.size());
  if (n > 2 * dims.n_columns)
    throw Infeasible("morphology needs " + std::to_string(n) +
                     " compartments but the chip provides " +
                     std::to_string(2 * dims.n_columns));
  for (const MorphNode& node : m.nodes) {
    if (node.fan_in > dims.rows_per_block * kBusAddresses)
      throw Infeasible("fan-in demand of node '" + node.label + "' (" +
                       std::to_string(node.fan_in) +
                       ") exceeds the block's address space of " +
                       std::to_string(dims.rows_per_block * kBusAddresses) +
                       " sources");
    if (node.fan_in > dims.rows_per_block)
      throw Infeasible("fan-in demand of node '" + node.label + "' (" +
                       std::to_string(node.fan_in) + ") exceeds the " +
                       std::to_string(dims.rows_per_block) +
                       " synapse rows serving one compartment column");
  }

  const Structure s = analyze(m);
  for (const auto& members : s.lines) {
    if (static_cast<int>(members.size()) > dims.n_columns)
      throw Infeasible("somatic-line group {" + label_list(m, members) +
                       "} needs " + std::to_string(members.size()) +
                       " attachment columns but a block has " +
                       std::to_string(dims.n_columns));
  }

  Searcher search(m, s, dims.n_columns);
  if (!search.dfs(0))
    throw Infeasible(
        "no legal placement of the " + std::to_string(n) +
        " compartments exists on " + std::to_string(dims.n_columns) +
        " columns: somatic-line segmentation or membrane-merge adjacency "
        "cannot be satisfied");

  Placement placement;
  placement.config = default_chip(dims.n_columns, dims.rows_per_block);
  placement.slot_of.resize(n);
  ChipConfig& cfg = placement.config;

  for (int i = 0; i < n; ++i) {
    const int slot = search.slot_of[i];
    const Block b = slot < dims.n_columns ? Block::Upper : Block::Lower;
    const int col = slot % dims.n_columns;
    placement.slot_of[i] = {b, col};

    CompartmentConfig& c = cfg.comp(b, col);
    c.mode = m.nodes[i].mode;
    c.exp_term = m.nodes[i].exp_term;
    c.params = m.nodes[i].params;
    if (s.line_of[i] >= 0) {
      c.soma_connect = true;
      if (s.att_bypass[i])
        c.soma_bypass = true;
      else
        c.params.g_ic = s.att_g[i];
    }
  }

  // Close every membrane switch that joins two compartments of the same
  // merge component; closing all of them keeps the node connected without
  // choosing a spanning tree.
  for (const auto& members : s.merges) {
    std::set<int> slots;
    for (int node : members) slots.insert(search.slot_of[node]);
    for (int slot : slots) {
      const Block b = slot < dims.n_columns ? Block::Upper : Block::Lower;
      const int col = slot % dims.n_columns;
      if (col + 1 < dims.n_columns && slots.count(slot + 1))
        cfg.comp(b, col).merge_right = true;
      if (b == Block::Upper && slots.count(slot + dims.n_columns))
        cfg.comp(b, col).merge_vertical = true;
    }
  }

  // Close the segment switches interior to each line group's span; every
  // other boundary stays open, which is what keeps distinct groups apart.
  for (const auto& members : s.lines) {
    const int first_slot = search.slot_of[members.front()];
    const Block b = first_slot < dims.n_columns ? Block::Upper : Block::Lower;
    auto& switches = b == Block::Upper ? cfg.soma_switch_upper
                                       : cfg.soma_switch_lower;
    int lo = dims.n_columns, hi = -1;
    for (int node : members) {
      const int col = search.slot_of[node] % dims.n_columns;
      lo = std::min(lo, col);
      hi = std::max(hi, col);
    }
    for (int j = 0; j < cfg.n_segment_switches(); ++j) {
      const int boundary_col = (j + 1) * kSomaSegmentPeriod;
      if (lo < boundary_col && boundary_col <= hi) switches[j] = 1;
    }
  }

  const std::vector<Violation> emitted = validate_config(cfg);
  if (!emitted.empty())
    throw MorphologyError("placement produced an invalid configuration: " +
                          join_text(emitted));
  return placement;
}

Morphology preset_pyramidal(int n_tuft, int n_basal, bool ca_both_circuits) {
  if (n_tuft < 1 || n_basal < 1)
    throw std::invalid_argument(
        "a pyramidal neuron needs at least one tuft and one basal dendrite");

  Morphology m;
  const auto add_node = [&](const std::string& label, Mode mode) {
    MorphNode node;
    node.label = label;
    node.mode = mode;
    m.nodes.push_back(std::move(node));
    return static_cast<int>(m.nodes.size()) - 1;
  };

  std::vector<int> apical;
  for (int i = 0; i < n_tuft; ++i)
    apical.push_back(add_node("tuft" + std::to_string(i), Mode::Nmda));
  const int ca_a = add_node("ca_a", Mode::Ca);
  const int ca_b =
      add_node("ca_b", ca_both_circuits ? Mode::Ca : Mode::Disabled);
  apical.push_back(ca_a);

  const int soma = add_node("soma", Mode::Na);
  m.nodes[soma].is_output = true;
  std::vector<int> somatic{ca_b, soma};
  for (int i = 0; i < n_basal; ++i)
    somatic.push_back(add_node("basal" + std::to_string(i), Mode::Nmda));

  m.edges.push_back({ca_a, ca_b, EdgeKind::DirectMerge, 0, false});
  const auto add_ring = [&](const std::vector<int>& members, int bypass_node) {
    const std::size_t k = members.size();
    for (std::size_t i = 0; i < k; ++i) {
      const int at = members[i];
      const int next = members[(i + 1) % k];
      const bool bypass = at == bypass_node;
      m.edges.push_back({at, next, EdgeKind::SomaLine,
                         bypass ? 0 : m.nodes[at].params.g_ic, bypass});
    }
  };
  add_ring(apical, -1);
  add_ring(somatic, soma);
  return m;
}

// ---- Text format -----------------------------------------------------------

namespace {

void save_params(std::ostringstream& out, const AnalogParams& p) {
  const auto field = [&](const char* name, double v) {
    out << "      " << name << " " << format_double(v) << "\n";
  };
  field("v_leak", p.v_leak);
  field("g_leak", p.g_leak);
  field("v_alt", p.v_alt);
  field("g_alt", p.g_alt);
  field("v_th", p.v_th);
  field("t_pulse", p.t_pulse);
  field("c_mem", p.c_mem);
  field("e_rev_a", p.e_rev_a);
  field("e_rev_b", p.e_rev_b);
  field("tau_syn_a", p.tau_syn_a);
  field("tau_syn_b", p.tau_syn_b);
  field("g_syn_scale_a", p.g_syn_scale_a);
  field("g_syn_scale_b", p.g_syn_scale_b);
  field("i_unit", p.i_unit);
  field("v_exp_th", p.v_exp_th);
  field("delta_t", p.delta_t);
  field("g_ic", p.g_ic);
}

bool parse_param_field(TokenStream& ts, const std::string& key,
                       AnalogParams& p) {
  double* slot = nullptr;
  if (key == "v_leak") slot = &p.v_leak;
  else if (key == "g_leak") slot = &p.g_leak;
  else if (key == "v_alt") slot = &p.v_alt;
  else if (key == "g_alt") slot = &p.g_alt;
  else if (key == "v_th") slot = &p.v_th;
  else if (key == "t_pulse") slot = &p.t_pulse;
  else if (key == "c_mem") slot = &p.c_mem;
  else if (key == "e_rev_a") slot = &p.e_rev_a;
  else if (key == "e_rev_b") slot = &p.e_rev_b;
  else if (key == "tau_syn_a") slot = &p.tau_syn_a;
  else if (key == "tau_syn_b") slot = &p.tau_syn_b;
  else if (key == "g_syn_scale_a") slot = &p.g_syn_scale_a;
  else if (key == "g_syn_scale_b") slot = &p.g_syn_scale_b;
  else if (key == "i_unit") slot = &p.i_unit;
  else if (key == "v_exp_th") slot = &p.v_exp_th;
  else if (key == "delta_t") slot = &p.delta_t;
  else if (key == "g_ic") slot = &p.g_ic;
  if (!slot) return false;
  *slot = ts.next_double();
  return true;
}

}  // namespace

std::string save_morphology_text(const Morphology& m) {
  std::ostringstream out;
  out << "# compartment graph: nodes, membrane merges, somatic lines\n";
  out << "morphology {\n";
  for (const MorphNode& node : m.nodes) {
    out << "  node " << node.label << " {\n";
    out << "    mode " << to_string(node.mode) << "\n";
    out << "    fan_in " << node.fan_in << "\n";
    out << "    exp_term " << (node.exp_term ? "true" : "false") << "\n";
    out << "    output " << (node.is_output ? "true" : "false") << "\n";
    out << "    params {\n";
    save_params(out, node.params);
    out << "    }\n";
    out << "  }\n";
  }

  std::vector<std::pair<int, int>> merge_pairs;
  for (const MorphEdge& e : m.edges) {
    if (e.kind == EdgeKind::DirectMerge)
      merge_pairs.emplace_back(std::min(e.a, e.b), std::max(e.a, e.b));
  }
  std::sort(merge_pairs.begin(), merge_pairs.end());
  for (const auto& [a, b] : merge_pairs)
    out << "  merge " << m.nodes[a].label << " " << m.nodes[b].label << "\n";

  const Structure s = analyze(m);
  for (const auto& members : s.lines) {
    out << "  line {";
    for (int node : members) {
      out << " " << m.nodes[node].label << ":";
      if (s.att_bypass[node])
        out << "bypass";
      else
        out << format_double(s.att_g[node]);
    }
    out << " }\n";
  }
  out << "}\n";
  return out.str();
}

Morphology load_morphology_text(const std::string& content,
                                const std::string& filename) {
  TokenStream ts(filename, tokenize(content));
  Morphology m;
  std::map<std::string, int> index_of;
  // Resolves the next token as a node label, failing while the offending
  // token is still current so the reported line points at it.
  const auto lookup = [&]() {
    const std::string label = ts.peek().text;
    const auto it = index_of.find(label);
    if (it == index_of.end()) ts.fail("unknown node label '" + label + "'");
    ts.next();
    return it->second;
  };

  ts.expect("morphology");
  ts.expect("{");
  while (ts.peek().text != "}") {
    const std::string key = ts.next_word();
    if (key == "node") {
      MorphNode node;
      node.label = ts.next_word();
      if (!label_printable(node.label))
        ts.fail("node label must not contain ':', '{', '}' or '#'");
      if (!index_of.emplace(node.label, m.nodes.size()).second)
        ts.fail("duplicate node label '" + node.label + "'");
      ts.expect("{");
      while (ts.peek().text != "}") {
        const std::string field = ts.next_word();
        if (field == "mode") {
          if (!parse_mode(ts.peek().text, node.mode)) ts.fail("unknown mode");
          ts.next();
        } else if (field == "fan_in") {
          node.fan_in = static_cast<int>(ts.next_int());
        } else if (field == "exp_term") {
          node.exp_term = ts.next_bool();
        } else if (field == "output") {
          node.is_output = ts.next_bool();
        } else if (field == "params") {
          ts.expect("{");
          while (ts.peek().text != "}") {
            const std::string pkey = ts.next_word();
            if (!parse_param_field(ts, pkey, node.params))
              ts.fail("unknown analog parameter '" + pkey + "'");
          }
          ts.expect("}");
        } else {
          ts.fail("unknown node field '" + field + "'");
        }
      }
      ts.expect("}");
      m.nodes.push_back(std::move(node));
    } else if (key == "merge") {
      const int a = lookup();
      const int b = lookup();
      m.edges.push_back({a, b, EdgeKind::DirectMerge, 0, false});
    } else if (key == "line") {
      ts.expect("{");
      std::vector<int> members;
      std::vector<double> g;
      std::vector<bool> bypass;
      while (ts.peek().text != "}") {
        const std::string entry = ts.peek().text;
        const std::size_t colon = entry.rfind(':');
        if (colon == std::string::npos || colon == 0 ||
            colon + 1 == entry.size())
          ts.fail("expected label:conductance or label:bypass, got '" + entry +
                  "'");
        const std::string label = entry.substr(0, colon);
        const auto it = index_of.find(label);
        if (it == index_of.end())
          ts.fail("unknown node label '" + label + "'");
        members.push_back(it->second);
        const std::string att = entry.substr(colon + 1);
        if (att == "bypass") {
          g.push_back(0);
          bypass.push_back(true);
        } else {
          double value = 0;
          const char* begin = att.data();
          const char* end = begin + att.size();
          const auto [ptr, ec] = std::from_chars(begin, end, value);
          if (ec != std::errc{} || ptr != end)
            ts.fail("malformed attachment conductance '" + att + "'");
          g.push_back(value);
          bypass.push_back(false);
        }
        ts.next();
      }
      ts.expect("}");
      if (members.empty()) ts.fail("a somatic line needs at least one member");
      for (std::size_t i = 0; i < members.size(); ++i) {
        const int next = members[(i + 1) % members.size()];
        m.edges.push_back({members[i], next, EdgeKind::SomaLine, g[i],
                           static_cast<bool>(bypass[i])});
      }
    } else {
      ts.fail("unknown morphology entry '" + key + "'");
    }
  }
  ts.expect("}");
  if (!ts.done()) ts.fail("trailing content after the morphology block");
  return m;
}

void save_morphology_file(const Morphology& m, const std::string& path) {
  write_file(path, save_morphology_text(m));
}

Morphology load_morphology_file(const std::string& path) {
  return load_morphology_text(read_file(path), path);
}

}  // namespace mcsim
