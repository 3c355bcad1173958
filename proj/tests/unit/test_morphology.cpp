#include <algorithm>
#include <map>
#include <set>
#include <string>
#include <vector>

#include <doctest.h>

#include "mcsim/detmath.hpp"
#include "mcsim/morphology.hpp"
#include "mcsim/text.hpp"

using namespace mcsim;

namespace {

// ---- Test-local structural view, written independently of the library -----

struct View {
  std::vector<std::vector<int>> lines;   // line members, ascending
  std::vector<std::vector<int>> merges;  // merge components incl. singletons
  std::map<int, double> att_g;           // line member -> conductance
  std::set<int> att_bypass;              // line members shorting their line
};

View view_of(const Morphology& m) {
  const int n = static_cast<int>(m.nodes.size());
  std::vector<std::vector<int>> line_adj(n), merge_adj(n);
  View v;
  for (const MorphEdge& e : m.edges) {
    if (e.kind == EdgeKind::SomaLine) {
      line_adj[e.a].push_back(e.b);
      line_adj[e.b].push_back(e.a);
      if (e.bypass)
        v.att_bypass.insert(e.a);
      else
        v.att_g[e.a] = e.g;
    } else {
      merge_adj[e.a].push_back(e.b);
      merge_adj[e.b].push_back(e.a);
    }
  }
  const auto sweep = [&](const std::vector<std::vector<int>>& adj,
                         bool singletons) {
    std::vector<std::vector<int>> comps;
    std::vector<char> seen(n, 0);
    for (int start = 0; start < n; ++start) {
      if (seen[start] || (!singletons && adj[start].empty())) continue;
      std::vector<int> comp, queue{start};
      seen[start] = 1;
      while (!queue.empty()) {
        const int at = queue.back();
        queue.pop_back();
        comp.push_back(at);
        for (int next : adj[at]) {
          if (!seen[next]) {
            seen[next] = 1;
            queue.push_back(next);
          }
        }
      }
      std::sort(comp.begin(), comp.end());
      comps.push_back(std::move(comp));
    }
    return comps;
  };
  v.lines = sweep(line_adj, false);
  v.merges = sweep(merge_adj, true);
  return v;
}

// ---- Brute-force placement oracle ------------------------------------------
// Enumerates every injective node->slot assignment and, per block, every
// segment-switch setting; a morphology is placeable iff some combination
// satisfies merge connectivity, per-line block unity and segment exclusivity.

bool grid_connected(const std::vector<int>& slots, int n_columns) {
  if (slots.size() <= 1) return true;
  const std::set<int> in(slots.begin(), slots.end());
  std::set<int> seen{slots[0]};
  std::vector<int> queue{slots[0]};
  while (!queue.empty()) {
    const int at = queue.back();
    queue.pop_back();
    const int col = at % n_columns;
    const int candidates[3] = {col > 0 ? at - 1 : -1,
                               col + 1 < n_columns ? at + 1 : -1,
                               at < n_columns ? at + n_columns
                                              : at - n_columns};
    for (int next : candidates) {
      if (next < 0 || !in.count(next) || !seen.insert(next).second) continue;
      queue.push_back(next);
    }
  }
  return seen.size() == in.size();
}

bool block_lines_ok(const std::vector<std::vector<int>>& group_cols,
                    int n_columns) {
  const int n_switches = n_columns > 0 ? (n_columns - 1) / 4 : 0;
  for (int mask = 0; mask < (1 << n_switches); ++mask) {
    std::vector<int> segment(n_columns, 0);
    int seg = 0;
    for (int col = 1; col < n_columns; ++col) {
      if (col % 4 == 0 && ((mask >> (col / 4 - 1)) & 1) == 0)
        ++seg;  // open switch starts a new segment
      segment[col] = seg;
    }
    bool ok = true;
    std::set<int> segments_used;
    for (const auto& cols : group_cols) {
      for (std::size_t i = 1; i < cols.size() && ok; ++i)
        if (segment[cols[i]] != segment[cols[0]]) ok = false;
      if (ok && !segments_used.insert(segment[cols[0]]).second) ok = false;
      if (!ok) break;
    }
    if (ok) return true;
  }
  return false;
}

bool assignment_legal(const View& v, const std::vector<int>& slot,
                      int n_columns) {
  for (const auto& comp : v.merges) {
    std::vector<int> slots;
    for (int node : comp) slots.push_back(slot[node]);
    if (!grid_connected(slots, n_columns)) return false;
  }
  for (int block = 0; block < 2; ++block) {
    std::vector<std::vector<int>> group_cols;
    for (const auto& line : v.lines) {
      std::vector<int> cols;
      bool here = false, elsewhere = false;
      for (int node : line) {
        const int b = slot[node] < n_columns ? 0 : 1;
        if (b == block) {
          here = true;
          cols.push_back(slot[node] % n_columns);
        } else {
          elsewhere = true;
        }
      }
      if (here && elsewhere) return false;  // line split across blocks
      if (here) group_cols.push_back(std::move(cols));
    }
    if (!block_lines_ok(group_cols, n_columns)) return false;
  }
  return true;
}

bool oracle_feasible(const Morphology& m, const ChipDims& dims) {
  for (const MorphNode& node : m.nodes)
    if (node.fan_in > dims.rows_per_block) return false;
  const View v = view_of(m);
  for (const auto& line : v.lines)
    if (static_cast<int>(line.size()) > dims.n_columns) return false;

  const int n = static_cast<int>(m.nodes.size());
  const int n_slots = 2 * dims.n_columns;
  if (n > n_slots) return false;
  std::vector<int> slot(n, -1);
  std::vector<char> taken(n_slots, 0);
  const auto recurse = [&](auto&& self, int node) -> bool {
    if (node == n) return assignment_legal(v, slot, dims.n_columns);
    for (int s = 0; s < n_slots; ++s) {
      if (taken[s]) continue;
      taken[s] = 1;
      slot[node] = s;
      if (self(self, node + 1)) return true;
      taken[s] = 0;
      slot[node] = -1;
    }
    return false;
  };
  return recurse(recurse, 0);
}

// ---- Placement <-> morphology isomorphism ----------------------------------

void check_isomorphism(const Morphology& m, const Placement& p,
                       const ChipDims& dims) {
  REQUIRE(validate_config(p.config).empty());
  REQUIRE(p.slot_of.size() == m.nodes.size());
  const CircuitGraph g = derive_network(p.config);
  const View v = view_of(m);

  std::vector<int> ci(m.nodes.size());
  std::set<int> used;
  for (std::size_t i = 0; i < m.nodes.size(); ++i) {
    ci[i] = p.config.compartment_index(p.slot_of[i].block,
                                       p.slot_of[i].column);
    CHECK(used.insert(ci[i]).second);  // slots are distinct
  }

  for (std::size_t i = 0; i < m.nodes.size(); ++i) {
    const int idx = static_cast<int>(i);
    const CompartmentConfig& c = p.config.compartments[ci[i]];
    CHECK(c.mode == m.nodes[i].mode);
    CHECK(c.exp_term == m.nodes[i].exp_term);
    AnalogParams expected = m.nodes[i].params;
    if (v.att_g.count(idx)) expected.g_ic = v.att_g.at(idx);
    CHECK(c.params == expected);
    const bool on_line = v.att_g.count(idx) || v.att_bypass.count(idx);
    CHECK(c.soma_connect == on_line);
    CHECK(c.soma_bypass == (v.att_bypass.count(idx) > 0));
  }

  // Every merge component is exactly one membrane node.
  for (const auto& comp : v.merges) {
    std::vector<int> expect;
    for (int node : comp) expect.push_back(ci[node]);
    std::sort(expect.begin(), expect.end());
    const int node_id = g.node_of[expect[0]];
    CHECK(g.nodes[node_id].members == expect);
    double cap = 0;
    for (int idx : expect) cap += p.config.compartments[idx].params.c_mem;
    CHECK(g.nodes[node_id].capacitance == cap);
  }

  // Every line group is exactly one segment's attachment set.
  for (const auto& line : v.lines) {
    const int seg = g.segment_of[ci[line[0]]];
    for (int node : line) CHECK(g.segment_of[ci[node]] == seg);
    const SomaSegment& segment = g.segments[seg];
    CHECK(segment.attachments.size() == line.size());
    for (int node : line) {
      const auto it = std::find_if(
          segment.attachments.begin(), segment.attachments.end(),
          [&](const SomaAttachment& at) { return at.comp == ci[node]; });
      REQUIRE(it != segment.attachments.end());
      if (v.att_bypass.count(node)) {
        CHECK(it->bypass);
      } else {
        CHECK_FALSE(it->bypass);
        CHECK(it->g == v.att_g.at(node));
      }
    }
  }

  // Untouched compartments stay disabled and detached.
  for (int idx = 0; idx < 2 * dims.n_columns; ++idx) {
    if (used.count(idx)) continue;
    const CompartmentConfig& c = p.config.compartments[idx];
    CHECK(c.mode == Mode::Disabled);
    CHECK_FALSE(c.soma_connect);
    CHECK_FALSE(c.merge_right);
    CHECK_FALSE(c.merge_vertical);
    CHECK(g.nodes[g.node_of[idx]].members.size() == 1);
  }
}

// ---- Random canonical morphology generator ---------------------------------

Morphology random_morphology(Rng& rng, int max_nodes, int rows_per_block) {
  Morphology m;
  const int n = 1 + static_cast<int>(rng.uniform_below(max_nodes));
  const Mode modes[5] = {Mode::Passive, Mode::Na, Mode::Ca, Mode::Nmda,
                         Mode::Disabled};
  for (int i = 0; i < n; ++i) {
    MorphNode node;
    node.label = "n" + std::to_string(i);
    node.mode = modes[rng.uniform_below(5)];
    if (rng.uniform_below(8) == 0)
      node.fan_in = static_cast<int>(rng.uniform_below(rows_per_block + 3));
    m.nodes.push_back(std::move(node));
  }
  if (rng.uniform_below(2) == 0) m.nodes[0].is_output = true;

  // Two potential line groups; membership decided per node, so members stay
  // ascending and the generated rings are canonical.
  std::vector<std::vector<int>> groups(2);
  for (int i = 0; i < n; ++i) {
    const std::uint64_t r = rng.uniform_below(4);
    if (r >= 2) groups[r - 2].push_back(i);
  }
  for (const auto& members : groups) {
    if (members.empty()) continue;
    int bypass_at = -1;
    if (rng.uniform_below(3) == 0)
      bypass_at = members[rng.uniform_below(members.size())];
    for (std::size_t i = 0; i < members.size(); ++i) {
      const int at = members[i];
      const int next = members[(i + 1) % members.size()];
      const bool bypass = at == bypass_at;
      const double g =
          bypass ? 0 : (1 + static_cast<int>(rng.uniform_below(50))) * 1e-7;
      m.edges.push_back({at, next, EdgeKind::SomaLine, g, bypass});
    }
  }

  const std::uint64_t extra_merges = rng.uniform_below(3);
  for (std::uint64_t i = 0; i < extra_merges && n > 1; ++i) {
    const int a = static_cast<int>(rng.uniform_below(n));
    const int b = static_cast<int>(rng.uniform_below(n));
    if (a != b)
      m.edges.push_back(
          {std::min(a, b), std::max(a, b), EdgeKind::DirectMerge, 0, false});
  }

  // Stitch disconnected pieces together with merge edges.
  while (true) {
    std::vector<int> comp(n, -1);
    int n_comps = 0;
    for (int start = 0; start < n; ++start) {
      if (comp[start] >= 0) continue;
      comp[start] = n_comps;
      std::vector<int> queue{start};
      while (!queue.empty()) {
        const int at = queue.back();
        queue.pop_back();
        for (const MorphEdge& e : m.edges) {
          const int other = e.a == at ? e.b : e.b == at ? e.a : -1;
          if (other >= 0 && comp[other] < 0) {
            comp[other] = n_comps;
            queue.push_back(other);
          }
        }
      }
      ++n_comps;
    }
    if (n_comps <= 1) break;
    int second = -1;
    for (int i = 0; i < n; ++i)
      if (comp[i] == 1) {
        second = i;
        break;
      }
    m.edges.push_back({0, second, EdgeKind::DirectMerge, 0, false});
  }
  return m;
}

template <class F>
std::string message_of(F f) {
  try {
    f();
  } catch (const std::exception& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_CASE("pyramidal preset builds the layer-5 template") {
  const Morphology m = preset_pyramidal(2, 2);
  REQUIRE(m.nodes.size() == 7);
  CHECK(validate_morphology(m).empty());

  CHECK(m.nodes[0].label == "tuft0");
  CHECK(m.nodes[0].mode == Mode::Nmda);
  CHECK(m.nodes[1].label == "tuft1");
  CHECK(m.nodes[2].label == "ca_a");
  CHECK(m.nodes[2].mode == Mode::Ca);
  CHECK(m.nodes[3].label == "ca_b");
  CHECK(m.nodes[3].mode == Mode::Ca);
  CHECK(m.nodes[4].label == "soma");
  CHECK(m.nodes[4].mode == Mode::Na);
  CHECK(m.nodes[4].is_output);
  CHECK(m.nodes[5].mode == Mode::Nmda);
  CHECK(m.nodes[6].mode == Mode::Nmda);

  const View v = view_of(m);
  REQUIRE(v.lines.size() == 2);
  CHECK(v.lines[0] == std::vector<int>{0, 1, 2});     // apical: tufts + ca_a
  CHECK(v.lines[1] == std::vector<int>{3, 4, 5, 6});  // somatic side
  CHECK(v.att_bypass == std::set<int>{4});            // soma shorts its line
  int pairs = 0;
  for (const auto& comp : v.merges) pairs += comp.size() == 2;
  CHECK(pairs == 1);  // the ca bridge

  CHECK(preset_pyramidal(1, 1).nodes.size() == 5);
  const Morphology single = preset_pyramidal(3, 2, false);
  CHECK(single.nodes[3].mode == Mode::Ca);        // tuft0..2, then the bridge
  CHECK(single.nodes[4].mode == Mode::Disabled);  // unused partner circuit
  CHECK(single.nodes[5].mode == Mode::Na);
  CHECK_THROWS_AS(preset_pyramidal(0, 1), std::invalid_argument);
  CHECK_THROWS_AS(preset_pyramidal(1, 0), std::invalid_argument);
}

TEST_CASE("pyramidal placement matches the physical-layout picture") {
  const Morphology m = preset_pyramidal(2, 2);
  const ChipDims dims{4, 8};
  const Placement p = compile_morphology(m, dims);
  check_isomorphism(m, p, dims);

  // Apical side (tufts + one bridge member) lands in one block, the soma
  // and basal dendrites in the other, with the bridge vertically merged.
  CHECK(p.slot_of[0].block == Block::Upper);
  CHECK(p.slot_of[1].block == Block::Upper);
  CHECK(p.slot_of[2].block == Block::Upper);
  CHECK(p.slot_of[3].block == Block::Lower);
  CHECK(p.slot_of[3].column == p.slot_of[2].column);
  CHECK(p.slot_of[4] == Slot{Block::Lower, 0});  // soma sits lower-left
  const CircuitGraph g = derive_network(p.config);
  const int bridge = g.node_index(p.config, Block::Upper, p.slot_of[2].column);
  CHECK(g.nodes[bridge].members.size() == 2);
  CHECK(g.nodes[bridge].capacitance == 2 * AnalogParams{}.c_mem);

  // Deterministic: compiling again reproduces the identical artifact.
  const Placement again = compile_morphology(m, dims);
  CHECK(again.config == p.config);
  CHECK(again.slot_of == p.slot_of);
}

TEST_CASE("a point neuron occupies a single compartment") {
  Morphology m;
  m.nodes.push_back({"soma", Mode::Na, 4, AnalogParams{}, false, true});
  const ChipDims dims{4, 8};
  const Placement p = compile_morphology(m, dims);
  CHECK(p.slot_of[0] == Slot{Block::Upper, 0});
  const CompartmentConfig& c = p.config.comp(Block::Upper, 0);
  CHECK(c.mode == Mode::Na);
  CHECK_FALSE(c.soma_connect);
  for (const CompartmentConfig& other : p.config.compartments) {
    CHECK_FALSE(other.merge_right);
    CHECK_FALSE(other.merge_vertical);
  }
  check_isomorphism(m, p, dims);
}

TEST_CASE("a five-member line cannot fit a four-column block") {
  Morphology m;
  for (int i = 0; i < 5; ++i)
    m.nodes.push_back({"d" + std::to_string(i), Mode::Passive, 0,
                       AnalogParams{}, false, false});
  for (int i = 0; i < 5; ++i)
    m.edges.push_back({i, (i + 1) % 5, EdgeKind::SomaLine, 2e-7, false});
  REQUIRE(validate_morphology(m).empty());

  CHECK_THROWS_AS(compile_morphology(m, ChipDims{4, 8}), Infeasible);
  CHECK_FALSE(oracle_feasible(m, ChipDims{4, 8}));

  // Eight columns offer a closable boundary, so the same line fits.
  const ChipDims wide{8, 8};
  const Placement p = compile_morphology(m, wide);
  check_isomorphism(m, p, wide);
  const auto& switches = p.slot_of[0].block == Block::Upper
                             ? p.config.soma_switch_upper
                             : p.config.soma_switch_lower;
  CHECK(switches == std::vector<std::uint8_t>{1});
}

TEST_CASE("three line groups cannot share two switchless blocks") {
  Morphology m;
  for (int i = 0; i < 7; ++i)
    m.nodes.push_back({"d" + std::to_string(i), Mode::Passive, 0,
                       AnalogParams{}, false, false});
  for (int i = 0; i < 3; ++i)
    m.edges.push_back({i, (i + 1) % 3, EdgeKind::SomaLine, 2e-7, false});
  m.edges.push_back({3, 4, EdgeKind::SomaLine, 3e-7, false});
  m.edges.push_back({4, 3, EdgeKind::SomaLine, 3e-7, false});
  m.edges.push_back({5, 6, EdgeKind::SomaLine, 4e-7, false});
  m.edges.push_back({6, 5, EdgeKind::SomaLine, 4e-7, false});
  m.edges.push_back({0, 3, EdgeKind::DirectMerge, 0, false});
  m.edges.push_back({3, 5, EdgeKind::DirectMerge, 0, false});
  REQUIRE(validate_morphology(m).empty());

  // Two switchless blocks offer two segments; three groups cannot fit.
  CHECK_THROWS_AS(compile_morphology(m, ChipDims{4, 8}), Infeasible);
  CHECK_FALSE(oracle_feasible(m, ChipDims{4, 8}));

  // With eight columns a block splits in two at its open boundary.
  const ChipDims wide{8, 8};
  const Placement p = compile_morphology(m, wide);
  check_isomorphism(m, p, wide);
}

TEST_CASE("fan-in demand is checked against the synapse rows") {
  Morphology m;
  m.nodes.push_back({"soma", Mode::Na, 8, AnalogParams{}, false, true});
  CHECK_NOTHROW(compile_morphology(m, ChipDims{4, 8}));

  m.nodes[0].fan_in = 9;
  const std::string rows_msg =
      message_of([&] { compile_morphology(m, ChipDims{4, 8}); });
  CHECK(rows_msg.find("synapse rows") != std::string::npos);
  CHECK_THROWS_AS(compile_morphology(m, ChipDims{4, 8}), Infeasible);

  m.nodes[0].fan_in = 8 * 64 + 1;
  const std::string space_msg =
      message_of([&] { compile_morphology(m, ChipDims{4, 8}); });
  CHECK(space_msg.find("address space") != std::string::npos);
}

TEST_CASE("malformed morphologies are rejected with named violations") {
  const auto fields = [](const Morphology& m) {
    std::vector<std::string> out;
    for (const Violation& v : validate_morphology(m)) out.push_back(v.field);
    return out;
  };
  const auto has = [](const std::vector<std::string>& fields,
                      const std::string& needle) {
    return std::find(fields.begin(), fields.end(), needle) != fields.end();
  };

  SUBCASE("no nodes") { CHECK(has(fields(Morphology{}), "nodes")); }
  SUBCASE("duplicate and unprintable labels") {
    Morphology m;
    m.nodes.push_back({"a", Mode::Passive, 0, {}, false, false});
    m.nodes.push_back({"a", Mode::Passive, 0, {}, false, false});
    m.nodes.push_back({"x:y", Mode::Passive, 0, {}, false, false});
    m.edges.push_back({0, 1, EdgeKind::DirectMerge, 0, false});
    m.edges.push_back({1, 2, EdgeKind::DirectMerge, 0, false});
    const auto f = fields(m);
    CHECK(has(f, "node a"));
    CHECK(has(f, "node 2"));
  }
  SUBCASE("two outputs") {
    Morphology m;
    m.nodes.push_back({"a", Mode::Na, 0, {}, false, true});
    m.nodes.push_back({"b", Mode::Na, 0, {}, false, true});
    m.edges.push_back({0, 1, EdgeKind::DirectMerge, 0, false});
    CHECK(has(fields(m), "output"));
  }
  SUBCASE("merge edge payload and self loop") {
    Morphology m;
    m.nodes.push_back({"a", Mode::Passive, 0, {}, false, false});
    m.nodes.push_back({"b", Mode::Passive, 0, {}, false, false});
    m.edges.push_back({0, 0, EdgeKind::DirectMerge, 0, false});
    m.edges.push_back({0, 1, EdgeKind::DirectMerge, 1e-7, false});
    const auto f = fields(m);
    CHECK(has(f, "edge 0"));
    CHECK(has(f, "edge 1"));
  }
  SUBCASE("attachment rules") {
    Morphology m;
    m.nodes.push_back({"a", Mode::Passive, 0, {}, false, false});
    m.nodes.push_back({"b", Mode::Passive, 0, {}, false, false});
    m.edges.push_back({0, 1, EdgeKind::SomaLine, 0, false});    // g == 0
    m.edges.push_back({1, 0, EdgeKind::SomaLine, 1e-7, true});  // g on bypass
    const auto f = fields(m);
    CHECK(has(f, "edge 0"));
    CHECK(has(f, "edge 1"));
  }
  SUBCASE("double bypass on one line") {
    Morphology m;
    m.nodes.push_back({"a", Mode::Passive, 0, {}, false, false});
    m.nodes.push_back({"b", Mode::Passive, 0, {}, false, false});
    m.edges.push_back({0, 1, EdgeKind::SomaLine, 0, true});
    m.edges.push_back({1, 0, EdgeKind::SomaLine, 0, true});
    CHECK(has(fields(m), "line 0"));
  }
  SUBCASE("node attached to its line twice") {
    Morphology m;
    m.nodes.push_back({"a", Mode::Passive, 0, {}, false, false});
    m.nodes.push_back({"b", Mode::Passive, 0, {}, false, false});
    m.edges.push_back({0, 1, EdgeKind::SomaLine, 2e-7, false});
    m.edges.push_back({1, 0, EdgeKind::SomaLine, 2e-7, false});
    m.edges.push_back({0, 1, EdgeKind::SomaLine, 2e-7, false});
    CHECK(has(fields(m), "node a"));
  }
  SUBCASE("edge endpoint out of range") {
    Morphology m;
    m.nodes.push_back({"a", Mode::Passive, 0, {}, false, false});
    m.edges.push_back({0, 3, EdgeKind::DirectMerge, 0, false});
    CHECK(has(fields(m), "edge 0"));
  }
  SUBCASE("disconnected structure") {
    Morphology m;
    m.nodes.push_back({"a", Mode::Passive, 0, {}, false, false});
    m.nodes.push_back({"b", Mode::Passive, 0, {}, false, false});
    CHECK(has(fields(m), "nodes"));
  }
  SUBCASE("negative fan-in") {
    Morphology m;
    m.nodes.push_back({"a", Mode::Passive, -1, {}, false, false});
    CHECK(has(fields(m), "node a"));
  }
  SUBCASE("chip parameter rules apply per node") {
    Morphology m;
    MorphNode node{"a", Mode::Passive, 0, {}, false, false};
    node.params.c_mem = 0;
    m.nodes.push_back(node);
    CHECK(has(fields(m), "node a params.c_mem"));
  }
  SUBCASE("compile refuses invalid morphologies") {
    Morphology m;
    m.nodes.push_back({"a", Mode::Na, 0, {}, false, true});
    m.nodes.push_back({"b", Mode::Na, 0, {}, false, true});
    m.edges.push_back({0, 1, EdgeKind::DirectMerge, 0, false});
    CHECK_THROWS_AS(compile_morphology(m, ChipDims{4, 8}), MorphologyError);
  }
  SUBCASE("compile refuses broken dimensions") {
    Morphology m;
    m.nodes.push_back({"a", Mode::Na, 0, {}, false, true});
    CHECK_THROWS_AS(compile_morphology(m, ChipDims{0, 8}),
                    std::invalid_argument);
    CHECK_THROWS_AS(compile_morphology(m, ChipDims{4, 7}),
                    std::invalid_argument);
  }
}

TEST_CASE("compile agrees with the brute-force oracle and keeps structure") {
  Rng rng(0x5EED01);
  SUBCASE("four columns, up to six nodes") {
    for (int iter = 0; iter < 150; ++iter) {
      const Morphology m = random_morphology(rng, 6, 8);
      REQUIRE(validate_morphology(m).empty());
      const ChipDims dims{4, 8};
      const bool expected = oracle_feasible(m, dims);
      try {
        const Placement p = compile_morphology(m, dims);
        CHECK(expected);
        check_isomorphism(m, p, dims);
        const Placement again = compile_morphology(m, dims);
        CHECK(again.config == p.config);
      } catch (const Infeasible&) {
        CHECK_FALSE(expected);
      }
    }
  }
  SUBCASE("eight columns exercise the segment switch") {
    for (int iter = 0; iter < 60; ++iter) {
      const Morphology m = random_morphology(rng, 4, 8);
      REQUIRE(validate_morphology(m).empty());
      const ChipDims dims{8, 8};
      const bool expected = oracle_feasible(m, dims);
      try {
        const Placement p = compile_morphology(m, dims);
        CHECK(expected);
        check_isomorphism(m, p, dims);
      } catch (const Infeasible&) {
        CHECK_FALSE(expected);
      }
    }
  }
}

TEST_CASE("morphology text round-trips") {
  const Morphology m = preset_pyramidal(2, 2);
  const std::string text = save_morphology_text(m);
  const Morphology back = load_morphology_text(text);
  CHECK(back == m);
  CHECK(save_morphology_text(back) == text);

  Rng rng(77);
  for (int iter = 0; iter < 40; ++iter) {
    const Morphology r = random_morphology(rng, 6, 8);
    const std::string saved = save_morphology_text(r);
    const Morphology loaded = load_morphology_text(saved);
    // The saver canonicalizes edge order; the canonical form is a fixpoint
    // and the electrical structure survives.
    CHECK(save_morphology_text(loaded) == saved);
    CHECK(loaded.nodes == r.nodes);
    const View a = view_of(r), b = view_of(loaded);
    CHECK(a.lines == b.lines);
    CHECK(a.att_g == b.att_g);
    CHECK(a.att_bypass == b.att_bypass);
  }
}

TEST_CASE("morphology text errors carry the offending line") {
  const auto bad = [](const std::string& text) {
    CHECK_THROWS_AS(load_morphology_text(text), ParseError);
  };
  bad("morphology { node a { mode sideways } }");
  bad("morphology { node a { } node a { } }");
  bad("morphology { node a { } line { b:1e-7 } }");
  bad("morphology { node a { } merge a b }");
  bad("morphology { node a { } line { a } }");
  bad("morphology { node a { } line { a: } }");
  bad("morphology { node a { } line { :1e-7 } }");
  bad("morphology { node a { } line { a:fast } }");
  bad("morphology { node a { } line { } }");
  bad("morphology { node a { unknown 1 } }");
  bad("morphology { node a { params { g_total 1 } } }");
  bad("morphology { node a { }");
  bad("morphology { node a { } } trailing");
  bad("morphology { widget a }");

  try {
    load_morphology_text("morphology {\n  node a { }\n  merge a b\n}\n",
                         "m.morph");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.line() == 3);
    CHECK(std::string(e.what()).find("m.morph:3") != std::string::npos);
  }
}
