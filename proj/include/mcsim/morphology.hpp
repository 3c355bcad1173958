#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "mcsim/chip.hpp"

namespace mcsim {

// Abstract multi-compartment neuron morphology: a graph of compartments
// (each with a spike mechanism, analog parameter set and fan-in demand)
// connected either by somatic-line attachments or by direct membrane merges.
// The compiler lowers a morphology onto the two-block compartment grid.

struct MorphNode {
  std::string label;
  Mode mode = Mode::Passive;  // spike mechanism; Disabled = capacitance only
  int fan_in = 0;             // distinct pre-synaptic sources required
  AnalogParams params;
  bool exp_term = false;  // spike-initiation (exponential) term engaged
  bool is_output = false;  // the neuron's spike output (at most one node)

  bool operator==(const MorphNode&) const = default;
};

enum class EdgeKind : std::uint8_t { SomaLine = 0, DirectMerge };

// A soma_line edge states that both endpoints sit on the same somatic line
// and carries the attachment of its FIRST endpoint: either a conductance
// g > 0 or a bypass short (at most one per line). Every member of a line
// must appear as the first endpoint of exactly one of the line's edges;
// the canonical spelling of a k-member line is a ring over the members in
// node-index order (a one-member line is a self-loop). Second endpoints
// only encode membership, so the saver always re-emits the canonical ring.
// A direct_merge edge shorts the two membranes into one electrical node
// and carries no attachment payload.
struct MorphEdge {
  int a = -1;
  int b = -1;
  EdgeKind kind = EdgeKind::SomaLine;
  double g = 0;
  bool bypass = false;

  bool operator==(const MorphEdge&) const = default;
};

struct Morphology {
  std::vector<MorphNode> nodes;
  std::vector<MorphEdge> edges;

  bool operator==(const Morphology&) const = default;
};

// Structural validation; empty result means the morphology is well-formed:
// unique printable labels, at most one output node, a single connected
// structure, legal attachments (each line member attached exactly once, at
// most one bypass per line, positive conductances), merge edges free of
// attachment payload, and per-node analog parameters that satisfy the same
// rules the chip applies to a configured compartment.
std::vector<Violation> validate_morphology(const Morphology& m);

// Thrown by the compiler when the morphology itself is malformed.
class MorphologyError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Thrown when no legal placement exists on the requested dimensions.
class Infeasible : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ChipDims {
  int n_columns = 4;
  int rows_per_block = 8;
};

struct Slot {
  Block block = Block::Upper;
  int column = 0;

  bool operator==(const Slot&) const = default;
};

struct Placement {
  std::vector<Slot> slot_of;  // node index -> compartment slot
  ChipConfig config;
};

// Lowers a morphology onto a fresh chip of the given dimensions:
//   - every node becomes one compartment carrying its mode and parameters;
//   - direct-merge components become membrane nodes (the closed merge
//     switches connect exactly the member compartments);
//   - each line group lands in one block with its members' columns inside a
//     single somatic segment (interior segment switches closed), distinct
//     groups in a block separated by an open segment switch;
//   - unused compartments stay disabled and detached.
// The search walks candidate slots leftmost-first (upper block before
// lower) with backtracking, so the result is deterministic and a thrown
// Infeasible means no placement exists at all. Throws MorphologyError when
// validate_morphology reports violations.
Placement compile_morphology(const Morphology& m, const ChipDims& dims);

// Layer-5 pyramidal template: n_tuft NMDA nodes on an apical line, a
// vertically merged Ca bridge pair joining it to the somatic line, an Na
// soma shorted onto the somatic line (bypass), and n_basal NMDA nodes
// beside it. With ca_both_circuits=false only one bridge member keeps its
// Ca mechanism; the partner contributes capacitance alone.
Morphology preset_pyramidal(int n_tuft, int n_basal,
                            bool ca_both_circuits = true);

// Plain-text morphology format. load(save(m)) == m for canonical
// morphologies (line rings over members in index order, merge endpoints
// ascending) and save(load(text)) reproduces canonical text byte-for-byte.
std::string save_morphology_text(const Morphology& m);
Morphology load_morphology_text(const std::string& content,
                                const std::string& filename = "<string>");

void save_morphology_file(const Morphology& m, const std::string& path);
Morphology load_morphology_file(const std::string& path);

}  // namespace mcsim
