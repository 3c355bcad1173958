#include "mcsim/plasticity.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace mcsim {

std::uint8_t clamp_weight(long long w) {
  return static_cast<std::uint8_t>(std::clamp<long long>(w, 0, kWeightMax));
}

void structural_step(KernelView& view, const StructuralParams& params,
                     Rng& rng) {
  // Work row by row so the address-uniqueness constraint can be enforced
  // against the row's current contents plus writes made within this pass.
  std::size_t i = 0;
  while (i < view.synapses.size()) {
    const Block block = view.synapses[i].block;
    const int row = view.synapses[i].row;
    std::size_t end = i;
    while (end < view.synapses.size() && view.synapses[end].block == block &&
           view.synapses[end].row == row)
      ++end;

    std::set<std::uint8_t> used;
    for (std::size_t k = i; k < end; ++k)
      used.insert(view.synapses[k].address);

    for (std::size_t k = i; k < end; ++k) {
      const SynapseSnapshot& s = view.synapses[k];
      const bool established = s.weight > 0;

      if (!established && s.c_causal >= params.theta_corr) {
        // Correlated while searching: becomes a working synapse in place.
        view.writes.push_back({s.block, s.row, s.column, s.address,
                               params.w_init});
        continue;
      }
      if (established && s.weight >= params.w_min) continue;

      // Searching without enough correlation, or decayed below the floor:
      // draw a fresh source, excluding everything the row currently holds.
      std::vector<std::uint8_t> candidates;
      candidates.reserve(params.pool.size());
      for (const std::uint8_t a : params.pool)
        if (!used.count(a)) candidates.push_back(a);
      if (candidates.empty())
        throw PoolExhausted(
            "no unused candidate address remains in row " +
            std::string(to_string(block)) + " " + std::to_string(row));
      std::sort(candidates.begin(), candidates.end());
      const std::uint8_t fresh =
          candidates[rng.uniform_below(candidates.size())];
      // The old address stays excluded for the rest of the pass; a redraw
      // therefore always changes the address.
      used.insert(fresh);
      view.writes.push_back({s.block, s.row, s.column, fresh, 0});
    }
    i = end;
  }
}

void stdp_kernel(KernelView& view, const StdpParams& params) {
  for (const SynapseSnapshot& s : view.synapses) {
    // Weight zero marks a searching (disabled) synapse --- the same
    // convention the structural rule keys on.  Pair-based updates only
    // apply to working synapses; creating one is the structural rule's
    // job, so a zero-weight cell is left untouched here.
    if (s.weight == 0) continue;
    const long long delta =
        std::llround(params.eta * (s.c_causal - s.c_acausal));
    const std::uint8_t w = clamp_weight(static_cast<long long>(s.weight) + delta);
    if (w != s.weight)
      view.writes.push_back({s.block, s.row, s.column, s.address, w});
  }
}

}  // namespace mcsim
