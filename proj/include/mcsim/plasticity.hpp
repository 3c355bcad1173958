#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "mcsim/detmath.hpp"
#include "mcsim/types.hpp"

namespace mcsim {

// Per-synapse correlation sensor: exponentially weighted nearest-neighbor
// pre/post pairing. A timestamp is consumed by the first opposite event after
// it, so each spike participates in at most one causal and one acausal pair.
struct CorrelationState {
  double c_causal = 0;
  double c_acausal = 0;
  std::optional<double> last_pre;
  std::optional<double> last_post;
  double a_plus = 1.0;
  double a_minus = 1.0;
  double tau_plus = 2e-6;
  double tau_minus = 2e-6;

  void on_pre(double t) {
    if (last_post) {
      c_acausal += a_minus * det_exp(-(t - *last_post) / tau_minus);
      last_post.reset();
    }
    last_pre = t;
  }

  void on_post(double t) {
    if (last_pre) {
      c_causal += a_plus * det_exp(-(t - *last_pre) / tau_plus);
      last_pre.reset();
    }
    last_post = t;
  }
};

// Snapshot handed to a plasticity kernel: one entry per observed synapse.
struct SynapseSnapshot {
  Block block = Block::Upper;
  int row = 0;
  int column = 0;
  std::uint8_t address = 0;
  std::uint8_t weight = 0;
  double c_causal = 0;
  double c_acausal = 0;
};

struct SynapseWrite {
  Block block = Block::Upper;
  int row = 0;
  int column = 0;
  std::uint8_t address = 0;
  std::uint8_t weight = 0;
};

// Neuron-side parameter writes a kernel may request (the processor can
// retune compartments, e.g. plateau durations or thresholds, at runtime).
enum class AnalogField : std::uint8_t {
  VLeak, GLeak, VAlt, GAlt, VTh, TPulse, GIc,
};

struct ParamWrite {
  Block block = Block::Upper;
  int column = 0;
  AnalogField field = AnalogField::VLeak;
  double value = 0;
};

// What a kernel invocation sees and produces. Accumulators in `synapses`
// were atomically read and reset at snapshot time, so kernels stay stateless
// across periods.
struct KernelView {
  std::vector<SynapseSnapshot> synapses;
  std::vector<SynapseWrite> writes;
  std::vector<ParamWrite> param_writes;
};

struct StructuralParams {
  double theta_corr = 3.0;     // establishment threshold on c_causal
  std::uint8_t w_init = 32;    // weight granted on establishment
  std::uint8_t w_min = 8;      // established synapses below this get replaced
  std::vector<std::uint8_t> pool;  // candidate addresses of the search space
};

class PoolExhausted : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Structural rewiring pass over the snapshot. Establishment: a searching
// synapse (weight 0) whose causal accumulator reached theta_corr gets
// weight w_init and keeps its address. Otherwise it redraws a fresh address
// uniformly from the pool, excluding every address currently present in its
// row. Established synapses whose weight decayed below w_min are searched
// again (weight 0 + redraw). Draws consume `rng` in snapshot order, so a
// fixed seed reproduces the full rewiring trajectory.
void structural_step(KernelView& view, const StructuralParams& params,
                     Rng& rng);

struct StdpParams {
  double eta = 1.0;  // learning rate applied to (c_causal - c_acausal)
};

// weight' = clamp(weight + round(eta * (c_causal - c_acausal)), 0, 63).
void stdp_kernel(KernelView& view, const StdpParams& params);

std::uint8_t clamp_weight(long long w);

}  // namespace mcsim
