#pragma once

#include <cstdint>
#include <string>

namespace mcsim {

enum class Block : std::uint8_t { Upper = 0, Lower = 1 };

// The two dendritic input lines feeding each compartment.
enum class LineId : std::uint8_t { A = 0, B = 1 };

// Ion-channel circuit configuration of a compartment. Passive keeps the
// leak OTA engaged but never switches; Disabled turns the OTA off entirely,
// so only synaptic, coupling and stimulus currents act on the membrane.
enum class Mode : std::uint8_t { Passive = 0, Na, Ca, Nmda, Disabled };

enum class SpikeType : std::uint8_t { Na = 0, Ca, Nmda };

constexpr int kAddressMax = 63;   // 6-bit synapse address
constexpr int kWeightMax = 63;    // 6-bit synapse weight
constexpr int kRowsPerGroup = 2;  // rows sharing one pre-synaptic bus
constexpr int kBusAddresses = 64;

// Somatic-line segment switches sit between every fourth column pair.
constexpr int kSomaSegmentPeriod = 4;

// A synaptic event sinks a current pulse of this length from the dendritic
// line; it is far below any resolved time constant and is applied as an
// instantaneous charge packet (voltage step on the line capacitance).
constexpr double kSynPulseSeconds = 4e-9;
constexpr double kLineCapacitanceFarad = 1e-12;

// The circuits run accelerated: 1 us of emulation time corresponds to 1 ms
// of biological time. Only output columns convert; the engine itself always
// works in emulation (hardware) time.
constexpr double kAccelerationFactor = 1000.0;

const char* to_string(Block b);
const char* to_string(LineId l);
const char* to_string(Mode m);
const char* to_string(SpikeType s);

bool parse_block(const std::string& s, Block& out);
bool parse_line(const std::string& s, LineId& out);
bool parse_mode(const std::string& s, Mode& out);
bool parse_spike_type(const std::string& s, SpikeType& out);

// Short compartment tag used in output files, e.g. "U0", "L3".
std::string comp_name(Block b, int column);

}  // namespace mcsim
