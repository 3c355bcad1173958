#include "mcsim/types.hpp"

namespace mcsim {

const char* to_string(Block b) {
  return b == Block::Upper ? "upper" : "lower";
}

const char* to_string(LineId l) { return l == LineId::A ? "a" : "b"; }

const char* to_string(Mode m) {
  switch (m) {
    case Mode::Passive: return "passive";
    case Mode::Na: return "na";
    case Mode::Ca: return "ca";
    case Mode::Nmda: return "nmda";
    case Mode::Disabled: return "disabled";
  }
  return "?";
}

const char* to_string(SpikeType s) {
  switch (s) {
    case SpikeType::Na: return "na";
    case SpikeType::Ca: return "ca";
    case SpikeType::Nmda: return "nmda";
  }
  return "?";
}

bool parse_block(const std::string& s, Block& out) {
  if (s == "upper") { out = Block::Upper; return true; }
  if (s == "lower") { out = Block::Lower; return true; }
  return false;
}

bool parse_line(const std::string& s, LineId& out) {
  if (s == "a") { out = LineId::A; return true; }
  if (s == "b") { out = LineId::B; return true; }
  return false;
}

bool parse_mode(const std::string& s, Mode& out) {
  if (s == "passive") { out = Mode::Passive; return true; }
  if (s == "na") { out = Mode::Na; return true; }
  if (s == "ca") { out = Mode::Ca; return true; }
  if (s == "nmda") { out = Mode::Nmda; return true; }
  if (s == "disabled") { out = Mode::Disabled; return true; }
  return false;
}

bool parse_spike_type(const std::string& s, SpikeType& out) {
  if (s == "na") { out = SpikeType::Na; return true; }
  if (s == "ca") { out = SpikeType::Ca; return true; }
  if (s == "nmda") { out = SpikeType::Nmda; return true; }
  return false;
}

std::string comp_name(Block b, int column) {
  return std::string(1, b == Block::Upper ? 'U' : 'L') + std::to_string(column);
}

}  // namespace mcsim
