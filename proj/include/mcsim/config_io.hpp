#pragma once

#include <string>

#include "mcsim/chip.hpp"
#include "mcsim/text.hpp"

namespace mcsim {

// Canonical plain-text form of a chip configuration. load(save(cfg))
// reproduces cfg bit-exactly, and saving again yields identical bytes.
std::string save_chip_text(const ChipConfig& cfg);

// Parses one `chip { ... }` block from an open token stream; lets composite
// documents embed a chip configuration inline.
ChipConfig parse_chip_block(TokenStream& ts);
ChipConfig load_chip_text(const std::string& content,
                          const std::string& filename = "<string>");

void save_chip_file(const ChipConfig& cfg, const std::string& path);
ChipConfig load_chip_file(const std::string& path);

}  // namespace mcsim
