#pragma once

#include <string>

#include "vscreen/net/network.hpp"

namespace vscreen::net {

// Versioned binary container: magic, JSON header (config + step counter),
// then all parameter tensors row-major as little-endian IEEE doubles.
// Reload is bit-exact.
void save_checkpoint(const MultitaskNetwork& net, const std::string& path);
MultitaskNetwork load_checkpoint(const std::string& path);

}  // namespace vscreen::net
