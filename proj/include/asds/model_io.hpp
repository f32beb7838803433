#pragma once

#include <string>

#include "asds/training.hpp"

namespace asds {

// Binary model file: magic "ASDS", version u16, patch_size u16, K u32,
// projector rows/cols u32, projector doubles, then per cluster the centroid,
// rank, atoms (one atom after another) and the 8 AR coefficients, all f64
// little-endian, with a trailing CRC32 over everything before it.
void save_model(const LearnedModel& model, const std::string& path);
LearnedModel load_model(const std::string& path);

} // namespace asds
