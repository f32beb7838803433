#pragma once

#include <cstdint>

#include "asds/image.hpp"

// Deterministic synthetic test scenes: a smooth background with flat shapes,
// oriented gratings and fine checkers layered on top. Rich in edges and
// repeated structure, which is what the patch learning and the non-local
// regularizer feed on.
asds::Image synth_texture(int width, int height, uint64_t seed);
