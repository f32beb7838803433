#pragma once

#include <string>

#include "asds/image.hpp"

namespace asds {

// 8-bit binary PGM (P5). Values are promoted to double on load; on save they
// are clamped to [0,255] and rounded to the nearest integer.
Image load_pgm(const std::string& path);
void save_pgm(const Image& img, const std::string& path);

} // namespace asds
