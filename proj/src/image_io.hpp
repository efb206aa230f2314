#pragma once

#include <string>

#include "theme_refiner.hpp"

namespace deckgen {

/// Decodes a PNG or JPEG file (sniffed by magic bytes) into RGBA8. PNG alpha
/// is honored; JPEG decodes fully opaque. Throws Error{io} on unreadable or
/// unsupported files.
RasterImage decode_image_file(const std::string& path);

/// True when the path carries a decodable extension (.png/.jpg/.jpeg).
bool looks_like_raster(const std::string& path);

} // namespace deckgen
