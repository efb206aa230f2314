#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "deck_model.hpp"
#include "theme_refiner.hpp"

namespace oracle {

/// Pixel-counting union area: samples pixel centers on a resolution x
/// resolution grid. Exact for boxes aligned to the 1/resolution grid.
double union_area_raster(std::span<const deckgen::Region> regions, int resolution);

/// Least squares through explicit 3x3 normal equations with Gaussian
/// elimination; independent of the QR path it checks.
std::array<double, 3> fit_affine_normal_equations(std::span<const double> y,
                                                  std::span<const double> om,
                                                  std::span<const double> fr);

/// O(n^2) average ranks: rank_i = #(x_j < x_i) + (ties including self + 1)/2.
std::vector<double> brute_force_ranks(std::span<const double> values);

double pearson_longdouble(std::span<const double> x, std::span<const double> y);

/// Straight-line transcription of the fixed-hue color movement, kept
/// independent of the production implementation.
deckgen::Hsv color_movement_reference(deckgen::Hsv in, const deckgen::ColorParams& p);

/// Filter-then-mode base color over RGBA pixels, one filter at a time.
/// Returns packed 0xRRGGBB, or -1 when no pixel qualifies.
long long base_color_histogram_oracle(std::span<const deckgen::RasterImage> images,
                                      const deckgen::ColorParams& p);

} // namespace oracle
