#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "deck_model.hpp"
#include "template_engine.hpp"

namespace deckgen {

struct Rgb {
    uint8_t r = 0, g = 0, b = 0;

    uint32_t packed() const { return (uint32_t(r) << 16) | (uint32_t(g) << 8) | b; }
    bool operator==(const Rgb&) const = default;
};

struct Hsv {
    double h = 0; // [0, 360)
    double s = 0; // [0, 1]
    double v = 0; // [0, 1]
};

// HSV convention: H in [0,360), S = delta/max, V = max/255.
Hsv rgb_to_hsv(Rgb rgb);
Rgb hsv_to_rgb(const Hsv& hsv);

Rgb rgb_from_hex(std::string_view hex); // "#rrggbb" or "rrggbb"
std::string rgb_to_hex(Rgb rgb);        // lowercase "#rrggbb"

/// Parameters of the fixed-hue color movement. Defaults produce a dark,
/// saturated presentation theme around the deep-blue fallback.
struct ColorParams {
    double sat_target = 0.65;
    double sat_floor = 0.35;
    double sat_cap = 0.85;
    double sat_blend = 0.6;
    double target_v = 0.42;
    std::optional<double> v_cap = 0.5;
    double gamma = 3.0;
    Rgb fallback{0x2B, 0x5F, 0xA6};
    double gray_threshold = 0.10;        // below this saturation the hue is unstable
    double alpha_threshold = 16.0 / 255; // near-transparent pixel cutoff
    double bright_white = 0.95;          // brightness above this is background white
    double dark_black = 0.08;            // brightness below this is shadow black

    void validate() const;
};

/// Theme color with its exact HSV record; rgb is the 8-bit projection of hsv.
struct ThemeColor {
    Rgb rgb;
    Hsv hsv;
};

struct RasterImage {
    int width = 0;
    int height = 0;
    std::vector<uint8_t> rgba; // width*height*4, row-major
};

struct BaseColorResult {
    Rgb rgb;
    bool fallback_used = false;     // no pixel survived the filters
    uint64_t pixels_considered = 0; // survivors across all images
};

/// Most frequent exact 24-bit color after dropping near-transparent pixels
/// and near-white/near-black brightness. Ties break toward the lowest packed
/// value, so the result is independent of image and pixel order.
BaseColorResult extract_base_color(std::span<const RasterImage> images, const ColorParams& params);

/// Fixed-hue movement: gray fallback, vividness blend with saturation clamp,
/// adaptive darkening toward target_v capped at v_cap, then a gentle lift
/// when the result fell below target_v - 0.02.
ThemeColor adjust_theme_color(Rgb rgb, const ColorParams& params);

struct ColorOverrides {
    std::optional<double> sat_target, sat_floor, sat_cap, sat_blend;
    std::optional<double> target_v, v_cap, gamma;
    std::optional<double> gray_threshold, alpha_threshold, bright_white, dark_black;
    std::optional<Rgb> fallback;
};

struct RefinedParams {
    ColorParams params;
    std::string style_note; // recorded verbatim, never interpreted
    std::vector<std::string> warnings;
};

/// Applies the overrides once, clamping each to its safe range (out-of-range
/// values are clamped with a warning, not rejected). The style note is
/// carried as provenance only.
RefinedParams refine_parameters(const ColorParams& base, const ColorOverrides& overrides,
                                std::string_view style_note);

/// Merges every run of two or more consecutive text-only content slides
/// pairwise into T19_2Text (first slide's bullets left, second's right); an
/// odd trailing slide becomes T1. Already-merged T19 slides are terminal and
/// never merge again. Slides outside such runs pass through untouched.
Deck consolidate(const Deck& deck, const TemplateCatalog& catalog);

struct ThemeReport {
    BaseColorResult base;
    ThemeColor theme;
    RefinedParams refined;

    std::string to_json() const;
};

} // namespace deckgen
