#pragma once

#include <map>
#include <string>
#include <vector>

#include "deck_model.hpp"
#include "theme_refiner.hpp"

namespace deckgen {

enum class RenderMode { full, blocks };

struct RenderOptions {
    double width = 1280;
    double height = 720;
    RenderMode mode = RenderMode::full;
    std::string images_dir;            // where image/table assets resolve (full mode)
    Rgb theme{0x2B, 0x5F, 0xA6};       // title-bar / accent fill in full mode
    std::map<RegionKind, std::string> block_colors = default_block_colors();

    static std::map<RegionKind, std::string> default_block_colors();

    /// Throws Error{bad_arg} when the page ratio strays from the deck aspect.
    void validate(const std::string& deck_aspect) const;
};

struct RenderedSlide {
    std::string svg;
    std::vector<std::string> warnings; // e.g. missing assets replaced by placeholders
};

/// One standalone SVG document for the slide. Blocks mode draws each region
/// as a filled rectangle keyed by kind; full mode renders text and links
/// image files, drawing a placeholder (plus a warning) for missing assets.
RenderedSlide render_slide_svg(const Slide& slide, const RenderOptions& opts);

} // namespace deckgen
