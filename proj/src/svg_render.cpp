#include "svg_render.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <sstream>

namespace deckgen {

namespace {

std::string num(double v) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

std::string xml_escape(const std::string& s) {
    std::string out;
    out.reserve(s.size());
    for (char c : s) {
        switch (c) {
        case '&': out += "&amp;"; break;
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '"': out += "&quot;"; break;
        case '\'': out += "&apos;"; break;
        default: out += c;
        }
    }
    return out;
}

std::vector<std::string> split_lines(const std::string& text) {
    std::vector<std::string> lines;
    std::string cur;
    for (char c : text) {
        if (c == '\n') {
            lines.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    if (!cur.empty()) lines.push_back(cur);
    return lines;
}

void text_block(std::ostringstream& out, const std::string& payload, double x, double y, double h,
                double font_px, const char* fill) {
    const double line_h = font_px * 1.45;
    const auto lines = split_lines(payload);
    const size_t max_lines = line_h > 0 ? size_t(std::max(0.0, std::floor(h / line_h))) : 0;
    double baseline = y + font_px * 1.2;
    size_t shown = 0;
    for (const std::string& line : lines) {
        if (shown >= max_lines) break;
        out << "  <text x=\"" << num(x) << "\" y=\"" << num(baseline) << "\" font-size=\""
            << num(font_px) << "\" font-family=\"sans-serif\" fill=\"" << fill << "\">"
            << xml_escape(line) << "</text>\n";
        baseline += line_h;
        ++shown;
    }
}

} // namespace

std::map<RegionKind, std::string> RenderOptions::default_block_colors() {
    return {
        {RegionKind::title_bar, "#2b5fa6"},
        {RegionKind::text, "#9db8d9"},
        {RegionKind::image, "#e3a04b"},
        {RegionKind::table, "#7fbf7f"},
        {RegionKind::formula, "#b288c4"},
    };
}

void RenderOptions::validate(const std::string& deck_aspect) const {
    if (!(width > 0) || !(height > 0))
        throw Error(Errc::bad_arg, "render: page dimensions must be positive");
    double want = 16.0 / 9.0;
    if (deck_aspect == "4:3") want = 4.0 / 3.0;
    if (std::abs(width / height - want) > 0.01)
        throw Error(Errc::bad_arg, "render: page size " + num(width) + "x" + num(height) +
                                       " does not match the deck aspect " + deck_aspect);
}

RenderedSlide render_slide_svg(const Slide& slide, const RenderOptions& opts) {
    RenderedSlide result;
    const double W = opts.width, H = opts.height;
    std::ostringstream out;
    out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" xmlns:xlink=\"http://www.w3.org/1999/xlink\" "
        << "width=\"" << num(W) << "\" height=\"" << num(H) << "\" viewBox=\"0 0 " << num(W) << " "
        << num(H) << "\">\n";
    out << "  <rect x=\"0\" y=\"0\" width=\"" << num(W) << "\" height=\"" << num(H)
        << "\" fill=\"#ffffff\"/>\n";

    const std::string theme_hex = rgb_to_hex(opts.theme);

    for (const Region& r : slide.regions) {
        const double x = r.x * W, y = r.y * H, w = r.w * W, h = r.h * H;

        if (opts.mode == RenderMode::blocks) {
            auto it = opts.block_colors.find(r.kind);
            const std::string fill = it != opts.block_colors.end() ? it->second : "#cccccc";
            out << "  <rect x=\"" << num(x) << "\" y=\"" << num(y) << "\" width=\"" << num(w)
                << "\" height=\"" << num(h) << "\" fill=\"" << fill
                << "\" stroke=\"#333333\" stroke-width=\"1\"/>\n";
            continue;
        }

        switch (r.kind) {
        case RegionKind::title_bar: {
            out << "  <rect x=\"" << num(x) << "\" y=\"" << num(y) << "\" width=\"" << num(w)
                << "\" height=\"" << num(h) << "\" fill=\"" << theme_hex << "\"/>\n";
            const double font = h * 0.45;
            out << "  <text x=\"" << num(x + 0.02 * W) << "\" y=\"" << num(y + h * 0.66)
                << "\" font-size=\"" << num(font)
                << "\" font-family=\"sans-serif\" fill=\"#ffffff\">" << xml_escape(r.payload)
                << "</text>\n";
            break;
        }
        case RegionKind::text:
            text_block(out, r.payload, x + 0.005 * W, y, h, H * 0.030, "#1a1a1a");
            break;
        case RegionKind::formula: {
            out << "  <rect x=\"" << num(x) << "\" y=\"" << num(y) << "\" width=\"" << num(w)
                << "\" height=\"" << num(h)
                << "\" fill=\"#f4f6fa\" stroke=\"" << theme_hex << "\" stroke-width=\"1\"/>\n";
            const double font = std::min(H * 0.032, h * 0.4);
            out << "  <text x=\"" << num(x + w / 2) << "\" y=\"" << num(y + h / 2 + font * 0.35)
                << "\" font-size=\"" << num(font)
                << "\" font-family=\"serif\" font-style=\"italic\" text-anchor=\"middle\" "
                   "fill=\"#1a1a1a\">"
                << xml_escape(r.payload) << "</text>\n";
            break;
        }
        case RegionKind::image:
        case RegionKind::table: {
            std::filesystem::path asset = opts.images_dir.empty()
                                              ? std::filesystem::path(r.payload)
                                              : std::filesystem::path(opts.images_dir) / r.payload;
            std::error_code ec;
            if (std::filesystem::exists(asset, ec)) {
                out << "  <image x=\"" << num(x) << "\" y=\"" << num(y) << "\" width=\"" << num(w)
                    << "\" height=\"" << num(h) << "\" preserveAspectRatio=\"xMidYMid meet\" "
                    << "xlink:href=\"" << xml_escape(asset.generic_string()) << "\"/>\n";
            } else {
                result.warnings.push_back("missing asset \"" + r.payload + "\" for slide " +
                                          std::to_string(slide.index) + "; placeholder drawn");
                out << "  <rect x=\"" << num(x) << "\" y=\"" << num(y) << "\" width=\"" << num(w)
                    << "\" height=\"" << num(h)
                    << "\" fill=\"#e8e8e8\" stroke=\"#888888\" stroke-width=\"1\"/>\n";
                out << "  <line x1=\"" << num(x) << "\" y1=\"" << num(y) << "\" x2=\"" << num(x + w)
                    << "\" y2=\"" << num(y + h) << "\" stroke=\"#888888\" stroke-width=\"1\"/>\n";
                out << "  <line x1=\"" << num(x + w) << "\" y1=\"" << num(y) << "\" x2=\"" << num(x)
                    << "\" y2=\"" << num(y + h) << "\" stroke=\"#888888\" stroke-width=\"1\"/>\n";
                out << "  <text x=\"" << num(x + w / 2) << "\" y=\"" << num(y + h / 2)
                    << "\" font-size=\"" << num(H * 0.025)
                    << "\" font-family=\"sans-serif\" text-anchor=\"middle\" fill=\"#666666\">"
                    << xml_escape(r.payload) << "</text>\n";
            }
            break;
        }
        }
    }
    out << "</svg>\n";
    result.svg = out.str();
    return result;
}

} // namespace deckgen
