#include "theme_refiner.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <unordered_map>

#include "json_text.hpp"

namespace deckgen {

Hsv rgb_to_hsv(Rgb rgb) {
    const double r = rgb.r / 255.0, g = rgb.g / 255.0, b = rgb.b / 255.0;
    const double mx = std::max({r, g, b}), mn = std::min({r, g, b});
    const double delta = mx - mn;
    Hsv out;
    out.v = mx;
    out.s = mx > 0 ? delta / mx : 0.0;
    if (delta > 0) {
        if (mx == r) {
            out.h = 60.0 * std::fmod((g - b) / delta, 6.0);
        } else if (mx == g) {
            out.h = 60.0 * ((b - r) / delta + 2.0);
        } else {
            out.h = 60.0 * ((r - g) / delta + 4.0);
        }
        if (out.h < 0) out.h += 360.0;
    }
    return out;
}

Rgb hsv_to_rgb(const Hsv& hsv) {
    const double c = hsv.v * hsv.s;
    const double hp = std::fmod(std::max(0.0, hsv.h), 360.0) / 60.0;
    const double x = c * (1.0 - std::abs(std::fmod(hp, 2.0) - 1.0));
    double r = 0, g = 0, b = 0;
    if (hp < 1) {
        r = c; g = x;
    } else if (hp < 2) {
        r = x; g = c;
    } else if (hp < 3) {
        g = c; b = x;
    } else if (hp < 4) {
        g = x; b = c;
    } else if (hp < 5) {
        r = x; b = c;
    } else {
        r = c; b = x;
    }
    const double m = hsv.v - c;
    auto to_byte = [](double f) {
        return uint8_t(std::lround(std::clamp(f, 0.0, 1.0) * 255.0));
    };
    return {to_byte(r + m), to_byte(g + m), to_byte(b + m)};
}

Rgb rgb_from_hex(std::string_view hex) {
    if (!hex.empty() && hex.front() == '#') hex.remove_prefix(1);
    if (hex.size() != 6) throw Error(Errc::parse, "color must be #rrggbb");
    auto nibble = [&](char c) -> int {
        if (c >= '0' && c <= '9') return c - '0';
        if (c >= 'a' && c <= 'f') return c - 'a' + 10;
        if (c >= 'A' && c <= 'F') return c - 'A' + 10;
        throw Error(Errc::parse, "color must be #rrggbb");
    };
    auto byte = [&](size_t i) { return uint8_t(nibble(hex[i]) * 16 + nibble(hex[i + 1])); };
    return {byte(0), byte(2), byte(4)};
}

std::string rgb_to_hex(Rgb rgb) {
    char buf[8];
    std::snprintf(buf, sizeof(buf), "#%02x%02x%02x", rgb.r, rgb.g, rgb.b);
    return buf;
}

void ColorParams::validate() const {
    auto unit = [](double v) { return v >= 0.0 && v <= 1.0; };
    if (!unit(sat_target) || !unit(sat_floor) || !unit(sat_cap) || !unit(sat_blend) ||
        !unit(target_v) || !unit(gray_threshold) || !unit(alpha_threshold) || !unit(bright_white) ||
        !unit(dark_black))
        throw Error(Errc::bad_arg, "color parameters must lie in [0,1]");
    if (!(sat_floor <= sat_target && sat_target <= sat_cap))
        throw Error(Errc::bad_arg, "need sat_floor <= sat_target <= sat_cap");
    if (!(gamma > 0)) throw Error(Errc::bad_arg, "gamma must be positive");
    if (v_cap && (!unit(*v_cap) || *v_cap < target_v - 0.02))
        throw Error(Errc::bad_arg, "v_cap must be >= target_v - 0.02");
}

BaseColorResult extract_base_color(std::span<const RasterImage> images, const ColorParams& params) {
    params.validate();

    std::unordered_map<uint32_t, uint64_t> histogram;
    uint64_t considered = 0;
    for (const RasterImage& img : images) {
        const size_t n = size_t(img.width) * size_t(img.height);
        if (img.rgba.size() != n * 4)
            throw Error(Errc::bad_arg, "raster buffer size does not match its dimensions");
        for (size_t i = 0; i < n; ++i) {
            const uint8_t* px = &img.rgba[i * 4];
            if (px[3] / 255.0 < params.alpha_threshold) continue; // near-transparent
            const double v = std::max({px[0], px[1], px[2]}) / 255.0;
            if (v > params.bright_white || v < params.dark_black) continue;
            const uint32_t key = (uint32_t(px[0]) << 16) | (uint32_t(px[1]) << 8) | px[2];
            ++histogram[key];
            ++considered;
        }
    }

    BaseColorResult result;
    result.pixels_considered = considered;
    if (histogram.empty()) {
        result.rgb = params.fallback;
        result.fallback_used = true;
        return result;
    }
    uint64_t best_count = 0;
    uint32_t best_key = 0;
    for (const auto& [key, count] : histogram) {
        if (count > best_count || (count == best_count && key < best_key)) {
            best_count = count;
            best_key = key;
        }
    }
    result.rgb = {uint8_t(best_key >> 16), uint8_t(best_key >> 8), uint8_t(best_key)};
    return result;
}

ThemeColor adjust_theme_color(Rgb rgb, const ColorParams& params) {
    params.validate();
    Hsv hsv = rgb_to_hsv(rgb);

    // Nearly gray: the hue is unstable, lock it to the fallback anchor.
    if (hsv.s <= params.gray_threshold) {
        hsv.h = rgb_to_hsv(params.fallback).h;
        hsv.s = std::max(hsv.s, params.sat_floor);
    }

    // Move right: more vivid, but clamped away from muddy and neon.
    if (hsv.s < params.sat_target || hsv.s < params.sat_floor)
        hsv.s = (1.0 - params.sat_blend) * hsv.s + params.sat_blend * params.sat_target;
    hsv.s = std::clamp(hsv.s, params.sat_floor, params.sat_cap);

    // Move down: the brighter above target_v, the stronger the pull.
    if (hsv.v > params.target_v) {
        const double d = hsv.v - params.target_v;
        const double a = 1.0 - std::exp(-params.gamma * d);
        hsv.v -= a * d;
        if (params.v_cap) hsv.v = std::min(hsv.v, *params.v_cap);
    }

    // Gentle lift when the result fell below the floor.
    const double v_floor = params.target_v - 0.02;
    if (hsv.v < v_floor) hsv.v = 0.7 * hsv.v + 0.3 * v_floor;

    return {hsv_to_rgb(hsv), hsv};
}

namespace {

struct SafeRange {
    double lo, hi;
};

// Step-1 safe ranges: overrides are clamped into these bands.
constexpr SafeRange kSatTargetRange{0.30, 0.90};
constexpr SafeRange kSatFloorRange{0.05, 0.60};
constexpr SafeRange kSatCapRange{0.60, 1.00};
constexpr SafeRange kSatBlendRange{0.10, 0.90};
constexpr SafeRange kTargetVRange{0.25, 0.65};
constexpr SafeRange kVCapRange{0.25, 0.80};
constexpr SafeRange kGammaRange{0.50, 8.00};
constexpr SafeRange kGrayRange{0.00, 0.30};
constexpr SafeRange kAlphaRange{0.00, 1.00};
constexpr SafeRange kBrightRange{0.80, 1.00};
constexpr SafeRange kDarkRange{0.00, 0.20};

void apply(std::optional<double> value, double& field, const char* name, SafeRange range,
           std::vector<std::string>& warnings) {
    if (!value) return;
    double v = *value;
    if (v < range.lo || v > range.hi) {
        char buf[128];
        std::snprintf(buf, sizeof(buf), "%s=%.4f outside safe range [%.2f, %.2f]; clamped", name, v,
                      range.lo, range.hi);
        warnings.push_back(buf);
        v = std::clamp(v, range.lo, range.hi);
    }
    field = v;
}

} // namespace

RefinedParams refine_parameters(const ColorParams& base, const ColorOverrides& overrides,
                                std::string_view style_note) {
    base.validate();
    RefinedParams out;
    out.params = base;
    out.style_note = std::string(style_note);
    auto& w = out.warnings;
    ColorParams& p = out.params;

    apply(overrides.sat_target, p.sat_target, "sat_target", kSatTargetRange, w);
    apply(overrides.sat_floor, p.sat_floor, "sat_floor", kSatFloorRange, w);
    apply(overrides.sat_cap, p.sat_cap, "sat_cap", kSatCapRange, w);
    apply(overrides.sat_blend, p.sat_blend, "sat_blend", kSatBlendRange, w);
    apply(overrides.target_v, p.target_v, "target_v", kTargetVRange, w);
    if (overrides.v_cap) {
        double v = *overrides.v_cap;
        p.v_cap = v; // clamped below
        apply(v, *p.v_cap, "v_cap", kVCapRange, w);
    }
    apply(overrides.gamma, p.gamma, "gamma", kGammaRange, w);
    apply(overrides.gray_threshold, p.gray_threshold, "gray_threshold", kGrayRange, w);
    apply(overrides.alpha_threshold, p.alpha_threshold, "alpha_threshold", kAlphaRange, w);
    apply(overrides.bright_white, p.bright_white, "bright_white", kBrightRange, w);
    apply(overrides.dark_black, p.dark_black, "dark_black", kDarkRange, w);
    if (overrides.fallback) p.fallback = *overrides.fallback;

    // Cross-field consistency after individual clamps.
    if (p.sat_floor > p.sat_cap) {
        w.push_back("sat_floor above sat_cap; floor lowered to the cap");
        p.sat_floor = p.sat_cap;
    }
    if (p.sat_target < p.sat_floor || p.sat_target > p.sat_cap) {
        w.push_back("sat_target outside [sat_floor, sat_cap]; clamped");
        p.sat_target = std::clamp(p.sat_target, p.sat_floor, p.sat_cap);
    }
    if (p.v_cap && *p.v_cap < p.target_v - 0.02) {
        w.push_back("v_cap below target_v - 0.02; raised");
        p.v_cap = p.target_v - 0.02;
    }
    p.validate();
    return out;
}

Deck consolidate(const Deck& deck, const TemplateCatalog& catalog) {
    validate_deck(deck);

    auto mergeable = [](const Slide& s) {
        return s.role == SlideRole::content && !s.has_assets() &&
               s.template_id != std::optional<std::string>("T19_2Text");
    };
    auto heading_of = [](const Slide& s) -> std::string {
        for (const Region& r : s.regions)
            if (r.kind == RegionKind::title_bar) return r.payload;
        return s.subsection.value_or(s.section.value_or(""));
    };
    auto join_notes = [](const Slide& a, const Slide& b) -> std::optional<std::string> {
        if (a.notes && b.notes) return *a.notes + "\n" + *b.notes;
        return a.notes ? a.notes : b.notes;
    };

    const TemplateSpec& t19 = catalog.get("T19_2Text");
    const TemplateSpec& t1 = catalog.get("T1_TextOnly");

    Deck out;
    out.title = deck.title;
    out.aspect = deck.aspect;

    std::vector<const Slide*> run;
    auto flush = [&]() {
        if (run.size() < 2) {
            for (const Slide* s : run) out.slides.push_back(*s);
            run.clear();
            return;
        }
        size_t i = 0;
        for (; i + 1 < run.size(); i += 2) {
            const Slide& left = *run[i];
            const Slide& right = *run[i + 1];
            Slide merged;
            merged.role = SlideRole::content;
            merged.template_id = "T19_2Text";
            merged.section = left.section;
            merged.subsection = left.subsection;
            merged.notes = join_notes(left, right);
            merged.bullets = left.bullets;
            merged.bullets.insert(merged.bullets.end(), right.bullets.begin(), right.bullets.end());
            for (const TemplateRegion& trg : t19.regions) {
                Region r{trg.kind, trg.x, trg.y, trg.w, trg.h, ""};
                if (trg.kind == RegionKind::title_bar) r.payload = heading_of(left);
                merged.regions.push_back(std::move(r));
            }
            // First slide's bullets fill the left column, second's the right.
            int text_seen = 0;
            for (Region& r : merged.regions) {
                if (r.kind != RegionKind::text) continue;
                r.payload = bullets_to_text(text_seen == 0 ? left.bullets : right.bullets);
                ++text_seen;
            }
            out.slides.push_back(std::move(merged));
        }
        if (i < run.size()) {
            const Slide& last = *run[i];
            Slide tail;
            tail.role = SlideRole::content;
            tail.template_id = "T1_TextOnly";
            tail.section = last.section;
            tail.subsection = last.subsection;
            tail.notes = last.notes;
            tail.bullets = last.bullets;
            for (const TemplateRegion& trg : t1.regions) {
                Region r{trg.kind, trg.x, trg.y, trg.w, trg.h, ""};
                r.payload = trg.kind == RegionKind::title_bar ? heading_of(last)
                                                              : bullets_to_text(last.bullets);
                tail.regions.push_back(std::move(r));
            }
            out.slides.push_back(std::move(tail));
        }
        run.clear();
    };

    for (const Slide& s : deck.slides) {
        if (mergeable(s)) {
            run.push_back(&s);
        } else {
            flush();
            out.slides.push_back(s);
        }
    }
    flush();

    for (size_t i = 0; i < out.slides.size(); ++i) out.slides[i].index = int(i) + 1;
    validate_deck(out);
    return out;
}

std::string ThemeReport::to_json() const {
    std::string out = "{\n";
    out += "  \"base\": " + json_quote(rgb_to_hex(base.rgb)) + ",\n";
    out += "  \"fallback_used\": " + std::string(base.fallback_used ? "true" : "false") + ",\n";
    out += "  \"pixels_considered\": " + std::to_string(base.pixels_considered) + ",\n";
    out += "  \"theme\": " + json_quote(rgb_to_hex(theme.rgb)) + ",\n";
    out += "  \"hsv\": { \"h\": " + fmt_num6(theme.hsv.h) + ", \"s\": " + fmt_num6(theme.hsv.s) +
           ", \"v\": " + fmt_num6(theme.hsv.v) + " },\n";
    out += "  \"style_note\": " + json_quote(refined.style_note) + ",\n";
    out += "  \"params\": {\n";
    const ColorParams& p = refined.params;
    out += "    \"sat_target\": " + fmt_num6(p.sat_target) + ",\n";
    out += "    \"sat_floor\": " + fmt_num6(p.sat_floor) + ",\n";
    out += "    \"sat_cap\": " + fmt_num6(p.sat_cap) + ",\n";
    out += "    \"sat_blend\": " + fmt_num6(p.sat_blend) + ",\n";
    out += "    \"target_v\": " + fmt_num6(p.target_v) + ",\n";
    out += "    \"v_cap\": " + (p.v_cap ? fmt_num6(*p.v_cap) : std::string("null")) + ",\n";
    out += "    \"gamma\": " + fmt_num6(p.gamma) + ",\n";
    out += "    \"fallback\": " + json_quote(rgb_to_hex(p.fallback)) + ",\n";
    out += "    \"gray_threshold\": " + fmt_num6(p.gray_threshold) + ",\n";
    out += "    \"alpha_threshold\": " + fmt_num6(p.alpha_threshold) + ",\n";
    out += "    \"bright_white\": " + fmt_num6(p.bright_white) + ",\n";
    out += "    \"dark_black\": " + fmt_num6(p.dark_black) + "\n";
    out += "  },\n";
    out += "  \"warnings\": " + inline_string_array(refined.warnings) + "\n";
    out += "}\n";
    return out;
}

} // namespace deckgen
