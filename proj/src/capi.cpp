#include "deckgen/deckgen.h"

#include <cstring>
#include <string>

#include "json.hpp"

#include "calibration.hpp"
#include "deck_model.hpp"
#include "geometry_metrics.hpp"
#include "image_io.hpp"
#include "json_text.hpp"
#include "svg_render.hpp"
#include "template_engine.hpp"
#include "theme_refiner.hpp"

using namespace deckgen;

struct dg_deck {
    Deck deck;
};

namespace {

char* dup_string(const std::string& s) {
    char* out = new char[s.size() + 1];
    std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

void set_out(char** out, const std::string& s) {
    if (out) *out = dup_string(s);
}

dg_status status_of(Errc code) {
    switch (code) {
    case Errc::parse: return DG_ERR_PARSE;
    case Errc::validate: return DG_ERR_VALIDATE;
    case Errc::arity: return DG_ERR_ARITY;
    case Errc::overflow: return DG_ERR_OVERFLOW;
    case Errc::singular: return DG_ERR_SINGULAR;
    case Errc::stats: return DG_ERR_STATS;
    case Errc::weights: return DG_ERR_WEIGHTS;
    case Errc::io: return DG_ERR_IO;
    case Errc::empty: return DG_ERR_EMPTY;
    case Errc::bad_arg: return DG_ERR_BAD_ARG;
    }
    return DG_ERR_INTERNAL;
}

template <typename Fn>
dg_status guarded(char** err_out, Fn&& fn) {
    if (err_out) *err_out = nullptr;
    try {
        fn();
        return DG_OK;
    } catch (const Error& e) {
        set_out(err_out, e.what());
        return status_of(e.code());
    } catch (const std::exception& e) {
        set_out(err_out, e.what());
        return DG_ERR_INTERNAL;
    }
}

ColorParams color_params_from_c(const dg_color_params* p) {
    if (!p) return ColorParams{};
    ColorParams out;
    out.sat_target = p->sat_target;
    out.sat_floor = p->sat_floor;
    out.sat_cap = p->sat_cap;
    out.sat_blend = p->sat_blend;
    out.target_v = p->target_v;
    out.v_cap = p->v_cap_set ? std::optional<double>(p->v_cap) : std::nullopt;
    out.gamma = p->gamma;
    out.fallback = {uint8_t(p->fallback_rgb >> 16), uint8_t(p->fallback_rgb >> 8),
                    uint8_t(p->fallback_rgb)};
    out.gray_threshold = p->gray_threshold;
    out.alpha_threshold = p->alpha_threshold;
    out.bright_white = p->bright_white;
    out.dark_black = p->dark_black;
    return out;
}

GadParams gad_params_from_c(const dg_gad_params* p) {
    if (!p) return GadParams{};
    return GadParams{p->a_min, p->tau, p->m_star, p->kappa, p->lambda1, p->lambda2};
}

ColorOverrides overrides_from_json(const char* overrides_json) {
    ColorOverrides out;
    if (!overrides_json || !*overrides_json) return out;
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(overrides_json);
    } catch (const nlohmann::json::parse_error& e) {
        throw Error(Errc::parse, "overrides: malformed JSON at byte " + std::to_string(e.byte));
    }
    if (!doc.is_object()) throw Error(Errc::parse, "overrides must be a JSON object");
    auto num = [&](const char* key) -> std::optional<double> {
        if (!doc.contains(key)) return std::nullopt;
        if (!doc[key].is_number())
            throw Error(Errc::parse, std::string("overrides: \"") + key + "\" must be a number");
        return doc[key].get<double>();
    };
    out.sat_target = num("sat_target");
    out.sat_floor = num("sat_floor");
    out.sat_cap = num("sat_cap");
    out.sat_blend = num("sat_blend");
    out.target_v = num("target_v");
    out.v_cap = num("v_cap");
    out.gamma = num("gamma");
    out.gray_threshold = num("gray_threshold");
    out.alpha_threshold = num("alpha_threshold");
    out.bright_white = num("bright_white");
    out.dark_black = num("dark_black");
    if (doc.contains("fallback")) {
        if (!doc["fallback"].is_string())
            throw Error(Errc::parse, "overrides: \"fallback\" must be a #rrggbb string");
        out.fallback = rgb_from_hex(doc["fallback"].get<std::string>());
    }
    return out;
}

TemplateCatalog catalog_or_builtin(const char* catalog_json) {
    if (catalog_json && *catalog_json) return TemplateCatalog::from_json(catalog_json);
    return TemplateCatalog::builtin();
}

ThemeReport make_theme_report(std::span<const RasterImage> images, const ColorParams& params,
                              const RefinedParams& refined) {
    ThemeReport report;
    report.refined = refined;
    report.base = extract_base_color(images, params);
    report.theme = adjust_theme_color(report.base.rgb, params);
    return report;
}

} // namespace

extern "C" {

const char* dg_version(void) { return "0.1.0"; }

void dg_string_free(char* s) { delete[] s; }

void dg_deck_free(dg_deck* deck) { delete deck; }

dg_status dg_deck_parse(const char* json_text, dg_deck** out, char** err_out) {
    if (!json_text || !out) {
        set_out(err_out, "json_text and out must be non-NULL");
        return DG_ERR_BAD_ARG;
    }
    return guarded(err_out, [&] { *out = new dg_deck{parse_deck(json_text)}; });
}

dg_status dg_deck_serialize(const dg_deck* deck, char** json_out, char** err_out) {
    if (!deck || !json_out) {
        set_out(err_out, "deck and json_out must be non-NULL");
        return DG_ERR_BAD_ARG;
    }
    return guarded(err_out, [&] { set_out(json_out, serialize_deck(deck->deck)); });
}

int dg_deck_slide_count(const dg_deck* deck) {
    return deck ? int(deck->deck.slides.size()) : 0;
}

void dg_gad_params_init(dg_gad_params* params) {
    if (!params) return;
    const GadParams d;
    *params = {d.a_min, d.tau, d.m_star, d.kappa, d.lambda1, d.lambda2};
}

double dg_fragmentation_reward(int m_eff, int m_star, double kappa) {
    return fragmentation_reward(m_eff, m_star, kappa);
}

double dg_occupancy_match(double rho, double tau) { return occupancy_match(rho, tau); }

double dg_slide_score(double om, double fr, double lambda1, double lambda2) {
    return slide_score(om, fr, lambda1, lambda2);
}

dg_status dg_score_deck(const dg_deck* deck, const dg_gad_params* params, char** report_json_out,
                        char** err_out) {
    if (!deck || !report_json_out) {
        set_out(err_out, "deck and report_json_out must be non-NULL");
        return DG_ERR_BAD_ARG;
    }
    return guarded(err_out, [&] {
        set_out(report_json_out, score_deck(deck->deck, gad_params_from_c(params)).to_json());
    });
}

dg_status dg_deck_features_csv(const dg_deck* deck, const char* deck_id, double a_min,
                               int include_header, char** csv_out, char** err_out) {
    if (!deck || !deck_id || !csv_out) {
        set_out(err_out, "deck, deck_id and csv_out must be non-NULL");
        return DG_ERR_BAD_ARG;
    }
    return guarded(err_out, [&] {
        std::string out;
        if (include_header) out += "deck_id,page_id,rho,m_eff\n";
        std::vector<Region> content;
        for (const Slide* slide : scorable_slides(deck->deck)) {
            content.clear();
            for (const Region& r : slide->regions)
                if (r.kind != RegionKind::title_bar) content.push_back(r);
            out += std::string(deck_id) + "," + std::to_string(slide->index) + "," +
                   fmt_num6(union_area(content)) + "," +
                   std::to_string(effective_region_count(slide->regions, a_min)) + "\n";
        }
        set_out(csv_out, out);
    });
}

dg_status dg_arrange(const char* outline_json, const char* manifest_json, const char* catalog_json,
                     dg_deck** out, char** err_out) {
    if (!outline_json || !manifest_json || !out) {
        set_out(err_out, "outline_json, manifest_json and out must be non-NULL");
        return DG_ERR_BAD_ARG;
    }
    return guarded(err_out, [&] {
        const TemplateCatalog catalog = catalog_or_builtin(catalog_json);
        const Outline outline = parse_outline(outline_json);
        const AssetManifest manifest = parse_manifest(manifest_json);
        *out = new dg_deck{arrange_deck(outline, manifest, catalog)};
    });
}

dg_status dg_consolidate(const dg_deck* deck, const char* catalog_json, dg_deck** out,
                         char** err_out) {
    if (!deck || !out) {
        set_out(err_out, "deck and out must be non-NULL");
        return DG_ERR_BAD_ARG;
    }
    return guarded(err_out, [&] {
        *out = new dg_deck{consolidate(deck->deck, catalog_or_builtin(catalog_json))};
    });
}

dg_status dg_default_catalog(char** json_out, char** err_out) {
    if (!json_out) {
        set_out(err_out, "json_out must be non-NULL");
        return DG_ERR_BAD_ARG;
    }
    return guarded(err_out, [&] { set_out(json_out, TemplateCatalog::builtin().to_json()); });
}

void dg_color_params_init(dg_color_params* params) {
    if (!params) return;
    const ColorParams d;
    params->sat_target = d.sat_target;
    params->sat_floor = d.sat_floor;
    params->sat_cap = d.sat_cap;
    params->sat_blend = d.sat_blend;
    params->target_v = d.target_v;
    params->v_cap = d.v_cap.value_or(0.0);
    params->v_cap_set = d.v_cap.has_value() ? 1 : 0;
    params->gamma = d.gamma;
    params->fallback_rgb = d.fallback.packed();
    params->gray_threshold = d.gray_threshold;
    params->alpha_threshold = d.alpha_threshold;
    params->bright_white = d.bright_white;
    params->dark_black = d.dark_black;
}

dg_status dg_adjust_rgb(uint32_t rgb, const dg_color_params* params, uint32_t* out, char** err_out) {
    if (!out) {
        set_out(err_out, "out must be non-NULL");
        return DG_ERR_BAD_ARG;
    }
    return guarded(err_out, [&] {
        const Rgb in{uint8_t(rgb >> 16), uint8_t(rgb >> 8), uint8_t(rgb)};
        *out = adjust_theme_color(in, color_params_from_c(params)).rgb.packed();
    });
}

dg_status dg_theme_from_images(const char* const* paths, size_t n_paths,
                               const dg_color_params* params, char** theme_json_out,
                               char** err_out) {
    if (!paths || !theme_json_out) {
        set_out(err_out, "paths and theme_json_out must be non-NULL");
        return DG_ERR_BAD_ARG;
    }
    return guarded(err_out, [&] {
        std::vector<RasterImage> images;
        images.reserve(n_paths);
        for (size_t i = 0; i < n_paths; ++i) images.push_back(decode_image_file(paths[i]));
        const ColorParams cp = color_params_from_c(params);
        RefinedParams refined;
        refined.params = cp;
        set_out(theme_json_out, make_theme_report(images, cp, refined).to_json());
    });
}

dg_status dg_theme_for_deck(const dg_deck* deck, const char* images_dir, const char* overrides_json,
                            const char* style_note, char** theme_json_out, uint32_t* theme_rgb_out,
                            char** err_out) {
    if (!deck || !theme_json_out) {
        set_out(err_out, "deck and theme_json_out must be non-NULL");
        return DG_ERR_BAD_ARG;
    }
    return guarded(err_out, [&] {
        RefinedParams refined =
            refine_parameters(ColorParams{}, overrides_from_json(overrides_json),
                              style_note ? style_note : "");

        // Only image assets feed the base color; tables are usually mostly
        // white and formulas are text.
        std::vector<std::string> names;
        for (const Slide& s : deck->deck.slides)
            for (const std::string& name : s.images) names.push_back(name);
        canonicalize_asset_set(names);

        // An unreadable asset degrades to a warning, mirroring the renderer's
        // placeholder behavior; with nothing decodable the fallback hue is
        // used and flagged.
        std::vector<RasterImage> images;
        for (const std::string& name : names) {
            std::string path =
                images_dir && *images_dir ? std::string(images_dir) + "/" + name : name;
            if (!looks_like_raster(path)) continue;
            try {
                images.push_back(decode_image_file(path));
            } catch (const Error& e) {
                if (e.code() != Errc::io) throw;
                refined.warnings.push_back(std::string("skipped asset: ") + e.what());
            }
        }
        const ThemeReport report = make_theme_report(images, refined.params, refined);
        if (theme_rgb_out) *theme_rgb_out = report.theme.rgb.packed();
        set_out(theme_json_out, report.to_json());
    });
}

void dg_render_options_init(dg_render_options* opts) {
    if (!opts) return;
    opts->width = 1280;
    opts->height = 720;
    opts->mode = DG_RENDER_FULL;
    opts->images_dir = nullptr;
    opts->theme_rgb = 0x2B5FA6;
}

dg_status dg_render_slide_svg(const dg_deck* deck, int slide_index, const dg_render_options* opts,
                              char** svg_out, char** warn_out, char** err_out) {
    if (!deck || !svg_out) {
        set_out(err_out, "deck and svg_out must be non-NULL");
        return DG_ERR_BAD_ARG;
    }
    if (warn_out) *warn_out = nullptr;
    return guarded(err_out, [&] {
        const Deck& d = deck->deck;
        if (slide_index < 1 || slide_index > int(d.slides.size()))
            throw Error(Errc::bad_arg, "slide index " + std::to_string(slide_index) +
                                           " outside 1.." + std::to_string(d.slides.size()));
        RenderOptions ro;
        if (opts) {
            ro.width = opts->width;
            ro.height = opts->height;
            ro.mode = opts->mode == DG_RENDER_BLOCKS ? RenderMode::blocks : RenderMode::full;
            if (opts->images_dir) ro.images_dir = opts->images_dir;
            ro.theme = {uint8_t(opts->theme_rgb >> 16), uint8_t(opts->theme_rgb >> 8),
                        uint8_t(opts->theme_rgb)};
        }
        ro.validate(d.aspect);
        const RenderedSlide rendered = render_slide_svg(d.slides[size_t(slide_index - 1)], ro);
        set_out(svg_out, rendered.svg);
        if (warn_out && !rendered.warnings.empty()) {
            std::string joined;
            for (const std::string& w : rendered.warnings) {
                if (!joined.empty()) joined += '\n';
                joined += w;
            }
            set_out(warn_out, joined);
        }
    });
}

void dg_grid_spec_init(dg_grid_spec* grid) {
    if (!grid) return;
    const GridSpec d;
    *grid = {d.m_min, d.m_max, d.kappa_min, d.kappa_max, d.kappa_step};
}

dg_status dg_calibrate(const char* ratings_csv, const char* features_csv, double tau, double a_min,
                       const dg_grid_spec* grid, int lodo, char** result_json_out, char** err_out) {
    if (!ratings_csv || !features_csv || !result_json_out) {
        set_out(err_out, "ratings_csv, features_csv and result_json_out must be non-NULL");
        return DG_ERR_BAD_ARG;
    }
    (void)a_min; // features carry rho/m_eff already; a_min applies upstream
    return guarded(err_out, [&] {
        GridSpec gs;
        if (grid) gs = {grid->m_min, grid->m_max, grid->kappa_min, grid->kappa_max, grid->kappa_step};
        const auto ratings = parse_ratings_csv(ratings_csv);
        const auto features = parse_features_csv(features_csv);
        const auto pages = build_rated_pages(ratings, features);
        if (lodo) {
            set_out(result_json_out, lodo_result_to_json(lodo_evaluate(pages, tau, gs)));
        } else {
            const CalibrationResult result = select_and_fit(pages, tau, gs);
            std::optional<std::pair<double, double>> lambdas;
            std::string note;
            try {
                lambdas = weights_from_coefficients(result.b1, result.b2);
            } catch (const Error& e) {
                note = e.what();
            }
            set_out(result_json_out, calibration_result_to_json(result, lambdas, note));
        }
    });
}

} // extern "C"
