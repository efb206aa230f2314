// deckgen command-line tool. Talks to the engine exclusively through the
// C API in deckgen/deckgen.h; this file only does argument parsing, file
// I/O, and stage sequencing.

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "deckgen/deckgen.h"

namespace fs = std::filesystem;

namespace {

struct StageError {
    std::string stage;
    std::string message;
};

[[noreturn]] void fail(const std::string& stage, const std::string& message) {
    throw StageError{stage, message};
}

std::string take_string(char* s) {
    if (!s) return {};
    std::string out = s;
    dg_string_free(s);
    return out;
}

void check(dg_status status, char* err, const std::string& stage) {
    if (status == DG_OK) {
        if (err) dg_string_free(err);
        return;
    }
    fail(stage, take_string(err));
}

std::string read_file(const std::string& path, const std::string& stage) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(stage, "cannot read " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_file(const fs::path& path, const std::string& content, const std::string& stage) {
    if (path.has_parent_path()) {
        std::error_code ec;
        fs::create_directories(path.parent_path(), ec);
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) fail(stage, "cannot write " + path.string());
    out << content;
    if (!out.good()) fail(stage, "short write to " + path.string());
}

struct DeckHandle {
    dg_deck* ptr = nullptr;
    ~DeckHandle() { dg_deck_free(ptr); }
    DeckHandle() = default;
    DeckHandle(const DeckHandle&) = delete;
    DeckHandle& operator=(const DeckHandle&) = delete;
};

uint32_t parse_hex_color(const std::string& hex, const std::string& stage) {
    std::string h = hex;
    if (!h.empty() && h[0] == '#') h = h.substr(1);
    if (h.size() != 6) fail(stage, "color must be #rrggbb: " + hex);
    uint32_t value = 0;
    for (char c : h) {
        int nibble;
        if (c >= '0' && c <= '9') nibble = c - '0';
        else if (c >= 'a' && c <= 'f') nibble = c - 'a' + 10;
        else if (c >= 'A' && c <= 'F') nibble = c - 'A' + 10;
        else fail(stage, "color must be #rrggbb: " + hex);
        value = value * 16 + uint32_t(nibble);
    }
    return value;
}

// ---- shared option bundles --------------------------------------------------

struct GadFlags {
    double tau = 0.55, a_min = 0.04, kappa = 6.3, lambda1 = 0.6;
    int m_star = 4;

    void attach(CLI::App* cmd) {
        cmd->add_option("--tau", tau, "target occupancy fraction");
        cmd->add_option("--a-min", a_min, "minimum region area counted toward m_eff");
        cmd->add_option("--m-star", m_star, "preferred effective region count");
        cmd->add_option("--kappa", kappa, "fragmentation reward width");
        cmd->add_option("--lambda1", lambda1, "occupancy weight (lambda2 = 1 - lambda1)");
    }
    dg_gad_params params() const {
        dg_gad_params p;
        dg_gad_params_init(&p);
        p.tau = tau;
        p.a_min = a_min;
        p.m_star = m_star;
        p.kappa = kappa;
        p.lambda1 = lambda1;
        p.lambda2 = 1.0 - lambda1;
        return p;
    }
};

struct ThemeFlags {
    std::map<std::string, double> numeric; // override name -> value
    std::string fallback;
    std::string style;

    void attach(CLI::App* cmd) {
        auto num = [&](const char* flag, const char* key, const char* help) {
            cmd->add_option_function<double>(
                flag, [this, key = std::string(key)](double v) { numeric[key] = v; }, help);
        };
        num("--sat-target", "sat_target", "saturation to push toward");
        num("--sat-floor", "sat_floor", "minimum saturation");
        num("--sat-cap", "sat_cap", "maximum saturation");
        num("--sat-blend", "sat_blend", "saturation blend strength");
        num("--target-v", "target_v", "brightness baseline for the dark theme");
        num("--v-cap", "v_cap", "brightness ceiling after darkening");
        num("--gamma", "gamma", "adaptive darkening strength");
        num("--gray-threshold", "gray_threshold", "saturation below which the hue is unstable");
        num("--alpha-threshold", "alpha_threshold", "near-transparent pixel cutoff");
        num("--bright-white", "bright_white", "near-white brightness cutoff");
        num("--dark-black", "dark_black", "near-black brightness cutoff");
        cmd->add_option("--fallback", fallback, "fallback hue color (#rrggbb)");
        cmd->add_option("--style", style, "style note recorded in the theme report");
    }
    std::string overrides_json() const {
        if (numeric.empty() && fallback.empty()) return {};
        std::string out = "{";
        bool first = true;
        for (const auto& [key, value] : numeric) {
            if (!first) out += ", ";
            first = false;
            char buf[64];
            std::snprintf(buf, sizeof(buf), "\"%s\": %.10g", key.c_str(), value);
            out += buf;
        }
        if (!fallback.empty()) {
            if (!first) out += ", ";
            out += "\"fallback\": \"" + fallback + "\"";
        }
        out += "}";
        return out;
    }
};

// ---- stage helpers ------------------------------------------------------------

void parse_deck_file(const std::string& path, DeckHandle& deck, const std::string& stage) {
    const std::string text = read_file(path, stage);
    char* err = nullptr;
    const dg_status st = dg_deck_parse(text.c_str(), &deck.ptr, &err);
    check(st, err, stage);
}

void run_arrange(const std::string& outline_path, const std::string& manifest_path,
                 const std::string& catalog_path, DeckHandle& deck) {
    const std::string stage = "arrange";
    const std::string outline = read_file(outline_path, stage);
    const std::string manifest = read_file(manifest_path, stage);
    std::string catalog;
    if (!catalog_path.empty()) catalog = read_file(catalog_path, stage);
    char* err = nullptr;
    const dg_status st = dg_arrange(outline.c_str(), manifest.c_str(),
                                    catalog.empty() ? nullptr : catalog.c_str(), &deck.ptr, &err);
    check(st, err, stage);
}

void write_deck(const DeckHandle& deck, const fs::path& out_path, const std::string& stage) {
    char* json = nullptr;
    char* err = nullptr;
    const dg_status st = dg_deck_serialize(deck.ptr, &json, &err);
    check(st, err, stage);
    write_file(out_path, take_string(json), stage);
}

std::string run_score(const DeckHandle& deck, const GadFlags& flags) {
    const std::string stage = "score";
    char* report = nullptr;
    char* err = nullptr;
    const dg_gad_params params = flags.params();
    const dg_status st = dg_score_deck(deck.ptr, &params, &report, &err);
    check(st, err, stage);
    return take_string(report);
}

std::string run_theme(const DeckHandle& deck, const std::string& images_dir, const ThemeFlags& flags,
                      uint32_t* theme_rgb) {
    const std::string stage = "theme";
    const std::string overrides = flags.overrides_json();
    char* report = nullptr;
    char* err = nullptr;
    const dg_status st = dg_theme_for_deck(
        deck.ptr, images_dir.empty() ? nullptr : images_dir.c_str(),
        overrides.empty() ? nullptr : overrides.c_str(),
        flags.style.empty() ? nullptr : flags.style.c_str(), &report, theme_rgb, &err);
    check(st, err, stage);
    return take_string(report);
}

void run_render(const DeckHandle& deck, const fs::path& out_dir, const std::string& mode,
                double width, double height, const std::string& images_dir, uint32_t theme_rgb) {
    const std::string stage = "render";
    dg_render_options opts;
    dg_render_options_init(&opts);
    opts.width = width;
    opts.height = height;
    opts.mode = mode == "blocks" ? DG_RENDER_BLOCKS : DG_RENDER_FULL;
    opts.images_dir = images_dir.empty() ? nullptr : images_dir.c_str();
    opts.theme_rgb = theme_rgb;

    const int count = dg_deck_slide_count(deck.ptr);
    for (int index = 1; index <= count; ++index) {
        char* svg = nullptr;
        char* warn = nullptr;
        char* err = nullptr;
        const dg_status st = dg_render_slide_svg(deck.ptr, index, &opts, &svg, &warn, &err);
        check(st, err, stage);
        if (warn) std::cerr << "warning [render]: " << take_string(warn) << "\n";
        write_file(out_dir / "slides" / ("slide_" + std::to_string(index) + ".svg"),
                   take_string(svg), stage);
    }
}

std::string features_from_arg(const std::string& features_arg, double a_min) {
    const std::string stage = "calibrate";
    if (!fs::is_directory(features_arg)) return read_file(features_arg, stage);

    // A directory of deck files: compute per-page features, deck id = stem.
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(features_arg))
        if (entry.is_regular_file() && entry.path().extension() == ".json")
            files.push_back(entry.path());
    std::sort(files.begin(), files.end());
    if (files.empty()) fail(stage, "no .json deck files in " + features_arg);

    std::string csv;
    bool first = true;
    for (const fs::path& file : files) {
        DeckHandle deck;
        parse_deck_file(file.string(), deck, stage);
        char* rows = nullptr;
        char* err = nullptr;
        const dg_status st = dg_deck_features_csv(deck.ptr, file.stem().string().c_str(), a_min,
                                                  first ? 1 : 0, &rows, &err);
        check(st, err, stage);
        csv += take_string(rows);
        first = false;
    }
    return csv;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"deckgen: deterministic slide composition and layout-quality toolkit"};
    app.require_subcommand(1);

    std::string out_dir = "out";
    app.add_option("--out", out_dir, "output directory")->capture_default_str();

    // arrange
    auto* arrange = app.add_subcommand("arrange", "build a deck from an outline and asset manifest");
    std::string outline_path, manifest_path, catalog_path;
    arrange->add_option("--outline", outline_path, "outline JSON")->required();
    arrange->add_option("--manifest", manifest_path, "asset manifest JSON")->required();
    arrange->add_option("--catalog", catalog_path, "template catalog JSON (default: built-in)");

    // refine
    auto* refine = app.add_subcommand("refine", "merge consecutive text-only slides");
    std::string deck_path;
    refine->add_option("--deck", deck_path, "deck JSON file")->required();

    // theme
    auto* theme = app.add_subcommand("theme", "derive the deck theme color from its images");
    std::string theme_deck, images_dir;
    ThemeFlags theme_flags;
    theme->add_option("--deck", theme_deck, "deck JSON file")->required();
    theme->add_option("--images", images_dir, "directory holding the image assets");
    theme_flags.attach(theme);

    // score
    auto* score = app.add_subcommand("score", "compute the geometry-aware density report");
    std::string score_deck_path;
    GadFlags score_flags;
    score->add_option("--deck", score_deck_path, "deck JSON file")->required();
    score_flags.attach(score);

    // calibrate
    auto* calibrate = app.add_subcommand("calibrate", "fit the affine human-scale mapping");
    std::string ratings_path, features_arg;
    bool lodo = false;
    dg_grid_spec grid;
    dg_grid_spec_init(&grid);
    double calib_tau = 0.55, calib_a_min = 0.04;
    calibrate->add_option("--ratings", ratings_path, "ratings CSV (rater_id,deck_id,page_id,score)")
        ->required();
    calibrate->add_option("--features", features_arg, "features CSV or a directory of deck files")
        ->required();
    calibrate->add_option("--tau", calib_tau, "target occupancy fraction");
    calibrate->add_option("--a-min", calib_a_min, "area gate for deck-derived features");
    calibrate->add_option("--m-min", grid.m_min, "grid lower bound for m_star");
    calibrate->add_option("--m-max", grid.m_max, "grid upper bound for m_star");
    calibrate->add_option("--kappa-min", grid.kappa_min, "grid lower bound for kappa");
    calibrate->add_option("--kappa-max", grid.kappa_max, "grid upper bound for kappa");
    calibrate->add_option("--kappa-step", grid.kappa_step, "grid step for kappa");
    calibrate->add_flag("--lodo", lodo, "leave-one-deck-out cross-validation");

    // render
    auto* render = app.add_subcommand("render", "render slides to SVG");
    std::string render_deck_path, render_mode = "full", render_images, render_theme_hex;
    double render_width = 1280, render_height = 720;
    render->add_option("--deck", render_deck_path, "deck JSON file")->required();
    render->add_option("--mode", render_mode, "full or blocks")
        ->check(CLI::IsMember({"full", "blocks"}));
    render->add_option("--width", render_width, "page width in output units");
    render->add_option("--height", render_height, "page height in output units");
    render->add_option("--images", render_images, "directory holding the image assets");
    render->add_option("--theme", render_theme_hex, "accent color (#rrggbb) for full mode");

    // pipeline
    auto* pipeline = app.add_subcommand("pipeline", "arrange, refine, theme, score, and render");
    std::string pl_outline, pl_manifest, pl_catalog, pl_images, pl_mode = "full";
    double pl_width = 1280, pl_height = 720;
    GadFlags pl_gad;
    ThemeFlags pl_theme;
    pipeline->add_option("--outline", pl_outline, "outline JSON")->required();
    pipeline->add_option("--manifest", pl_manifest, "asset manifest JSON")->required();
    pipeline->add_option("--catalog", pl_catalog, "template catalog JSON (default: built-in)");
    pipeline->add_option("--images", pl_images, "directory holding the image assets");
    pipeline->add_option("--mode", pl_mode, "render mode: full or blocks")
        ->check(CLI::IsMember({"full", "blocks"}));
    pipeline->add_option("--width", pl_width, "page width in output units");
    pipeline->add_option("--height", pl_height, "page height in output units");
    pl_gad.attach(pipeline);
    pl_theme.attach(pipeline);

    for (CLI::App* sub : app.get_subcommands(nullptr)) sub->fallthrough();

    CLI11_PARSE(app, argc, argv);

    try {
        const fs::path out(out_dir);

        if (arrange->parsed()) {
            DeckHandle deck;
            run_arrange(outline_path, manifest_path, catalog_path, deck);
            write_deck(deck, out / "deck.json", "arrange");
        } else if (refine->parsed()) {
            DeckHandle deck;
            parse_deck_file(deck_path, deck, "refine");
            DeckHandle refined;
            char* err = nullptr;
            const dg_status st = dg_consolidate(deck.ptr, nullptr, &refined.ptr, &err);
            check(st, err, "refine");
            write_deck(refined, out / "deck.json", "refine");
        } else if (theme->parsed()) {
            DeckHandle deck;
            parse_deck_file(theme_deck, deck, "theme");
            const std::string report = run_theme(deck, images_dir, theme_flags, nullptr);
            write_file(out / "theme.json", report, "theme");
        } else if (score->parsed()) {
            DeckHandle deck;
            parse_deck_file(score_deck_path, deck, "score");
            write_file(out / "gad_report.json", run_score(deck, score_flags), "score");
        } else if (calibrate->parsed()) {
            const std::string ratings = read_file(ratings_path, "calibrate");
            const std::string features = features_from_arg(features_arg, calib_a_min);
            char* result = nullptr;
            char* err = nullptr;
            const dg_status st = dg_calibrate(ratings.c_str(), features.c_str(), calib_tau,
                                              calib_a_min, &grid, lodo ? 1 : 0, &result, &err);
            check(st, err, "calibrate");
            write_file(out / "calibration.json", take_string(result), "calibrate");
        } else if (render->parsed()) {
            DeckHandle deck;
            parse_deck_file(render_deck_path, deck, "render");
            uint32_t theme_rgb = 0x2B5FA6;
            if (!render_theme_hex.empty()) theme_rgb = parse_hex_color(render_theme_hex, "render");
            run_render(deck, out, render_mode, render_width, render_height, render_images,
                       theme_rgb);
        } else if (pipeline->parsed()) {
            DeckHandle arranged;
            run_arrange(pl_outline, pl_manifest, pl_catalog, arranged);
            write_deck(arranged, out / "deck.json", "arrange");

            DeckHandle refined;
            char* err = nullptr;
            const dg_status st = dg_consolidate(arranged.ptr, nullptr, &refined.ptr, &err);
            check(st, err, "refine");
            write_deck(refined, out / "deck.json", "refine");

            uint32_t theme_rgb = 0x2B5FA6;
            const std::string theme_report = run_theme(refined, pl_images, pl_theme, &theme_rgb);
            write_file(out / "theme.json", theme_report, "theme");

            write_file(out / "gad_report.json", run_score(refined, pl_gad), "score");

            run_render(refined, out, pl_mode, pl_width, pl_height, pl_images, theme_rgb);
        }
    } catch (const StageError& e) {
        std::cerr << "error [" << e.stage << "]: " << e.message << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
