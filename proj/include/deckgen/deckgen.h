/* deckgen — deterministic slide composition and layout-quality engine.
 *
 * C API over the C++ core: opaque handles, integer status codes, and
 * caller-freed strings. Every function that can fail returns dg_status and,
 * when err_out is non-NULL, stores a message the caller releases with
 * dg_string_free(). Handles are created by the library and released with
 * their matching *_free(). All functions are thread-safe on distinct
 * handles; a dg_deck is immutable once created.
 */
#ifndef DECKGEN_H
#define DECKGEN_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum dg_status {
    DG_OK = 0,
    DG_ERR_PARSE = 1,    /* malformed input document */
    DG_ERR_VALIDATE = 2, /* invariant violation (message names slide and rule) */
    DG_ERR_ARITY = 3,    /* content does not fit the template's slots */
    DG_ERR_OVERFLOW = 4, /* signature outside every selection rule */
    DG_ERR_SINGULAR = 5, /* rank-deficient fit / calibration failed */
    DG_ERR_STATS = 6,    /* undefined statistic (constant vector) */
    DG_ERR_WEIGHTS = 7,  /* weight derivation from unusable coefficients */
    DG_ERR_IO = 8,       /* file read or decode failure */
    DG_ERR_EMPTY = 9,    /* empty input where content is required */
    DG_ERR_BAD_ARG = 10, /* invalid argument */
    DG_ERR_INTERNAL = 11
} dg_status;

typedef struct dg_deck dg_deck; /* opaque, immutable deck handle */

const char* dg_version(void);

/* Releases a string returned through any char** out-parameter. */
void dg_string_free(char* s);
void dg_deck_free(dg_deck* deck);

/* ---- deck model --------------------------------------------------------- */

/* Parses and validates a UTF-8 JSON deck document. */
dg_status dg_deck_parse(const char* json_text, dg_deck** out, char** err_out);

/* Canonical serialization: equal decks produce identical bytes. */
dg_status dg_deck_serialize(const dg_deck* deck, char** json_out, char** err_out);

int dg_deck_slide_count(const dg_deck* deck);

/* ---- geometry metrics --------------------------------------------------- */

typedef struct dg_gad_params {
    double a_min;   /* minimum region area counted toward m_eff (default 0.04) */
    double tau;     /* target occupancy (default 0.55) */
    int m_star;     /* preferred region count (default 4) */
    double kappa;   /* fragmentation-reward width (default 6.3) */
    double lambda1; /* occupancy weight (default 0.6) */
    double lambda2; /* fragmentation weight (default 0.4) */
} dg_gad_params;

void dg_gad_params_init(dg_gad_params* params);

double dg_fragmentation_reward(int m_eff, int m_star, double kappa);
double dg_occupancy_match(double rho, double tau);
double dg_slide_score(double om, double fr, double lambda1, double lambda2);

/* Scores all content slides; report_json_out receives the GAD report. */
dg_status dg_score_deck(const dg_deck* deck, const dg_gad_params* params, char** report_json_out,
                        char** err_out);

/* Per-page feature rows "deck_id,page_id,rho,m_eff" for the deck's content
 * slides (page_id is the slide index). Prepends the header when asked. */
dg_status dg_deck_features_csv(const dg_deck* deck, const char* deck_id, double a_min,
                               int include_header, char** csv_out, char** err_out);

/* ---- arrangement and refinement ----------------------------------------- */

/* Builds a deck from an outline JSON plus an asset manifest JSON, using the
 * built-in template catalog unless catalog_json is non-NULL. */
dg_status dg_arrange(const char* outline_json, const char* manifest_json, const char* catalog_json,
                     dg_deck** out, char** err_out);

/* Merges consecutive text-only content slides pairwise into T19_2Text. */
dg_status dg_consolidate(const dg_deck* deck, const char* catalog_json, dg_deck** out,
                         char** err_out);

/* The embedded template catalog as JSON. */
dg_status dg_default_catalog(char** json_out, char** err_out);

/* ---- theme color --------------------------------------------------------- */

typedef struct dg_color_params {
    double sat_target;
    double sat_floor;
    double sat_cap;
    double sat_blend;
    double target_v;
    double v_cap;  /* used only when v_cap_set != 0 */
    int v_cap_set;
    double gamma;
    uint32_t fallback_rgb; /* 0xRRGGBB */
    double gray_threshold;
    double alpha_threshold;
    double bright_white;
    double dark_black;
} dg_color_params;

void dg_color_params_init(dg_color_params* params);

/* Fixed-hue HSV movement applied to one 24-bit color. */
dg_status dg_adjust_rgb(uint32_t rgb, const dg_color_params* params, uint32_t* out, char** err_out);

/* Base-color extraction over explicit raster files plus the HSV adjustment.
 * theme_json_out receives the full theme report. */
dg_status dg_theme_from_images(const char* const* paths, size_t n_paths,
                               const dg_color_params* params, char** theme_json_out,
                               char** err_out);

/* Theme for a deck: decodes the deck's image assets from images_dir,
 * applies overrides_json (field -> number, clamped to safe ranges) on top of
 * the defaults, and records style_note verbatim. theme_rgb_out (optional)
 * receives the packed theme color. */
dg_status dg_theme_for_deck(const dg_deck* deck, const char* images_dir, const char* overrides_json,
                            const char* style_note, char** theme_json_out, uint32_t* theme_rgb_out,
                            char** err_out);

/* ---- rendering ----------------------------------------------------------- */

typedef enum dg_render_mode { DG_RENDER_FULL = 0, DG_RENDER_BLOCKS = 1 } dg_render_mode;

typedef struct dg_render_options {
    double width;
    double height;
    int mode;               /* dg_render_mode */
    const char* images_dir; /* may be NULL */
    uint32_t theme_rgb;     /* accent color in full mode, 0xRRGGBB */
} dg_render_options;

void dg_render_options_init(dg_render_options* opts);

/* Renders one slide (1-based index) to a standalone SVG document. Warnings
 * (missing assets) are joined by newlines into warn_out when non-NULL; they
 * do not affect the status. */
dg_status dg_render_slide_svg(const dg_deck* deck, int slide_index, const dg_render_options* opts,
                              char** svg_out, char** warn_out, char** err_out);

/* ---- calibration ---------------------------------------------------------- */

typedef struct dg_grid_spec {
    int m_min;
    int m_max;
    double kappa_min;
    double kappa_max;
    double kappa_step;
} dg_grid_spec;

void dg_grid_spec_init(dg_grid_spec* grid);

/* Fits the affine human-scale map on ratings + features CSV text. With
 * lodo != 0 runs leave-one-deck-out cross-validation; otherwise fits the
 * pooled data once. result_json_out receives the calibration report. */
dg_status dg_calibrate(const char* ratings_csv, const char* features_csv, double tau, double a_min,
                       const dg_grid_spec* grid, int lodo, char** result_json_out, char** err_out);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* DECKGEN_H */
