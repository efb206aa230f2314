#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "deck_model.hpp"

namespace deckgen {

enum class AspectClass { tall_square, moderate, wide };

const char* to_string(AspectClass a);

/// ratio = width/height; <= 1.0 is tall-square, >= 1.6 is wide.
AspectClass classify_aspect(double width, double height);

struct TemplateRegion {
    RegionKind kind = RegionKind::text;
    double x = 0, y = 0, w = 0, h = 0;
};

struct TemplateSpec {
    std::string id;
    bool structural = false;
    std::vector<TemplateRegion> regions;

    int visual_slots() const;  // image regions (accept images or tables)
    int formula_slots() const;
    int text_slots() const;
    bool accepts_text() const { return text_slots() > 0; }
};

/// The shipped layout library: 19 content layouts plus the structural
/// title/agenda/section/thanks pages. Geometry is normalized to the unit
/// square on a 16:9 canvas with a 5% outer margin.
class TemplateCatalog {
public:
    static TemplateCatalog builtin();
    static TemplateCatalog from_json(std::string_view json_text);

    std::string to_json() const;

    const TemplateSpec& get(const std::string& id) const;
    bool contains(const std::string& id) const;
    const std::vector<TemplateSpec>& all() const { return specs_; }
    std::vector<const TemplateSpec*> content_templates() const;

private:
    void add(TemplateSpec spec);
    void validate() const;

    std::vector<TemplateSpec> specs_;
    std::map<std::string, size_t> index_;
};

struct ContentSignature {
    int n_images = 0;
    int n_tables = 0;
    int n_formulas = 0;
    int n_bullets = 0;
    std::optional<AspectClass> dominant_aspect; // largest visual by pixel area

    int visuals() const { return n_images + n_tables; }
};

struct VisualAsset {
    std::string name;
    RegionKind kind = RegionKind::image; // image or table
    double width = 0, height = 0;        // pixel dimensions from the manifest
};

struct SlideContent {
    std::string heading; // title-bar text
    std::vector<Bullet> bullets;
    std::vector<VisualAsset> visuals; // reading order; images first, then tables
    std::vector<std::string> formulas;
    std::optional<std::string> notes;
};

ContentSignature signature_of(const SlideContent& content);

/// Deterministic rule table over the signature. content_ordinal is the
/// 1-based position among the deck's content slides; mirror pairs alternate
/// on its parity and the 2x2 family rotates on ordinal mod 3. Throws
/// Error{overflow} for signatures no rule accepts (use split_overflow).
std::string select_template(const ContentSignature& sig, int content_ordinal);

/// Binds content into the template's regions in reading order. The slide
/// carries the template id; visual regions take the concrete kind of the
/// asset bound into them. Throws Error{arity} on a slot-count mismatch.
Slide instantiate(const TemplateCatalog& catalog, const std::string& template_id,
                  const SlideContent& content);

/// Splits content no single template accepts: visuals are chunked greedily
/// (4, then 3/2 so no chunk of 1 is left behind), formulas at most 2 per
/// shard, bullets attach to the earliest shard whose layout has a text slot
/// (a trailing text-only shard is added when none has). Shard i selects its
/// template at ordinal base_ordinal + i.
std::vector<std::pair<std::string, SlideContent>> split_overflow(const SlideContent& content,
                                                                 int base_ordinal);

// ---- outline-driven arrangement --------------------------------------------

struct OutlineSlide {
    std::optional<std::string> subsection;
    std::vector<Bullet> bullets;
    std::vector<std::string> images;
    std::vector<std::string> tables;
    std::vector<std::string> formulas;
    std::optional<std::string> notes;
};

struct OutlineSection {
    std::string name;
    std::vector<OutlineSlide> slides;
};

struct Outline {
    std::string title;
    std::optional<std::string> subtitle;
    std::vector<OutlineSection> sections;
};

struct AssetInfo {
    RegionKind kind = RegionKind::image;
    double width = 0, height = 0;
};

using AssetManifest = std::map<std::string, AssetInfo>;

Outline parse_outline(std::string_view json_text);
AssetManifest parse_manifest(std::string_view json_text);

/// Builds a full deck from the outline: title and agenda pages, a divider
/// per section ("PART 01" ...), content slides through the selection rules
/// (splitting overflow), and a closing thanks page.
Deck arrange_deck(const Outline& outline, const AssetManifest& manifest,
                  const TemplateCatalog& catalog);

/// Plain-text rendering of bullets for text-region payloads.
std::string bullets_to_text(std::span<const Bullet> bullets);

} // namespace deckgen
