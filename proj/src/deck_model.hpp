#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "error.hpp"

namespace deckgen {

enum class SlideRole { title, agenda, content, section, thanks };
enum class RegionKind { title_bar, text, image, table, formula };

const char* to_string(SlideRole role);
const char* to_string(RegionKind kind);
SlideRole slide_role_from_string(std::string_view s);
RegionKind region_kind_from_string(std::string_view s);

/// One positioned content box in normalized page coordinates, origin top-left.
struct Region {
    RegionKind kind = RegionKind::text;
    double x = 0, y = 0, w = 0, h = 0;
    std::string payload; // asset name for image/table/formula, text body otherwise

    double area() const { return w * h; }

    bool operator==(const Region&) const = default;
};

struct Bullet {
    std::string text;
    std::vector<std::string> subs;

    bool operator==(const Bullet&) const = default;
};

struct Slide {
    int index = 0;
    SlideRole role = SlideRole::content;
    std::optional<std::string> section;
    std::optional<std::string> subsection;
    std::optional<std::string> template_id;
    std::vector<Bullet> bullets;
    std::vector<Region> regions;
    // Asset name sets, kept sorted and unique so equal slides serialize identically.
    std::vector<std::string> images;
    std::vector<std::string> tables;
    std::vector<std::string> formulas;
    std::optional<std::string> notes;

    bool has_assets() const { return !images.empty() || !tables.empty() || !formulas.empty(); }

    bool operator==(const Slide&) const = default;
};

struct Deck {
    std::string title;
    std::string aspect = "16:9";
    std::vector<Slide> slides;

    bool operator==(const Deck&) const = default;
};

/// Parses a UTF-8 JSON deck document and validates every deck invariant.
/// Throws Error{parse} with a byte offset for malformed JSON and
/// Error{validate} naming the slide and rule for invariant violations.
Deck parse_deck(std::string_view json_text);

/// Canonical serialization: fixed key order, coordinates at 6 decimal places,
/// asset sets sorted. Equal decks serialize to identical bytes.
std::string serialize_deck(const Deck& deck);

/// Throws Error{validate} if any deck or slide invariant is violated.
void validate_deck(const Deck& deck);

/// The slides GAD scores: role == content, in deck order. Title, agenda,
/// thanks, and section-divider slides are excluded.
std::vector<const Slide*> scorable_slides(const Deck& deck);

/// Sorts and dedupes an asset name list in place (canonical set form).
void canonicalize_asset_set(std::vector<std::string>& names);

} // namespace deckgen
