#include "deck_model.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "json.hpp"
#include "json_text.hpp"

namespace deckgen {

namespace {

constexpr double kGeomSlack = 1e-9; // absorbs float noise on bound checks

using nlohmann::json;

[[noreturn]] void validation_error(int slide_index, const std::string& rule) {
    throw Error(Errc::validate, "slide " + std::to_string(slide_index) + ": " + rule);
}

const json* find(const json& obj, const char* key) {
    auto it = obj.find(key);
    return it == obj.end() || it->is_null() ? nullptr : &*it;
}

std::string require_string(const json& obj, const char* key, const std::string& where) {
    const json* v = find(obj, key);
    if (!v || !v->is_string())
        throw Error(Errc::parse, where + ": missing or non-string field \"" + key + "\"");
    return v->get<std::string>();
}

double require_number(const json& obj, const char* key, const std::string& where) {
    const json* v = find(obj, key);
    if (!v || !v->is_number())
        throw Error(Errc::parse, where + ": missing or non-numeric field \"" + key + "\"");
    return v->get<double>();
}

std::optional<std::string> optional_string(const json& obj, const char* key, const std::string& where) {
    const json* v = find(obj, key);
    if (!v) return std::nullopt;
    if (!v->is_string())
        throw Error(Errc::parse, where + ": field \"" + key + "\" must be a string");
    return v->get<std::string>();
}

std::vector<std::string> string_array(const json& obj, const char* key, const std::string& where) {
    const json* v = find(obj, key);
    if (!v) return {};
    if (!v->is_array())
        throw Error(Errc::parse, where + ": field \"" + key + "\" must be an array");
    std::vector<std::string> out;
    out.reserve(v->size());
    for (const auto& e : *v) {
        if (!e.is_string())
            throw Error(Errc::parse, where + ": \"" + key + "\" entries must be strings");
        out.push_back(e.get<std::string>());
    }
    return out;
}

Slide parse_slide(const json& js, size_t position) {
    const std::string where = "slide at position " + std::to_string(position + 1);
    Slide slide;
    const json* idx = find(js, "index");
    if (!idx || !idx->is_number_integer())
        throw Error(Errc::parse, where + ": missing or non-integer field \"index\"");
    slide.index = idx->get<int>();
    slide.role = slide_role_from_string(require_string(js, "role", where));
    slide.section = optional_string(js, "section", where);
    slide.subsection = optional_string(js, "subsection", where);
    slide.template_id = optional_string(js, "template", where);
    slide.notes = optional_string(js, "notes", where);

    if (const json* bullets = find(js, "bullets")) {
        if (!bullets->is_array())
            throw Error(Errc::parse, where + ": field \"bullets\" must be an array");
        for (const auto& bj : *bullets) {
            if (!bj.is_object())
                throw Error(Errc::parse, where + ": bullet entries must be objects");
            Bullet b;
            b.text = require_string(bj, "text", where);
            b.subs = string_array(bj, "subs", where);
            slide.bullets.push_back(std::move(b));
        }
    }
    if (const json* regions = find(js, "regions")) {
        if (!regions->is_array())
            throw Error(Errc::parse, where + ": field \"regions\" must be an array");
        for (const auto& rj : *regions) {
            if (!rj.is_object())
                throw Error(Errc::parse, where + ": region entries must be objects");
            Region r;
            r.kind = region_kind_from_string(require_string(rj, "kind", where));
            r.x = require_number(rj, "x", where);
            r.y = require_number(rj, "y", where);
            r.w = require_number(rj, "w", where);
            r.h = require_number(rj, "h", where);
            r.payload = optional_string(rj, "payload", where).value_or("");
            slide.regions.push_back(std::move(r));
        }
    }
    slide.images = string_array(js, "images", where);
    slide.tables = string_array(js, "tables", where);
    slide.formulas = string_array(js, "formulas", where);
    canonicalize_asset_set(slide.images);
    canonicalize_asset_set(slide.tables);
    canonicalize_asset_set(slide.formulas);
    return slide;
}

bool contains(const std::vector<std::string>& set, const std::string& name) {
    return std::binary_search(set.begin(), set.end(), name);
}

void validate_region(const Slide& slide, const Region& r, size_t region_pos) {
    const std::string tag = "region " + std::to_string(region_pos + 1) + " ";
    if (r.x < -kGeomSlack || r.y < -kGeomSlack)
        validation_error(slide.index, tag + "has a negative offset");
    if (r.w <= 0 || r.h <= 0)
        validation_error(slide.index, tag + "must have positive extent");
    if (r.x + r.w > 1.0 + kGeomSlack)
        validation_error(slide.index, tag + "violates x+w <= 1 (x+w = " + fmt_num6(r.x + r.w) + ")");
    if (r.y + r.h > 1.0 + kGeomSlack)
        validation_error(slide.index, tag + "violates y+h <= 1 (y+h = " + fmt_num6(r.y + r.h) + ")");

    switch (r.kind) {
    case RegionKind::image:
    case RegionKind::table:
    case RegionKind::formula: {
        if (r.payload.empty())
            validation_error(slide.index, tag + "of asset kind has an empty payload");
        const bool in_images = contains(slide.images, r.payload);
        const bool in_tables = contains(slide.tables, r.payload);
        const bool in_formulas = contains(slide.formulas, r.payload);
        const int hits = int(in_images) + int(in_tables) + int(in_formulas);
        if (hits != 1)
            validation_error(slide.index, tag + "payload \"" + r.payload +
                                              "\" must appear in exactly one asset set (found in " +
                                              std::to_string(hits) + ")");
        const bool matched = (r.kind == RegionKind::image && in_images) ||
                             (r.kind == RegionKind::table && in_tables) ||
                             (r.kind == RegionKind::formula && in_formulas);
        if (!matched)
            validation_error(slide.index, tag + "payload \"" + r.payload +
                                              "\" is listed under a different asset kind");
        break;
    }
    case RegionKind::title_bar:
    case RegionKind::text:
        break;
    }
}

bool is_structural_template(const std::string& id) {
    return id == "title" || id == "agenda" || id == "section" || id == "thanks";
}

void write_slide(std::string& out, const Slide& s) {
    out += "    {\n";
    out += "      \"index\": " + std::to_string(s.index) + ",\n";
    out += "      \"role\": " + json_quote(to_string(s.role)) + ",\n";
    if (s.section) out += "      \"section\": " + json_quote(*s.section) + ",\n";
    if (s.subsection) out += "      \"subsection\": " + json_quote(*s.subsection) + ",\n";
    if (s.template_id) out += "      \"template\": " + json_quote(*s.template_id) + ",\n";

    out += "      \"bullets\": [";
    for (size_t i = 0; i < s.bullets.size(); ++i) {
        out += i ? ",\n        " : "\n        ";
        out += "{ \"text\": " + json_quote(s.bullets[i].text) +
               ", \"subs\": " + inline_string_array(s.bullets[i].subs) + " }";
    }
    out += s.bullets.empty() ? "],\n" : "\n      ],\n";

    out += "      \"regions\": [";
    for (size_t i = 0; i < s.regions.size(); ++i) {
        const Region& r = s.regions[i];
        out += i ? ",\n        " : "\n        ";
        out += "{ \"kind\": " + json_quote(to_string(r.kind)) + ", \"x\": " + fmt_num6(r.x) +
               ", \"y\": " + fmt_num6(r.y) + ", \"w\": " + fmt_num6(r.w) + ", \"h\": " + fmt_num6(r.h) +
               ", \"payload\": " + json_quote(r.payload) + " }";
    }
    out += s.regions.empty() ? "],\n" : "\n      ],\n";

    out += "      \"images\": " + inline_string_array(s.images) + ",\n";
    out += "      \"tables\": " + inline_string_array(s.tables) + ",\n";
    out += "      \"formulas\": " + inline_string_array(s.formulas);
    if (s.notes) out += ",\n      \"notes\": " + json_quote(*s.notes);
    out += "\n    }";
}

} // namespace

const char* to_string(SlideRole role) {
    switch (role) {
    case SlideRole::title: return "title";
    case SlideRole::agenda: return "agenda";
    case SlideRole::content: return "content";
    case SlideRole::section: return "section";
    case SlideRole::thanks: return "thanks";
    }
    return "content";
}

const char* to_string(RegionKind kind) {
    switch (kind) {
    case RegionKind::title_bar: return "title_bar";
    case RegionKind::text: return "text";
    case RegionKind::image: return "image";
    case RegionKind::table: return "table";
    case RegionKind::formula: return "formula";
    }
    return "text";
}

SlideRole slide_role_from_string(std::string_view s) {
    if (s == "title") return SlideRole::title;
    if (s == "agenda") return SlideRole::agenda;
    if (s == "content") return SlideRole::content;
    if (s == "section") return SlideRole::section;
    if (s == "thanks") return SlideRole::thanks;
    throw Error(Errc::parse, "unknown slide role \"" + std::string(s) + "\"");
}

RegionKind region_kind_from_string(std::string_view s) {
    if (s == "title_bar") return RegionKind::title_bar;
    if (s == "text") return RegionKind::text;
    if (s == "image") return RegionKind::image;
    if (s == "table") return RegionKind::table;
    if (s == "formula") return RegionKind::formula;
    throw Error(Errc::parse, "unknown region kind \"" + std::string(s) + "\"");
}

void canonicalize_asset_set(std::vector<std::string>& names) {
    std::sort(names.begin(), names.end());
    names.erase(std::unique(names.begin(), names.end()), names.end());
}

Deck parse_deck(std::string_view json_text) {
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw Error(Errc::parse, "malformed document at byte " + std::to_string(e.byte) + ": " + e.what());
    }
    if (!doc.is_object())
        throw Error(Errc::parse, "top-level value must be an object");

    Deck deck;
    deck.title = require_string(doc, "title", "deck");
    deck.aspect = optional_string(doc, "aspect", "deck").value_or("16:9");
    const json* slides = find(doc, "slides");
    if (!slides || !slides->is_array())
        throw Error(Errc::parse, "deck: missing or non-array field \"slides\"");
    for (size_t i = 0; i < slides->size(); ++i) {
        if (!(*slides)[i].is_object())
            throw Error(Errc::parse, "slide at position " + std::to_string(i + 1) + " must be an object");
        deck.slides.push_back(parse_slide((*slides)[i], i));
    }
    validate_deck(deck);
    return deck;
}

void validate_deck(const Deck& deck) {
    const size_t n = deck.slides.size();
    if (n < 3)
        throw Error(Errc::validate, "deck must contain at least 3 slides (got " + std::to_string(n) + ")");
    for (size_t i = 0; i < n; ++i) {
        const Slide& s = deck.slides[i];
        if (s.index != int(i) + 1)
            validation_error(s.index, "indices must be 1-based and contiguous (expected " +
                                          std::to_string(i + 1) + ")");
    }
    if (deck.slides.front().role != SlideRole::title)
        validation_error(1, "first slide must have role title");
    if (deck.slides[1].role != SlideRole::agenda)
        validation_error(2, "second slide must have role agenda");
    if (deck.slides.back().role != SlideRole::thanks)
        validation_error(deck.slides.back().index, "last slide must have role thanks");
    for (size_t i = 2; i + 1 < n; ++i) {
        const Slide& s = deck.slides[i];
        if (s.role != SlideRole::content && s.role != SlideRole::section)
            validation_error(s.index, "interior slides must have role content or section");
    }

    for (const Slide& s : deck.slides) {
        if (s.role != SlideRole::content && s.template_id && !is_structural_template(*s.template_id))
            validation_error(s.index, "non-content slide uses non-structural template \"" +
                                          *s.template_id + "\"");
        for (size_t ri = 0; ri < s.regions.size(); ++ri)
            validate_region(s, s.regions[ri], ri);
    }
}

std::string serialize_deck(const Deck& deck) {
    std::string out;
    out.reserve(1024 + deck.slides.size() * 512);
    out += "{\n";
    out += "  \"title\": " + json_quote(deck.title) + ",\n";
    out += "  \"aspect\": " + json_quote(deck.aspect) + ",\n";
    out += "  \"slides\": [\n";
    for (size_t i = 0; i < deck.slides.size(); ++i) {
        write_slide(out, deck.slides[i]);
        out += i + 1 < deck.slides.size() ? ",\n" : "\n";
    }
    out += "  ]\n";
    out += "}\n";
    return out;
}

std::vector<const Slide*> scorable_slides(const Deck& deck) {
    std::vector<const Slide*> out;
    for (const Slide& s : deck.slides)
        if (s.role == SlideRole::content) out.push_back(&s);
    return out;
}

} // namespace deckgen
