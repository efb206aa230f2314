#include "template_engine.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <deque>

#include "json.hpp"
#include "json_text.hpp"

namespace deckgen {

namespace {

using nlohmann::json;

constexpr double kTitleBarY = 0.05, kTitleBarH = 0.12;
constexpr double kBodyY = 0.21, kBodyBottom = 0.95, kBodyH = kBodyBottom - kBodyY;
constexpr double kMargin = 0.05, kBodyW = 0.90;
constexpr double kHalfW = 0.44, kRightX = 0.51; // split at 0.5 with a 2% gutter
constexpr double kFormulaH = 0.14;
constexpr double kThirdW = 0.286; // three across with 0.021 gutters

TemplateRegion tr(RegionKind kind, double x, double y, double w, double h) {
    return {kind, x, y, w, h};
}

TemplateRegion title_bar() { return tr(RegionKind::title_bar, kMargin, kTitleBarY, kBodyW, kTitleBarH); }

double intersection_area(const TemplateRegion& a, const TemplateRegion& b) {
    const double w = std::min(a.x + a.w, b.x + b.w) - std::max(a.x, b.x);
    const double h = std::min(a.y + a.h, b.y + b.h) - std::max(a.y, b.y);
    return w > 0 && h > 0 ? w * h : 0.0;
}

const char* aspect_names[] = {"tall_square", "moderate", "wide"};

} // namespace

const char* to_string(AspectClass a) { return aspect_names[int(a)]; }

AspectClass classify_aspect(double width, double height) {
    if (!(width > 0) || !(height > 0))
        throw Error(Errc::bad_arg, "aspect classification requires positive dimensions");
    const double ratio = width / height;
    if (ratio <= 1.0) return AspectClass::tall_square;
    if (ratio >= 1.6) return AspectClass::wide;
    return AspectClass::moderate;
}

int TemplateSpec::visual_slots() const {
    int n = 0;
    for (const TemplateRegion& r : regions)
        if (r.kind == RegionKind::image || r.kind == RegionKind::table) ++n;
    return n;
}

int TemplateSpec::formula_slots() const {
    int n = 0;
    for (const TemplateRegion& r : regions)
        if (r.kind == RegionKind::formula) ++n;
    return n;
}

int TemplateSpec::text_slots() const {
    int n = 0;
    for (const TemplateRegion& r : regions)
        if (r.kind == RegionKind::text) ++n;
    return n;
}

void TemplateCatalog::add(TemplateSpec spec) {
    if (index_.count(spec.id))
        throw Error(Errc::validate, "duplicate template id \"" + spec.id + "\"");
    index_[spec.id] = specs_.size();
    specs_.push_back(std::move(spec));
}

const TemplateSpec& TemplateCatalog::get(const std::string& id) const {
    auto it = index_.find(id);
    if (it == index_.end()) throw Error(Errc::bad_arg, "unknown template id \"" + id + "\"");
    return specs_[it->second];
}

bool TemplateCatalog::contains(const std::string& id) const { return index_.count(id) != 0; }

std::vector<const TemplateSpec*> TemplateCatalog::content_templates() const {
    std::vector<const TemplateSpec*> out;
    for (const TemplateSpec& s : specs_)
        if (!s.structural) out.push_back(&s);
    return out;
}

void TemplateCatalog::validate() const {
    for (const TemplateSpec& spec : specs_) {
        int bars = 0;
        for (const TemplateRegion& r : spec.regions) {
            if (r.x < 0 || r.y < 0 || r.w <= 0 || r.h <= 0 || r.x + r.w > 1 + 1e-9 ||
                r.y + r.h > 1 + 1e-9)
                throw Error(Errc::validate, "template " + spec.id + ": region outside the unit square");
            if (r.kind == RegionKind::title_bar) ++bars;
        }
        for (size_t i = 0; i < spec.regions.size(); ++i)
            for (size_t j = i + 1; j < spec.regions.size(); ++j)
                if (intersection_area(spec.regions[i], spec.regions[j]) > 1e-12)
                    throw Error(Errc::validate, "template " + spec.id + ": overlapping regions");
        if (!spec.structural && bars != 1)
            throw Error(Errc::validate,
                        "template " + spec.id + ": content templates need exactly one title bar");
    }
}

TemplateCatalog TemplateCatalog::builtin() {
    TemplateCatalog cat;
    const auto I = RegionKind::image;
    const auto T = RegionKind::text;
    const auto F = RegionKind::formula;

    auto content = [&](const char* id, std::vector<TemplateRegion> body) {
        TemplateSpec spec;
        spec.id = id;
        spec.regions.push_back(title_bar());
        for (auto& r : body) spec.regions.push_back(r);
        cat.add(std::move(spec));
    };
    auto structural = [&](const char* id, std::vector<TemplateRegion> regions) {
        TemplateSpec spec;
        spec.id = id;
        spec.structural = true;
        spec.regions = std::move(regions);
        cat.add(std::move(spec));
    };

    structural("title", {tr(T, 0.10, 0.38, 0.80, 0.16), tr(T, 0.10, 0.58, 0.80, 0.08)});
    structural("agenda", {title_bar(), tr(T, kMargin, kBodyY, kBodyW, kBodyH)});
    structural("section", {tr(T, 0.10, 0.36, 0.80, 0.14), tr(T, 0.10, 0.54, 0.80, 0.12)});
    structural("thanks", {tr(T, 0.10, 0.42, 0.80, 0.16)});

    content("T1_TextOnly", {tr(T, kMargin, kBodyY, kBodyW, kBodyH)});
    content("T2_ImageRight",
            {tr(T, kMargin, kBodyY, kHalfW, kBodyH), tr(I, kRightX, kBodyY, kHalfW, kBodyH)});
    content("T3_ImageLeft",
            {tr(I, kMargin, kBodyY, kHalfW, kBodyH), tr(T, kRightX, kBodyY, kHalfW, kBodyH)});
    content("T4_ImageTop",
            {tr(I, kMargin, kBodyY, kBodyW, 0.40), tr(T, kMargin, 0.63, kBodyW, 0.32)});
    content("T5_TwoImages",
            {tr(I, kMargin, kBodyY, kHalfW, kBodyH), tr(I, kRightX, kBodyY, kHalfW, kBodyH)});
    content("T5_TwoImages2", {tr(I, kMargin, kBodyY, kHalfW, 0.40), tr(I, kRightX, kBodyY, kHalfW, 0.40),
                              tr(T, kMargin, 0.63, kBodyW, 0.32)});
    content("T7_2x2_TopImage", {tr(I, kMargin, kBodyY, kHalfW, 0.36), tr(I, kRightX, kBodyY, kHalfW, 0.36),
                                tr(T, kMargin, 0.59, kHalfW, 0.36), tr(T, kRightX, 0.59, kHalfW, 0.36)});
    content("T8_2x2_BottomImage",
            {tr(T, kMargin, kBodyY, kHalfW, 0.36), tr(T, kRightX, kBodyY, kHalfW, 0.36),
             tr(I, kMargin, 0.59, kHalfW, 0.36), tr(I, kRightX, 0.59, kHalfW, 0.36)});
    content("T9_2x2_AltTextImg",
            {tr(I, kMargin, kBodyY, kHalfW, 0.36), tr(T, kRightX, kBodyY, kHalfW, 0.36),
             tr(T, kMargin, 0.59, kHalfW, 0.36), tr(I, kRightX, 0.59, kHalfW, 0.36)});
    content("T10_4Img_2x2Grid",
            {tr(I, kMargin, kBodyY, kHalfW, 0.36), tr(I, kRightX, kBodyY, kHalfW, 0.36),
             tr(I, kMargin, 0.59, kHalfW, 0.36), tr(I, kRightX, 0.59, kHalfW, 0.36)});
    content("T11_3Img_TopTextBottom",
            {tr(I, 0.05, kBodyY, kThirdW, 0.40), tr(I, 0.357, kBodyY, kThirdW, 0.40),
             tr(I, 0.664, kBodyY, kThirdW, 0.40), tr(T, kMargin, 0.63, kBodyW, 0.32)});
    content("T12_3Img_BottomTextTop",
            {tr(T, kMargin, kBodyY, kBodyW, 0.32), tr(I, 0.05, 0.55, kThirdW, 0.40),
             tr(I, 0.357, 0.55, kThirdW, 0.40), tr(I, 0.664, 0.55, kThirdW, 0.40)});
    content("T13_3Img", {tr(I, 0.05, kBodyY, kThirdW, kBodyH), tr(I, 0.357, kBodyY, kThirdW, kBodyH),
                         tr(I, 0.664, kBodyY, kThirdW, kBodyH)});
    content("T14_ImageRight_1Formula",
            {tr(T, kMargin, kBodyY, kHalfW, kBodyH), tr(I, kRightX, kBodyY, kHalfW, 0.58),
             tr(F, kRightX, 0.81, kHalfW, kFormulaH)});
    content("T15_ImageLeft_1Formula",
            {tr(I, kMargin, kBodyY, kHalfW, 0.58), tr(F, kMargin, 0.81, kHalfW, kFormulaH),
             tr(T, kRightX, kBodyY, kHalfW, kBodyH)});
    content("T16_1Img_2formula_TopTextBottom",
            {tr(I, kMargin, kBodyY, kHalfW, 0.46), tr(F, kRightX, kBodyY, kHalfW, kFormulaH),
             tr(F, kRightX, 0.37, kHalfW, kFormulaH), tr(T, kMargin, 0.69, kBodyW, 0.26)});
    content("T17_2Img_1formula_TopTextBottom",
            {tr(I, kMargin, kBodyY, kHalfW, 0.34), tr(I, kRightX, kBodyY, kHalfW, 0.34),
             tr(F, kMargin, 0.57, kBodyW, kFormulaH), tr(T, kMargin, 0.73, kBodyW, 0.22)});
    content("T18_2formula_TopTextBottom",
            {tr(F, kMargin, kBodyY, kBodyW, kFormulaH), tr(F, kMargin, 0.37, kBodyW, kFormulaH),
             tr(T, kMargin, 0.53, kBodyW, 0.42)});
    content("T19_2Text",
            {tr(T, kMargin, kBodyY, kHalfW, kBodyH), tr(T, kRightX, kBodyY, kHalfW, kBodyH)});

    cat.validate();
    return cat;
}

TemplateCatalog TemplateCatalog::from_json(std::string_view json_text) {
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw Error(Errc::parse, "catalog: malformed JSON at byte " + std::to_string(e.byte));
    }
    if (!doc.is_array()) throw Error(Errc::parse, "catalog: top-level value must be an array");

    TemplateCatalog cat;
    for (const auto& tj : doc) {
        if (!tj.is_object() || !tj.contains("id") || !tj["id"].is_string())
            throw Error(Errc::parse, "catalog: every template needs a string \"id\"");
        TemplateSpec spec;
        spec.id = tj["id"].get<std::string>();
        spec.structural = tj.value("structural", false);
        if (!tj.contains("regions") || !tj["regions"].is_array())
            throw Error(Errc::parse, "catalog: template " + spec.id + " needs a \"regions\" array");
        for (const auto& rj : tj["regions"]) {
            TemplateRegion r;
            r.kind = region_kind_from_string(rj.at("kind").get<std::string>());
            r.x = rj.at("x").get<double>();
            r.y = rj.at("y").get<double>();
            r.w = rj.at("w").get<double>();
            r.h = rj.at("h").get<double>();
            spec.regions.push_back(r);
        }
        if (tj.contains("signature") && tj["signature"].is_object()) {
            const auto& sig = tj["signature"];
            const int want_v = sig.value("visuals", spec.visual_slots());
            const int want_f = sig.value("formulas", spec.formula_slots());
            const bool want_t = sig.value("text", spec.accepts_text());
            if (want_v != spec.visual_slots() || want_f != spec.formula_slots() ||
                want_t != spec.accepts_text())
                throw Error(Errc::validate,
                            "catalog: template " + spec.id + " signature does not match its regions");
        }
        cat.add(std::move(spec));
    }
    cat.validate();
    return cat;
}

std::string TemplateCatalog::to_json() const {
    std::string out = "[\n";
    for (size_t i = 0; i < specs_.size(); ++i) {
        const TemplateSpec& s = specs_[i];
        out += "  {\n";
        out += "    \"id\": " + json_quote(s.id) + ",\n";
        out += "    \"structural\": " + std::string(s.structural ? "true" : "false") + ",\n";
        out += "    \"signature\": { \"visuals\": " + std::to_string(s.visual_slots()) +
               ", \"formulas\": " + std::to_string(s.formula_slots()) +
               ", \"text\": " + (s.accepts_text() ? "true" : "false") + " },\n";
        out += "    \"regions\": [";
        for (size_t j = 0; j < s.regions.size(); ++j) {
            const TemplateRegion& r = s.regions[j];
            out += j ? ",\n      " : "\n      ";
            out += "{ \"kind\": " + json_quote(to_string(r.kind)) + ", \"x\": " + fmt_num6(r.x) +
                   ", \"y\": " + fmt_num6(r.y) + ", \"w\": " + fmt_num6(r.w) +
                   ", \"h\": " + fmt_num6(r.h) + " }";
        }
        out += "\n    ]\n  }";
        out += i + 1 < specs_.size() ? ",\n" : "\n";
    }
    out += "]\n";
    return out;
}

ContentSignature signature_of(const SlideContent& content) {
    ContentSignature sig;
    sig.n_formulas = int(content.formulas.size());
    sig.n_bullets = int(content.bullets.size());
    const VisualAsset* largest = nullptr;
    for (const VisualAsset& v : content.visuals) {
        (v.kind == RegionKind::table ? sig.n_tables : sig.n_images) += 1;
        if (!largest || v.width * v.height > largest->width * largest->height) largest = &v;
    }
    if (largest) sig.dominant_aspect = classify_aspect(largest->width, largest->height);
    return sig;
}

namespace {

bool signature_accepted(int visuals, int formulas, bool text) {
    if (formulas == 0) return visuals <= 3 || (visuals == 4 && !text);
    if (formulas == 1) return visuals <= 2;
    if (formulas == 2) return visuals <= 1;
    return false;
}

[[noreturn]] void overflow_error(const ContentSignature& sig) {
    char buf[160];
    std::snprintf(buf, sizeof(buf),
                  "signature (visuals=%d, formulas=%d, bullets=%d) matches no template rule; "
                  "split the content (see split_overflow)",
                  sig.visuals(), sig.n_formulas, sig.n_bullets);
    throw Error(Errc::overflow, buf);
}

} // namespace

std::string select_template(const ContentSignature& sig, int content_ordinal) {
    if (content_ordinal < 1) throw Error(Errc::bad_arg, "content_ordinal must be >= 1");
    const int v = sig.visuals();
    const int f = sig.n_formulas;
    const bool text = sig.n_bullets > 0;
    const bool odd = content_ordinal % 2 == 1;
    const AspectClass aspect = sig.dominant_aspect.value_or(AspectClass::moderate);

    if (!signature_accepted(v, f, text)) overflow_error(sig);

    if (f == 0) {
        switch (v) {
        case 0: return "T1_TextOnly";
        case 1:
            if (aspect == AspectClass::wide) return "T4_ImageTop";
            return odd ? "T2_ImageRight" : "T3_ImageLeft";
        case 2:
            if (!text) return "T5_TwoImages";
            if (sig.n_bullets <= 2) return "T5_TwoImages2";
            switch (content_ordinal % 3) {
            case 1: return "T7_2x2_TopImage";
            case 2: return "T8_2x2_BottomImage";
            default: return "T9_2x2_AltTextImg";
            }
        case 3:
            if (!text) return "T13_3Img";
            return odd ? "T11_3Img_TopTextBottom" : "T12_3Img_BottomTextTop";
        case 4: return "T10_4Img_2x2Grid";
        }
    }
    if (f == 1) {
        if (v == 0) return "T18_2formula_TopTextBottom";
        if (v == 1) return odd ? "T14_ImageRight_1Formula" : "T15_ImageLeft_1Formula";
        return "T17_2Img_1formula_TopTextBottom";
    }
    // f == 2
    if (v == 0) return "T18_2formula_TopTextBottom";
    return "T16_1Img_2formula_TopTextBottom";
}

std::string bullets_to_text(std::span<const Bullet> bullets) {
    std::string out;
    for (const Bullet& b : bullets) {
        if (!out.empty()) out += '\n';
        out += "- " + b.text;
        for (const std::string& s : b.subs) out += "\n  - " + s;
    }
    return out;
}

Slide instantiate(const TemplateCatalog& catalog, const std::string& template_id,
                  const SlideContent& content) {
    const TemplateSpec& spec = catalog.get(template_id);
    if (spec.structural)
        throw Error(Errc::bad_arg, "cannot instantiate structural template \"" + template_id + "\"");

    if (int(content.visuals.size()) != spec.visual_slots())
        throw Error(Errc::arity, "template " + template_id + " takes " +
                                     std::to_string(spec.visual_slots()) + " visuals, got " +
                                     std::to_string(content.visuals.size()));
    // Formula strips fill from the top; a template may run with fewer
    // formulas than strips (T18 hosts one or two), unused strips are dropped.
    if (int(content.formulas.size()) > spec.formula_slots())
        throw Error(Errc::arity, "template " + template_id + " takes at most " +
                                     std::to_string(spec.formula_slots()) + " formulas, got " +
                                     std::to_string(content.formulas.size()));
    if (!content.bullets.empty() && spec.text_slots() == 0)
        throw Error(Errc::arity, "template " + template_id + " has no text slot for bullets");

    // Bullet groups per text slot: near-even split, earlier slots take the
    // remainder, reading order preserved.
    const int text_slots = spec.text_slots();
    std::vector<std::vector<Bullet>> groups(size_t(std::max(text_slots, 0)));
    if (text_slots > 0) {
        const size_t n = content.bullets.size();
        const size_t base = n / size_t(text_slots), rem = n % size_t(text_slots);
        size_t pos = 0;
        for (size_t g = 0; g < size_t(text_slots); ++g) {
            const size_t take = base + (g < rem ? 1 : 0);
            groups[g].assign(content.bullets.begin() + long(pos),
                             content.bullets.begin() + long(pos + take));
            pos += take;
        }
    }

    Slide slide;
    slide.role = SlideRole::content;
    slide.template_id = template_id;
    slide.bullets = content.bullets;
    slide.notes = content.notes;

    size_t next_visual = 0, next_formula = 0, next_text = 0;
    for (const TemplateRegion& trg : spec.regions) {
        Region r{trg.kind, trg.x, trg.y, trg.w, trg.h, ""};
        switch (trg.kind) {
        case RegionKind::title_bar:
            r.payload = content.heading;
            break;
        case RegionKind::text:
            r.payload = bullets_to_text(groups[next_text++]);
            break;
        case RegionKind::image:
        case RegionKind::table: {
            const VisualAsset& asset = content.visuals[next_visual++];
            r.kind = asset.kind;
            r.payload = asset.name;
            break;
        }
        case RegionKind::formula:
            if (next_formula >= content.formulas.size()) continue; // unused strip
            r.payload = content.formulas[next_formula++];
            break;
        }
        slide.regions.push_back(std::move(r));
    }

    for (const VisualAsset& v : content.visuals)
        (v.kind == RegionKind::table ? slide.tables : slide.images).push_back(v.name);
    slide.formulas = content.formulas;
    canonicalize_asset_set(slide.images);
    canonicalize_asset_set(slide.tables);
    canonicalize_asset_set(slide.formulas);
    return slide;
}

std::vector<std::pair<std::string, SlideContent>> split_overflow(const SlideContent& content,
                                                                 int base_ordinal) {
    if (content.visuals.empty() && content.formulas.empty() && content.bullets.empty())
        throw Error(Errc::empty, "nothing to split: content is empty");

    std::deque<VisualAsset> visuals(content.visuals.begin(), content.visuals.end());
    std::deque<std::string> formulas(content.formulas.begin(), content.formulas.end());

    struct Shard {
        std::vector<VisualAsset> visuals;
        std::vector<std::string> formulas;
        bool with_text = false;
    };
    std::vector<Shard> shards;
    while (!visuals.empty() || !formulas.empty()) {
        Shard shard;
        size_t f_take = std::min<size_t>(formulas.size(), 2);
        size_t v_take;
        if (f_take == 2) {
            v_take = std::min<size_t>(visuals.size(), 1);
        } else if (f_take == 1) {
            v_take = std::min<size_t>(visuals.size(), 2);
        } else {
            const size_t v = visuals.size();
            v_take = v == 5 ? 3 : std::min<size_t>(v, 4); // never strand a single visual
        }
        for (size_t i = 0; i < v_take; ++i) {
            shard.visuals.push_back(visuals.front());
            visuals.pop_front();
        }
        for (size_t i = 0; i < f_take; ++i) {
            shard.formulas.push_back(formulas.front());
            formulas.pop_front();
        }
        shards.push_back(std::move(shard));
    }

    if (!content.bullets.empty()) {
        bool placed = false;
        for (Shard& shard : shards) {
            if (signature_accepted(int(shard.visuals.size()), int(shard.formulas.size()), true)) {
                shard.with_text = true;
                placed = true;
                break;
            }
        }
        if (!placed) shards.push_back({{}, {}, true}); // text-only tail slide
    }

    std::vector<std::pair<std::string, SlideContent>> out;
    for (size_t i = 0; i < shards.size(); ++i) {
        SlideContent c;
        c.heading = content.heading;
        c.visuals = std::move(shards[i].visuals);
        c.formulas = std::move(shards[i].formulas);
        if (shards[i].with_text) c.bullets = content.bullets;
        if (i == 0) c.notes = content.notes;
        const std::string id = select_template(signature_of(c), base_ordinal + int(i));
        out.emplace_back(id, std::move(c));
    }
    return out;
}

// ---- outline ----------------------------------------------------------------

namespace {

std::vector<Bullet> parse_bullets(const json& arr, const std::string& where) {
    std::vector<Bullet> out;
    if (!arr.is_array()) throw Error(Errc::parse, where + ": \"bullets\" must be an array");
    for (const auto& bj : arr) {
        Bullet b;
        if (bj.is_string()) {
            b.text = bj.get<std::string>();
        } else if (bj.is_object() && bj.contains("text") && bj["text"].is_string()) {
            b.text = bj["text"].get<std::string>();
            if (bj.contains("subs")) {
                if (!bj["subs"].is_array())
                    throw Error(Errc::parse, where + ": bullet \"subs\" must be an array");
                for (const auto& sj : bj["subs"]) {
                    if (!sj.is_string())
                        throw Error(Errc::parse, where + ": bullet subs must be strings");
                    b.subs.push_back(sj.get<std::string>());
                }
            }
        } else {
            throw Error(Errc::parse, where + ": bullets must be strings or {text, subs} objects");
        }
        out.push_back(std::move(b));
    }
    return out;
}

std::vector<std::string> parse_name_list(const json& obj, const char* key, const std::string& where) {
    std::vector<std::string> out;
    if (!obj.contains(key)) return out;
    if (!obj[key].is_array()) throw Error(Errc::parse, where + ": \"" + key + "\" must be an array");
    for (const auto& e : obj[key]) {
        if (!e.is_string()) throw Error(Errc::parse, where + ": \"" + key + "\" entries must be strings");
        out.push_back(e.get<std::string>());
    }
    return out;
}

} // namespace

Outline parse_outline(std::string_view json_text) {
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw Error(Errc::parse, "outline: malformed JSON at byte " + std::to_string(e.byte));
    }
    if (!doc.is_object() || !doc.contains("title") || !doc["title"].is_string())
        throw Error(Errc::parse, "outline: needs a string \"title\"");

    Outline outline;
    outline.title = doc["title"].get<std::string>();
    if (doc.contains("subtitle") && doc["subtitle"].is_string())
        outline.subtitle = doc["subtitle"].get<std::string>();
    if (!doc.contains("sections") || !doc["sections"].is_array())
        throw Error(Errc::parse, "outline: needs a \"sections\" array");

    for (const auto& sj : doc["sections"]) {
        if (!sj.is_object() || !sj.contains("name") || !sj["name"].is_string())
            throw Error(Errc::parse, "outline: every section needs a string \"name\"");
        OutlineSection section;
        section.name = sj["name"].get<std::string>();
        const std::string where = "section \"" + section.name + "\"";
        if (sj.contains("slides")) {
            if (!sj["slides"].is_array())
                throw Error(Errc::parse, where + ": \"slides\" must be an array");
            for (const auto& pj : sj["slides"]) {
                if (!pj.is_object()) throw Error(Errc::parse, where + ": slides must be objects");
                OutlineSlide slide;
                if (pj.contains("subsection") && pj["subsection"].is_string())
                    slide.subsection = pj["subsection"].get<std::string>();
                if (pj.contains("bullets")) slide.bullets = parse_bullets(pj["bullets"], where);
                slide.images = parse_name_list(pj, "images", where);
                slide.tables = parse_name_list(pj, "tables", where);
                slide.formulas = parse_name_list(pj, "formulas", where);
                if (pj.contains("notes") && pj["notes"].is_string())
                    slide.notes = pj["notes"].get<std::string>();
                section.slides.push_back(std::move(slide));
            }
        }
        outline.sections.push_back(std::move(section));
    }
    return outline;
}

AssetManifest parse_manifest(std::string_view json_text) {
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw Error(Errc::parse, "manifest: malformed JSON at byte " + std::to_string(e.byte));
    }
    if (!doc.is_object()) throw Error(Errc::parse, "manifest: top-level value must be an object");

    AssetManifest manifest;
    for (auto it = doc.begin(); it != doc.end(); ++it) {
        const json& aj = it.value();
        if (!aj.is_object())
            throw Error(Errc::parse, "manifest: entry \"" + it.key() + "\" must be an object");
        AssetInfo info;
        const std::string kind = aj.value("kind", "image");
        if (kind == "image") {
            info.kind = RegionKind::image;
        } else if (kind == "table") {
            info.kind = RegionKind::table;
        } else {
            throw Error(Errc::parse, "manifest: entry \"" + it.key() + "\" has unknown kind \"" +
                                         kind + "\" (want image or table)");
        }
        info.width = aj.value("width", 0.0);
        info.height = aj.value("height", 0.0);
        if (!(info.width > 0) || !(info.height > 0))
            throw Error(Errc::validate,
                        "manifest: entry \"" + it.key() + "\" needs positive width and height");
        manifest[it.key()] = info;
    }
    return manifest;
}

Deck arrange_deck(const Outline& outline, const AssetManifest& manifest,
                  const TemplateCatalog& catalog) {
    if (outline.sections.empty())
        throw Error(Errc::empty, "outline has no sections");

    auto lookup = [&](const std::string& name, RegionKind expected,
                      const std::string& where) -> VisualAsset {
        auto it = manifest.find(name);
        if (it == manifest.end())
            throw Error(Errc::validate, where + ": asset \"" + name + "\" missing from the manifest");
        if (it->second.kind != expected)
            throw Error(Errc::validate, where + ": asset \"" + name + "\" is a " +
                                            to_string(it->second.kind) + " in the manifest");
        return {name, it->second.kind, it->second.width, it->second.height};
    };

    auto structural_slide = [&](const char* template_id, SlideRole role) {
        Slide s;
        s.role = role;
        s.template_id = template_id;
        for (const TemplateRegion& trg : catalog.get(template_id).regions)
            s.regions.push_back({trg.kind, trg.x, trg.y, trg.w, trg.h, ""});
        return s;
    };

    Deck deck;
    deck.title = outline.title;

    Slide title = structural_slide("title", SlideRole::title);
    title.regions[0].payload = outline.title;
    title.regions[1].payload = outline.subtitle.value_or("");
    deck.slides.push_back(std::move(title));

    Slide agenda = structural_slide("agenda", SlideRole::agenda);
    agenda.regions[0].payload = "Agenda";
    for (const OutlineSection& section : outline.sections) agenda.bullets.push_back({section.name, {}});
    agenda.regions[1].payload = bullets_to_text(agenda.bullets);
    deck.slides.push_back(std::move(agenda));

    int ordinal = 1;
    for (size_t si = 0; si < outline.sections.size(); ++si) {
        const OutlineSection& section = outline.sections[si];
        char part[16];
        std::snprintf(part, sizeof(part), "PART %02zu", si + 1);

        Slide divider = structural_slide("section", SlideRole::section);
        divider.section = section.name;
        divider.regions[0].payload = part;
        divider.regions[1].payload = section.name;
        deck.slides.push_back(std::move(divider));

        for (const OutlineSlide& planned : section.slides) {
            const std::string where = "section \"" + section.name + "\"";
            SlideContent content;
            content.heading = planned.subsection.value_or(section.name);
            content.bullets = planned.bullets;
            content.formulas = planned.formulas;
            content.notes = planned.notes;
            for (const std::string& name : planned.images)
                content.visuals.push_back(lookup(name, RegionKind::image, where));
            for (const std::string& name : planned.tables)
                content.visuals.push_back(lookup(name, RegionKind::table, where));

            std::vector<std::pair<std::string, SlideContent>> parts;
            try {
                parts.emplace_back(select_template(signature_of(content), ordinal), content);
            } catch (const Error& e) {
                if (e.code() != Errc::overflow) throw;
                parts = split_overflow(content, ordinal);
            }
            for (const auto& [template_id, shard] : parts) {
                Slide slide = instantiate(catalog, template_id, shard);
                slide.section = section.name;
                slide.subsection = planned.subsection;
                deck.slides.push_back(std::move(slide));
                ++ordinal;
            }
        }
    }

    Slide thanks = structural_slide("thanks", SlideRole::thanks);
    thanks.regions[0].payload = "Thank you";
    deck.slides.push_back(std::move(thanks));

    for (size_t i = 0; i < deck.slides.size(); ++i) deck.slides[i].index = int(i) + 1;
    validate_deck(deck);
    return deck;
}

} // namespace deckgen
