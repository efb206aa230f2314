#include "doctest.h"

#include "deck_model.hpp"
#include "support/generators.hpp"

using namespace deckgen;

namespace {

const char* kMinimalDeck = R"({
  "title": "Minimal",
  "aspect": "16:9",
  "slides": [
    {"index": 1, "role": "title", "bullets": [], "regions": [], "images": [], "tables": [], "formulas": []},
    {"index": 2, "role": "agenda", "bullets": [], "regions": [], "images": [], "tables": [], "formulas": []},
    {"index": 3, "role": "thanks", "bullets": [], "regions": [], "images": [], "tables": [], "formulas": []}
  ]
})";

} // namespace

TEST_CASE("minimal three-slide deck parses") {
    const Deck deck = parse_deck(kMinimalDeck);
    CHECK(deck.slides.size() == 3);
    CHECK(deck.slides[0].role == SlideRole::title);
    CHECK(deck.slides[2].role == SlideRole::thanks);
}

TEST_CASE("region bound violation names the slide") {
    const std::string doc = R"({
      "title": "Bad", "slides": [
        {"index": 1, "role": "title"},
        {"index": 2, "role": "agenda"},
        {"index": 3, "role": "content"},
        {"index": 4, "role": "content",
         "regions": [{"kind": "text", "x": 0.7, "y": 0.1, "w": 0.5, "h": 0.2, "payload": ""}]},
        {"index": 5, "role": "thanks"}
      ]})";
    try {
        parse_deck(doc);
        FAIL("expected a validation error");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::validate);
        CHECK(std::string(e.what()).find("slide 4") != std::string::npos);
        CHECK(std::string(e.what()).find("x+w") != std::string::npos);
    }
}

TEST_CASE("malformed JSON reports a byte offset") {
    try {
        parse_deck("{\"title\": \"x\", ");
        FAIL("expected a parse error");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::parse);
        CHECK(std::string(e.what()).find("byte") != std::string::npos);
    }
}

TEST_CASE("role and frame invariants") {
    SUBCASE("fewer than 3 slides") {
        CHECK_THROWS_AS(parse_deck(R"({"title":"x","slides":[
            {"index":1,"role":"title"},{"index":2,"role":"agenda"}]})"),
                        Error);
    }
    SUBCASE("first slide must be the title") {
        CHECK_THROWS_AS(parse_deck(R"({"title":"x","slides":[
            {"index":1,"role":"agenda"},{"index":2,"role":"agenda"},{"index":3,"role":"thanks"}]})"),
                        Error);
    }
    SUBCASE("interior roles restricted to content/section") {
        CHECK_THROWS_AS(parse_deck(R"({"title":"x","slides":[
            {"index":1,"role":"title"},{"index":2,"role":"agenda"},
            {"index":3,"role":"title"},{"index":4,"role":"thanks"}]})"),
                        Error);
    }
    SUBCASE("indices must be contiguous") {
        CHECK_THROWS_AS(parse_deck(R"({"title":"x","slides":[
            {"index":1,"role":"title"},{"index":3,"role":"agenda"},{"index":4,"role":"thanks"}]})"),
                        Error);
    }
    SUBCASE("non-content slide with a content template") {
        CHECK_THROWS_AS(parse_deck(R"({"title":"x","slides":[
            {"index":1,"role":"title","template":"T1_TextOnly"},
            {"index":2,"role":"agenda"},{"index":3,"role":"thanks"}]})"),
                        Error);
    }
}

TEST_CASE("asset references must sit in exactly one set") {
    const std::string doc = R"({"title":"x","slides":[
        {"index":1,"role":"title"},{"index":2,"role":"agenda"},
        {"index":3,"role":"content",
         "regions":[{"kind":"image","x":0.1,"y":0.1,"w":0.3,"h":0.3,"payload":"fig.png"}],
         "images":[IMAGES],"tables":[TABLES]},
        {"index":4,"role":"thanks"}]})";

    auto with = [&](const char* images, const char* tables) {
        std::string d = doc;
        d.replace(d.find("IMAGES"), 6, images);
        d.replace(d.find("TABLES"), 6, tables);
        return d;
    };
    CHECK_NOTHROW(parse_deck(with("\"fig.png\"", "")));
    CHECK_THROWS_AS(parse_deck(with("", "")), Error);                       // referenced, nowhere
    CHECK_THROWS_AS(parse_deck(with("\"fig.png\"", "\"fig.png\"")), Error); // in two sets
    CHECK_THROWS_AS(parse_deck(with("", "\"fig.png\"")), Error);            // wrong set for kind
}

TEST_CASE("canonical serialization emits empty lists and fixed precision") {
    Deck deck = parse_deck(kMinimalDeck);
    deck.slides[0].regions.push_back({RegionKind::text, 0.1, 0.2, 0.5, 0.25, "hello"});
    validate_deck(deck);
    const std::string text = serialize_deck(deck);
    CHECK(text.find("\"bullets\": []") != std::string::npos);
    CHECK(text.find("\"x\": 0.100000") != std::string::npos);
    CHECK(text.find("\"h\": 0.250000") != std::string::npos);
    // absent optionals are omitted entirely
    CHECK(text.find("\"notes\"") == std::string::npos);
}

TEST_CASE("serialization golden bytes") {
    Deck deck;
    deck.title = "Golden";
    Slide title, agenda, thanks;
    title.index = 1;
    title.role = SlideRole::title;
    agenda.index = 2;
    agenda.role = SlideRole::agenda;
    thanks.index = 3;
    thanks.role = SlideRole::thanks;
    agenda.bullets = {{"alpha", {"a1"}}};
    agenda.regions = {{RegionKind::text, 0.1, 0.25, 0.5, 0.125, "hi \"there\""}};
    agenda.notes = "n";
    deck.slides = {title, agenda, thanks};
    validate_deck(deck);

    const std::string want =
        "{\n"
        "  \"title\": \"Golden\",\n"
        "  \"aspect\": \"16:9\",\n"
        "  \"slides\": [\n"
        "    {\n"
        "      \"index\": 1,\n"
        "      \"role\": \"title\",\n"
        "      \"bullets\": [],\n"
        "      \"regions\": [],\n"
        "      \"images\": [],\n"
        "      \"tables\": [],\n"
        "      \"formulas\": []\n"
        "    },\n"
        "    {\n"
        "      \"index\": 2,\n"
        "      \"role\": \"agenda\",\n"
        "      \"bullets\": [\n"
        "        { \"text\": \"alpha\", \"subs\": [\"a1\"] }\n"
        "      ],\n"
        "      \"regions\": [\n"
        "        { \"kind\": \"text\", \"x\": 0.100000, \"y\": 0.250000, \"w\": 0.500000, "
        "\"h\": 0.125000, \"payload\": \"hi \\\"there\\\"\" }\n"
        "      ],\n"
        "      \"images\": [],\n"
        "      \"tables\": [],\n"
        "      \"formulas\": [],\n"
        "      \"notes\": \"n\"\n"
        "    },\n"
        "    {\n"
        "      \"index\": 3,\n"
        "      \"role\": \"thanks\",\n"
        "      \"bullets\": [],\n"
        "      \"regions\": [],\n"
        "      \"images\": [],\n"
        "      \"tables\": [],\n"
        "      \"formulas\": []\n"
        "    }\n"
        "  ]\n"
        "}\n";
    CHECK(serialize_deck(deck) == want);
    CHECK(parse_deck(want) == deck);
}

TEST_CASE("unknown role or kind is a parse error") {
    CHECK_THROWS_AS(parse_deck(R"({"title":"x","slides":[
        {"index":1,"role":"cover"},{"index":2,"role":"agenda"},{"index":3,"role":"thanks"}]})"),
                    Error);
    CHECK_THROWS_AS(parse_deck(R"({"title":"x","slides":[
        {"index":1,"role":"title"},{"index":2,"role":"agenda"},
        {"index":3,"role":"content","regions":[{"kind":"video","x":0,"y":0,"w":0.1,"h":0.1}]},
        {"index":4,"role":"thanks"}]})"),
                    Error);
}

TEST_CASE("equal decks serialize to identical bytes") {
    testgen::Rng rng(7);
    const Deck a = testgen::random_deck(rng);
    const Deck b = a;
    CHECK(serialize_deck(a) == serialize_deck(b));
}

TEST_CASE("parse/serialize round-trips over generated decks") {
    testgen::Rng rng(2024);
    for (int i = 0; i < 50; ++i) {
        const Deck deck = testgen::random_deck(rng);
        const std::string text = serialize_deck(deck);
        const Deck reparsed = parse_deck(text);
        CHECK(reparsed == deck);
        // serialize(parse(text)) is byte-identical on canonical documents
        CHECK(serialize_deck(reparsed) == text);
    }
}

TEST_CASE("scorable slides filter to content roles in order") {
    const std::string doc = R"({"title":"x","slides":[
        {"index":1,"role":"title"},{"index":2,"role":"agenda"},
        {"index":3,"role":"content"},{"index":4,"role":"section"},
        {"index":5,"role":"content"},{"index":6,"role":"thanks"}]})";
    const Deck deck = parse_deck(doc);
    const auto scorable = scorable_slides(deck);
    REQUIRE(scorable.size() == 2);
    CHECK(scorable[0]->index == 3);
    CHECK(scorable[1]->index == 5);

    const Deck minimal = parse_deck(kMinimalDeck);
    CHECK(scorable_slides(minimal).empty());
}

TEST_CASE("scorable count equals content-role count on random decks") {
    testgen::Rng rng(99);
    for (int i = 0; i < 30; ++i) {
        const Deck deck = testgen::random_deck(rng);
        size_t content = 0;
        for (const Slide& s : deck.slides)
            if (s.role == SlideRole::content) ++content;
        CHECK(scorable_slides(deck).size() == content);
    }
}
