#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace deckgen {

/// Escapes a UTF-8 string for embedding in a JSON document (quotes excluded).
std::string json_escape(std::string_view s);

/// Fixed 6-decimal formatting, the canonical number form for serialized decks
/// and reports ("0.550000"). Deterministic across runs and platforms.
std::string fmt_num6(double v);

std::string json_quote(std::string_view s);

/// Renders ["a", "b"] on one line; empty lists render as [].
std::string inline_string_array(const std::vector<std::string>& items);

} // namespace deckgen
