#pragma once

#include <string>
#include <string_view>

namespace deckhand {

// Extracts JSON from a chat reply that may be wrapped in Markdown code
// fences or surrounded by prose. Without fences the trimmed text returns
// unchanged.
std::string strip_code_fences(std::string_view reply);

// Removes commas that directly precede '}' or ']' outside string literals.
// Model output frequently carries them and strict JSON parsers do not.
std::string strip_trailing_commas(std::string_view text);

// Both passes in order; the standard cleanup before parsing model JSON.
std::string clean_model_json(std::string_view reply);

}  // namespace deckhand
