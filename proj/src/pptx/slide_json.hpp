#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "model/deck.hpp"

namespace deckhand::pptx {

// All slide JSON uses insertion-ordered documents so serialized text is
// deterministic (schema order = emission order).
using Json = nlohmann::ordered_json;

// Canonical structured JSON for one slide:
// {slide_index, layout_name, background{kind,color_rgb?}, transition,
//  notes, objects:[{id, name, type, position{...}, fill?, image_ref?,
//  paragraphs?:[{alignment?, runs:[{text, font_name?, size_points?, bold?,
//  italic?, underline?, color_rgb?}]}]}]}
// Colors serialize as six uppercase hex digits.
Json slide_to_json(const Slide& slide);
Json slide_to_json(const Deck& deck, int index);  // throws SlideOutOfRange

// Whole deck as an array of slide documents.
Json deck_to_json(const Deck& deck);

// Canonical text form (what prompts embed); byte-deterministic.
std::string json_text(const Json& j);

// Structural schema check; returns human-readable problems, empty when valid.
std::vector<std::string> validate_slide_json(const Json& j);

// Rebuilds a model slide from schema-valid JSON (no source fidelity bytes).
Slide slide_from_json(const Json& j);

Paragraph paragraph_from_json(const Json& j);
Json paragraph_to_json(const Paragraph& p);

// {slide_count, slides:[{index, title_text, shape_count, shape_kinds}]}
Json deck_summary(const Deck& deck);

}  // namespace deckhand::pptx
