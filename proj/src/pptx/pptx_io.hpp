#pragma once

#include <filesystem>
#include <string>

#include "model/deck.hpp"

namespace deckhand::pptx {

// Reads a PPTX package into a Deck. Every part is either parsed into the
// model (slides, notes, package plumbing) or carried byte-for-byte in
// Deck.opaque_parts. Throws NotAZip / MalformedPackage / MalformedXml.
Deck load_deck(const std::filesystem::path& path);
Deck load_deck_bytes(std::string_view bytes);

// Writes a Deck back to a PPTX file. Parts untouched since load are written
// verbatim; mutated slides and package plumbing are regenerated. Decks built
// in memory get a complete minimal package skeleton. Throws IoError.
void save_deck(const Deck& deck, const std::filesystem::path& path);
std::string save_deck_bytes(const Deck& deck);

// Mutation helpers used by the interpreter; they keep the source-fidelity
// caches coherent (a mutated shape or slide stops being written verbatim).

// Marks a shape as mutated so the writer regenerates it from the model.
void touch_shape(Slide& slide, Shape& shape);
// Marks slide-level content (shape list, background) as mutated.
void touch_slide(Slide& slide);
// Replaces notes text and marks the notes part for regeneration.
void set_notes_text(Slide& slide, std::string text);

// Rewrites the frame (and nothing else) inside a shape's raw XML fragment.
// Returns false when the fragment has no patchable geometry.
bool patch_fragment_box(Shape& shape, const Box& box);
// Rewrites the fill inside a shape's raw XML fragment. Returns false when
// the fragment has no shape-properties element to carry a fill.
bool patch_fragment_fill(Shape& shape, const Fill& fill);

}  // namespace deckhand::pptx
