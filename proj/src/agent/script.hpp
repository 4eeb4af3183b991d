#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "model/deck.hpp"

namespace deckhand::agent {

using Json = nlohmann::ordered_json;

// The constrained command language the generation stage emits. Slide indices
// are 1-based; paragraph_index/run_index are 0-based positions into the slide
// JSON arrays. Colors are plain 24-bit integers.

struct PartialBox {
  std::optional<Emu> left_emu, top_emu, width_emu, height_emu;
};

struct SetRunText {
  int slide = 0;
  std::string shape_selector;
  int paragraph_index = 0;
  int run_index = 0;
  std::string text;  // "" deletes the run
};

struct SetRunFormat {
  int slide = 0;
  std::string shape_selector;
  int paragraph_index = 0;
  int run_index = 0;
  RunFormat format;           // only the provided fields are applied
  std::optional<std::int64_t> color_raw;  // unchecked until validation
};

struct SetShapeBox {
  int slide = 0;
  std::string shape_selector;
  PartialBox box;
};

struct SetFill {
  int slide = 0;
  std::string shape_selector;
  FillKind kind = FillKind::none;
  std::optional<std::int64_t> color_raw;
};

struct SetNotes {
  int slide = 0;
  std::string text;
};

struct AddTextbox {
  int slide = 0;
  std::string name;
  Box box;
  std::vector<Paragraph> paragraphs;
};

struct DeleteShape {
  int slide = 0;
  std::string shape_selector;
};

struct AddSlide {
  int after_index = 0;  // 0 inserts at the front
  std::string layout_name;
};

struct DeleteSlide {
  int slide = 0;
};

struct DuplicateSlide {
  int slide = 0;
  int insert_after = 0;
};

struct MoveSlide {
  int from_index = 0;
  int to_index = 0;
};

struct SetSlideBackground {
  int slide = 0;
  FillKind kind = FillKind::none;
  std::optional<std::int64_t> color_raw;
};

struct Refuse {
  std::string reason;
};

using EditOp =
    std::variant<SetRunText, SetRunFormat, SetShapeBox, SetFill, SetNotes,
                 AddTextbox, DeleteShape, AddSlide, DeleteSlide,
                 DuplicateSlide, MoveSlide, SetSlideBackground, Refuse>;

struct EditScript {
  std::vector<EditOp> ops;  // non-empty; refuse must be alone
};

const char* op_name(const EditOp& op);

// Parses {"ops":[{"<op>": {...}}, ...]} after fence/trailing-comma cleanup.
// Strict about variant names and payload types; empty scripts and refuse
// mixed with other ops are rejected. Throws ScriptParseError naming the
// offending op and field.
EditScript parse_edit_script(const std::string& llm_output);

Json script_to_json(const EditScript& script);

// The wire-format description embedded in generation prompts.
const std::string& edit_script_grammar();

}  // namespace deckhand::agent
