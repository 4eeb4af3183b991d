#include "agent/script.hpp"

#include "pptx/slide_json.hpp"
#include "support/error.hpp"
#include "support/jsontext.hpp"

namespace deckhand::agent {
namespace {

[[noreturn]] void bad(const std::string& where, const std::string& why) {
  raise(Errc::script_parse, where + ": " + why);
}

bool is_integer(const Json& j) {
  return j.is_number_integer() || j.is_number_unsigned();
}

int require_int(const Json& payload, const char* field, const std::string& where) {
  if (!payload.contains(field)) bad(where, std::string("missing '") + field + "'");
  const Json& v = payload.at(field);
  if (!is_integer(v)) bad(where, std::string("'") + field + "' must be an integer");
  return v.get<int>();
}

std::string require_str(const Json& payload, const char* field,
                        const std::string& where) {
  if (!payload.contains(field)) bad(where, std::string("missing '") + field + "'");
  const Json& v = payload.at(field);
  if (!v.is_string()) bad(where, std::string("'") + field + "' must be a string");
  return v.get<std::string>();
}

std::optional<std::int64_t> optional_color(const Json& payload, const char* field,
                                           const std::string& where) {
  if (!payload.contains(field)) return std::nullopt;
  const Json& v = payload.at(field);
  if (!is_integer(v))
    bad(where, std::string("'") + field +
                   "' must be a single integer (0xRRGGBB), not a string or tuple");
  return v.get<std::int64_t>();
}

void reject_unknown(const Json& payload, std::initializer_list<const char*> known,
                    const std::string& where) {
  for (auto it = payload.begin(); it != payload.end(); ++it) {
    bool ok = false;
    for (const char* k : known)
      if (it.key() == k) ok = true;
    if (!ok) bad(where, "unknown field '" + it.key() + "'");
  }
}

RunFormat parse_partial_format(const Json& j, const std::string& where,
                               std::optional<std::int64_t>& color_raw) {
  if (!j.is_object()) bad(where, "'format' must be an object");
  reject_unknown(j, {"font_name", "size_points", "bold", "italic", "underline",
                     "color_rgb"},
                 where);
  RunFormat fmt;
  if (j.contains("font_name")) {
    if (!j.at("font_name").is_string()) bad(where, "'font_name' must be a string");
    fmt.font_name = j.at("font_name").get<std::string>();
  }
  if (j.contains("size_points")) {
    if (!j.at("size_points").is_number() || j.at("size_points").get<double>() <= 0)
      bad(where, "'size_points' must be a positive number");
    fmt.size_points = j.at("size_points").get<double>();
  }
  for (auto [key, slot] : {std::pair<const char*, std::optional<bool>*>{
                               "bold", &fmt.bold},
                           {"italic", &fmt.italic},
                           {"underline", &fmt.underline}}) {
    if (!j.contains(key)) continue;
    if (!j.at(key).is_boolean())
      bad(where, std::string("'") + key + "' must be a boolean");
    *slot = j.at(key).get<bool>();
  }
  color_raw = optional_color(j, "color_rgb", where);
  return fmt;
}

void parse_fill_payload(const Json& payload, const std::string& where,
                        FillKind& kind, std::optional<std::int64_t>& color) {
  if (!payload.contains("fill") || !payload.at("fill").is_object())
    bad(where, "missing object 'fill'");
  const Json& f = payload.at("fill");
  reject_unknown(f, {"kind", "color_rgb"}, where + "/fill");
  std::string kind_name = require_str(f, "kind", where + "/fill");
  auto parsed = fill_kind_from_name(kind_name);
  if (!parsed) bad(where + "/fill", "unknown kind '" + kind_name + "'");
  if (*parsed == FillKind::gradient || *parsed == FillKind::picture)
    bad(where + "/fill",
        "kind '" + kind_name + "' cannot be written by edit scripts; use 'none' or 'solid'");
  kind = *parsed;
  color = optional_color(f, "color_rgb", where + "/fill");
  if (kind == FillKind::solid && !color)
    bad(where + "/fill", "solid fill requires 'color_rgb'");
  if (kind == FillKind::none && color)
    bad(where + "/fill", "'color_rgb' is only valid for solid fills");
}

PartialBox parse_partial_box(const Json& payload, const std::string& where) {
  if (!payload.contains("box") || !payload.at("box").is_object())
    bad(where, "missing object 'box'");
  const Json& b = payload.at("box");
  reject_unknown(b, {"left_emu", "top_emu", "width_emu", "height_emu"}, where);
  PartialBox box;
  for (auto [key, slot] : {std::pair<const char*, std::optional<Emu>*>{
                               "left_emu", &box.left_emu},
                           {"top_emu", &box.top_emu},
                           {"width_emu", &box.width_emu},
                           {"height_emu", &box.height_emu}}) {
    if (!b.contains(key)) continue;
    if (!is_integer(b.at(key)))
      bad(where, std::string("'") + key + "' must be an integer EMU value");
    *slot = b.at(key).get<Emu>();
  }
  if (!box.left_emu && !box.top_emu && !box.width_emu && !box.height_emu)
    bad(where, "'box' must set at least one of left/top/width/height");
  return box;
}

Box parse_full_box(const Json& payload, const std::string& where) {
  if (!payload.contains("box") || !payload.at("box").is_object())
    bad(where, "missing object 'box'");
  const Json& b = payload.at("box");
  Box box;
  for (auto [key, slot] :
       {std::pair<const char*, Emu*>{"left_emu", &box.left_emu},
        {"top_emu", &box.top_emu},
        {"width_emu", &box.width_emu},
        {"height_emu", &box.height_emu}}) {
    if (!b.contains(key) || !is_integer(b.at(key)))
      bad(where, std::string("'box' needs integer '") + key + "'");
    *slot = b.at(key).get<Emu>();
  }
  return box;
}

EditOp parse_op(const std::string& name, const Json& payload,
                const std::string& where) {
  if (!payload.is_object()) bad(where, "payload must be an object");

  if (name == "set_run_text") {
    reject_unknown(payload,
                   {"slide", "shape_selector", "paragraph_index", "run_index",
                    "text"},
                   where);
    SetRunText op;
    op.slide = require_int(payload, "slide", where);
    op.shape_selector = require_str(payload, "shape_selector", where);
    op.paragraph_index = require_int(payload, "paragraph_index", where);
    op.run_index = require_int(payload, "run_index", where);
    op.text = require_str(payload, "text", where);
    return op;
  }
  if (name == "set_run_format") {
    reject_unknown(payload,
                   {"slide", "shape_selector", "paragraph_index", "run_index",
                    "format"},
                   where);
    SetRunFormat op;
    op.slide = require_int(payload, "slide", where);
    op.shape_selector = require_str(payload, "shape_selector", where);
    op.paragraph_index = require_int(payload, "paragraph_index", where);
    op.run_index = require_int(payload, "run_index", where);
    if (!payload.contains("format")) bad(where, "missing 'format'");
    op.format = parse_partial_format(payload.at("format"), where + "/format",
                                     op.color_raw);
    return op;
  }
  if (name == "set_shape_box") {
    reject_unknown(payload, {"slide", "shape_selector", "box"}, where);
    SetShapeBox op;
    op.slide = require_int(payload, "slide", where);
    op.shape_selector = require_str(payload, "shape_selector", where);
    op.box = parse_partial_box(payload, where);
    return op;
  }
  if (name == "set_fill") {
    reject_unknown(payload, {"slide", "shape_selector", "fill"}, where);
    SetFill op;
    op.slide = require_int(payload, "slide", where);
    op.shape_selector = require_str(payload, "shape_selector", where);
    parse_fill_payload(payload, where, op.kind, op.color_raw);
    return op;
  }
  if (name == "set_notes") {
    reject_unknown(payload, {"slide", "text"}, where);
    SetNotes op;
    op.slide = require_int(payload, "slide", where);
    op.text = require_str(payload, "text", where);
    return op;
  }
  if (name == "add_textbox") {
    reject_unknown(payload, {"slide", "name", "box", "paragraphs"}, where);
    AddTextbox op;
    op.slide = require_int(payload, "slide", where);
    op.name = require_str(payload, "name", where);
    op.box = parse_full_box(payload, where);
    if (!payload.contains("paragraphs") || !payload.at("paragraphs").is_array())
      bad(where, "missing array 'paragraphs'");
    int p = 0;
    for (const Json& para : payload.at("paragraphs")) {
      std::string pwhere = where + "/paragraphs/" + std::to_string(p++);
      if (!para.is_object() || !para.contains("runs") ||
          !para.at("runs").is_array())
        bad(pwhere, "paragraph needs a 'runs' array");
      try {
        op.paragraphs.push_back(pptx::paragraph_from_json(para));
      } catch (const std::exception& e) {
        bad(pwhere, e.what());
      }
    }
    return op;
  }
  if (name == "delete_shape") {
    reject_unknown(payload, {"slide", "shape_selector"}, where);
    DeleteShape op;
    op.slide = require_int(payload, "slide", where);
    op.shape_selector = require_str(payload, "shape_selector", where);
    return op;
  }
  if (name == "add_slide") {
    reject_unknown(payload, {"after_index", "layout_name"}, where);
    AddSlide op;
    op.after_index = require_int(payload, "after_index", where);
    op.layout_name = require_str(payload, "layout_name", where);
    return op;
  }
  if (name == "delete_slide") {
    reject_unknown(payload, {"slide"}, where);
    DeleteSlide op;
    op.slide = require_int(payload, "slide", where);
    return op;
  }
  if (name == "duplicate_slide") {
    reject_unknown(payload, {"slide", "insert_after"}, where);
    DuplicateSlide op;
    op.slide = require_int(payload, "slide", where);
    op.insert_after = require_int(payload, "insert_after", where);
    return op;
  }
  if (name == "move_slide") {
    reject_unknown(payload, {"from_index", "to_index"}, where);
    MoveSlide op;
    op.from_index = require_int(payload, "from_index", where);
    op.to_index = require_int(payload, "to_index", where);
    return op;
  }
  if (name == "set_slide_background") {
    reject_unknown(payload, {"slide", "fill"}, where);
    SetSlideBackground op;
    op.slide = require_int(payload, "slide", where);
    parse_fill_payload(payload, where, op.kind, op.color_raw);
    return op;
  }
  if (name == "refuse") {
    reject_unknown(payload, {"reason"}, where);
    Refuse op;
    op.reason = require_str(payload, "reason", where);
    return op;
  }
  bad(where, "unknown op '" + name + "'");
}

}  // namespace

const char* op_name(const EditOp& op) {
  struct Namer {
    const char* operator()(const SetRunText&) { return "set_run_text"; }
    const char* operator()(const SetRunFormat&) { return "set_run_format"; }
    const char* operator()(const SetShapeBox&) { return "set_shape_box"; }
    const char* operator()(const SetFill&) { return "set_fill"; }
    const char* operator()(const SetNotes&) { return "set_notes"; }
    const char* operator()(const AddTextbox&) { return "add_textbox"; }
    const char* operator()(const DeleteShape&) { return "delete_shape"; }
    const char* operator()(const AddSlide&) { return "add_slide"; }
    const char* operator()(const DeleteSlide&) { return "delete_slide"; }
    const char* operator()(const DuplicateSlide&) { return "duplicate_slide"; }
    const char* operator()(const MoveSlide&) { return "move_slide"; }
    const char* operator()(const SetSlideBackground&) {
      return "set_slide_background";
    }
    const char* operator()(const Refuse&) { return "refuse"; }
  };
  return std::visit(Namer{}, op);
}

EditScript parse_edit_script(const std::string& llm_output) {
  std::string cleaned = clean_model_json(llm_output);
  Json doc = Json::parse(cleaned, nullptr, /*allow_exceptions=*/false);
  if (doc.is_discarded())
    raise(Errc::script_parse,
          "reply is not valid JSON; raw output: " + llm_output);
  if (!doc.is_object() || !doc.contains("ops") || !doc.at("ops").is_array())
    raise(Errc::script_parse, "expected an object with an 'ops' array");
  const Json& ops = doc.at("ops");
  if (ops.empty()) raise(Errc::script_parse, "'ops' must not be empty");

  EditScript script;
  int i = 0;
  for (const Json& entry : ops) {
    std::string where = "op " + std::to_string(i++);
    if (!entry.is_object() || entry.size() != 1)
      raise(Errc::script_parse,
            where + ": each op must be an object with exactly one key");
    const std::string& name = entry.begin().key();
    script.ops.push_back(parse_op(name, entry.begin().value(), where));
  }

  bool has_refuse = false;
  for (const EditOp& op : script.ops)
    if (std::holds_alternative<Refuse>(op)) has_refuse = true;
  if (has_refuse && script.ops.size() > 1)
    raise(Errc::script_parse, "refuse must be the only op in a script");
  return script;
}

namespace {

Json box_json(const Box& b) {
  Json j;
  j["left_emu"] = b.left_emu;
  j["top_emu"] = b.top_emu;
  j["width_emu"] = b.width_emu;
  j["height_emu"] = b.height_emu;
  return j;
}

struct Serializer {
  Json operator()(const SetRunText& op) {
    Json j;
    j["slide"] = op.slide;
    j["shape_selector"] = op.shape_selector;
    j["paragraph_index"] = op.paragraph_index;
    j["run_index"] = op.run_index;
    j["text"] = op.text;
    return j;
  }
  Json operator()(const SetRunFormat& op) {
    Json j;
    j["slide"] = op.slide;
    j["shape_selector"] = op.shape_selector;
    j["paragraph_index"] = op.paragraph_index;
    j["run_index"] = op.run_index;
    Json f = Json::object();
    if (op.format.font_name) f["font_name"] = *op.format.font_name;
    if (op.format.size_points) f["size_points"] = *op.format.size_points;
    if (op.format.bold) f["bold"] = *op.format.bold;
    if (op.format.italic) f["italic"] = *op.format.italic;
    if (op.format.underline) f["underline"] = *op.format.underline;
    if (op.color_raw) f["color_rgb"] = *op.color_raw;
    j["format"] = std::move(f);
    return j;
  }
  Json operator()(const SetShapeBox& op) {
    Json j;
    j["slide"] = op.slide;
    j["shape_selector"] = op.shape_selector;
    Json b = Json::object();
    if (op.box.left_emu) b["left_emu"] = *op.box.left_emu;
    if (op.box.top_emu) b["top_emu"] = *op.box.top_emu;
    if (op.box.width_emu) b["width_emu"] = *op.box.width_emu;
    if (op.box.height_emu) b["height_emu"] = *op.box.height_emu;
    j["box"] = std::move(b);
    return j;
  }
  Json operator()(const SetFill& op) {
    Json j;
    j["slide"] = op.slide;
    j["shape_selector"] = op.shape_selector;
    Json f;
    f["kind"] = std::string(fill_kind_name(op.kind));
    if (op.color_raw) f["color_rgb"] = *op.color_raw;
    j["fill"] = std::move(f);
    return j;
  }
  Json operator()(const SetNotes& op) {
    Json j;
    j["slide"] = op.slide;
    j["text"] = op.text;
    return j;
  }
  Json operator()(const AddTextbox& op) {
    Json j;
    j["slide"] = op.slide;
    j["name"] = op.name;
    j["box"] = box_json(op.box);
    Json paragraphs = Json::array();
    for (const Paragraph& p : op.paragraphs)
      paragraphs.push_back(pptx::paragraph_to_json(p));
    j["paragraphs"] = std::move(paragraphs);
    return j;
  }
  Json operator()(const DeleteShape& op) {
    Json j;
    j["slide"] = op.slide;
    j["shape_selector"] = op.shape_selector;
    return j;
  }
  Json operator()(const AddSlide& op) {
    Json j;
    j["after_index"] = op.after_index;
    j["layout_name"] = op.layout_name;
    return j;
  }
  Json operator()(const DeleteSlide& op) {
    Json j;
    j["slide"] = op.slide;
    return j;
  }
  Json operator()(const DuplicateSlide& op) {
    Json j;
    j["slide"] = op.slide;
    j["insert_after"] = op.insert_after;
    return j;
  }
  Json operator()(const MoveSlide& op) {
    Json j;
    j["from_index"] = op.from_index;
    j["to_index"] = op.to_index;
    return j;
  }
  Json operator()(const SetSlideBackground& op) {
    Json j;
    j["slide"] = op.slide;
    Json f;
    f["kind"] = std::string(fill_kind_name(op.kind));
    if (op.color_raw) f["color_rgb"] = *op.color_raw;
    j["fill"] = std::move(f);
    return j;
  }
  Json operator()(const Refuse& op) {
    Json j;
    j["reason"] = op.reason;
    return j;
  }
};

}  // namespace

Json script_to_json(const EditScript& script) {
  Json ops = Json::array();
  for (const EditOp& op : script.ops) {
    Json entry;
    entry[op_name(op)] = std::visit(Serializer{}, op);
    ops.push_back(std::move(entry));
  }
  Json j;
  j["ops"] = std::move(ops);
  return j;
}

const std::string& edit_script_grammar() {
  static const std::string grammar = R"PROMPT(EDIT SCRIPT FORMAT
Respond with a single JSON object: {"ops": [ <op>, <op>, ... ]}
Each <op> is an object with exactly one key naming the command:

{"set_run_text": {"slide": int, "shape_selector": str, "paragraph_index": int, "run_index": int, "text": str}}
{"set_run_format": {"slide": int, "shape_selector": str, "paragraph_index": int, "run_index": int, "format": {"font_name"?: str, "size_points"?: number, "bold"?: bool, "italic"?: bool, "underline"?: bool, "color_rgb"?: int}}}
{"set_shape_box": {"slide": int, "shape_selector": str, "box": {"left_emu"?: int, "top_emu"?: int, "width_emu"?: int, "height_emu"?: int}}}
{"set_fill": {"slide": int, "shape_selector": str, "fill": {"kind": "none"|"solid", "color_rgb"?: int}}}
{"set_notes": {"slide": int, "text": str}}
{"add_textbox": {"slide": int, "name": str, "box": {"left_emu": int, "top_emu": int, "width_emu": int, "height_emu": int}, "paragraphs": [{"alignment"?: str, "runs": [{"text": str, ...format fields...}]}]}}
{"delete_shape": {"slide": int, "shape_selector": str}}
{"add_slide": {"after_index": int, "layout_name": str}}
{"delete_slide": {"slide": int}}
{"duplicate_slide": {"slide": int, "insert_after": int}}
{"move_slide": {"from_index": int, "to_index": int}}
{"set_slide_background": {"slide": int, "fill": {"kind": "none"|"solid", "color_rgb"?: int}}}
{"refuse": {"reason": str}}

RULES
- Slide numbers ("slide", "after_index", "insert_after", "from_index", "to_index") are 1-based; "after_index"/"insert_after" accept 0 for the front of the deck.
- "paragraph_index" and "run_index" are 0-based positions into the slide JSON arrays.
- "shape_selector" is the object's "id" or its "name" exactly as given in the slide JSON.
- Colors are single integers 0..16777215 encoding 0xRRGGBB (red is 16711680). Never strings or tuples.
- Geometry values are EMU integers (914400 EMU per inch); widths and heights must not be negative.
- "fill" accepts only {"kind": "none"} or {"kind": "solid", "color_rgb": int}.
- Setting a run's text to "" deletes that run.
- Every referenced slide, shape, paragraph and run must exist at the moment its op executes; ops run strictly in order.
- If the request cannot be performed on this document, respond with exactly one op: {"refuse": {"reason": str}}.
- "ops" must never be empty, and "refuse" cannot be combined with other ops.
Respond with the JSON object only, no explanations and no code fences.
)PROMPT";
  return grammar;
}

}  // namespace deckhand::agent
