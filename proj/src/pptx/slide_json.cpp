#include "pptx/slide_json.hpp"

#include <cstdio>

#include "support/error.hpp"

namespace deckhand::pptx {
namespace {

std::string hex_color(Rgb rgb) {
  char buf[8];
  std::snprintf(buf, sizeof buf, "%06X", rgb & kMaxRgb);
  return buf;
}

std::optional<Rgb> color_from_hex(const std::string& hex) {
  if (hex.size() != 6) return std::nullopt;
  Rgb value = 0;
  for (char c : hex) {
    value <<= 4;
    if (c >= '0' && c <= '9') value |= static_cast<Rgb>(c - '0');
    else if (c >= 'a' && c <= 'f') value |= static_cast<Rgb>(c - 'a' + 10);
    else if (c >= 'A' && c <= 'F') value |= static_cast<Rgb>(c - 'A' + 10);
    else return std::nullopt;
  }
  return value;
}

Json fill_to_json(const Fill& fill) {
  Json j;
  j["kind"] = std::string(fill_kind_name(fill.kind));
  if (fill.color_rgb) j["color_rgb"] = hex_color(*fill.color_rgb);
  return j;
}

Fill fill_from_json(const Json& j) {
  Fill fill;
  fill.kind = fill_kind_from_name(j.at("kind").get<std::string>())
                  .value_or(FillKind::none);
  if (j.contains("color_rgb"))
    fill.color_rgb = color_from_hex(j.at("color_rgb").get<std::string>());
  return fill;
}

Json run_to_json(const Run& run) {
  Json j;
  j["text"] = run.text;
  const RunFormat& f = run.format;
  if (f.font_name) j["font_name"] = *f.font_name;
  if (f.size_points) j["size_points"] = *f.size_points;
  if (f.bold) j["bold"] = *f.bold;
  if (f.italic) j["italic"] = *f.italic;
  if (f.underline) j["underline"] = *f.underline;
  if (f.color_rgb) j["color_rgb"] = hex_color(*f.color_rgb);
  return j;
}

Run run_from_json(const Json& j) {
  Run run;
  run.text = j.at("text").get<std::string>();
  if (j.contains("font_name")) run.format.font_name = j.at("font_name").get<std::string>();
  if (j.contains("size_points")) run.format.size_points = j.at("size_points").get<double>();
  if (j.contains("bold")) run.format.bold = j.at("bold").get<bool>();
  if (j.contains("italic")) run.format.italic = j.at("italic").get<bool>();
  if (j.contains("underline")) run.format.underline = j.at("underline").get<bool>();
  if (j.contains("color_rgb"))
    run.format.color_rgb = color_from_hex(j.at("color_rgb").get<std::string>());
  return run;
}

bool is_integer(const Json& j) {
  return j.is_number_integer() || j.is_number_unsigned();
}

void check_run(const Json& run, const std::string& where,
               std::vector<std::string>& problems) {
  if (!run.is_object()) {
    problems.push_back(where + ": run must be an object");
    return;
  }
  static const std::vector<std::string> known = {
      "text", "font_name", "size_points", "bold", "italic", "underline",
      "color_rgb"};
  for (auto it = run.begin(); it != run.end(); ++it)
    if (std::find(known.begin(), known.end(), it.key()) == known.end())
      problems.push_back(where + ": unknown key '" + it.key() + "'");
  if (!run.contains("text") || !run.at("text").is_string())
    problems.push_back(where + ": missing string 'text'");
  if (run.contains("font_name") && !run.at("font_name").is_string())
    problems.push_back(where + ": 'font_name' must be a string");
  if (run.contains("size_points") &&
      (!run.at("size_points").is_number() ||
       run.at("size_points").get<double>() <= 0))
    problems.push_back(where + ": 'size_points' must be a positive number");
  for (const char* key : {"bold", "italic", "underline"})
    if (run.contains(key) && !run.at(key).is_boolean())
      problems.push_back(where + ": '" + std::string(key) + "' must be a boolean");
  if (run.contains("color_rgb")) {
    const Json& c = run.at("color_rgb");
    if (!c.is_string() || !color_from_hex(c.get<std::string>()))
      problems.push_back(where + ": 'color_rgb' must be 6 hex digits");
  }
}

void check_paragraph(const Json& para, const std::string& where,
                     std::vector<std::string>& problems) {
  if (!para.is_object()) {
    problems.push_back(where + ": paragraph must be an object");
    return;
  }
  for (auto it = para.begin(); it != para.end(); ++it)
    if (it.key() != "alignment" && it.key() != "runs")
      problems.push_back(where + ": unknown key '" + it.key() + "'");
  if (para.contains("alignment")) {
    const Json& a = para.at("alignment");
    if (!a.is_string() || !alignment_from_name(a.get<std::string>()))
      problems.push_back(where + ": bad 'alignment'");
  }
  if (!para.contains("runs") || !para.at("runs").is_array()) {
    problems.push_back(where + ": missing array 'runs'");
    return;
  }
  int r = 0;
  for (const Json& run : para.at("runs"))
    check_run(run, where + "/runs/" + std::to_string(r++), problems);
}

void check_fill(const Json& fill, const std::string& where,
                std::vector<std::string>& problems) {
  if (!fill.is_object() || !fill.contains("kind") ||
      !fill.at("kind").is_string() ||
      !fill_kind_from_name(fill.at("kind").get<std::string>())) {
    problems.push_back(where + ": fill needs a known 'kind'");
    return;
  }
  bool solid = fill.at("kind").get<std::string>() == "solid";
  bool has_color = fill.contains("color_rgb");
  if (solid != has_color)
    problems.push_back(where + ": 'color_rgb' is required exactly for solid fills");
  if (has_color && (!fill.at("color_rgb").is_string() ||
                    !color_from_hex(fill.at("color_rgb").get<std::string>())))
    problems.push_back(where + ": 'color_rgb' must be 6 hex digits");
}

}  // namespace

Json slide_to_json(const Slide& slide) {
  Json j;
  j["slide_index"] = slide.index;
  j["layout_name"] = slide.layout_name;
  j["background"] = fill_to_json(slide.background);
  j["transition"] = slide.transition ? Json(*slide.transition) : Json(nullptr);
  j["notes"] = slide.notes_text;
  Json objects = Json::array();
  for (const Shape& shape : slide.shapes) {
    Json o;
    o["id"] = shape.id;
    o["name"] = shape.name;
    o["type"] = std::string(shape_kind_name(shape.kind));
    Json pos;
    pos["left_emu"] = shape.box.left_emu;
    pos["top_emu"] = shape.box.top_emu;
    pos["width_emu"] = shape.box.width_emu;
    pos["height_emu"] = shape.box.height_emu;
    o["position"] = std::move(pos);
    if (shape.fill) o["fill"] = fill_to_json(*shape.fill);
    if (shape.image_ref) o["image_ref"] = *shape.image_ref;
    if (shape.text_frame) {
      Json paragraphs = Json::array();
      for (const Paragraph& p : shape.text_frame->paragraphs)
        paragraphs.push_back(paragraph_to_json(p));
      o["paragraphs"] = std::move(paragraphs);
    }
    objects.push_back(std::move(o));
  }
  j["objects"] = std::move(objects);
  return j;
}

Json slide_to_json(const Deck& deck, int index) {
  return slide_to_json(deck.slide_at(index));
}

Json deck_to_json(const Deck& deck) {
  Json out = Json::array();
  for (const Slide& s : deck.slides) out.push_back(slide_to_json(s));
  return out;
}

std::string json_text(const Json& j) { return j.dump(2); }

Json paragraph_to_json(const Paragraph& p) {
  Json j;
  if (p.alignment) j["alignment"] = std::string(alignment_name(*p.alignment));
  Json runs = Json::array();
  for (const Run& r : p.runs) runs.push_back(run_to_json(r));
  j["runs"] = std::move(runs);
  return j;
}

Paragraph paragraph_from_json(const Json& j) {
  Paragraph p;
  if (j.contains("alignment"))
    p.alignment = alignment_from_name(j.at("alignment").get<std::string>());
  for (const Json& run : j.at("runs")) p.runs.push_back(run_from_json(run));
  return p;
}

std::vector<std::string> validate_slide_json(const Json& j) {
  std::vector<std::string> problems;
  if (!j.is_object()) {
    problems.push_back("slide document must be a JSON object");
    return problems;
  }
  static const std::vector<std::string> known = {
      "slide_index", "layout_name", "background", "transition", "notes",
      "objects"};
  for (auto it = j.begin(); it != j.end(); ++it)
    if (std::find(known.begin(), known.end(), it.key()) == known.end())
      problems.push_back("unknown key '" + it.key() + "'");

  if (!j.contains("slide_index") || !is_integer(j.at("slide_index")) ||
      j.at("slide_index").get<int>() < 1)
    problems.push_back("missing positive integer 'slide_index'");
  if (!j.contains("layout_name") || !j.at("layout_name").is_string())
    problems.push_back("missing string 'layout_name'");
  if (!j.contains("background"))
    problems.push_back("missing 'background'");
  else
    check_fill(j.at("background"), "background", problems);
  if (!j.contains("transition") ||
      !(j.at("transition").is_null() || j.at("transition").is_string()))
    problems.push_back("'transition' must be a string or null");
  if (!j.contains("notes") || !j.at("notes").is_string())
    problems.push_back("missing string 'notes'");
  if (!j.contains("objects") || !j.at("objects").is_array()) {
    problems.push_back("missing array 'objects'");
    return problems;
  }

  int i = 0;
  for (const Json& o : j.at("objects")) {
    std::string where = "objects/" + std::to_string(i++);
    if (!o.is_object()) {
      problems.push_back(where + ": must be an object");
      continue;
    }
    static const std::vector<std::string> known_obj = {
        "id", "name", "type", "position", "fill", "image_ref", "paragraphs"};
    for (auto it = o.begin(); it != o.end(); ++it)
      if (std::find(known_obj.begin(), known_obj.end(), it.key()) ==
          known_obj.end())
        problems.push_back(where + ": unknown key '" + it.key() + "'");
    if (!o.contains("id") || !o.at("id").is_string() ||
        o.at("id").get<std::string>().empty())
      problems.push_back(where + ": missing non-empty string 'id'");
    if (!o.contains("name") || !o.at("name").is_string())
      problems.push_back(where + ": missing string 'name'");
    if (!o.contains("type") || !o.at("type").is_string() ||
        !shape_kind_from_name(o.at("type").get<std::string>()))
      problems.push_back(where + ": missing known 'type'");
    if (!o.contains("position") || !o.at("position").is_object()) {
      problems.push_back(where + ": missing object 'position'");
    } else {
      const Json& pos = o.at("position");
      for (const char* key :
           {"left_emu", "top_emu", "width_emu", "height_emu"})
        if (!pos.contains(key) || !is_integer(pos.at(key)))
          problems.push_back(where + ": position needs integer '" +
                             std::string(key) + "'");
      for (const char* key : {"width_emu", "height_emu"})
        if (pos.contains(key) && is_integer(pos.at(key)) &&
            pos.at(key).get<long long>() < 0)
          problems.push_back(where + ": '" + std::string(key) +
                             "' must be >= 0");
    }
    if (o.contains("fill")) check_fill(o.at("fill"), where + "/fill", problems);
    if (o.contains("image_ref") && !o.at("image_ref").is_string())
      problems.push_back(where + ": 'image_ref' must be a string");
    if (o.contains("paragraphs")) {
      if (!o.at("paragraphs").is_array()) {
        problems.push_back(where + ": 'paragraphs' must be an array");
      } else {
        int p = 0;
        for (const Json& para : o.at("paragraphs"))
          check_paragraph(para, where + "/paragraphs/" + std::to_string(p++),
                          problems);
      }
    }
  }
  return problems;
}

Slide slide_from_json(const Json& j) {
  Slide slide;
  slide.index = j.at("slide_index").get<int>();
  slide.layout_name = j.at("layout_name").get<std::string>();
  slide.background = fill_from_json(j.at("background"));
  if (j.at("transition").is_string())
    slide.transition = j.at("transition").get<std::string>();
  slide.notes_text = j.at("notes").get<std::string>();
  for (const Json& o : j.at("objects")) {
    Shape shape;
    shape.id = o.at("id").get<std::string>();
    shape.name = o.at("name").get<std::string>();
    shape.kind = shape_kind_from_name(o.at("type").get<std::string>())
                     .value_or(ShapeKind::other);
    const Json& pos = o.at("position");
    shape.box.left_emu = pos.at("left_emu").get<Emu>();
    shape.box.top_emu = pos.at("top_emu").get<Emu>();
    shape.box.width_emu = pos.at("width_emu").get<Emu>();
    shape.box.height_emu = pos.at("height_emu").get<Emu>();
    if (o.contains("fill")) shape.fill = fill_from_json(o.at("fill"));
    if (o.contains("image_ref"))
      shape.image_ref = o.at("image_ref").get<std::string>();
    if (o.contains("paragraphs")) {
      TextFrame frame;
      for (const Json& para : o.at("paragraphs"))
        frame.paragraphs.push_back(paragraph_from_json(para));
      shape.text_frame = std::move(frame);
    }
    slide.shapes.push_back(std::move(shape));
  }
  return slide;
}

Json deck_summary(const Deck& deck) {
  Json j;
  j["slide_count"] = static_cast<int>(deck.slides.size());
  Json slides = Json::array();
  for (const Slide& slide : deck.slides) {
    Json s;
    s["index"] = slide.index;
    std::string title;
    for (const Shape& shape : slide.shapes) {
      if (shape.kind != ShapeKind::placeholder &&
          shape.kind != ShapeKind::textbox)
        continue;
      if (!shape.text_frame) continue;
      if (!shape.text_frame->paragraphs.empty())
        title = paragraph_text(shape.text_frame->paragraphs.front());
      break;
    }
    s["title_text"] = title;
    s["shape_count"] = static_cast<int>(slide.shapes.size());
    Json kinds;
    static const ShapeKind all_kinds[] = {
        ShapeKind::textbox, ShapeKind::placeholder, ShapeKind::picture,
        ShapeKind::autoshape, ShapeKind::table, ShapeKind::chart,
        ShapeKind::group, ShapeKind::other};
    for (ShapeKind kind : all_kinds) {
      int count = 0;
      for (const Shape& shape : slide.shapes)
        if (shape.kind == kind) ++count;
      if (count > 0) kinds[std::string(shape_kind_name(kind))] = count;
    }
    s["shape_kinds"] = std::move(kinds);
    slides.push_back(std::move(s));
  }
  j["slides"] = std::move(slides);
  return j;
}

}  // namespace deckhand::pptx
