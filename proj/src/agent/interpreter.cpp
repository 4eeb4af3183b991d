#include "agent/interpreter.hpp"

#include <algorithm>

#include "pptx/pptx_io.hpp"
#include "support/error.hpp"

namespace deckhand::agent {
namespace {

struct Engine {
  Deck& deck;
  bool validating;  // existence/range checks only, skip fidelity work
  ApplyReport* report;
  int op_index = 0;

  [[noreturn]] void fail(Errc code, const std::string& why) const {
    raise(code, "op " + std::to_string(op_index) + ": " + why);
  }

  Slide& slide_ref(int index) const {
    if (index < 1 || index > static_cast<int>(deck.slides.size()))
      fail(Errc::slide_out_of_range,
           "slide " + std::to_string(index) + " of " +
               std::to_string(deck.slides.size()));
    return deck.slides[static_cast<std::size_t>(index - 1)];
  }

  Shape& shape_ref(Slide& slide, const std::string& selector) const {
    try {
      return find_shape(slide, selector);
    } catch (const Error& e) {
      fail(Errc::shape_not_found, e.what());
    }
  }

  Run& run_ref(Slide& slide, Shape& shape, int para, int run) const {
    if (!shape.text_frame)
      fail(Errc::run_out_of_range,
           "shape '" + shape.name + "' has no text frame");
    auto& paragraphs = shape.text_frame->paragraphs;
    if (para < 0 || para >= static_cast<int>(paragraphs.size()))
      fail(Errc::run_out_of_range,
           "paragraph " + std::to_string(para) + " of " +
               std::to_string(paragraphs.size()) + " in shape '" + shape.name +
               "'");
    auto& runs = paragraphs[static_cast<std::size_t>(para)].runs;
    if (run < 0 || run >= static_cast<int>(runs.size()))
      fail(Errc::run_out_of_range,
           "run " + std::to_string(run) + " of " + std::to_string(runs.size()) +
               " in paragraph " + std::to_string(para) + " of shape '" +
               shape.name + "'");
    (void)slide;
    return runs[static_cast<std::size_t>(run)];
  }

  Rgb checked_color(std::int64_t raw) const {
    if (raw < 0 || raw > static_cast<std::int64_t>(kMaxRgb))
      fail(Errc::invalid_color,
           std::to_string(raw) + " is outside the 24-bit range 0..16777215");
    return static_cast<Rgb>(raw);
  }

  void note(const std::string& effect) const {
    if (report) report->effects.push_back(
        "op " + std::to_string(op_index) + ": " + effect);
  }

  // ---- ops

  void operator()(const SetRunText& op) {
    Slide& slide = slide_ref(op.slide);
    Shape& shape = shape_ref(slide, op.shape_selector);
    Run& run = run_ref(slide, shape, op.paragraph_index, op.run_index);
    run.text = op.text;
    auto& runs =
        shape.text_frame->paragraphs[static_cast<std::size_t>(op.paragraph_index)]
            .runs;
    if (op.text.empty())
      runs.erase(runs.begin() + op.run_index);
    if (!validating) pptx::touch_shape(slide, shape);
    note("set_run_text slide " + std::to_string(op.slide) + " shape '" +
         shape.name + "'");
  }

  void operator()(const SetRunFormat& op) {
    Slide& slide = slide_ref(op.slide);
    Shape& shape = shape_ref(slide, op.shape_selector);
    Run& run = run_ref(slide, shape, op.paragraph_index, op.run_index);
    std::optional<Rgb> color;
    if (op.color_raw) color = checked_color(*op.color_raw);
    if (op.format.font_name) run.format.font_name = op.format.font_name;
    if (op.format.size_points) run.format.size_points = op.format.size_points;
    if (op.format.bold) run.format.bold = op.format.bold;
    if (op.format.italic) run.format.italic = op.format.italic;
    if (op.format.underline) run.format.underline = op.format.underline;
    if (color) run.format.color_rgb = color;
    if (!validating) pptx::touch_shape(slide, shape);
    note("set_run_format slide " + std::to_string(op.slide) + " shape '" +
         shape.name + "'");
  }

  void operator()(const SetShapeBox& op) {
    Slide& slide = slide_ref(op.slide);
    Shape& shape = shape_ref(slide, op.shape_selector);
    Box box = shape.box;
    if (op.box.left_emu) box.left_emu = *op.box.left_emu;
    if (op.box.top_emu) box.top_emu = *op.box.top_emu;
    if (op.box.width_emu) box.width_emu = *op.box.width_emu;
    if (op.box.height_emu) box.height_emu = *op.box.height_emu;
    if (box.width_emu < 0 || box.height_emu < 0)
      fail(Errc::invalid_geometry, "width and height must be >= 0");
    shape.box = box;
    if (!validating) {
      if (!pptx::patch_fragment_box(shape, box)) {
        if (shape.kind == ShapeKind::table || shape.kind == ShapeKind::chart ||
            shape.kind == ShapeKind::group || shape.kind == ShapeKind::other)
          fail(Errc::apply_error, "shape '" + shape.name +
                                      "' has no geometry that can be rewritten");
        pptx::touch_shape(slide, shape);
      } else {
        slide.source.part_xml.clear();
      }
    }
    note("set_shape_box slide " + std::to_string(op.slide) + " shape '" +
         shape.name + "'");
  }

  void operator()(const SetFill& op) {
    Slide& slide = slide_ref(op.slide);
    Shape& shape = shape_ref(slide, op.shape_selector);
    Fill fill;
    fill.kind = op.kind;
    if (op.color_raw) fill.color_rgb = checked_color(*op.color_raw);
    shape.fill = fill;
    if (!validating) {
      if (!pptx::patch_fragment_fill(shape, fill)) {
        if (shape.kind == ShapeKind::table || shape.kind == ShapeKind::chart ||
            shape.kind == ShapeKind::other)
          fail(Errc::apply_error,
               "shape '" + shape.name + "' cannot carry a fill");
        pptx::touch_shape(slide, shape);
      } else {
        slide.source.part_xml.clear();
      }
    }
    note("set_fill slide " + std::to_string(op.slide) + " shape '" +
         shape.name + "'");
  }

  void operator()(const SetNotes& op) {
    Slide& slide = slide_ref(op.slide);
    if (validating)
      slide.notes_text = op.text;
    else
      pptx::set_notes_text(slide, op.text);
    note("set_notes slide " + std::to_string(op.slide));
  }

  void operator()(const AddTextbox& op) {
    Slide& slide = slide_ref(op.slide);
    if (op.box.width_emu < 0 || op.box.height_emu < 0)
      fail(Errc::invalid_geometry, "width and height must be >= 0");
    Shape shape;
    long long max_id = 1;
    for (const Shape& s : slide.shapes) {
      try {
        max_id = std::max(max_id, std::stoll(s.id));
      } catch (...) {
      }
    }
    shape.id = std::to_string(max_id + 1);
    shape.name = op.name;
    shape.kind = ShapeKind::textbox;
    shape.box = op.box;
    TextFrame frame;
    frame.paragraphs = op.paragraphs;
    shape.text_frame = std::move(frame);
    slide.shapes.push_back(std::move(shape));
    if (!validating) pptx::touch_slide(slide);
    note("add_textbox slide " + std::to_string(op.slide) + " '" + op.name +
         "'");
  }

  void operator()(const DeleteShape& op) {
    Slide& slide = slide_ref(op.slide);
    Shape& shape = shape_ref(slide, op.shape_selector);
    auto it = slide.shapes.begin() + (&shape - slide.shapes.data());
    std::string name = shape.name;
    slide.shapes.erase(it);
    if (!validating) pptx::touch_slide(slide);
    note("delete_shape slide " + std::to_string(op.slide) + " '" + name + "'");
  }

  void operator()(const AddSlide& op) {
    int count = static_cast<int>(deck.slides.size());
    if (op.after_index < 0 || op.after_index > count)
      fail(Errc::slide_out_of_range,
           "after_index " + std::to_string(op.after_index) + " of " +
               std::to_string(count));
    Slide slide;
    slide.layout_name = op.layout_name;
    if (!validating) {
      const std::string* layout_part = nullptr;
      for (const auto& [name, part] : deck.known_layouts)
        if (name == op.layout_name) {
          layout_part = &part;
          break;
        }
      if (!layout_part && !deck.known_layouts.empty()) {
        std::string known;
        for (const auto& [name, part] : deck.known_layouts) {
          if (!known.empty()) known += ", ";
          known += "'" + name + "'";
        }
        fail(Errc::apply_error, "unknown layout '" + op.layout_name +
                                    "'; known layouts: " + known);
      }
      if (layout_part) slide.source.layout_part = *layout_part;
      deck.structure_dirty = true;
    }
    deck.slides.insert(deck.slides.begin() + op.after_index, std::move(slide));
    deck.renumber();
    note("add_slide after " + std::to_string(op.after_index));
  }

  void operator()(const DeleteSlide& op) {
    slide_ref(op.slide);
    deck.slides.erase(deck.slides.begin() + (op.slide - 1));
    deck.renumber();
    if (!validating) deck.structure_dirty = true;
    note("delete_slide " + std::to_string(op.slide));
  }

  void operator()(const DuplicateSlide& op) {
    Slide copy = slide_ref(op.slide);
    int count = static_cast<int>(deck.slides.size());
    if (op.insert_after < 0 || op.insert_after > count)
      fail(Errc::slide_out_of_range,
           "insert_after " + std::to_string(op.insert_after) + " of " +
               std::to_string(count));
    // the copy gets a fresh package identity; content bytes are reused
    copy.source.part_name.clear();
    copy.source.notes_part_name.clear();
    copy.source.pres_rel_id.clear();
    copy.source.sld_num_id = 0;
    deck.slides.insert(deck.slides.begin() + op.insert_after, std::move(copy));
    deck.renumber();
    if (!validating) deck.structure_dirty = true;
    note("duplicate_slide " + std::to_string(op.slide) + " after " +
         std::to_string(op.insert_after));
  }

  void operator()(const MoveSlide& op) {
    slide_ref(op.from_index);
    slide_ref(op.to_index);
    Slide moved = std::move(deck.slides[static_cast<std::size_t>(op.from_index - 1)]);
    deck.slides.erase(deck.slides.begin() + (op.from_index - 1));
    deck.slides.insert(deck.slides.begin() + (op.to_index - 1), std::move(moved));
    deck.renumber();
    if (!validating) deck.structure_dirty = true;
    note("move_slide " + std::to_string(op.from_index) + " -> " +
         std::to_string(op.to_index));
  }

  void operator()(const SetSlideBackground& op) {
    Slide& slide = slide_ref(op.slide);
    Fill fill;
    fill.kind = op.kind;
    if (op.color_raw) fill.color_rgb = checked_color(*op.color_raw);
    slide.background = fill;
    if (!validating) {
      slide.source.bg_fragment.reset();
      pptx::touch_slide(slide);
    }
    note("set_slide_background slide " + std::to_string(op.slide));
  }

  void operator()(const Refuse&) {
    // handled by the caller; a refuse script never reaches the engine
  }

  void run(const EditScript& script) {
    for (std::size_t i = 0; i < script.ops.size(); ++i) {
      op_index = static_cast<int>(i);
      std::visit(*this, script.ops[i]);
      if (report) ++report->ops_applied;
    }
  }
};

}  // namespace

void validate_script(const EditScript& script, const Deck& deck) {
  if (script.ops.size() == 1 &&
      std::holds_alternative<Refuse>(script.ops.front()))
    return;
  Deck scratch = deck;
  Engine engine{scratch, /*validating=*/true, nullptr};
  engine.run(script);
}

std::pair<Deck, ApplyReport> apply_script(const EditScript& script,
                                          const Deck& deck) {
  ApplyReport report;
  if (script.ops.size() == 1 &&
      std::holds_alternative<Refuse>(script.ops.front())) {
    report.refused = true;
    report.refuse_reason = std::get<Refuse>(script.ops.front()).reason;
    return {deck, std::move(report)};
  }
  Deck result = deck;
  Engine engine{result, /*validating=*/false, &report};
  engine.run(script);
  return {std::move(result), std::move(report)};
}

}  // namespace deckhand::agent
