#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace deckhand {

// Geometry is carried in EMU, the native OOXML unit (914,400 EMU per inch),
// so no rounding happens between file, model, and edit commands.
using Emu = std::int64_t;
inline constexpr Emu kEmuPerInch = 914'400;

using Rgb = std::uint32_t;  // 0xRRGGBB, valid range [0, 0xFFFFFF]
inline constexpr Rgb kMaxRgb = 0xFFFFFF;

struct RunFormat {
  std::optional<std::string> font_name;
  std::optional<double> size_points;  // > 0 when present
  std::optional<bool> bold;
  std::optional<bool> italic;
  std::optional<bool> underline;
  std::optional<Rgb> color_rgb;

  bool operator==(const RunFormat&) const = default;
};

// A contiguous segment of text with one uniform format. "\n" as the entire
// text of a run denotes an explicit line break.
struct Run {
  std::string text;
  RunFormat format;

  bool operator==(const Run&) const = default;
};

enum class Alignment { left, center, right, justify };

struct Paragraph {
  std::vector<Run> runs;
  std::optional<Alignment> alignment;
  std::optional<bool> bullet;

  bool operator==(const Paragraph&) const = default;
};

struct TextFrame {
  std::vector<Paragraph> paragraphs;

  bool operator==(const TextFrame&) const = default;
};

struct Box {
  Emu left_emu = 0;
  Emu top_emu = 0;
  Emu width_emu = 0;   // >= 0
  Emu height_emu = 0;  // >= 0

  bool operator==(const Box&) const = default;
};

enum class FillKind { none, solid, gradient, picture };

struct Fill {
  FillKind kind = FillKind::none;
  std::optional<Rgb> color_rgb;  // present iff kind == solid

  bool operator==(const Fill&) const = default;
};

enum class ShapeKind {
  textbox,
  placeholder,
  picture,
  autoshape,
  table,
  chart,
  group,
  other,
};

std::string_view shape_kind_name(ShapeKind kind);
std::optional<ShapeKind> shape_kind_from_name(std::string_view name);
std::string_view fill_kind_name(FillKind kind);
std::optional<FillKind> fill_kind_from_name(std::string_view name);
std::string_view alignment_name(Alignment a);
std::optional<Alignment> alignment_from_name(std::string_view name);

struct Shape {
  std::string id;    // file-level id, kept as text; unique within a slide
  std::string name;
  ShapeKind kind = ShapeKind::other;
  Box box;
  std::optional<Fill> fill;
  std::optional<TextFrame> text_frame;
  std::optional<std::string> image_ref;  // archive part name, pictures only

  // Source-fidelity carriers, excluded from modeled equality. raw_xml holds
  // the shape's original element bytes and is cleared the moment the shape
  // is mutated; the writer splices it back verbatim while it is present.
  std::string raw_xml;
  std::string image_rel_id;  // r:embed id backing image_ref
  std::string ph_type;       // placeholder type token ("title", "body", ...)

  bool operator==(const Shape& other) const {
    return id == other.id && name == other.name && kind == other.kind &&
           box == other.box && fill == other.fill &&
           text_frame == other.text_frame && image_ref == other.image_ref;
  }
};

// One relationship entry from a part's .rels file.
struct Relationship {
  std::string id;
  std::string type;
  std::string target;           // as written in the file
  std::string resolved_target;  // absolute part name, "" for external targets
  bool external = false;
};

// Raw bytes and fragments kept from the source package so untouched content
// is written back verbatim. All fields are empty for decks built in memory.
struct SlideSource {
  std::string part_name;  // e.g. "ppt/slides/slide1.xml"; "" until saved
  std::string part_xml;   // whole original part; cleared when slide mutates
  std::vector<Relationship> rels;
  std::string root_attrs;      // verbatim attribute text of the root element
  std::string sptree_header;   // p:nvGrpSpPr + p:grpSpPr fragment
  std::optional<std::string> bg_fragment;  // p:bg bytes; "" = none in source;
                                           // nullopt = regenerate from model
  std::string csld_tail;       // cSld children after spTree
  std::string after_csld;      // siblings after cSld (clrMapOvr, transition..)
  std::string layout_part;     // resolved layout part name
  std::string notes_part_name;
  std::string notes_part_xml;  // cleared when notes text mutates
  std::vector<Relationship> notes_rels;
  std::string pres_rel_id;     // this slide's r:id in the presentation part
  int sld_num_id = 0;          // this slide's numeric sldId
};

struct Slide {
  int index = 0;  // 1-based position in the deck
  std::string layout_name;
  Fill background;
  std::optional<std::string> transition;
  std::vector<Shape> shapes;
  std::string notes_text;

  SlideSource source;

  bool operator==(const Slide& other) const {
    return index == other.index && layout_name == other.layout_name &&
           background == other.background && transition == other.transition &&
           shapes == other.shapes && notes_text == other.notes_text;
  }
};

// Raw package-level parts that are modeled (rewritten only when the slide
// list changes) rather than carried opaquely.
struct PackageSource {
  std::string presentation_part;  // e.g. "ppt/presentation.xml"
  std::string presentation_xml;
  std::vector<Relationship> presentation_rels;
  std::string content_types_xml;
};

struct Deck {
  std::vector<Slide> slides;  // indices contiguous, 1-based, in order
  Emu slide_width_emu = 0;
  Emu slide_height_emu = 0;
  std::optional<std::filesystem::path> source_path;
  // Every part not modeled above, byte-preserved: media, themes, masters,
  // layouts, docProps, ...
  std::map<std::string, std::string> opaque_parts;

  PackageSource package;
  // layout display name -> layout part name, discovered at load time
  std::vector<std::pair<std::string, std::string>> known_layouts;
  // set when slides were added/removed/reordered since load
  bool structure_dirty = false;

  bool operator==(const Deck& other) const {
    return slides == other.slides &&
           slide_width_emu == other.slide_width_emu &&
           slide_height_emu == other.slide_height_emu &&
           opaque_parts == other.opaque_parts;
  }

  const Slide& slide_at(int index) const;  // 1-based, throws SlideOutOfRange
  Slide& slide_at(int index);
  void renumber();  // restore the index == position invariant
};

// In-order concatenation of a paragraph's run texts.
std::string paragraph_text(const Paragraph& p);

// Drops empty runs and merges adjacent runs with identical formats.
// paragraph_text is unchanged; idempotent.
Paragraph normalize_runs(Paragraph p);

// Resolves a shape selector: an exact id match wins, otherwise the selector
// must name exactly one shape. Throws NotFound / Ambiguous.
const Shape& find_shape(const Slide& slide, std::string_view selector);
Shape& find_shape(Slide& slide, std::string_view selector);

}  // namespace deckhand
