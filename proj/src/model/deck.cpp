#include "model/deck.hpp"

#include "support/error.hpp"

namespace deckhand {

std::string_view shape_kind_name(ShapeKind kind) {
  switch (kind) {
    case ShapeKind::textbox: return "textbox";
    case ShapeKind::placeholder: return "placeholder";
    case ShapeKind::picture: return "picture";
    case ShapeKind::autoshape: return "autoshape";
    case ShapeKind::table: return "table";
    case ShapeKind::chart: return "chart";
    case ShapeKind::group: return "group";
    case ShapeKind::other: return "other";
  }
  return "other";
}

std::optional<ShapeKind> shape_kind_from_name(std::string_view name) {
  if (name == "textbox") return ShapeKind::textbox;
  if (name == "placeholder") return ShapeKind::placeholder;
  if (name == "picture") return ShapeKind::picture;
  if (name == "autoshape") return ShapeKind::autoshape;
  if (name == "table") return ShapeKind::table;
  if (name == "chart") return ShapeKind::chart;
  if (name == "group") return ShapeKind::group;
  if (name == "other") return ShapeKind::other;
  return std::nullopt;
}

std::string_view fill_kind_name(FillKind kind) {
  switch (kind) {
    case FillKind::none: return "none";
    case FillKind::solid: return "solid";
    case FillKind::gradient: return "gradient";
    case FillKind::picture: return "picture";
  }
  return "none";
}

std::optional<FillKind> fill_kind_from_name(std::string_view name) {
  if (name == "none") return FillKind::none;
  if (name == "solid") return FillKind::solid;
  if (name == "gradient") return FillKind::gradient;
  if (name == "picture") return FillKind::picture;
  return std::nullopt;
}

std::string_view alignment_name(Alignment a) {
  switch (a) {
    case Alignment::left: return "left";
    case Alignment::center: return "center";
    case Alignment::right: return "right";
    case Alignment::justify: return "justify";
  }
  return "left";
}

std::optional<Alignment> alignment_from_name(std::string_view name) {
  if (name == "left") return Alignment::left;
  if (name == "center") return Alignment::center;
  if (name == "right") return Alignment::right;
  if (name == "justify") return Alignment::justify;
  return std::nullopt;
}

const Slide& Deck::slide_at(int index) const {
  if (index < 1 || index > static_cast<int>(slides.size()))
    raise(Errc::slide_out_of_range,
          "slide " + std::to_string(index) + " of " +
              std::to_string(slides.size()));
  return slides[static_cast<std::size_t>(index - 1)];
}

Slide& Deck::slide_at(int index) {
  return const_cast<Slide&>(static_cast<const Deck&>(*this).slide_at(index));
}

void Deck::renumber() {
  for (std::size_t i = 0; i < slides.size(); ++i)
    slides[i].index = static_cast<int>(i + 1);
}

std::string paragraph_text(const Paragraph& p) {
  std::string out;
  for (const Run& r : p.runs) out += r.text;
  return out;
}

Paragraph normalize_runs(Paragraph p) {
  std::vector<Run> merged;
  for (Run& r : p.runs) {
    if (r.text.empty()) continue;
    if (!merged.empty() && merged.back().format == r.format)
      merged.back().text += r.text;
    else
      merged.push_back(std::move(r));
  }
  p.runs = std::move(merged);
  return p;
}

const Shape& find_shape(const Slide& slide, std::string_view selector) {
  for (const Shape& s : slide.shapes)
    if (s.id == selector) return s;
  const Shape* match = nullptr;
  int hits = 0;
  for (const Shape& s : slide.shapes) {
    if (s.name == selector) {
      match = &s;
      ++hits;
    }
  }
  if (hits == 0)
    raise(Errc::not_found, "no shape '" + std::string(selector) +
                               "' on slide " + std::to_string(slide.index));
  if (hits > 1)
    raise(Errc::ambiguous, "shape name '" + std::string(selector) +
                               "' matches " + std::to_string(hits) +
                               " shapes on slide " +
                               std::to_string(slide.index));
  return *match;
}

Shape& find_shape(Slide& slide, std::string_view selector) {
  return const_cast<Shape&>(
      find_shape(static_cast<const Slide&>(slide), selector));
}

}  // namespace deckhand
