#include "pptx/pptx_io.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <set>

#include "pptx/xml.hpp"
#include "pptx/zip.hpp"
#include "support/error.hpp"

namespace deckhand::pptx {
namespace {

constexpr const char* kNsRelOfficeDocument =
    "http://schemas.openxmlformats.org/officeDocument/2006/relationships/officeDocument";
constexpr const char* kNsRelSlide =
    "http://schemas.openxmlformats.org/officeDocument/2006/relationships/slide";
constexpr const char* kNsRelSlideLayout =
    "http://schemas.openxmlformats.org/officeDocument/2006/relationships/slideLayout";
constexpr const char* kNsRelSlideMaster =
    "http://schemas.openxmlformats.org/officeDocument/2006/relationships/slideMaster";
constexpr const char* kNsRelNotesSlide =
    "http://schemas.openxmlformats.org/officeDocument/2006/relationships/notesSlide";
constexpr const char* kNsRelNotesMaster =
    "http://schemas.openxmlformats.org/officeDocument/2006/relationships/notesMaster";
constexpr const char* kNsRelImage =
    "http://schemas.openxmlformats.org/officeDocument/2006/relationships/image";
constexpr const char* kNsRelTheme =
    "http://schemas.openxmlformats.org/officeDocument/2006/relationships/theme";

constexpr const char* kCtPresentation =
    "application/vnd.openxmlformats-officedocument.presentationml.presentation.main+xml";
constexpr const char* kCtSlide =
    "application/vnd.openxmlformats-officedocument.presentationml.slide+xml";
constexpr const char* kCtSlideLayout =
    "application/vnd.openxmlformats-officedocument.presentationml.slideLayout+xml";
constexpr const char* kCtSlideMaster =
    "application/vnd.openxmlformats-officedocument.presentationml.slideMaster+xml";
constexpr const char* kCtNotesSlide =
    "application/vnd.openxmlformats-officedocument.presentationml.notesSlide+xml";
constexpr const char* kCtTheme =
    "application/vnd.openxmlformats-officedocument.theme+xml";
constexpr const char* kCtRels =
    "application/vnd.openxmlformats-package.relationships+xml";

constexpr const char* kRootAttrs =
    " xmlns:a=\"http://schemas.openxmlformats.org/drawingml/2006/main\""
    " xmlns:r=\"http://schemas.openxmlformats.org/officeDocument/2006/relationships\""
    " xmlns:p=\"http://schemas.openxmlformats.org/presentationml/2006/main\"";

constexpr const char* kDefaultSpTreeHeader =
    "<p:nvGrpSpPr><p:cNvPr id=\"1\" name=\"\"/><p:cNvGrpSpPr/><p:nvPr/>"
    "</p:nvGrpSpPr><p:grpSpPr><a:xfrm><a:off x=\"0\" y=\"0\"/>"
    "<a:ext cx=\"0\" cy=\"0\"/><a:chOff x=\"0\" y=\"0\"/>"
    "<a:chExt cx=\"0\" cy=\"0\"/></a:xfrm></p:grpSpPr>";

constexpr const char* kDefaultAfterCSld =
    "<p:clrMapOvr><a:masterClrMapping/></p:clrMapOvr>";

std::string part_dir(std::string_view part) {
  auto slash = part.rfind('/');
  return slash == std::string_view::npos ? std::string()
                                         : std::string(part.substr(0, slash));
}

// Resolves a relationship target against the directory of its source part.
std::string resolve_target(std::string_view base_dir, std::string_view target) {
  if (!target.empty() && target.front() == '/') return std::string(target.substr(1));
  std::vector<std::string> stack;
  auto push_path = [&stack](std::string_view path) {
    std::size_t i = 0;
    while (i <= path.size()) {
      auto j = path.find('/', i);
      if (j == std::string_view::npos) j = path.size();
      std::string_view seg = path.substr(i, j - i);
      if (seg == "..") {
        if (!stack.empty()) stack.pop_back();
      } else if (!seg.empty() && seg != ".") {
        stack.emplace_back(seg);
      }
      i = j + 1;
    }
  };
  if (!base_dir.empty()) push_path(base_dir);
  push_path(target);
  std::string out;
  for (const std::string& seg : stack) {
    if (!out.empty()) out += '/';
    out += seg;
  }
  return out;
}

// Relative path from `from_dir` to `part` ("ppt/slides" -> "ppt/media/x.png"
// gives "../media/x.png").
std::string make_relative(std::string_view from_dir, std::string_view part) {
  std::vector<std::string_view> a, b;
  auto split = [](std::string_view s, std::vector<std::string_view>& out) {
    std::size_t i = 0;
    while (i <= s.size()) {
      auto j = s.find('/', i);
      if (j == std::string_view::npos) j = s.size();
      if (j > i) out.push_back(s.substr(i, j - i));
      i = j + 1;
    }
  };
  split(from_dir, a);
  split(part, b);
  std::size_t common = 0;
  while (common < a.size() && common + 1 < b.size() && a[common] == b[common])
    ++common;
  std::string out;
  for (std::size_t i = common; i < a.size(); ++i) out += "../";
  for (std::size_t i = common; i < b.size(); ++i) {
    out += b[i];
    if (i + 1 < b.size()) out += '/';
  }
  return out;
}

std::optional<Rgb> parse_hex_color(std::string_view hex) {
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

std::string hex_color(Rgb rgb) {
  char buf[8];
  std::snprintf(buf, sizeof buf, "%06X", rgb & kMaxRgb);
  return buf;
}

Emu parse_emu(std::string_view text) {
  try {
    return std::stoll(std::string(text));
  } catch (...) {
    return 0;
  }
}

// ---------------------------------------------------------------------------
// Relationships

std::vector<Relationship> parse_rels(std::string_view bytes,
                                     const std::string& source_part) {
  std::vector<Relationship> out;
  xml::Node root = xml::parse(bytes, source_part);
  std::string base = part_dir(source_part);
  // ".../_rels/x.rels" targets resolve against the parent of _rels
  if (base.size() >= 5 && base.substr(base.size() - 5) == "_rels")
    base = part_dir(base);
  for (const auto* rel : root.children_named("Relationship")) {
    Relationship r;
    r.id = rel->attr("Id");
    r.type = rel->attr("Type");
    r.target = rel->attr("Target");
    r.external = rel->attr("TargetMode") == "External";
    if (!r.external) r.resolved_target = resolve_target(base, r.target);
    out.push_back(std::move(r));
  }
  return out;
}

std::string serialize_rels(const std::vector<Relationship>& rels) {
  std::string out =
      "<?xml version=\"1.0\" encoding=\"UTF-8\" standalone=\"yes\"?>\r\n"
      "<Relationships xmlns=\"http://schemas.openxmlformats.org/package/2006/"
      "relationships\">";
  for (const Relationship& r : rels) {
    out += "<Relationship Id=\"" + xml::escape_attr(r.id) + "\" Type=\"" +
           xml::escape_attr(r.type) + "\" Target=\"" +
           xml::escape_attr(r.target) + "\"";
    if (r.external) out += " TargetMode=\"External\"";
    out += "/>";
  }
  out += "</Relationships>";
  return out;
}

const Relationship* rel_by_id(const std::vector<Relationship>& rels,
                              std::string_view id) {
  for (const Relationship& r : rels)
    if (r.id == id) return &r;
  return nullptr;
}

const Relationship* rel_by_type(const std::vector<Relationship>& rels,
                                std::string_view type) {
  for (const Relationship& r : rels)
    if (r.type == type) return &r;
  return nullptr;
}

int max_rel_number(const std::vector<Relationship>& rels) {
  int max = 0;
  for (const Relationship& r : rels) {
    if (r.id.rfind("rId", 0) == 0) {
      try {
        max = std::max(max, std::stoi(r.id.substr(3)));
      } catch (...) {
      }
    }
  }
  return max;
}

// ---------------------------------------------------------------------------
// Run / paragraph / fill parsing

std::optional<Fill> parse_fill_node(const xml::Node& holder) {
  for (const auto& child : holder.children) {
    const xml::Node* el = std::get_if<xml::Node>(&child);
    if (!el) continue;
    auto local = el->local();
    if (local == "noFill") return Fill{FillKind::none, std::nullopt};
    if (local == "solidFill") {
      if (const xml::Node* srgb = el->child("srgbClr")) {
        if (auto rgb = parse_hex_color(srgb->attr("val")))
          return Fill{FillKind::solid, rgb};
      }
      return std::nullopt;  // scheme/system color: inherited, not guessed
    }
    if (local == "gradFill") return Fill{FillKind::gradient, std::nullopt};
    if (local == "blipFill") return Fill{FillKind::picture, std::nullopt};
  }
  return std::nullopt;
}

RunFormat parse_run_format(const xml::Node* rpr) {
  RunFormat fmt;
  if (!rpr) return fmt;
  if (auto sz = rpr->attr("sz"); !sz.empty())
    fmt.size_points = parse_emu(sz) / 100.0;
  if (auto b = rpr->attr("b"); !b.empty()) fmt.bold = (b == "1" || b == "true");
  if (auto i = rpr->attr("i"); !i.empty()) fmt.italic = (i == "1" || i == "true");
  if (auto u = rpr->attr("u"); !u.empty()) fmt.underline = (u != "none");
  if (const xml::Node* fill = rpr->child("solidFill"))
    if (const xml::Node* srgb = fill->child("srgbClr"))
      fmt.color_rgb = parse_hex_color(srgb->attr("val"));
  if (const xml::Node* latin = rpr->child("latin"))
    if (auto face = latin->attr("typeface"); !face.empty())
      fmt.font_name = std::string(face);
  return fmt;
}

Paragraph parse_paragraph(const xml::Node& p) {
  Paragraph out;
  if (const xml::Node* ppr = p.child("pPr")) {
    auto algn = ppr->attr("algn");
    if (algn == "l") out.alignment = Alignment::left;
    else if (algn == "ctr") out.alignment = Alignment::center;
    else if (algn == "r") out.alignment = Alignment::right;
    else if (algn == "just") out.alignment = Alignment::justify;
    if (ppr->child("buNone")) out.bullet = false;
    else if (ppr->child("buChar") || ppr->child("buAutoNum")) out.bullet = true;
  }
  for (const auto& child : p.children) {
    const xml::Node* el = std::get_if<xml::Node>(&child);
    if (!el) continue;
    auto local = el->local();
    if (local == "r" || local == "fld") {
      Run run;
      run.format = parse_run_format(el->child("rPr"));
      if (const xml::Node* t = el->child("t")) run.text = t->text();
      out.runs.push_back(std::move(run));
    } else if (local == "br") {
      Run run;
      run.format = parse_run_format(el->child("rPr"));
      run.text = "\n";
      out.runs.push_back(std::move(run));
    }
  }
  return out;
}

TextFrame parse_text_frame(const xml::Node& tx_body) {
  TextFrame frame;
  for (const auto* p : tx_body.children_named("p"))
    frame.paragraphs.push_back(parse_paragraph(*p));
  return frame;
}

Box parse_xfrm(const xml::Node* xfrm) {
  Box box;
  if (!xfrm) return box;
  if (const xml::Node* off = xfrm->child("off")) {
    box.left_emu = parse_emu(off->attr("x"));
    box.top_emu = parse_emu(off->attr("y"));
  }
  if (const xml::Node* ext = xfrm->child("ext")) {
    box.width_emu = parse_emu(ext->attr("cx"));
    box.height_emu = parse_emu(ext->attr("cy"));
  }
  return box;
}

// Finds the first descendant cNvPr to recover id/name from wrappers we do not
// model (AlternateContent, contentPart, ...).
const xml::Node* find_cnvpr(const xml::Node& node) {
  if (node.local() == "cNvPr") return &node;
  for (const auto& child : node.children)
    if (const xml::Node* el = std::get_if<xml::Node>(&child))
      if (const xml::Node* hit = find_cnvpr(*el)) return hit;
  return nullptr;
}

Shape parse_shape(const xml::Node& el, std::string_view slide_xml,
                  const std::vector<Relationship>& rels, int fallback_ordinal) {
  Shape shape;
  shape.raw_xml = std::string(xml::fragment(slide_xml, el));

  auto local = el.local();
  const xml::Node* nv = nullptr;
  if (local == "sp") {
    nv = el.child("nvSpPr");
    shape.kind = ShapeKind::autoshape;
    if (nv) {
      if (const xml::Node* cnv = nv->child("cNvSpPr"))
        if (cnv->attr("txBox") == "1") shape.kind = ShapeKind::textbox;
      if (const xml::Node* nvpr = nv->child("nvPr"))
        if (const xml::Node* ph = nvpr->child("ph")) {
          shape.kind = ShapeKind::placeholder;
          shape.ph_type = std::string(ph->attr("type"));
        }
    }
    if (const xml::Node* sppr = el.child("spPr")) {
      shape.box = parse_xfrm(sppr->child("xfrm"));
      shape.fill = parse_fill_node(*sppr);
    }
    if (const xml::Node* tx = el.child("txBody"))
      shape.text_frame = parse_text_frame(*tx);
  } else if (local == "pic") {
    shape.kind = ShapeKind::picture;
    nv = el.child("nvPicPr");
    if (const xml::Node* sppr = el.child("spPr"))
      shape.box = parse_xfrm(sppr->child("xfrm"));
    if (const xml::Node* blip_fill = el.child("blipFill"))
      if (const xml::Node* blip = blip_fill->child("blip")) {
        shape.image_rel_id = std::string(blip->attr("embed"));
        if (const Relationship* rel = rel_by_id(rels, shape.image_rel_id))
          if (!rel->external) shape.image_ref = rel->resolved_target;
      }
  } else if (local == "graphicFrame") {
    nv = el.child("nvGraphicFramePr");
    shape.box = parse_xfrm(el.child("xfrm"));
    shape.kind = ShapeKind::other;
    if (const xml::Node* graphic = el.child("graphic"))
      if (const xml::Node* data = graphic->child("graphicData")) {
        auto uri = data->attr("uri");
        if (uri.find("/table") != std::string_view::npos)
          shape.kind = ShapeKind::table;
        else if (uri.find("/chart") != std::string_view::npos)
          shape.kind = ShapeKind::chart;
      }
  } else if (local == "grpSp") {
    nv = el.child("nvGrpSpPr");
    shape.kind = ShapeKind::group;
    if (const xml::Node* gpr = el.child("grpSpPr"))
      shape.box = parse_xfrm(gpr->child("xfrm"));
  } else {
    shape.kind = ShapeKind::other;
    if (const xml::Node* sppr = el.child("spPr"))
      shape.box = parse_xfrm(sppr->child("xfrm"));
  }

  const xml::Node* cnvpr = nv ? nv->child("cNvPr") : nullptr;
  if (!cnvpr) cnvpr = find_cnvpr(el);
  if (cnvpr) {
    shape.id = std::string(cnvpr->attr("id"));
    shape.name = std::string(cnvpr->attr("name"));
  }
  if (shape.id.empty()) shape.id = "x" + std::to_string(fallback_ordinal);
  return shape;
}

std::string parse_notes_text(const xml::Node& notes_root) {
  const xml::Node* csld = notes_root.child("cSld");
  const xml::Node* tree = csld ? csld->child("spTree") : nullptr;
  if (!tree) return {};
  for (const auto* sp : tree->children_named("sp")) {
    const xml::Node* nv = sp->child("nvSpPr");
    const xml::Node* nvpr = nv ? nv->child("nvPr") : nullptr;
    const xml::Node* ph = nvpr ? nvpr->child("ph") : nullptr;
    if (!ph || ph->attr("type") != "body") continue;
    const xml::Node* tx = sp->child("txBody");
    if (!tx) return {};
    std::string text;
    bool first = true;
    for (const auto* p : tx->children_named("p")) {
      if (!first) text += '\n';
      first = false;
      text += paragraph_text(parse_paragraph(*p));
    }
    return text;
  }
  return {};
}

// ---------------------------------------------------------------------------
// XML generation

std::string fill_xml(const Fill& fill) {
  switch (fill.kind) {
    case FillKind::none:
      return "<a:noFill/>";
    case FillKind::solid:
      return "<a:solidFill><a:srgbClr val=\"" +
             hex_color(fill.color_rgb.value_or(0)) + "\"/></a:solidFill>";
    case FillKind::gradient:
      return "<a:gradFill><a:gsLst><a:gs pos=\"0\"><a:srgbClr val=\"FFFFFF\"/>"
             "</a:gs><a:gs pos=\"100000\"><a:srgbClr val=\"000000\"/></a:gs>"
             "</a:gsLst><a:lin ang=\"5400000\" scaled=\"0\"/></a:gradFill>";
    case FillKind::picture:
      return "<a:blipFill><a:blip/><a:stretch><a:fillRect/></a:stretch>"
             "</a:blipFill>";
  }
  return {};
}

std::string xfrm_xml(const Box& box) {
  return "<a:xfrm><a:off x=\"" + std::to_string(box.left_emu) + "\" y=\"" +
         std::to_string(box.top_emu) + "\"/><a:ext cx=\"" +
         std::to_string(box.width_emu) + "\" cy=\"" +
         std::to_string(box.height_emu) + "\"/></a:xfrm>";
}

std::string run_format_xml(const char* tag, const RunFormat& fmt) {
  std::string out = "<a:";
  out += tag;
  if (fmt.size_points)
    out += " sz=\"" +
           std::to_string(static_cast<long long>(*fmt.size_points * 100 + 0.5)) +
           "\"";
  if (fmt.bold) out += std::string(" b=\"") + (*fmt.bold ? "1" : "0") + "\"";
  if (fmt.italic) out += std::string(" i=\"") + (*fmt.italic ? "1" : "0") + "\"";
  if (fmt.underline)
    out += std::string(" u=\"") + (*fmt.underline ? "sng" : "none") + "\"";
  bool has_children = fmt.color_rgb || fmt.font_name;
  if (!has_children) return out + "/>";
  out += ">";
  if (fmt.color_rgb)
    out += "<a:solidFill><a:srgbClr val=\"" + hex_color(*fmt.color_rgb) +
           "\"/></a:solidFill>";
  if (fmt.font_name)
    out += "<a:latin typeface=\"" + xml::escape_attr(*fmt.font_name) + "\"/>";
  out += "</a:";
  out += tag;
  out += ">";
  return out;
}

std::string paragraph_xml(const Paragraph& para) {
  std::string out = "<a:p>";
  if (para.alignment || para.bullet) {
    out += "<a:pPr";
    if (para.alignment) {
      const char* token = "l";
      switch (*para.alignment) {
        case Alignment::left: token = "l"; break;
        case Alignment::center: token = "ctr"; break;
        case Alignment::right: token = "r"; break;
        case Alignment::justify: token = "just"; break;
      }
      out += std::string(" algn=\"") + token + "\"";
    }
    if (para.bullet && !*para.bullet) {
      out += "><a:buNone/></a:pPr>";
    } else if (para.bullet && *para.bullet) {
      out += "><a:buChar char=\"\xE2\x80\xA2\"/></a:pPr>";
    } else {
      out += "/>";
    }
  }
  for (const Run& run : para.runs) {
    if (run.text == "\n") {
      std::string rpr = run_format_xml("rPr", run.format);
      out += rpr == "<a:rPr/>" ? "<a:br/>" : "<a:br>" + rpr + "</a:br>";
      continue;
    }
    out += "<a:r>";
    std::string rpr = run_format_xml("rPr", run.format);
    if (rpr != "<a:rPr/>") out += rpr;
    out += "<a:t>" + xml::escape_text(run.text) + "</a:t></a:r>";
  }
  out += "</a:p>";
  return out;
}

std::string text_body_xml(const TextFrame& frame) {
  std::string out = "<p:txBody><a:bodyPr/><a:lstStyle/>";
  for (const Paragraph& para : frame.paragraphs) out += paragraph_xml(para);
  out += "</p:txBody>";
  return out;
}

std::string generate_shape_xml(const Shape& shape) {
  switch (shape.kind) {
    case ShapeKind::textbox:
    case ShapeKind::placeholder:
    case ShapeKind::autoshape: {
      std::string out = "<p:sp><p:nvSpPr><p:cNvPr id=\"" +
                        xml::escape_attr(shape.id) + "\" name=\"" +
                        xml::escape_attr(shape.name) + "\"/>";
      out += shape.kind == ShapeKind::textbox ? "<p:cNvSpPr txBox=\"1\"/>"
                                              : "<p:cNvSpPr/>";
      if (shape.kind == ShapeKind::placeholder) {
        out += "<p:nvPr><p:ph";
        if (!shape.ph_type.empty())
          out += " type=\"" + xml::escape_attr(shape.ph_type) + "\"";
        out += "/></p:nvPr>";
      } else {
        out += "<p:nvPr/>";
      }
      out += "</p:nvSpPr><p:spPr>" + xfrm_xml(shape.box) +
             "<a:prstGeom prst=\"rect\"><a:avLst/></a:prstGeom>";
      if (shape.fill) out += fill_xml(*shape.fill);
      out += "</p:spPr>";
      if (shape.text_frame) out += text_body_xml(*shape.text_frame);
      out += "</p:sp>";
      return out;
    }
    case ShapeKind::picture: {
      std::string out = "<p:pic><p:nvPicPr><p:cNvPr id=\"" +
                        xml::escape_attr(shape.id) + "\" name=\"" +
                        xml::escape_attr(shape.name) +
                        "\"/><p:cNvPicPr/><p:nvPr/></p:nvPicPr><p:blipFill>";
      out += shape.image_rel_id.empty()
                 ? "<a:blip/>"
                 : "<a:blip r:embed=\"" + xml::escape_attr(shape.image_rel_id) +
                       "\"/>";
      out += "<a:stretch><a:fillRect/></a:stretch></p:blipFill><p:spPr>" +
             xfrm_xml(shape.box) +
             "<a:prstGeom prst=\"rect\"><a:avLst/></a:prstGeom></p:spPr></p:pic>";
      return out;
    }
    default:
      raise(Errc::internal,
            "cannot generate XML for a '" +
                std::string(shape_kind_name(shape.kind)) +
                "' shape without source bytes");
  }
}

std::string generate_slide_xml(const Slide& slide) {
  std::string out =
      "<?xml version=\"1.0\" encoding=\"UTF-8\" standalone=\"yes\"?>\r\n";
  out += "<p:sld";
  out += slide.source.root_attrs.empty() ? kRootAttrs : slide.source.root_attrs;
  out += "><p:cSld>";
  if (slide.source.bg_fragment.has_value()) {
    out += *slide.source.bg_fragment;
  } else if (slide.background.kind != FillKind::none) {
    out += "<p:bg><p:bgPr>" + fill_xml(slide.background) +
           "<a:effectLst/></p:bgPr></p:bg>";
  }
  out += "<p:spTree>";
  out += slide.source.sptree_header.empty() ? kDefaultSpTreeHeader
                                            : slide.source.sptree_header;
  for (const Shape& shape : slide.shapes)
    out += shape.raw_xml.empty() ? generate_shape_xml(shape) : shape.raw_xml;
  out += "</p:spTree>";
  out += slide.source.csld_tail;
  out += "</p:cSld>";
  if (slide.source.after_csld.empty()) {
    out += kDefaultAfterCSld;
    // loaded slides keep their original transition in after_csld
    if (slide.transition)
      out += "<p:transition><p:" + *slide.transition + "/></p:transition>";
  } else {
    out += slide.source.after_csld;
  }
  out += "</p:sld>";
  return out;
}

std::string generate_notes_xml(const Slide& slide) {
  std::string out =
      "<?xml version=\"1.0\" encoding=\"UTF-8\" standalone=\"yes\"?>\r\n";
  out += "<p:notes";
  out += kRootAttrs;
  out +=
      "><p:cSld><p:spTree><p:nvGrpSpPr><p:cNvPr id=\"1\" name=\"\"/>"
      "<p:cNvGrpSpPr/><p:nvPr/></p:nvGrpSpPr><p:grpSpPr/>"
      "<p:sp><p:nvSpPr><p:cNvPr id=\"2\" name=\"Notes Placeholder 1\"/>"
      "<p:cNvSpPr><a:spLocks noGrp=\"1\"/></p:cNvSpPr>"
      "<p:nvPr><p:ph type=\"body\" idx=\"1\"/></p:nvPr></p:nvSpPr><p:spPr/>"
      "<p:txBody><a:bodyPr/><a:lstStyle/>";
  std::string_view text = slide.notes_text;
  std::size_t start = 0;
  for (;;) {
    auto nl = text.find('\n', start);
    std::string_view line =
        text.substr(start, nl == std::string_view::npos ? nl : nl - start);
    out += line.empty() ? "<a:p/>"
                        : "<a:p><a:r><a:t>" + xml::escape_text(line) +
                              "</a:t></a:r></a:p>";
    if (nl == std::string_view::npos) break;
    start = nl + 1;
  }
  out +=
      "</p:txBody></p:sp></p:spTree></p:cSld>"
      "<p:clrMapOvr><a:masterClrMapping/></p:clrMapOvr></p:notes>";
  return out;
}

// Minimal theme: enough structure for consumers that insist on one.
std::string minimal_theme_xml() {
  return
      "<?xml version=\"1.0\" encoding=\"UTF-8\" standalone=\"yes\"?>\r\n"
      "<a:theme xmlns:a=\"http://schemas.openxmlformats.org/drawingml/2006/main\""
      " name=\"Office\"><a:themeElements><a:clrScheme name=\"Office\">"
      "<a:dk1><a:sysClr val=\"windowText\" lastClr=\"000000\"/></a:dk1>"
      "<a:lt1><a:sysClr val=\"window\" lastClr=\"FFFFFF\"/></a:lt1>"
      "<a:dk2><a:srgbClr val=\"44546A\"/></a:dk2>"
      "<a:lt2><a:srgbClr val=\"E7E6E6\"/></a:lt2>"
      "<a:accent1><a:srgbClr val=\"4472C4\"/></a:accent1>"
      "<a:accent2><a:srgbClr val=\"ED7D31\"/></a:accent2>"
      "<a:accent3><a:srgbClr val=\"A5A5A5\"/></a:accent3>"
      "<a:accent4><a:srgbClr val=\"FFC000\"/></a:accent4>"
      "<a:accent5><a:srgbClr val=\"5B9BD5\"/></a:accent5>"
      "<a:accent6><a:srgbClr val=\"70AD47\"/></a:accent6>"
      "<a:hlink><a:srgbClr val=\"0563C1\"/></a:hlink>"
      "<a:folHlink><a:srgbClr val=\"954F72\"/></a:folHlink></a:clrScheme>"
      "<a:fontScheme name=\"Office\"><a:majorFont><a:latin typeface=\"Calibri\"/>"
      "<a:ea typeface=\"\"/><a:cs typeface=\"\"/></a:majorFont>"
      "<a:minorFont><a:latin typeface=\"Calibri\"/><a:ea typeface=\"\"/>"
      "<a:cs typeface=\"\"/></a:minorFont></a:fontScheme>"
      "<a:fmtScheme name=\"Office\"><a:fillStyleLst>"
      "<a:solidFill><a:schemeClr val=\"phClr\"/></a:solidFill>"
      "<a:solidFill><a:schemeClr val=\"phClr\"/></a:solidFill>"
      "<a:solidFill><a:schemeClr val=\"phClr\"/></a:solidFill></a:fillStyleLst>"
      "<a:lnStyleLst><a:ln><a:solidFill><a:schemeClr val=\"phClr\"/></a:solidFill></a:ln>"
      "<a:ln><a:solidFill><a:schemeClr val=\"phClr\"/></a:solidFill></a:ln>"
      "<a:ln><a:solidFill><a:schemeClr val=\"phClr\"/></a:solidFill></a:ln></a:lnStyleLst>"
      "<a:effectStyleLst><a:effectStyle><a:effectLst/></a:effectStyle>"
      "<a:effectStyle><a:effectLst/></a:effectStyle>"
      "<a:effectStyle><a:effectLst/></a:effectStyle></a:effectStyleLst>"
      "<a:bgFillStyleLst><a:solidFill><a:schemeClr val=\"phClr\"/></a:solidFill>"
      "<a:solidFill><a:schemeClr val=\"phClr\"/></a:solidFill>"
      "<a:solidFill><a:schemeClr val=\"phClr\"/></a:solidFill></a:bgFillStyleLst>"
      "</a:fmtScheme></a:themeElements></a:theme>";
}

std::string generate_layout_xml(const std::string& name) {
  return
      "<?xml version=\"1.0\" encoding=\"UTF-8\" standalone=\"yes\"?>\r\n"
      "<p:sldLayout" + std::string(kRootAttrs) +
      "><p:cSld name=\"" + xml::escape_attr(name) + "\"><p:spTree>" +
      kDefaultSpTreeHeader +
      "</p:spTree></p:cSld><p:clrMapOvr><a:masterClrMapping/></p:clrMapOvr>"
      "</p:sldLayout>";
}

// ---------------------------------------------------------------------------
// Content types

struct ContentTypes {
  std::vector<std::pair<std::string, std::string>> defaults;   // ext -> type
  std::vector<std::pair<std::string, std::string>> overrides;  // /part -> type

  void ensure_default(const std::string& ext, const std::string& type) {
    for (auto& [e, t] : defaults)
      if (e == ext) return;
    defaults.emplace_back(ext, type);
  }
  void ensure_override(const std::string& part, const std::string& type) {
    for (auto& [p, t] : overrides)
      if (p == part) return;
    overrides.emplace_back(part, type);
  }
  void drop_override(const std::string& part) {
    std::erase_if(overrides, [&](const auto& e) { return e.first == part; });
  }
  bool has_override(const std::string& part) const {
    return std::any_of(overrides.begin(), overrides.end(),
                       [&](const auto& e) { return e.first == part; });
  }
};

ContentTypes parse_content_types(std::string_view bytes) {
  ContentTypes out;
  xml::Node root = xml::parse(bytes, "[Content_Types].xml");
  for (const auto& child : root.children) {
    const xml::Node* el = std::get_if<xml::Node>(&child);
    if (!el) continue;
    if (el->local() == "Default")
      out.defaults.emplace_back(std::string(el->attr("Extension")),
                                std::string(el->attr("ContentType")));
    else if (el->local() == "Override")
      out.overrides.emplace_back(std::string(el->attr("PartName")),
                                 std::string(el->attr("ContentType")));
  }
  return out;
}

std::string serialize_content_types(const ContentTypes& ct) {
  std::string out =
      "<?xml version=\"1.0\" encoding=\"UTF-8\" standalone=\"yes\"?>\r\n"
      "<Types xmlns=\"http://schemas.openxmlformats.org/package/2006/"
      "content-types\">";
  for (const auto& [ext, type] : ct.defaults)
    out += "<Default Extension=\"" + xml::escape_attr(ext) +
           "\" ContentType=\"" + xml::escape_attr(type) + "\"/>";
  for (const auto& [part, type] : ct.overrides)
    out += "<Override PartName=\"" + xml::escape_attr(part) +
           "\" ContentType=\"" + xml::escape_attr(type) + "\"/>";
  out += "</Types>";
  return out;
}

// ---------------------------------------------------------------------------
// Loading

struct PartMap {
  std::map<std::string, std::string> parts;

  const std::string* find(const std::string& name) const {
    auto it = parts.find(name);
    return it == parts.end() ? nullptr : &it->second;
  }
  const std::string& require(const std::string& name) const {
    const std::string* p = find(name);
    if (!p) raise(Errc::malformed_package, "missing part " + name);
    return *p;
  }
};

std::string rels_name_for(const std::string& part) {
  auto slash = part.rfind('/');
  std::string dir = slash == std::string::npos ? "" : part.substr(0, slash + 1);
  std::string base = slash == std::string::npos ? part : part.substr(slash + 1);
  return dir + "_rels/" + base + ".rels";
}

Slide parse_slide_part(const PartMap& parts, const std::string& part_name,
                       int index) {
  Slide slide;
  slide.index = index;
  slide.source.part_name = part_name;
  slide.source.part_xml = parts.require(part_name);

  if (const std::string* rels = parts.find(rels_name_for(part_name)))
    slide.source.rels = parse_rels(*rels, part_name);

  xml::Node root;
  try {
    root = xml::parse(slide.source.part_xml, part_name);
  } catch (const Error& e) {
    raise(Errc::malformed_xml, std::string(e.what()));
  }

  for (const xml::Attr& a : root.attrs)
    slide.source.root_attrs +=
        " " + a.name + "=\"" + xml::escape_attr(a.value) + "\"";

  const std::string& buf = slide.source.part_xml;
  const xml::Node* csld = root.child("cSld");
  if (!csld)
    raise(Errc::malformed_xml, part_name + ": no cSld element");

  bool seen_csld = false;
  for (const auto& child : root.children) {
    const xml::Node* el = std::get_if<xml::Node>(&child);
    if (!el) continue;
    if (el->local() == "cSld") {
      seen_csld = true;
      continue;
    }
    if (seen_csld)
      slide.source.after_csld += std::string(xml::fragment(buf, *el));
  }

  const xml::Node* bg = csld->child("bg");
  if (bg) {
    slide.source.bg_fragment = std::string(xml::fragment(buf, *bg));
    const xml::Node* bgpr = bg->child("bgPr");
    if (bgpr)
      slide.background = parse_fill_node(*bgpr).value_or(Fill{});
  } else {
    slide.source.bg_fragment = std::string();
  }

  const xml::Node* tree = csld->child("spTree");
  if (!tree) raise(Errc::malformed_xml, part_name + ": no spTree element");
  bool seen_tree = false;
  for (const auto& child : csld->children) {
    const xml::Node* el = std::get_if<xml::Node>(&child);
    if (!el) continue;
    if (el->local() == "spTree") {
      seen_tree = true;
      continue;
    }
    if (seen_tree)
      slide.source.csld_tail += std::string(xml::fragment(buf, *el));
  }

  int ordinal = 0;
  for (const auto& child : tree->children) {
    const xml::Node* el = std::get_if<xml::Node>(&child);
    if (!el) continue;
    auto local = el->local();
    ++ordinal;
    if (local == "nvGrpSpPr" || local == "grpSpPr") {
      slide.source.sptree_header += std::string(xml::fragment(buf, *el));
      continue;
    }
    slide.shapes.push_back(parse_shape(*el, buf, slide.source.rels, ordinal));
  }

  // transition lives among the after-cSld siblings
  for (const auto& child : root.children) {
    const xml::Node* el = std::get_if<xml::Node>(&child);
    if (!el || el->local() != "transition") continue;
    std::string label = "cut";
    for (const auto& tc : el->children)
      if (const xml::Node* effect = std::get_if<xml::Node>(&tc)) {
        label = std::string(effect->local());
        break;
      }
    slide.transition = label;
    break;
  }

  // layout name from the related layout part
  if (const Relationship* layout_rel =
          rel_by_type(slide.source.rels, kNsRelSlideLayout)) {
    slide.source.layout_part = layout_rel->resolved_target;
    if (const std::string* layout_xml = parts.find(layout_rel->resolved_target)) {
      try {
        xml::Node layout = xml::parse(*layout_xml, layout_rel->resolved_target);
        if (const xml::Node* lcsld = layout.child("cSld"))
          slide.layout_name = std::string(lcsld->attr("name"));
        if (slide.layout_name.empty()) {
          auto type = layout.attr("type");
          slide.layout_name = std::string(type);
        }
      } catch (const Error&) {
        // tolerate an unparseable layout; name stays empty
      }
    }
  }

  // notes
  if (const Relationship* notes_rel =
          rel_by_type(slide.source.rels, kNsRelNotesSlide)) {
    slide.source.notes_part_name = notes_rel->resolved_target;
    if (const std::string* notes_xml = parts.find(notes_rel->resolved_target)) {
      slide.source.notes_part_xml = *notes_xml;
      try {
        xml::Node notes = xml::parse(*notes_xml, notes_rel->resolved_target);
        slide.notes_text = parse_notes_text(notes);
      } catch (const Error& e) {
        raise(Errc::malformed_xml, std::string(e.what()));
      }
      if (const std::string* nrels =
              parts.find(rels_name_for(notes_rel->resolved_target)))
        slide.source.notes_rels =
            parse_rels(*nrels, notes_rel->resolved_target);
    }
  }

  return slide;
}

}  // namespace

Deck load_deck_bytes(std::string_view bytes) {
  auto entries = zip::read_archive_bytes(bytes);
  PartMap parts;
  for (auto& e : entries) parts.parts[e.name] = std::move(e.data);

  Deck deck;

  const std::string& root_rels = parts.require("_rels/.rels");
  auto package_rels = parse_rels(root_rels, ".rels");
  const Relationship* doc_rel = rel_by_type(package_rels, kNsRelOfficeDocument);
  if (!doc_rel)
    raise(Errc::malformed_package, "no officeDocument relationship");

  deck.package.presentation_part = doc_rel->resolved_target;
  deck.package.presentation_xml = parts.require(doc_rel->resolved_target);
  deck.package.content_types_xml = parts.require("[Content_Types].xml");

  std::string pres_rels_name = rels_name_for(deck.package.presentation_part);
  if (const std::string* pres_rels = parts.find(pres_rels_name))
    deck.package.presentation_rels =
        parse_rels(*pres_rels, deck.package.presentation_part);

  xml::Node pres;
  try {
    pres = xml::parse(deck.package.presentation_xml,
                      deck.package.presentation_part);
  } catch (const Error& e) {
    raise(Errc::malformed_xml, std::string(e.what()));
  }

  if (const xml::Node* size = pres.child("sldSz")) {
    deck.slide_width_emu = parse_emu(size->attr("cx"));
    deck.slide_height_emu = parse_emu(size->attr("cy"));
  }
  if (deck.slide_width_emu <= 0 || deck.slide_height_emu <= 0)
    raise(Errc::malformed_package, "presentation has no valid slide size");

  std::set<std::string> modeled = {"[Content_Types].xml",
                                   deck.package.presentation_part,
                                   pres_rels_name};

  if (const xml::Node* sld_list = pres.child("sldIdLst")) {
    int index = 0;
    for (const auto* sld_id : sld_list->children_named("sldId")) {
      std::string rid = std::string(sld_id->attr("id"));
      std::string rel_id = std::string(sld_id->attr("r:id"));
      if (rel_id.empty()) rel_id = std::string(sld_id->attr("id"));
      const Relationship* rel =
          rel_by_id(deck.package.presentation_rels, sld_id->attr("r:id"));
      if (!rel)
        rel = rel_by_id(deck.package.presentation_rels, sld_id->attr("id"));
      if (!rel)
        raise(Errc::malformed_package,
              "slide relationship " + rel_id + " not found");
      ++index;
      Slide slide = parse_slide_part(parts, rel->resolved_target, index);
      slide.source.pres_rel_id = rel->id;
      try {
        slide.source.sld_num_id = std::stoi(rid);
      } catch (...) {
        slide.source.sld_num_id = 255 + index;
      }
      modeled.insert(slide.source.part_name);
      modeled.insert(rels_name_for(slide.source.part_name));
      if (!slide.source.notes_part_name.empty()) {
        modeled.insert(slide.source.notes_part_name);
        modeled.insert(rels_name_for(slide.source.notes_part_name));
      }
      deck.slides.push_back(std::move(slide));
    }
  }

  // layout registry
  for (const auto& [name, data] : parts.parts) {
    if (name.rfind("ppt/slideLayouts/", 0) != 0) continue;
    if (name.size() < 4 || name.substr(name.size() - 4) != ".xml") continue;
    if (name.find("_rels") != std::string::npos) continue;
    try {
      xml::Node layout = xml::parse(data, name);
      std::string display;
      if (const xml::Node* csld = layout.child("cSld"))
        display = std::string(csld->attr("name"));
      if (display.empty()) display = std::string(layout.attr("type"));
      if (display.empty()) display = name;
      deck.known_layouts.emplace_back(display, name);
    } catch (const Error&) {
      // not a layout we can read; leave it opaque
    }
  }

  for (auto& [name, data] : parts.parts)
    if (!modeled.count(name)) deck.opaque_parts[name] = std::move(data);

  return deck;
}

Deck load_deck(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) raise(Errc::io, "cannot open " + path.string());
  std::string bytes((std::istreambuf_iterator<char>(in)),
                    std::istreambuf_iterator<char>());
  Deck deck = load_deck_bytes(bytes);
  deck.source_path = path;
  return deck;
}

namespace {

// Assigns part names to slides and notes that do not have one yet and
// returns the final list of package entries.
std::vector<zip::Entry> build_entries(const Deck& input) {
  Deck deck = input;  // resolved names and ids are assigned on a copy
  deck.renumber();

  bool fresh_package = deck.package.presentation_part.empty();
  std::string pres_part =
      fresh_package ? "ppt/presentation.xml" : deck.package.presentation_part;
  std::string pres_dir = part_dir(pres_part);

  // --- content types
  ContentTypes ct;
  if (!deck.package.content_types_xml.empty())
    ct = parse_content_types(deck.package.content_types_xml);
  ct.ensure_default("rels", kCtRels);
  ct.ensure_default("xml", "application/xml");
  ct.ensure_override("/" + pres_part, kCtPresentation);

  // --- assign slide part names
  std::set<int> used_slide_numbers, used_notes_numbers;
  auto number_of = [](const std::string& name, const char* prefix) -> int {
    auto slash = name.rfind('/');
    std::string base = slash == std::string::npos ? name : name.substr(slash + 1);
    std::string_view view = base;
    std::string_view pfx = prefix;
    if (view.rfind(pfx, 0) != 0) return -1;
    view.remove_prefix(pfx.size());
    if (view.size() < 4) return -1;
    view.remove_suffix(4);  // ".xml"
    try {
      return std::stoi(std::string(view));
    } catch (...) {
      return -1;
    }
  };
  for (const Slide& s : deck.slides) {
    if (int n = number_of(s.source.part_name, "slide"); n > 0)
      used_slide_numbers.insert(n);
    if (int n = number_of(s.source.notes_part_name, "notesSlide"); n > 0)
      used_notes_numbers.insert(n);
  }
  auto next_free = [](std::set<int>& used) {
    int n = used.empty() ? 1 : *used.rbegin() + 1;
    used.insert(n);
    return n;
  };

  // --- layout registry for fresh packages
  std::vector<std::pair<std::string, std::string>> layouts = deck.known_layouts;
  std::string master_part = "ppt/slideMasters/slideMaster1.xml";
  std::string theme_part = "ppt/theme/theme1.xml";
  if (fresh_package) {
    layouts.clear();
    std::vector<std::string> names;
    for (const Slide& s : deck.slides) {
      std::string name = s.layout_name.empty() ? "Blank" : s.layout_name;
      if (std::find(names.begin(), names.end(), name) == names.end())
        names.push_back(name);
    }
    if (names.empty()) names.push_back("Blank");
    for (std::size_t i = 0; i < names.size(); ++i)
      layouts.emplace_back(names[i], "ppt/slideLayouts/slideLayout" +
                                         std::to_string(i + 1) + ".xml");
  }
  auto layout_part_for = [&](const Slide& s) -> std::string {
    if (!s.source.layout_part.empty()) return s.source.layout_part;
    std::string want = s.layout_name.empty() ? "Blank" : s.layout_name;
    for (const auto& [name, part] : layouts)
      if (name == want) return part;
    return layouts.empty() ? std::string() : layouts.front().second;
  };

  // --- presentation relationships
  std::vector<Relationship> pres_rels = deck.package.presentation_rels;
  if (fresh_package) {
    pres_rels.push_back({"rIdM", kNsRelSlideMaster,
                         make_relative(pres_dir, master_part), master_part,
                         false});
    pres_rels.push_back({"rIdT", kNsRelTheme,
                         make_relative(pres_dir, theme_part), theme_part,
                         false});
  }
  // drop slide rels that no longer correspond to a live slide
  std::set<std::string> live_rel_ids;
  int max_rel = max_rel_number(pres_rels);
  int max_sld_id = 255;
  for (Slide& s : deck.slides)
    max_sld_id = std::max(max_sld_id, s.source.sld_num_id);
  for (Slide& s : deck.slides) {
    if (s.source.part_name.empty())
      s.source.part_name =
          "ppt/slides/slide" + std::to_string(next_free(used_slide_numbers)) +
          ".xml";
    if (s.source.pres_rel_id.empty()) {
      s.source.pres_rel_id = "rId" + std::to_string(++max_rel);
      pres_rels.push_back({s.source.pres_rel_id, kNsRelSlide,
                           make_relative(pres_dir, s.source.part_name),
                           s.source.part_name, false});
    }
    if (s.source.sld_num_id == 0) s.source.sld_num_id = ++max_sld_id;
    live_rel_ids.insert(s.source.pres_rel_id);
  }
  std::erase_if(pres_rels, [&](const Relationship& r) {
    return r.type == kNsRelSlide && !live_rel_ids.count(r.id);
  });

  // --- presentation part
  std::string pres_xml;
  if (fresh_package) {
    pres_xml =
        "<?xml version=\"1.0\" encoding=\"UTF-8\" standalone=\"yes\"?>\r\n";
    pres_xml += "<p:presentation";
    pres_xml += kRootAttrs;
    pres_xml += "><p:sldMasterIdLst><p:sldMasterId id=\"2147483648\" "
                "r:id=\"rIdM\"/></p:sldMasterIdLst><p:sldIdLst>";
    for (const Slide& s : deck.slides)
      pres_xml += "<p:sldId id=\"" + std::to_string(s.source.sld_num_id) +
                  "\" r:id=\"" + s.source.pres_rel_id + "\"/>";
    pres_xml += "</p:sldIdLst><p:sldSz cx=\"" +
                std::to_string(deck.slide_width_emu) + "\" cy=\"" +
                std::to_string(deck.slide_height_emu) +
                "\"/><p:notesSz cx=\"6858000\" cy=\"9144000\"/>"
                "</p:presentation>";
  } else if (deck.structure_dirty) {
    xml::Node pres = xml::parse(deck.package.presentation_xml, pres_part);
    xml::Node* sld_list = pres.child("sldIdLst");
    if (!sld_list) {
      // insert an empty list before sldSz
      xml::Node fresh;
      fresh.name = "p:sldIdLst";
      std::size_t at = pres.children.size();
      for (std::size_t i = 0; i < pres.children.size(); ++i)
        if (const xml::Node* el = std::get_if<xml::Node>(&pres.children[i]))
          if (el->local() == "sldSz") {
            at = i;
            break;
          }
      pres.children.insert(pres.children.begin() + static_cast<long>(at),
                           fresh);
      sld_list = pres.child("sldIdLst");
    }
    sld_list->children.clear();
    for (const Slide& s : deck.slides) {
      xml::Node id_node;
      id_node.name = "p:sldId";
      id_node.attrs.push_back({"id", std::to_string(s.source.sld_num_id)});
      id_node.attrs.push_back({"r:id", s.source.pres_rel_id});
      sld_list->children.emplace_back(std::move(id_node));
    }
    pres_xml = xml::serialize(pres);
  } else {
    pres_xml = deck.package.presentation_xml;
  }

  // --- slide parts, rels, notes
  struct PartOut {
    std::string name, data;
  };
  std::vector<PartOut> slide_parts;
  for (Slide& s : deck.slides) {
    ct.ensure_override("/" + s.source.part_name, kCtSlide);
    std::string slide_xml = s.source.part_xml.empty() ? generate_slide_xml(s)
                                                      : s.source.part_xml;
    slide_parts.push_back({s.source.part_name, std::move(slide_xml)});

    std::vector<Relationship> rels = s.source.rels;
    std::string slide_dir = part_dir(s.source.part_name);
    int next_rel = max_rel_number(rels);

    if (!rel_by_type(rels, kNsRelSlideLayout)) {
      std::string layout = layout_part_for(s);
      if (!layout.empty())
        rels.push_back({"rId" + std::to_string(++next_rel), kNsRelSlideLayout,
                        make_relative(slide_dir, layout), layout, false});
    }

    // image rels for pictures constructed in memory
    for (Shape& shape : s.shapes) {
      if (shape.kind != ShapeKind::picture || !shape.image_ref) continue;
      if (!shape.image_rel_id.empty()) continue;
      shape.image_rel_id = "rId" + std::to_string(++next_rel);
      rels.push_back({shape.image_rel_id, kNsRelImage,
                      make_relative(slide_dir, *shape.image_ref),
                      *shape.image_ref, false});
      // the fragmentless shape picks the id up when regenerated
      if (slide_parts.back().name == s.source.part_name &&
          s.source.part_xml.empty())
        slide_parts.back().data = generate_slide_xml(s);
    }

    bool wants_notes =
        !s.notes_text.empty() || !s.source.notes_part_name.empty();
    if (wants_notes && s.source.notes_part_name.empty())
      s.source.notes_part_name = "ppt/notesSlides/notesSlide" +
                                 std::to_string(next_free(used_notes_numbers)) +
                                 ".xml";
    if (wants_notes) {
      ct.ensure_override("/" + s.source.notes_part_name, kCtNotesSlide);
      std::string notes_xml = s.source.notes_part_xml.empty()
                                  ? generate_notes_xml(s)
                                  : s.source.notes_part_xml;
      slide_parts.push_back({s.source.notes_part_name, std::move(notes_xml)});

      std::vector<Relationship> nrels = s.source.notes_rels;
      std::string notes_dir = part_dir(s.source.notes_part_name);
      int next_nrel = max_rel_number(nrels);
      if (!rel_by_type(nrels, kNsRelSlide))
        nrels.push_back({"rId" + std::to_string(++next_nrel), kNsRelSlide,
                         make_relative(notes_dir, s.source.part_name),
                         s.source.part_name, false});
      if (!rel_by_type(nrels, kNsRelNotesMaster)) {
        for (const auto& [pname, bytes] : deck.opaque_parts) {
          if (pname.rfind("ppt/notesMasters/", 0) == 0 &&
              pname.find("_rels") == std::string::npos) {
            nrels.push_back({"rId" + std::to_string(++next_nrel),
                             kNsRelNotesMaster,
                             make_relative(notes_dir, pname), pname, false});
            break;
          }
        }
      }
      slide_parts.push_back(
          {rels_name_for(s.source.notes_part_name), serialize_rels(nrels)});

      if (!rel_by_type(rels, kNsRelNotesSlide))
        rels.push_back({"rId" + std::to_string(++next_rel), kNsRelNotesSlide,
                        make_relative(slide_dir, s.source.notes_part_name),
                        s.source.notes_part_name, false});
      for (Relationship& r : rels)
        if (r.type == kNsRelNotesSlide) {
          r.resolved_target = s.source.notes_part_name;
          r.target = make_relative(slide_dir, s.source.notes_part_name);
        }
    } else {
      std::erase_if(
          rels, [](const Relationship& r) { return r.type == kNsRelNotesSlide; });
    }

    if (!rels.empty())
      slide_parts.push_back(
          {rels_name_for(s.source.part_name), serialize_rels(rels)});
  }

  // --- fresh package skeleton
  std::vector<PartOut> skeleton;
  if (fresh_package) {
    skeleton.push_back(
        {"_rels/.rels",
         serialize_rels({{"rId1", kNsRelOfficeDocument, pres_part, pres_part,
                          false}})});
    ct.ensure_override("/" + master_part, kCtSlideMaster);
    ct.ensure_override("/" + theme_part, kCtTheme);

    std::string master_xml =
        "<?xml version=\"1.0\" encoding=\"UTF-8\" standalone=\"yes\"?>\r\n"
        "<p:sldMaster" + std::string(kRootAttrs) + "><p:cSld><p:spTree>" +
        kDefaultSpTreeHeader + "</p:spTree></p:cSld>" +
        "<p:clrMap bg1=\"lt1\" tx1=\"dk1\" bg2=\"lt2\" tx2=\"dk2\" "
        "accent1=\"accent1\" accent2=\"accent2\" accent3=\"accent3\" "
        "accent4=\"accent4\" accent5=\"accent5\" accent6=\"accent6\" "
        "hlink=\"hlink\" folHlink=\"folHlink\"/><p:sldLayoutIdLst>";
    std::vector<Relationship> master_rels;
    int layout_ordinal = 0;
    for (const auto& [name, part] : layouts) {
      ++layout_ordinal;
      std::string rid = "rId" + std::to_string(layout_ordinal);
      master_xml += "<p:sldLayoutId id=\"" +
                    std::to_string(2147483648u + layout_ordinal) +
                    "\" r:id=\"" + rid + "\"/>";
      master_rels.push_back({rid, kNsRelSlideLayout,
                             make_relative(part_dir(master_part), part), part,
                             false});
      ct.ensure_override("/" + part, kCtSlideLayout);
      skeleton.push_back({part, generate_layout_xml(name)});
      skeleton.push_back(
          {rels_name_for(part),
           serialize_rels({{"rId1", kNsRelSlideMaster,
                            make_relative(part_dir(part), master_part),
                            master_part, false}})});
    }
    master_rels.push_back({"rId" + std::to_string(layout_ordinal + 1),
                           kNsRelTheme,
                           make_relative(part_dir(master_part), theme_part),
                           theme_part, false});
    master_xml += "</p:sldLayoutIdLst></p:sldMaster>";
    skeleton.push_back({master_part, master_xml});
    skeleton.push_back({rels_name_for(master_part), serialize_rels(master_rels)});
    skeleton.push_back({theme_part, minimal_theme_xml()});
  }

  // drop overrides of deleted slide/notes parts
  std::set<std::string> emitted;
  emitted.insert(pres_part);
  for (const PartOut& p : slide_parts) emitted.insert(p.name);
  for (const PartOut& p : skeleton) emitted.insert(p.name);
  for (const auto& [name, bytes] : deck.opaque_parts) emitted.insert(name);
  std::erase_if(ct.overrides, [&](const auto& e) {
    const std::string& part = e.first;
    if (part.empty() || part[0] != '/') return false;
    std::string name = part.substr(1);
    bool is_slide_like = name.rfind("ppt/slides/", 0) == 0 ||
                         name.rfind("ppt/notesSlides/", 0) == 0;
    return is_slide_like && !emitted.count(name);
  });

  // --- final entry list
  std::vector<zip::Entry> entries;
  entries.push_back({"[Content_Types].xml", serialize_content_types(ct)});
  if (const auto it = deck.opaque_parts.find("_rels/.rels");
      it != deck.opaque_parts.end())
    entries.push_back({it->first, it->second});
  entries.push_back({pres_part, pres_xml});
  if (!pres_rels.empty())
    entries.push_back({rels_name_for(pres_part), serialize_rels(pres_rels)});
  for (PartOut& p : slide_parts) entries.push_back({p.name, std::move(p.data)});
  for (PartOut& p : skeleton) entries.push_back({p.name, std::move(p.data)});
  for (const auto& [name, bytes] : deck.opaque_parts) {
    if (name == "_rels/.rels") continue;
    entries.push_back({name, bytes});
  }
  return entries;
}

}  // namespace

std::string save_deck_bytes(const Deck& deck) {
  return zip::write_archive_bytes(build_entries(deck));
}

void save_deck(const Deck& deck, const std::filesystem::path& path) {
  zip::write_archive(path, build_entries(deck));
}

void touch_shape(Slide& slide, Shape& shape) {
  shape.raw_xml.clear();
  slide.source.part_xml.clear();
}

void touch_slide(Slide& slide) { slide.source.part_xml.clear(); }

void set_notes_text(Slide& slide, std::string text) {
  slide.notes_text = std::move(text);
  slide.source.notes_part_xml.clear();
}

namespace {

xml::Node* shape_properties_of(xml::Node& root) {
  if (xml::Node* sppr = root.child("spPr")) return sppr;
  if (xml::Node* gpr = root.child("grpSpPr")) return gpr;
  return nullptr;
}

bool is_fill_element(const xml::Node& el) {
  auto local = el.local();
  return local == "noFill" || local == "solidFill" || local == "gradFill" ||
         local == "blipFill" || local == "pattFill" || local == "grpFill";
}

}  // namespace

bool patch_fragment_box(Shape& shape, const Box& box) {
  if (shape.raw_xml.empty()) return false;
  xml::Node root = xml::parse(shape.raw_xml, "shape fragment");

  xml::Node* xfrm = nullptr;
  if (xml::Node* props = shape_properties_of(root)) {
    xfrm = props->child("xfrm");
    if (!xfrm) {
      xml::Node fresh;
      fresh.name = "a:xfrm";
      props->children.insert(props->children.begin(), std::move(fresh));
      xfrm = props->child("xfrm");
    }
  } else if (xml::Node* frame_xfrm = root.child("xfrm")) {
    xfrm = frame_xfrm;  // graphicFrame carries p:xfrm directly
  }
  if (!xfrm) return false;

  auto ensure_child = [&](const char* local, const char* qualified) {
    xml::Node* child = xfrm->child(local);
    if (!child) {
      xml::Node fresh;
      fresh.name = qualified;
      // off comes before ext
      auto at = std::string_view(local) == "off" ? xfrm->children.begin()
                                                 : xfrm->children.end();
      xfrm->children.insert(at, std::move(fresh));
      child = xfrm->child(local);
    }
    return child;
  };
  xml::Node* off = ensure_child("off", "a:off");
  off->set_attr("x", std::to_string(box.left_emu));
  off->set_attr("y", std::to_string(box.top_emu));
  xml::Node* ext = ensure_child("ext", "a:ext");
  ext->set_attr("cx", std::to_string(box.width_emu));
  ext->set_attr("cy", std::to_string(box.height_emu));

  shape.raw_xml = xml::serialize(root, /*xml_decl=*/false);
  return true;
}

bool patch_fragment_fill(Shape& shape, const Fill& fill) {
  if (shape.raw_xml.empty()) return false;
  xml::Node root = xml::parse(shape.raw_xml, "shape fragment");
  xml::Node* props = shape_properties_of(root);
  if (!props) return false;

  xml::Node replacement = xml::parse(fill_xml(fill), "fill");
  bool replaced = false;
  for (auto& child : props->children) {
    if (xml::Node* el = std::get_if<xml::Node>(&child)) {
      if (is_fill_element(*el)) {
        *el = replacement;
        replaced = true;
        break;
      }
    }
  }
  if (!replaced) {
    // insert after the geometry (or the frame) so the schema order holds
    std::size_t at = 0;
    for (std::size_t i = 0; i < props->children.size(); ++i) {
      if (const xml::Node* el = std::get_if<xml::Node>(&props->children[i])) {
        auto local = el->local();
        if (local == "xfrm" || local == "prstGeom" || local == "custGeom")
          at = i + 1;
      }
    }
    props->children.insert(props->children.begin() + static_cast<long>(at),
                           std::move(replacement));
  }
  shape.raw_xml = xml::serialize(root, /*xml_decl=*/false);
  return true;
}

}  // namespace deckhand::pptx
