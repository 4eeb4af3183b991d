#include "pptx/xml.hpp"

#include <cctype>

#include "support/error.hpp"

namespace deckhand::xml {
namespace {

bool is_space(char c) {
  return c == ' ' || c == '\t' || c == '\r' || c == '\n';
}

bool is_name_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == ':' || c == '_' ||
         c == '-' || c == '.' || static_cast<unsigned char>(c) >= 0x80;
}

void append_codepoint(std::string& out, unsigned long cp) {
  if (cp < 0x80) {
    out.push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else if (cp < 0x10000) {
    out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else {
    out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  }
}

class Parser {
 public:
  Parser(std::string_view buf, const std::string& context)
      : buf_(buf), ctx_(context) {}

  Node run() {
    if (buf_.size() >= 3 && buf_.substr(0, 3) == "\xEF\xBB\xBF") pos_ = 3;
    skip_misc();
    if (pos_ >= buf_.size() || buf_[pos_] != '<') fail("no root element");
    Node root = parse_element();
    skip_misc();
    return root;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    raise(Errc::malformed_xml,
          (ctx_.empty() ? std::string() : ctx_ + ": ") + what + " at byte " +
              std::to_string(pos_));
  }

  char cur() const { return pos_ < buf_.size() ? buf_[pos_] : '\0'; }

  bool starts_with(std::string_view s) const {
    return buf_.substr(pos_, s.size()) == s;
  }

  void skip_ws() {
    while (pos_ < buf_.size() && is_space(buf_[pos_])) ++pos_;
  }

  // Whitespace, prolog, comments, PIs, DOCTYPE between markup.
  void skip_misc() {
    for (;;) {
      skip_ws();
      if (starts_with("<?")) {
        auto end = buf_.find("?>", pos_);
        if (end == std::string_view::npos) fail("unterminated processing instruction");
        pos_ = end + 2;
      } else if (starts_with("<!--")) {
        auto end = buf_.find("-->", pos_);
        if (end == std::string_view::npos) fail("unterminated comment");
        pos_ = end + 3;
      } else if (starts_with("<!DOCTYPE")) {
        auto end = buf_.find('>', pos_);
        if (end == std::string_view::npos) fail("unterminated DOCTYPE");
        pos_ = end + 1;
      } else {
        return;
      }
    }
  }

  std::string parse_name() {
    std::size_t start = pos_;
    while (pos_ < buf_.size() && is_name_char(buf_[pos_])) ++pos_;
    if (pos_ == start) fail("expected a name");
    return std::string(buf_.substr(start, pos_ - start));
  }

  std::string decode(std::string_view raw) {
    std::string out;
    out.reserve(raw.size());
    for (std::size_t i = 0; i < raw.size(); ++i) {
      if (raw[i] != '&') {
        out.push_back(raw[i]);
        continue;
      }
      auto semi = raw.find(';', i);
      if (semi == std::string_view::npos) fail("unterminated entity");
      std::string_view ent = raw.substr(i + 1, semi - i - 1);
      if (ent == "lt") out.push_back('<');
      else if (ent == "gt") out.push_back('>');
      else if (ent == "amp") out.push_back('&');
      else if (ent == "apos") out.push_back('\'');
      else if (ent == "quot") out.push_back('"');
      else if (!ent.empty() && ent[0] == '#') {
        unsigned long cp = 0;
        try {
          cp = ent[1] == 'x' || ent[1] == 'X'
                   ? std::stoul(std::string(ent.substr(2)), nullptr, 16)
                   : std::stoul(std::string(ent.substr(1)), nullptr, 10);
        } catch (...) {
          fail("bad character reference &" + std::string(ent) + ";");
        }
        append_codepoint(out, cp);
      } else {
        fail("unknown entity &" + std::string(ent) + ";");
      }
      i = semi;
    }
    return out;
  }

  Node parse_element() {
    Node node;
    node.begin = pos_;
    ++pos_;  // '<'
    node.name = parse_name();
    for (;;) {
      skip_ws();
      if (cur() == '/') {
        if (!starts_with("/>")) fail("expected '/>'");
        pos_ += 2;
        node.end = pos_;
        return node;
      }
      if (cur() == '>') {
        ++pos_;
        break;
      }
      Attr a;
      a.name = parse_name();
      skip_ws();
      if (cur() != '=') fail("expected '=' after attribute " + a.name);
      ++pos_;
      skip_ws();
      char quote = cur();
      if (quote != '"' && quote != '\'') fail("expected quoted attribute value");
      ++pos_;
      auto end = buf_.find(quote, pos_);
      if (end == std::string_view::npos) fail("unterminated attribute value");
      a.value = decode(buf_.substr(pos_, end - pos_));
      pos_ = end + 1;
      node.attrs.push_back(std::move(a));
    }

    // content
    std::string pending_text;
    auto flush_text = [&] {
      if (!pending_text.empty()) {
        node.children.emplace_back(std::move(pending_text));
        pending_text.clear();
      }
    };
    for (;;) {
      if (pos_ >= buf_.size()) fail("unterminated element " + node.name);
      if (cur() == '<') {
        if (starts_with("</")) {
          flush_text();
          pos_ += 2;
          std::string closing = parse_name();
          if (closing != node.name)
            fail("mismatched close tag </" + closing + "> for <" + node.name + ">");
          skip_ws();
          if (cur() != '>') fail("malformed close tag");
          ++pos_;
          node.end = pos_;
          return node;
        }
        if (starts_with("<!--")) {
          auto end = buf_.find("-->", pos_);
          if (end == std::string_view::npos) fail("unterminated comment");
          pos_ = end + 3;
          continue;
        }
        if (starts_with("<![CDATA[")) {
          auto end = buf_.find("]]>", pos_);
          if (end == std::string_view::npos) fail("unterminated CDATA");
          pending_text += buf_.substr(pos_ + 9, end - pos_ - 9);
          pos_ = end + 3;
          continue;
        }
        if (starts_with("<?")) {
          auto end = buf_.find("?>", pos_);
          if (end == std::string_view::npos) fail("unterminated processing instruction");
          pos_ = end + 2;
          continue;
        }
        flush_text();
        node.children.emplace_back(parse_element());
        continue;
      }
      std::size_t next = buf_.find('<', pos_);
      if (next == std::string_view::npos) fail("unterminated element " + node.name);
      pending_text += decode(buf_.substr(pos_, next - pos_));
      pos_ = next;
    }
  }

  std::string_view buf_;
  std::string ctx_;
  std::size_t pos_ = 0;
};

void serialize_node(const Node& node, std::string& out) {
  out += '<';
  out += node.name;
  for (const Attr& a : node.attrs) {
    out += ' ';
    out += a.name;
    out += "=\"";
    out += escape_attr(a.value);
    out += '"';
  }
  if (node.children.empty()) {
    out += "/>";
    return;
  }
  out += '>';
  for (const Node::Child& c : node.children) {
    if (const Node* el = std::get_if<Node>(&c))
      serialize_node(*el, out);
    else
      out += escape_text(std::get<std::string>(c));
  }
  out += "</";
  out += node.name;
  out += '>';
}

}  // namespace

std::string_view Node::local() const {
  auto colon = name.find(':');
  return colon == std::string::npos
             ? std::string_view(name)
             : std::string_view(name).substr(colon + 1);
}

const Node* Node::child(std::string_view local_name) const {
  for (const Child& c : children)
    if (const Node* el = std::get_if<Node>(&c))
      if (el->local() == local_name) return el;
  return nullptr;
}

Node* Node::child(std::string_view local_name) {
  return const_cast<Node*>(static_cast<const Node&>(*this).child(local_name));
}

std::vector<const Node*> Node::children_named(std::string_view local_name) const {
  std::vector<const Node*> out;
  for (const Child& c : children)
    if (const Node* el = std::get_if<Node>(&c))
      if (el->local() == local_name) out.push_back(el);
  return out;
}

std::string_view Node::attr(std::string_view name) const {
  for (const Attr& a : attrs)
    if (a.name == name) return a.value;
  for (const Attr& a : attrs) {
    auto colon = a.name.find(':');
    if (colon != std::string::npos &&
        std::string_view(a.name).substr(colon + 1) == name)
      return a.value;
  }
  return {};
}

bool Node::has_attr(std::string_view name) const {
  for (const Attr& a : attrs) {
    if (a.name == name) return true;
    auto colon = a.name.find(':');
    if (colon != std::string::npos &&
        std::string_view(a.name).substr(colon + 1) == name)
      return true;
  }
  return false;
}

void Node::set_attr(std::string_view name, std::string value) {
  for (Attr& a : attrs) {
    if (a.name == name) {
      a.value = std::move(value);
      return;
    }
  }
  attrs.push_back({std::string(name), std::move(value)});
}

std::string Node::text() const {
  std::string out;
  for (const Child& c : children)
    if (const std::string* t = std::get_if<std::string>(&c)) out += *t;
  return out;
}

Node parse(std::string_view buf, const std::string& context) {
  return Parser(buf, context).run();
}

std::string_view fragment(std::string_view buf, const Node& node) {
  return buf.substr(node.begin, node.end - node.begin);
}

std::string serialize(const Node& root, bool xml_decl) {
  std::string out;
  if (xml_decl)
    out = "<?xml version=\"1.0\" encoding=\"UTF-8\" standalone=\"yes\"?>\r\n";
  serialize_node(root, out);
  return out;
}

std::string escape_text(std::string_view raw) {
  std::string out;
  out.reserve(raw.size());
  for (char c : raw) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      default: out.push_back(c);
    }
  }
  return out;
}

std::string escape_attr(std::string_view raw) {
  std::string out;
  out.reserve(raw.size());
  for (char c : raw) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      case '\n': out += "&#10;"; break;
      case '\t': out += "&#9;"; break;
      default: out.push_back(c);
    }
  }
  return out;
}

}  // namespace deckhand::xml
