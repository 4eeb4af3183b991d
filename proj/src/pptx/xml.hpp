#pragma once

#include <memory>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace deckhand::xml {

struct Attr {
  std::string name;   // qualified, as written ("r:embed")
  std::string value;  // entity-decoded
};

// Element tree with mixed content preserved in order. begin/end delimit the
// element's exact byte span in the parsed buffer so untouched subtrees can be
// spliced back verbatim.
struct Node {
  using Child = std::variant<Node, std::string>;  // element | text

  std::string name;  // qualified, as written
  std::vector<Attr> attrs;
  std::vector<Child> children;
  std::size_t begin = 0;
  std::size_t end = 0;

  // Local name, prefix stripped: "p:sp" -> "sp".
  std::string_view local() const;

  const Node* child(std::string_view local_name) const;  // first match or null
  std::vector<const Node*> children_named(std::string_view local_name) const;
  Node* child(std::string_view local_name);

  // Attribute value by qualified name, then by local name. "" when absent.
  std::string_view attr(std::string_view name) const;
  bool has_attr(std::string_view name) const;
  void set_attr(std::string_view name, std::string value);

  // Concatenated text content directly inside this element.
  std::string text() const;
};

// Parses a complete document, returning the root element.
// Throws MalformedXml with `context` in the message.
Node parse(std::string_view buf, const std::string& context = "");

// Exact source bytes of an element parsed from `buf`.
std::string_view fragment(std::string_view buf, const Node& node);

// Serializes a (possibly edited) tree. Text and attribute values are
// re-escaped; structure and order are preserved.
std::string serialize(const Node& root, bool xml_decl = true);

std::string escape_text(std::string_view raw);
std::string escape_attr(std::string_view raw);

}  // namespace deckhand::xml
