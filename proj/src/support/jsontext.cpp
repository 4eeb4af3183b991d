#include "support/jsontext.hpp"

#include <cctype>

namespace deckhand {
namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' ||
                        s.front() == '\r' || s.front() == '\n'))
    s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' ||
                        s.back() == '\r' || s.back() == '\n'))
    s.remove_suffix(1);
  return s;
}

}  // namespace

std::string strip_code_fences(std::string_view reply) {
  std::string_view text = trim(reply);
  auto fence = text.find("```");
  if (fence == std::string_view::npos) return std::string(text);
  std::size_t start = fence + 3;
  // skip an optional language tag up to the end of the fence line
  auto eol = text.find('\n', start);
  if (eol != std::string_view::npos) {
    std::string_view tag = trim(text.substr(start, eol - start));
    bool word = !tag.empty();
    for (char c : tag)
      if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_'))
        word = false;
    if (word || tag.empty()) start = eol + 1;
  }
  auto close = text.find("```", start);
  std::string_view body = close == std::string_view::npos
                              ? text.substr(start)
                              : text.substr(start, close - start);
  return std::string(trim(body));
}

std::string strip_trailing_commas(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  bool in_string = false;
  bool escaped = false;
  for (std::size_t i = 0; i < text.size(); ++i) {
    char c = text[i];
    if (in_string) {
      out.push_back(c);
      if (escaped) escaped = false;
      else if (c == '\\') escaped = true;
      else if (c == '"') in_string = false;
      continue;
    }
    if (c == '"') {
      in_string = true;
      out.push_back(c);
      continue;
    }
    if (c == ',') {
      std::size_t j = i + 1;
      while (j < text.size() && (text[j] == ' ' || text[j] == '\t' ||
                                 text[j] == '\r' || text[j] == '\n'))
        ++j;
      if (j < text.size() && (text[j] == '}' || text[j] == ']')) continue;
    }
    out.push_back(c);
  }
  return out;
}

std::string clean_model_json(std::string_view reply) {
  return strip_trailing_commas(strip_code_fences(reply));
}

}  // namespace deckhand
