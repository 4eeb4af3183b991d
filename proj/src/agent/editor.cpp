#include "agent/editor.hpp"

#include <algorithm>
#include <map>

#include "pptx/slide_json.hpp"
#include "support/error.hpp"
#include "support/jsontext.hpp"

namespace deckhand::agent {
namespace {

constexpr const char* kEditorRules =
    R"PROMPT(You are a specialized AI that analyzes PowerPoint slide content and performs specific tasks. You will receive the following JSON data, perform the designated tasks, and return the results in exactly the same JSON format.

Important rules:
1. You must maintain the exact input JSON structure

2. Only perform the work described in the 'action' within 'tasks'

3. Only modify the elements specified in 'target' within 'tasks'

4. Output must contain pure JSON only - no explanations or additional text

5. Preserve all formatting information (fonts, sizes, colors, etc.)

6. Verify that the JSON format is valid after completing the task


Before starting the task:

1. Check the 'understanding' field to grasp the overall task objective

2. Review 'page number', 'description', 'target', and 'action' within 'tasks'

3. Identify all text elements in 'Objects_Detail'

The output must maintain the identical structure as the original JSON, with only the necessary text modified according to the task.

Give only the JSON.
)PROMPT";

// A JSON-pointer path segment with '~' and '/' escaped.
std::string pointer_escape(const std::string& key) {
  std::string out;
  for (char c : key) {
    if (c == '~') out += "~0";
    else if (c == '/') out += "~1";
    else out.push_back(c);
  }
  return out;
}

void report_leaves(const Json& value, const std::string& path,
                   std::vector<std::string>& out) {
  if (value.is_object()) {
    if (value.empty()) {
      out.push_back(path);
      return;
    }
    for (auto it = value.begin(); it != value.end(); ++it)
      report_leaves(it.value(), path + "/" + pointer_escape(it.key()), out);
  } else if (value.is_array()) {
    if (value.empty()) {
      out.push_back(path);
      return;
    }
    for (std::size_t i = 0; i < value.size(); ++i)
      report_leaves(value[i], path + "/" + std::to_string(i), out);
  } else {
    out.push_back(path);
  }
}

void diff_walk(const Json& a, const Json& b, const std::string& path,
               std::vector<std::string>& out) {
  if (a.is_object() && b.is_object()) {
    for (auto it = a.begin(); it != a.end(); ++it) {
      std::string child = path + "/" + pointer_escape(it.key());
      if (b.contains(it.key()))
        diff_walk(it.value(), b.at(it.key()), child, out);
      else
        report_leaves(it.value(), child, out);
    }
    for (auto it = b.begin(); it != b.end(); ++it)
      if (!a.contains(it.key()))
        report_leaves(it.value(), path + "/" + pointer_escape(it.key()), out);
    return;
  }
  if (a.is_array() && b.is_array() && a.size() == b.size()) {
    for (std::size_t i = 0; i < a.size(); ++i)
      diff_walk(a[i], b[i], path + "/" + std::to_string(i), out);
    return;
  }
  if (a != b) out.push_back(path);
}

}  // namespace

std::string build_editor_prompt(const Task& task, const Json& before) {
  if (!before.contains("slide_index") ||
      !before.at("slide_index").is_number_integer() ||
      before.at("slide_index").get<int>() != task.page_number)
    raise(Errc::internal, "editor prompt: task page " +
                              std::to_string(task.page_number) +
                              " does not match the slide document");
  std::string prompt = "Information about slide " +
                       std::to_string(task.page_number) + ":\n\n";
  prompt += "- Task description: " + task.description + "\n\n";
  prompt += "- Action type: " + task.action + "\n\n";
  prompt += "- Slide contents: " + task.contents.dump() + "\n\n";
  prompt += kEditorRules;
  prompt += "\nInput JSON:\n";
  prompt += pptx::json_text(before);
  prompt += "\n";
  return prompt;
}

Json parse_edited_slide(const std::string& llm_output) {
  std::string cleaned = clean_model_json(llm_output);
  Json doc = Json::parse(cleaned, nullptr, /*allow_exceptions=*/false);
  if (doc.is_discarded())
    raise(Errc::edit_parse, "reply is not valid JSON; raw output: " + llm_output);
  auto problems = pptx::validate_slide_json(doc);
  if (!problems.empty()) {
    std::string joined;
    for (const std::string& p : problems) {
      if (!joined.empty()) joined += "; ";
      joined += p;
    }
    raise(Errc::edit_parse, "slide JSON schema violation: " + joined);
  }
  return doc;
}

std::vector<std::string> json_leaf_diff(const Json& before, const Json& after) {
  std::vector<std::string> out;
  diff_walk(before, after, "", out);
  return out;
}

EditDiff validate_edited_slide(const Json& before, const Json& after,
                               const Task& task) {
  (void)task;
  if (before.at("slide_index") != after.at("slide_index"))
    raise(Errc::structure_mismatch, "slide_index changed");

  auto ids_of = [](const Json& doc) {
    std::vector<std::string> ids;
    for (const Json& o : doc.at("objects"))
      ids.push_back(o.at("id").get<std::string>());
    return ids;
  };
  std::vector<std::string> before_ids = ids_of(before);
  std::vector<std::string> after_ids = ids_of(after);
  {
    auto a = before_ids, b = after_ids;
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    if (a != b) {
      std::string detail = "object ids changed: before [";
      for (const auto& id : before_ids) detail += id + " ";
      detail += "] after [";
      for (const auto& id : after_ids) detail += id + " ";
      detail += "]";
      raise(Errc::structure_mismatch, detail);
    }
  }

  // Pair objects by id (first unconsumed match) and compare the text shape.
  std::vector<bool> consumed(before_ids.size(), false);
  for (std::size_t bi = 0; bi < after_ids.size(); ++bi) {
    std::size_t ai = before_ids.size();
    for (std::size_t i = 0; i < before_ids.size(); ++i) {
      if (!consumed[i] && before_ids[i] == after_ids[bi]) {
        ai = i;
        break;
      }
    }
    consumed[ai] = true;
    const Json& b_obj = before.at("objects")[ai];
    const Json& a_obj = after.at("objects")[bi];
    bool b_has = b_obj.contains("paragraphs");
    bool a_has = a_obj.contains("paragraphs");
    if (b_has != a_has)
      raise(Errc::structure_mismatch,
            "object " + after_ids[bi] + ": paragraphs presence changed");
    if (!b_has) continue;
    const Json& bp = b_obj.at("paragraphs");
    const Json& ap = a_obj.at("paragraphs");
    if (bp.size() != ap.size())
      raise(Errc::structure_mismatch,
            "object " + after_ids[bi] + ": paragraph count changed from " +
                std::to_string(bp.size()) + " to " + std::to_string(ap.size()));
    for (std::size_t p = 0; p < bp.size(); ++p) {
      std::size_t b_runs = bp[p].at("runs").size();
      std::size_t a_runs = ap[p].at("runs").size();
      if (b_runs != a_runs)
        raise(Errc::structure_mismatch,
              "object " + after_ids[bi] + " paragraph " + std::to_string(p) +
                  ": run count changed from " + std::to_string(b_runs) +
                  " to " + std::to_string(a_runs));
    }
  }

  return EditDiff{json_leaf_diff(before, after)};
}

}  // namespace deckhand::agent
