#pragma once

#include <string>
#include <vector>

#include "agent/planner.hpp"

namespace deckhand::agent {

// Paths into the slide JSON (JSON-pointer style) whose values differ between
// the before and after documents. Empty iff the documents are identical.
struct EditDiff {
  std::vector<std::string> changed_paths;

  bool empty() const { return changed_paths.empty(); }
};

// Editing-stage prompt: task fields and the slide JSON substituted into the
// fixed template. The task's page must match the slide's index.
std::string build_editor_prompt(const Task& task, const Json& before);

// Parses and schema-checks the edited slide JSON. Throws EditParseError.
Json parse_edited_slide(const std::string& llm_output);

// Structure preservation check: object id multiset and per-object
// paragraph/run counts must be unchanged; values are free to differ.
// Returns the value diff. Throws StructureMismatch.
EditDiff validate_edited_slide(const Json& before, const Json& after,
                               const Task& task);

// Leaf-level diff used by validate_edited_slide; exposed for tests.
std::vector<std::string> json_leaf_diff(const Json& before, const Json& after);

}  // namespace deckhand::agent
