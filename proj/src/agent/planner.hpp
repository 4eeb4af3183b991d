#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "model/deck.hpp"

namespace deckhand::agent {

using Json = nlohmann::ordered_json;

struct Task {
  int page_number = 0;  // 1-based slide number
  std::string description;
  std::string target;
  std::string action;
  Json contents = Json::object();
};

struct Plan {
  std::string understanding;
  std::vector<Task> tasks;
};

// Planning-stage prompt: the fixed template with the deck summary substituted
// at the "present ppt state" slot and the instruction appended. Deterministic.
std::string build_planner_prompt(const std::string& instruction,
                                 const Json& summary);

// Parses the planning reply. Strips code fences and trailing commas, maps the
// "page number" key. Throws PlanParseError carrying the raw reply text.
Plan parse_plan(const std::string& llm_output);

// Accepts the plan unchanged when every page number is in range (refuse-only
// plans are exempt). Throws PageOutOfRange / EmptyPlan.
const Plan& validate_plan(const Plan& plan, const Deck& deck);

// True when the task asks to refuse the instruction instead of editing.
bool is_refusal_task(const Task& task);

Json plan_to_json(const Plan& plan);
Json task_to_json(const Task& task);

}  // namespace deckhand::agent
