#include "agent/planner.hpp"

#include <algorithm>
#include <cctype>

#include "pptx/slide_json.hpp"
#include "support/error.hpp"
#include "support/jsontext.hpp"

namespace deckhand::agent {
namespace {

constexpr const char* kPlannerTemplateHead =
    R"PROMPT(You are a planning assistant for PowerPoint modifications.

Your job is to create a detailed, specific, step-by-step plan for modifying a PowerPoint presentation based on the user's request.

present ppt state: )PROMPT";

constexpr const char* kPlannerTemplateTail =
    R"PROMPT(
Break down complex requests into highly specific actionable tasks that can be executed by a PowerPoint automation system.

Focus on identifying:

1. Specific slides to modify (by page number)

2. Specific sections within slides (title, body, notes, headers, footers, etc.)

3. Specific object elements to add, remove, or change (text boxes, images, shapes, charts, tables, etc.)

4. Precise formatting changes (font, size, color, alignment, etc.)

5. The logical sequence of operations with clear dependencies

Please write one task for one slide page.

Format your response as a JSON format with the following structure:
{
    "understanding": "Detailed summary of what the user wants to achieve",
    "tasks": [
        {
            "page number": 1,
            "description": "Specific task description",
            "target": "Precise target location (e.g., 'Title section of slide 1', 'Notes section of slide 3', 'Second bullet point in body text', 'Chart in bottom right')",
            "action": "Specific action with all necessary details",
            "contents": {
                "additional details required for the action"
            }
        },
        ...
    ],
}

Below is the example question and example output.

input: Please translate the titles of slide 3 and slide 5 of the PPT into English.

output:
{
    "understanding": "English translation of slide titles on slides 3 and 5",
    "tasks": [
        {
            "page number": 3,
            "description": "Translate the title text of slide 3",
            "target": "Title section of slide 3",
            "action": "Translate to English",
            "contents": {
                "source_language": "auto-detect",
                "preserve_formatting": true
            }
        },
        {
            "page number": 5,
            "description": "Translate the title text of slide 5",
            "target": "Title section of slide 5",
            "action": "Translate to English",
            "contents": {
                "source_language": "auto-detect",
                "preserve_formatting": true
            }
        }
    ],
}

Response in JSON format.

input: )PROMPT";

bool integral_number(const Json& j) {
  if (j.is_number_integer() || j.is_number_unsigned()) return true;
  if (j.is_number_float()) {
    double v = j.get<double>();
    return v == static_cast<double>(static_cast<long long>(v));
  }
  return false;
}

}  // namespace

std::string build_planner_prompt(const std::string& instruction,
                                 const Json& summary) {
  std::string prompt = kPlannerTemplateHead;
  prompt += pptx::json_text(summary);
  prompt += "\n";
  prompt += kPlannerTemplateTail;
  prompt += instruction;
  prompt += "\n\noutput:\n";
  return prompt;
}

Plan parse_plan(const std::string& llm_output) {
  std::string cleaned = clean_model_json(llm_output);
  Json doc = Json::parse(cleaned, nullptr, /*allow_exceptions=*/false);
  auto fail = [&](const std::string& why) -> void {
    raise(Errc::plan_parse, why + "; raw output: " + llm_output);
  };
  if (doc.is_discarded()) fail("reply is not valid JSON");
  if (!doc.is_object()) fail("reply is not a JSON object");

  Plan plan;
  if (doc.contains("understanding")) {
    if (!doc.at("understanding").is_string())
      fail("'understanding' must be a string");
    plan.understanding = doc.at("understanding").get<std::string>();
  }
  if (!doc.contains("tasks") || !doc.at("tasks").is_array())
    fail("missing 'tasks' array");

  int n = 0;
  for (const Json& t : doc.at("tasks")) {
    std::string where = "task " + std::to_string(n++);
    if (!t.is_object()) fail(where + " is not an object");
    Task task;
    const Json* page = nullptr;
    if (t.contains("page number")) page = &t.at("page number");
    else if (t.contains("page_number")) page = &t.at("page_number");
    if (!page) fail(where + " is missing 'page number'");
    if (!integral_number(*page)) fail(where + ": 'page number' must be an integer");
    task.page_number = static_cast<int>(page->get<double>());
    for (auto [key, out] : {std::pair<const char*, std::string*>{
                                "description", &task.description},
                            {"target", &task.target},
                            {"action", &task.action}}) {
      if (!t.contains(key)) continue;
      if (!t.at(key).is_string())
        fail(where + ": '" + key + "' must be a string");
      *out = t.at(key).get<std::string>();
    }
    if (t.contains("contents") && !t.at("contents").is_null()) {
      if (!t.at("contents").is_object())
        fail(where + ": 'contents' must be an object");
      task.contents = t.at("contents");
    }
    plan.tasks.push_back(std::move(task));
  }
  return plan;
}

bool is_refusal_task(const Task& task) {
  std::string action = task.action;
  std::transform(action.begin(), action.end(), action.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  auto first = action.find_first_not_of(" \t");
  auto last = action.find_last_not_of(" \t");
  if (first == std::string::npos) return false;
  return action.substr(first, last - first + 1) == "refuse";
}

const Plan& validate_plan(const Plan& plan, const Deck& deck) {
  if (plan.tasks.empty()) raise(Errc::empty_plan, "plan has no tasks");
  bool all_refusals = std::all_of(plan.tasks.begin(), plan.tasks.end(),
                                  [](const Task& t) { return is_refusal_task(t); });
  if (all_refusals) return plan;
  int slide_count = static_cast<int>(deck.slides.size());
  for (std::size_t i = 0; i < plan.tasks.size(); ++i) {
    int page = plan.tasks[i].page_number;
    if (page < 1 || page > slide_count)
      raise(Errc::page_out_of_range,
            "task " + std::to_string(i) + " targets page " +
                std::to_string(page) + " of a " + std::to_string(slide_count) +
                "-slide deck");
  }
  return plan;
}

Json task_to_json(const Task& task) {
  Json t;
  t["page number"] = task.page_number;
  t["description"] = task.description;
  t["target"] = task.target;
  t["action"] = task.action;
  t["contents"] = task.contents;
  return t;
}

Json plan_to_json(const Plan& plan) {
  Json j;
  j["understanding"] = plan.understanding;
  Json tasks = Json::array();
  for (const Task& t : plan.tasks) tasks.push_back(task_to_json(t));
  j["tasks"] = std::move(tasks);
  return j;
}

}  // namespace deckhand::agent
