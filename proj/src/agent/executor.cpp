#include "agent/executor.hpp"

#include <set>

#include "agent/interpreter.hpp"
#include "agent/script.hpp"
#include "pptx/slide_json.hpp"
#include "support/error.hpp"

namespace deckhand::agent {
namespace {

std::set<std::string> run_texts(const Json& slide_doc) {
  std::set<std::string> texts;
  for (const Json& o : slide_doc.at("objects")) {
    if (!o.contains("paragraphs")) continue;
    for (const Json& p : o.at("paragraphs"))
      for (const Json& r : p.at("runs")) {
        std::string text = r.at("text").get<std::string>();
        if (!text.empty()) texts.insert(std::move(text));
      }
  }
  return texts;
}

std::string all_text_of(const Json& slide_doc) {
  std::string out;
  for (const Json& o : slide_doc.at("objects")) {
    if (!o.contains("paragraphs")) continue;
    for (const Json& p : o.at("paragraphs")) {
      for (const Json& r : p.at("runs")) out += r.at("text").get<std::string>();
      out += '\n';
    }
  }
  return out;
}

// Every run text introduced by the edit must be found on the re-parsed
// slide. Substring matching keeps the check stable when adjacent runs were
// merged or rewrapped by the interpreter.
std::optional<std::string> post_check(const Deck& deck, int page,
                                      const Json& before, const Json& after) {
  if (before == after) return std::nullopt;
  if (page < 1 || page > static_cast<int>(deck.slides.size()))
    return std::nullopt;  // the script restructured the deck; nothing to pin
  std::set<std::string> wanted = run_texts(after);
  for (const std::string& had : run_texts(before)) wanted.erase(had);
  if (wanted.empty()) return std::nullopt;
  std::string text = all_text_of(pptx::slide_to_json(deck, page));
  std::string missing;
  for (const std::string& needle : wanted) {
    if (text.find(needle) == std::string::npos) {
      if (!missing.empty()) missing += ", ";
      missing += "\"" + needle + "\"";
    }
  }
  if (missing.empty()) return std::nullopt;
  return "expected edited text not found on slide " + std::to_string(page) +
         ": " + missing;
}

std::string reflection_suffix(const ReflectionTrace& trace) {
  if (trace.attempts.empty()) return {};
  std::string out =
      "\nPREVIOUS ATTEMPTS\n"
      "Your earlier replies failed. Study each error and return a corrected "
      "script.\n";
  for (std::size_t i = 0; i < trace.attempts.size(); ++i) {
    const Attempt& a = trace.attempts[i];
    out += "\nAttempt " + std::to_string(i + 1) + " reply:\n" + a.raw_output +
           "\n";
    out += "Attempt " + std::to_string(i + 1) +
           " error: " + a.error_text.value_or("unknown") + "\n";
  }
  return out;
}

}  // namespace

const char* attempt_outcome_name(AttemptOutcome outcome) {
  switch (outcome) {
    case AttemptOutcome::parse_error: return "parse_error";
    case AttemptOutcome::validation_error: return "validation_error";
    case AttemptOutcome::apply_error: return "apply_error";
    case AttemptOutcome::post_check_error: return "post_check_error";
    case AttemptOutcome::success: return "success";
    case AttemptOutcome::refused: return "refused";
  }
  return "unknown";
}

const char* task_status_name(TaskStatus status) {
  switch (status) {
    case TaskStatus::success: return "success";
    case TaskStatus::refused: return "refused";
    case TaskStatus::failed: return "failed";
  }
  return "unknown";
}

std::string build_codegen_prompt(const Json& before, const Json& after,
                                 const Task& task) {
  std::string prompt =
      "Generate an edit script that applies the requested change to a "
      "PowerPoint presentation.\n\n";
  prompt += "1. Slide specified by page number: " +
            std::to_string(task.page_number) + "\n\n";
  prompt += "2. Target to change: " + pptx::json_text(before) + "\n\n";
  prompt += "3. New content to apply: " + pptx::json_text(after) + "\n\n";
  prompt += "4. Task: " + task_to_json(task).dump() + "\n\n";
  prompt +=
      "CRITICAL REQUIREMENTS:\n"
      "- Please check if the slide number you want to work on exists and "
      "proceed with the work. The index starts with 1.\n"
      "- Use both the object id and its name from the slide JSON to pick "
      "\"shape_selector\" values; prefer the id when names repeat.\n"
      "- Emit only the ops needed to turn the target into the new content, "
      "in execution order.\n"
      "- When the new content equals the target, derive the ops from the "
      "task's action and contents instead.\n\n";
  prompt += edit_script_grammar();
  return prompt;
}

std::string build_direct_prompt(const std::string& instruction,
                                const Json& deck_json) {
  std::string prompt =
      "The following is the information parsed from a PowerPoint "
      "presentation, one JSON document per slide.\n\n";
  prompt += pptx::json_text(deck_json);
  prompt +=
      "\n\nProduce one edit script that performs the following command "
      "against the presentation:\n";
  prompt += instruction;
  prompt += "\n\n";
  prompt += edit_script_grammar();
  return prompt;
}

std::pair<Deck, TaskResult> run_with_reflection(
    const Task& task, const Json& before, const Json& after, const Deck& deck,
    llm::Provider& provider, const llm::StageModelCfg& codegen_cfg,
    int max_attempts) {
  if (max_attempts < 1)
    raise(Errc::internal, "max_attempts must be >= 1");

  TaskResult result;
  result.task = task;
  const std::string base_prompt = build_codegen_prompt(before, after, task);

  for (int attempt = 0; attempt < max_attempts; ++attempt) {
    std::string prompt = base_prompt + reflection_suffix(result.trace);

    llm::ChatRequest request;
    request.model_id = codegen_cfg.model_id;
    request.user_text = prompt;
    request.temperature = codegen_cfg.temperature;
    request.top_p = codegen_cfg.top_p;
    request.max_tokens = codegen_cfg.max_tokens;
    llm::ChatResponse response = provider.complete(request, llm::Stage::codegen);

    Attempt record;
    record.prompt_chars = static_cast<int>(prompt.size());
    record.raw_output = response.text;

    EditScript script;
    try {
      script = parse_edit_script(response.text);
    } catch (const Error& e) {
      record.outcome = AttemptOutcome::parse_error;
      record.error_text = e.what();
      result.trace.attempts.push_back(std::move(record));
      continue;
    }

    try {
      validate_script(script, deck);
    } catch (const Error& e) {
      record.outcome = AttemptOutcome::validation_error;
      record.error_text = e.what();
      result.trace.attempts.push_back(std::move(record));
      continue;
    }

    Deck edited;
    ApplyReport report;
    try {
      std::tie(edited, report) = apply_script(script, deck);
    } catch (const Error& e) {
      record.outcome = AttemptOutcome::apply_error;
      record.error_text = e.what();
      result.trace.attempts.push_back(std::move(record));
      continue;
    }

    if (report.refused) {
      record.outcome = AttemptOutcome::refused;
      result.trace.attempts.push_back(std::move(record));
      result.status = TaskStatus::refused;
      result.refuse_reason = report.refuse_reason;
      return {deck, std::move(result)};
    }

    if (auto missing = post_check(edited, task.page_number, before, after)) {
      record.outcome = AttemptOutcome::post_check_error;
      record.error_text = *missing;
      result.trace.attempts.push_back(std::move(record));
      continue;
    }

    record.outcome = AttemptOutcome::success;
    result.trace.attempts.push_back(std::move(record));
    result.status = TaskStatus::success;
    result.applied_ops = report.ops_applied;
    return {std::move(edited), std::move(result)};
  }

  result.status = TaskStatus::failed;
  return {deck, std::move(result)};
}

}  // namespace deckhand::agent
