#include "pipeline/pipeline.hpp"

#include <chrono>
#include <map>

#include "agent/editor.hpp"
#include "agent/interpreter.hpp"
#include "agent/planner.hpp"
#include "agent/script.hpp"
#include "pptx/pptx_io.hpp"
#include "pptx/slide_json.hpp"
#include "support/error.hpp"

namespace deckhand::pipeline {
namespace {

using agent::Task;
using agent::TaskResult;
using agent::TaskStatus;

std::filesystem::path default_output_path(const std::filesystem::path& input) {
  std::filesystem::path out = input;
  out.replace_extension();
  out += ".edited.pptx";
  return out;
}

EditStatus overall_status(const std::vector<TaskResult>& results) {
  int successes = 0, refusals = 0;
  for (const TaskResult& r : results) {
    if (r.status == TaskStatus::success) ++successes;
    if (r.status == TaskStatus::refused) ++refusals;
  }
  if (!results.empty() && successes == static_cast<int>(results.size()))
    return EditStatus::success;
  if (successes > 0) return EditStatus::partial;
  if (refusals > 0) return EditStatus::refused;
  return EditStatus::failed;
}

std::filesystem::path resolve_output(const std::filesystem::path& input,
                                     const EditOptions& options) {
  std::filesystem::path out =
      options.output_path ? *options.output_path : default_output_path(input);
  if (!options.allow_overwrite &&
      std::filesystem::weakly_canonical(out) ==
          std::filesystem::weakly_canonical(input))
    raise(Errc::config_error,
          "output path equals the input deck; pass an explicit overwrite flag");
  return out;
}

llm::ChatRequest stage_request(const llm::StageModelCfg& cfg,
                               std::string prompt) {
  llm::ChatRequest request;
  request.model_id = cfg.model_id;
  request.user_text = std::move(prompt);
  request.temperature = cfg.temperature;
  request.top_p = cfg.top_p;
  request.max_tokens = cfg.max_tokens;
  return request;
}

TaskResult synthetic_refusal(const Task& task) {
  TaskResult result;
  result.task = task;
  result.status = TaskStatus::refused;
  std::string reason = task.description.empty()
                           ? "planner routed this task to refusal"
                           : task.description;
  if (task.contents.is_object() && task.contents.contains("reason") &&
      task.contents.at("reason").is_string())
    reason = task.contents.at("reason").get<std::string>();
  result.refuse_reason = reason;
  agent::Attempt attempt;
  attempt.outcome = agent::AttemptOutcome::refused;
  attempt.error_text = reason;
  result.trace.attempts.push_back(std::move(attempt));
  return result;
}

}  // namespace

const char* edit_status_name(EditStatus status) {
  switch (status) {
    case EditStatus::success: return "success";
    case EditStatus::partial: return "partial";
    case EditStatus::refused: return "refused";
    case EditStatus::failed: return "failed";
  }
  return "unknown";
}

EditOutcome edit_deck(const std::string& instruction,
                      const std::filesystem::path& deck_path,
                      const llm::Config& config, llm::ChatClient& client,
                      const EditOptions& options) {
  if (instruction.find_first_not_of(" \t\r\n") == std::string::npos)
    raise(Errc::config_error, "instruction is empty");

  auto t0 = std::chrono::steady_clock::now();
  Deck deck = pptx::load_deck(deck_path);
  std::filesystem::path out_path = resolve_output(deck_path, options);

  llm::Provider provider(client, config.pricing, config.thinking_output);
  EditOutcome outcome;

  auto finish = [&](EditStatus status) {
    outcome.status = status;
    outcome.ledger = provider.ledger_snapshot();
    if (!options.no_timing)
      outcome.wall_time_seconds =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
              .count();
    return outcome;
  };

  // ---- planning stage
  agent::Plan plan;
  try {
    Json summary = pptx::deck_summary(deck);
    std::string prompt = agent::build_planner_prompt(instruction, summary);
    llm::ChatResponse reply = provider.complete(
        stage_request(config.stage(llm::Stage::planner), std::move(prompt)),
        llm::Stage::planner);
    plan = agent::parse_plan(reply.text);
    agent::validate_plan(plan, deck);
  } catch (const Error& e) {
    outcome.diagnostics.push_back(std::string("planning failed: ") + e.what());
    return finish(EditStatus::failed);
  }
  outcome.understanding = plan.understanding;

  {
    std::map<int, int> per_page;
    for (const Task& t : plan.tasks) ++per_page[t.page_number];
    for (const auto& [page, count] : per_page)
      if (count > 1)
        outcome.diagnostics.push_back(
            "plan has " + std::to_string(count) + " tasks for slide " +
            std::to_string(page) + "; executing all in order");
  }

  // ---- per-task edit + generate
  bool any_committed = false;
  for (const Task& task : plan.tasks) {
    if (agent::is_refusal_task(task)) {
      outcome.task_results.push_back(synthetic_refusal(task));
      continue;
    }
    if (task.page_number < 1 ||
        task.page_number > static_cast<int>(deck.slides.size())) {
      // structural edits from earlier tasks can invalidate later pages
      TaskResult result;
      result.task = task;
      result.status = TaskStatus::failed;
      outcome.task_results.push_back(std::move(result));
      outcome.diagnostics.push_back(
          "task for slide " + std::to_string(task.page_number) +
          " skipped: page no longer exists");
      continue;
    }

    Json before = pptx::slide_to_json(deck, task.page_number);

    // editing stage, with bounded error feedback
    Json after = before;
    {
      std::string feedback;
      bool accepted = false;
      for (int attempt = 0; attempt < config.max_attempts; ++attempt) {
        std::string prompt = agent::build_editor_prompt(task, before);
        if (!feedback.empty())
          prompt += "\nYour previous reply was rejected: " + feedback +
                    "\nReturn the corrected JSON only.\n";
        llm::ChatResponse reply;
        try {
          reply = provider.complete(
              stage_request(config.stage(llm::Stage::editor), std::move(prompt)),
              llm::Stage::editor);
        } catch (const Error& e) {
          outcome.diagnostics.push_back(
              std::string("editor call failed: ") + e.what());
          break;
        }
        try {
          Json candidate = agent::parse_edited_slide(reply.text);
          agent::validate_edited_slide(before, candidate, task);
          after = std::move(candidate);
          accepted = true;
          break;
        } catch (const Error& e) {
          feedback = e.what();
        }
      }
      if (!accepted && !feedback.empty())
        outcome.diagnostics.push_back(
            "editor output rejected, generating from the task alone: " +
            feedback);
    }

    // generation stage with reflection
    try {
      auto [edited, result] = agent::run_with_reflection(
          task, before, after, deck, provider,
          config.stage(llm::Stage::codegen), config.max_attempts);
      if (result.status == TaskStatus::success) {
        deck = std::move(edited);
        any_committed = true;
      }
      outcome.task_results.push_back(std::move(result));
    } catch (const Error& e) {
      TaskResult result;
      result.task = task;
      result.status = TaskStatus::failed;
      outcome.task_results.push_back(std::move(result));
      outcome.diagnostics.push_back(std::string("generation failed: ") +
                                    e.what());
    }
  }

  if (any_committed) {
    pptx::save_deck(deck, out_path);
    outcome.output_path = out_path;
  }
  return finish(overall_status(outcome.task_results));
}

EditOutcome direct_edit(const std::string& instruction,
                        const std::filesystem::path& deck_path,
                        const llm::Config& config, llm::ChatClient& client,
                        const EditOptions& options) {
  if (instruction.find_first_not_of(" \t\r\n") == std::string::npos)
    raise(Errc::config_error, "instruction is empty");

  auto t0 = std::chrono::steady_clock::now();
  Deck deck = pptx::load_deck(deck_path);
  std::filesystem::path out_path = resolve_output(deck_path, options);

  llm::Provider provider(client, config.pricing, config.thinking_output);
  EditOutcome outcome;

  Task task;
  task.page_number = 1;
  task.description = instruction;
  task.action = "direct";
  TaskResult result;
  result.task = task;

  auto finish = [&](EditStatus status) {
    outcome.status = status;
    outcome.ledger = provider.ledger_snapshot();
    if (!options.no_timing)
      outcome.wall_time_seconds =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
              .count();
    return outcome;
  };

  std::string prompt =
      agent::build_direct_prompt(instruction, pptx::deck_to_json(deck));
  llm::ChatResponse reply;
  try {
    reply = provider.complete(
        stage_request(config.stage(llm::Stage::codegen), std::move(prompt)),
        llm::Stage::codegen);
  } catch (const Error& e) {
    outcome.diagnostics.push_back(std::string("generation call failed: ") +
                                  e.what());
    outcome.task_results.push_back(std::move(result));
    return finish(EditStatus::failed);
  }

  agent::Attempt attempt;
  attempt.prompt_chars = static_cast<int>(prompt.size());
  attempt.raw_output = reply.text;

  try {
    agent::EditScript script = agent::parse_edit_script(reply.text);
    agent::validate_script(script, deck);
    auto [edited, report] = agent::apply_script(script, deck);
    if (report.refused) {
      attempt.outcome = agent::AttemptOutcome::refused;
      result.status = TaskStatus::refused;
      result.refuse_reason = report.refuse_reason;
      result.trace.attempts.push_back(std::move(attempt));
      outcome.task_results.push_back(std::move(result));
      return finish(EditStatus::refused);
    }
    attempt.outcome = agent::AttemptOutcome::success;
    result.status = TaskStatus::success;
    result.applied_ops = report.ops_applied;
    result.trace.attempts.push_back(std::move(attempt));
    outcome.task_results.push_back(std::move(result));
    pptx::save_deck(edited, out_path);
    outcome.output_path = out_path;
    return finish(EditStatus::success);
  } catch (const Error& e) {
    switch (e.code()) {
      case Errc::script_parse:
        attempt.outcome = agent::AttemptOutcome::parse_error;
        break;
      case Errc::apply_error:
        attempt.outcome = agent::AttemptOutcome::apply_error;
        break;
      default:
        attempt.outcome = agent::AttemptOutcome::validation_error;
    }
    attempt.error_text = e.what();
    result.status = TaskStatus::failed;
    result.trace.attempts.push_back(std::move(attempt));
    outcome.task_results.push_back(std::move(result));
    outcome.diagnostics.push_back(e.what());
    return finish(EditStatus::failed);
  }
}

Json outcome_to_json(const EditOutcome& outcome, bool include_timing) {
  Json j;
  j["status"] = edit_status_name(outcome.status);
  if (!outcome.understanding.empty()) j["understanding"] = outcome.understanding;

  Json tasks = Json::array();
  for (const agent::TaskResult& r : outcome.task_results) {
    Json t;
    t["page_number"] = r.task.page_number;
    t["description"] = r.task.description;
    t["action"] = r.task.action;
    t["status"] = agent::task_status_name(r.status);
    t["applied_ops"] = r.applied_ops;
    if (!r.refuse_reason.empty()) t["refuse_reason"] = r.refuse_reason;
    Json attempts = Json::array();
    for (const agent::Attempt& a : r.trace.attempts) {
      Json attempt;
      attempt["outcome"] = agent::attempt_outcome_name(a.outcome);
      attempt["prompt_chars"] = a.prompt_chars;
      if (a.error_text) attempt["error"] = *a.error_text;
      attempts.push_back(std::move(attempt));
    }
    t["attempts"] = std::move(attempts);
    tasks.push_back(std::move(t));
  }
  j["tasks"] = std::move(tasks);

  Json ledger = Json::array();
  for (const llm::LedgerEntry& e : outcome.ledger.entries()) {
    Json entry;
    entry["stage"] = llm::stage_name(e.stage);
    entry["model"] = e.model_id;
    entry["input_tokens"] = e.usage.input_tokens;
    entry["output_tokens"] = e.usage.output_tokens;
    entry["cost_usd"] = e.cost_usd.to_string();
    ledger.push_back(std::move(entry));
  }
  j["ledger"] = std::move(ledger);
  llm::Usage total = outcome.ledger.total_usage(/*include_judge=*/true);
  j["total_input_tokens"] = total.input_tokens;
  j["total_output_tokens"] = total.output_tokens;
  j["total_cost_usd"] =
      outcome.ledger.total_cost(/*include_judge=*/true).to_string();

  if (include_timing) j["wall_time_seconds"] = outcome.wall_time_seconds;
  if (outcome.output_path) j["output_path"] = outcome.output_path->string();
  j["diagnostics"] = outcome.diagnostics;
  return j;
}

}  // namespace deckhand::pipeline
