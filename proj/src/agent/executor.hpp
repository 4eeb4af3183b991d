#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "agent/planner.hpp"
#include "llm/config.hpp"
#include "llm/provider.hpp"
#include "model/deck.hpp"

namespace deckhand::agent {

enum class AttemptOutcome {
  parse_error,
  validation_error,
  apply_error,
  post_check_error,
  success,
  refused,
};
const char* attempt_outcome_name(AttemptOutcome outcome);

struct Attempt {
  int prompt_chars = 0;
  std::string raw_output;
  AttemptOutcome outcome = AttemptOutcome::parse_error;
  std::optional<std::string> error_text;
};

struct ReflectionTrace {
  std::vector<Attempt> attempts;
};

enum class TaskStatus { success, refused, failed };
const char* task_status_name(TaskStatus status);

struct TaskResult {
  Task task;
  TaskStatus status = TaskStatus::failed;
  ReflectionTrace trace;
  int applied_ops = 0;
  std::string refuse_reason;
};

// Generation-stage prompt: the before/after slide JSON, the task, and the
// command grammar, deterministically assembled.
std::string build_codegen_prompt(const Json& before, const Json& after,
                                 const Task& task);

// Single-shot baseline prompt: whole-deck JSON plus the instruction.
std::string build_direct_prompt(const std::string& instruction,
                                const Json& deck_json);

// Generate -> parse -> validate -> apply -> post-check, feeding every
// failure (prior raw output + error text) back into the next prompt, up to
// max_attempts. Success or refusal stops the loop; exhaustion returns the
// original deck with status failed. Provider transport errors propagate.
std::pair<Deck, TaskResult> run_with_reflection(
    const Task& task, const Json& before, const Json& after, const Deck& deck,
    llm::Provider& provider, const llm::StageModelCfg& codegen_cfg,
    int max_attempts);

}  // namespace deckhand::agent
