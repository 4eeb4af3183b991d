#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "agent/executor.hpp"
#include "llm/config.hpp"
#include "llm/provider.hpp"

namespace deckhand::pipeline {

using agent::Json;

enum class EditStatus { success, partial, refused, failed };
const char* edit_status_name(EditStatus status);

struct EditOutcome {
  EditStatus status = EditStatus::failed;
  std::vector<agent::TaskResult> task_results;
  llm::UsageLedger ledger;
  double wall_time_seconds = 0.0;
  std::optional<std::filesystem::path> output_path;
  std::vector<std::string> diagnostics;
  std::string understanding;  // planner's reading of the instruction
};

struct EditOptions {
  std::optional<std::filesystem::path> output_path;  // default: *.edited.pptx
  bool allow_overwrite = false;
  bool no_timing = false;  // zero the wall clock in reports
};

// The four-stage flow for one instruction: plan, then per task parse ->
// edit -> generate-with-reflection, saving the deck when any task committed.
// LLM-level failures become a failed status with diagnostics; file-system
// problems throw (IoError etc.). An empty instruction throws ConfigError.
EditOutcome edit_deck(const std::string& instruction,
                      const std::filesystem::path& deck_path,
                      const llm::Config& config, llm::ChatClient& client,
                      const EditOptions& options = {});

// Single-shot baseline: whole-deck JSON + instruction -> one script, applied
// once, no reflection.
EditOutcome direct_edit(const std::string& instruction,
                        const std::filesystem::path& deck_path,
                        const llm::Config& config, llm::ChatClient& client,
                        const EditOptions& options = {});

// Machine-readable report (what the CLI prints). Timing is omitted when the
// outcome was produced with no_timing.
Json outcome_to_json(const EditOutcome& outcome, bool include_timing);

}  // namespace deckhand::pipeline
