#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "bench/judge.hpp"
#include "llm/config.hpp"
#include "pipeline/pipeline.hpp"
#include "support/money.hpp"

namespace deckhand::bench {

enum class Category {
  text_editing,
  visual_formatting,
  layout_adjustment,
  slide_structure,
};
const char* category_name(Category c);
std::optional<Category> category_from_name(const std::string& name);

enum class HardType { visual_dependent, ambiguous, multi_step, impossible };
const char* hard_type_name(HardType t);
std::optional<HardType> hard_type_from_name(const std::string& name);

struct HardSpec {
  HardType hard_type = HardType::visual_dependent;
  std::string ideal_description;
};

struct BenchCase {
  std::string instruction_key;  // "n" or "n-m"
  std::string instruction;
  Category category = Category::text_editing;
  std::filesystem::path pptx_file;
  std::optional<HardSpec> hard;
};

struct RunRecord {
  BenchCase bench_case;
  bool sr = false;
  bool refused = false;
  bool cf = false;
  double wall_time_seconds = 0.0;
  std::int64_t input_tokens = 0;
  std::int64_t output_tokens = 0;
  Money cost_usd;
  std::optional<JudgeScores> judge;
  std::optional<int> hard_score;  // 0..5 against the ideal description
  std::vector<std::string> notes;
};

struct CategoryMetrics {
  int case_count = 0;
  double sr_percent = 0.0;
  double mean_wall_time_seconds = 0.0;
  double mean_input_tokens_k = 0.0;
  double mean_output_tokens_k = 0.0;
  double mean_cost_usd = 0.0;
};

struct HardTypeMetrics {
  int case_count = 0;
  double sr_percent = 0.0;
};

struct SuiteMetrics {
  CategoryMetrics overall;
  std::vector<std::pair<Category, CategoryMetrics>> per_category;
  int hard_case_count = 0;
  std::vector<std::pair<HardType, HardTypeMetrics>> per_hard_type;
  std::optional<double> ra_percent;  // refusals / impossible cases
  std::optional<double> cf_percent;  // catastrophic failures / hard cases
  std::optional<Json> mean_judge;    // per-dimension score means
};

// One case per JSON line:
// {"instruction_key", "instruction", "category", "pptx_file",
//  "hard"?: {"hard_type", "ideal_description"}}
// Relative pptx paths resolve against the manifest's directory.
// Throws ManifestError naming the offending line.
std::vector<BenchCase> load_manifest(const std::filesystem::path& path);

struct BenchOptions {
  JudgeMode judge_mode = JudgeMode::off;
  int workers = 0;         // 0 = config value
  bool no_timing = false;  // omit wall-clock fields from records/report
  std::filesystem::path work_dir;  // scratch space; empty = temp
};

// Runs one case on a private copy of its deck. Never throws: every failure
// mode lands in the record (cf covers harness-level breakage).
RunRecord run_case(const BenchCase& bench_case, const llm::Config& config,
                   llm::ChatClient& client, const BenchOptions& options);

// Runs all cases (worker pool) and keeps manifest order in the result.
std::vector<RunRecord> run_suite(const std::vector<BenchCase>& cases,
                                 const llm::Config& config,
                                 llm::ChatClient& client,
                                 const BenchOptions& options);

// Case-weighted aggregation. Throws EmptySuite.
SuiteMetrics aggregate(const std::vector<RunRecord>& records);

Json report_to_json(const SuiteMetrics& metrics,
                    const std::vector<RunRecord>& records,
                    bool include_timing);
std::string report_to_csv(const std::vector<RunRecord>& records,
                          bool include_timing);

}  // namespace deckhand::bench
