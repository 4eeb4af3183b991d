#include "bench/bench.hpp"

#include <algorithm>
#include <atomic>
#include <fstream>
#include <random>
#include <sstream>
#include <thread>

#include "agent/executor.hpp"
#include "bench/stats.hpp"
#include "pptx/pptx_io.hpp"
#include "pptx/slide_json.hpp"
#include "support/error.hpp"

namespace deckhand::bench {
namespace {

namespace fs = std::filesystem;

fs::path unique_scratch_dir(const fs::path& base, const std::string& hint) {
  static std::atomic<unsigned> counter{0};
  fs::path root = base.empty() ? fs::temp_directory_path() : base;
  fs::path dir =
      root / ("deckhand-" + hint + "-" + std::to_string(counter.fetch_add(1)) +
              "-" + std::to_string(std::random_device{}()));
  fs::create_directories(dir);
  return dir;
}

// True when some task burned every allowed attempt on invalid output.
bool exhausted_invalid_attempts(const pipeline::EditOutcome& outcome,
                                int max_attempts) {
  for (const agent::TaskResult& r : outcome.task_results) {
    if (r.status != agent::TaskStatus::failed) continue;
    if (static_cast<int>(r.trace.attempts.size()) < max_attempts) continue;
    bool all_errors = true;
    for (const agent::Attempt& a : r.trace.attempts)
      if (a.outcome == agent::AttemptOutcome::success ||
          a.outcome == agent::AttemptOutcome::refused)
        all_errors = false;
    if (all_errors) return true;
  }
  return false;
}

int judged_page(const pipeline::EditOutcome& outcome) {
  for (const agent::TaskResult& r : outcome.task_results)
    if (r.status == agent::TaskStatus::success && r.task.page_number >= 1)
      return r.task.page_number;
  return 1;
}

void run_judge(RunRecord& record, const BenchCase& bench_case,
               const fs::path& original_pptx, const fs::path& edited_pptx,
               const llm::Config& config, llm::Provider& provider,
               const pipeline::EditOutcome& outcome, const fs::path& scratch,
               JudgeMode mode) {
  JudgeInputs inputs;
  inputs.mode = mode;
  inputs.instruction = bench_case.instruction;

  int page = judged_page(outcome);
  std::vector<std::string> images;
  if (mode == JudgeMode::image) {
    auto originals = render_slides(original_pptx, scratch / "render-original",
                                   config.render_command);
    auto editeds = render_slides(edited_pptx, scratch / "render-edited",
                                 config.render_command);
    std::size_t pick = static_cast<std::size_t>(page - 1);
    inputs.original_image =
        originals[pick < originals.size() ? pick : originals.size() - 1];
    inputs.edited_image =
        editeds[pick < editeds.size() ? pick : editeds.size() - 1];
    images = {inputs.original_image.string(), inputs.edited_image.string()};
  } else {
    Deck original = pptx::load_deck(original_pptx);
    Deck edited = pptx::load_deck(edited_pptx);
    int safe_page =
        std::min(page, static_cast<int>(std::min(original.slides.size(),
                                                 edited.slides.size())));
    if (safe_page < 1) safe_page = 1;
    inputs.original_json =
        pptx::json_text(pptx::slide_to_json(original, safe_page));
    inputs.edited_json = pptx::json_text(pptx::slide_to_json(edited, safe_page));
  }

  auto [adherence_prompt, tilc_prompt] = build_judge_prompts(inputs);
  llm::StageModelCfg judge_cfg = config.stage(llm::Stage::judge);
  auto ask = [&](std::string prompt) {
    llm::ChatRequest request;
    request.model_id = judge_cfg.model_id;
    request.user_text = std::move(prompt);
    request.temperature = judge_cfg.temperature;
    request.top_p = judge_cfg.top_p;
    request.max_tokens = judge_cfg.max_tokens;
    request.image_paths = images;
    return provider.complete(request, llm::Stage::judge).text;
  };

  record.judge =
      parse_judge_scores(ask(adherence_prompt), ask(tilc_prompt));

  if (bench_case.hard) {
    std::string hard_prompt =
        build_hard_judge_prompt(inputs, bench_case.hard->ideal_description);
    record.hard_score = parse_hard_judge_score(ask(hard_prompt));
  }
}

CategoryMetrics metrics_over(const std::vector<const RunRecord*>& records) {
  CategoryMetrics m;
  m.case_count = static_cast<int>(records.size());
  if (records.empty()) return m;
  int sr = 0;
  double wall = 0, in_k = 0, out_k = 0, cost = 0;
  for (const RunRecord* r : records) {
    if (r->sr) ++sr;
    wall += r->wall_time_seconds;
    in_k += static_cast<double>(r->input_tokens) / 1000.0;
    out_k += static_cast<double>(r->output_tokens) / 1000.0;
    cost += r->cost_usd.usd();
  }
  double n = static_cast<double>(records.size());
  m.sr_percent = 100.0 * sr / n;
  m.mean_wall_time_seconds = wall / n;
  m.mean_input_tokens_k = in_k / n;
  m.mean_output_tokens_k = out_k / n;
  m.mean_cost_usd = cost / n;
  return m;
}

Json category_metrics_json(const CategoryMetrics& m, bool include_timing) {
  Json j;
  j["case_count"] = m.case_count;
  j["sr_percent"] = m.sr_percent;
  if (include_timing) j["mean_wall_time_seconds"] = m.mean_wall_time_seconds;
  j["mean_input_tokens_k"] = m.mean_input_tokens_k;
  j["mean_output_tokens_k"] = m.mean_output_tokens_k;
  j["mean_cost_usd"] = m.mean_cost_usd;
  return j;
}

std::string csv_escape(const std::string& field) {
  if (field.find_first_of(",\"\n") == std::string::npos) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += "\"\"";
    else out.push_back(c);
  }
  out += "\"";
  return out;
}

}  // namespace

const char* category_name(Category c) {
  switch (c) {
    case Category::text_editing: return "TextEditing";
    case Category::visual_formatting: return "VisualFormatting";
    case Category::layout_adjustment: return "LayoutAdjustment";
    case Category::slide_structure: return "SlideStructure";
  }
  return "TextEditing";
}

std::optional<Category> category_from_name(const std::string& name) {
  if (name == "TextEditing") return Category::text_editing;
  if (name == "VisualFormatting") return Category::visual_formatting;
  if (name == "LayoutAdjustment") return Category::layout_adjustment;
  if (name == "SlideStructure") return Category::slide_structure;
  return std::nullopt;
}

const char* hard_type_name(HardType t) {
  switch (t) {
    case HardType::visual_dependent: return "visual_dependent";
    case HardType::ambiguous: return "ambiguous";
    case HardType::multi_step: return "multi_step";
    case HardType::impossible: return "impossible";
  }
  return "visual_dependent";
}

std::optional<HardType> hard_type_from_name(const std::string& name) {
  if (name == "visual_dependent") return HardType::visual_dependent;
  if (name == "ambiguous") return HardType::ambiguous;
  if (name == "multi_step") return HardType::multi_step;
  if (name == "impossible") return HardType::impossible;
  return std::nullopt;
}

std::vector<BenchCase> load_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) raise(Errc::io, "cannot open manifest " + path.string());
  std::vector<BenchCase> cases;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    auto fail = [&](const std::string& why) -> void {
      raise(Errc::manifest_error,
            "line " + std::to_string(line_no) + ": " + why);
    };
    Json doc = Json::parse(line, nullptr, /*allow_exceptions=*/false);
    if (doc.is_discarded() || !doc.is_object()) fail("not a JSON object");

    BenchCase c;
    if (!doc.contains("instruction_key") || !doc.at("instruction_key").is_string())
      fail("missing string 'instruction_key'");
    c.instruction_key = doc.at("instruction_key").get<std::string>();
    if (!doc.contains("instruction") || !doc.at("instruction").is_string())
      fail("missing string 'instruction'");
    c.instruction = doc.at("instruction").get<std::string>();
    if (!doc.contains("category") || !doc.at("category").is_string())
      fail("missing string 'category'");
    auto category = category_from_name(doc.at("category").get<std::string>());
    if (!category)
      fail("unknown category '" + doc.at("category").get<std::string>() + "'");
    c.category = *category;
    if (!doc.contains("pptx_file") || !doc.at("pptx_file").is_string())
      fail("missing string 'pptx_file'");
    fs::path pptx = doc.at("pptx_file").get<std::string>();
    c.pptx_file = pptx.is_relative() ? path.parent_path() / pptx : pptx;

    if (doc.contains("hard") && !doc.at("hard").is_null()) {
      const Json& h = doc.at("hard");
      if (!h.is_object()) fail("'hard' must be an object");
      HardSpec hard;
      if (!h.contains("hard_type") || !h.at("hard_type").is_string())
        fail("hard case needs string 'hard_type'");
      auto hard_type = hard_type_from_name(h.at("hard_type").get<std::string>());
      if (!hard_type)
        fail("unknown hard_type '" + h.at("hard_type").get<std::string>() + "'");
      hard.hard_type = *hard_type;
      if (!h.contains("ideal_description") ||
          !h.at("ideal_description").is_string())
        fail("hard case needs string 'ideal_description'");
      hard.ideal_description = h.at("ideal_description").get<std::string>();
      c.hard = std::move(hard);
    }
    cases.push_back(std::move(c));
  }
  return cases;
}

RunRecord run_case(const BenchCase& bench_case, const llm::Config& config,
                   llm::ChatClient& client, const BenchOptions& options) {
  RunRecord record;
  record.bench_case = bench_case;

  fs::path scratch = unique_scratch_dir(options.work_dir,
                                        bench_case.instruction_key);
  try {
    // the manifest's deck is never touched: work on a private copy
    fs::path work_copy = scratch / bench_case.pptx_file.filename();
    fs::copy_file(bench_case.pptx_file, work_copy,
                  fs::copy_options::overwrite_existing);

    pipeline::EditOptions edit_options;
    edit_options.output_path = scratch / "edited.pptx";
    edit_options.no_timing = options.no_timing;

    pipeline::EditOutcome outcome =
        config.mode == "direct"
            ? pipeline::direct_edit(bench_case.instruction, work_copy, config,
                                    client, edit_options)
            : pipeline::edit_deck(bench_case.instruction, work_copy, config,
                                  client, edit_options);

    record.sr = outcome.status == pipeline::EditStatus::success;
    record.refused = outcome.status == pipeline::EditStatus::refused;
    record.wall_time_seconds = outcome.wall_time_seconds;
    llm::Usage usage = outcome.ledger.total_usage(/*include_judge=*/false);
    record.input_tokens = usage.input_tokens;
    record.output_tokens = usage.output_tokens;
    record.cost_usd = outcome.ledger.total_cost(/*include_judge=*/false);
    for (const std::string& d : outcome.diagnostics) record.notes.push_back(d);

    if (exhausted_invalid_attempts(outcome, config.max_attempts)) {
      record.cf = true;
      record.notes.push_back("cf: exhausted all attempts on invalid output");
    }

    fs::path edited = outcome.output_path ? *outcome.output_path : work_copy;
    if (outcome.output_path) {
      try {
        pptx::load_deck(edited);
      } catch (const std::exception& e) {
        record.cf = true;
        record.notes.push_back(std::string("cf: edited deck fails to load: ") +
                               e.what());
      }
    }

    if (options.judge_mode != JudgeMode::off && !record.cf) {
      llm::Provider judge_provider(client, config.pricing,
                                   config.thinking_output);
      try {
        run_judge(record, bench_case, work_copy, edited, config,
                  judge_provider, outcome, scratch, options.judge_mode);
      } catch (const Error& e) {
        record.notes.push_back(std::string("judge failed: ") + e.what());
      }
    }
  } catch (const std::exception& e) {
    record.cf = true;
    record.notes.push_back(std::string("cf: unhandled failure: ") + e.what());
  }

  if (record.cf) record.sr = false;  // a catastrophic case never counts as SR
  std::error_code ec;
  fs::remove_all(scratch, ec);
  return record;
}

std::vector<RunRecord> run_suite(const std::vector<BenchCase>& cases,
                                 const llm::Config& config,
                                 llm::ChatClient& client,
                                 const BenchOptions& options) {
  std::vector<RunRecord> records(cases.size());
  int workers = options.workers > 0 ? options.workers : config.workers;
  workers = std::max(1, std::min<int>(workers, static_cast<int>(cases.size())));

  if (workers == 1) {
    for (std::size_t i = 0; i < cases.size(); ++i)
      records[i] = run_case(cases[i], config, client, options);
    return records;
  }

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (;;) {
      std::size_t i = next.fetch_add(1);
      if (i >= cases.size()) return;
      records[i] = run_case(cases[i], config, client, options);
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
  for (std::thread& t : pool) t.join();
  return records;
}

SuiteMetrics aggregate(const std::vector<RunRecord>& records) {
  if (records.empty()) raise(Errc::empty_suite, "no records to aggregate");

  SuiteMetrics metrics;
  std::vector<const RunRecord*> all;
  for (const RunRecord& r : records) all.push_back(&r);
  metrics.overall = metrics_over(all);

  static const Category kCategories[] = {
      Category::text_editing, Category::visual_formatting,
      Category::layout_adjustment, Category::slide_structure};
  for (Category c : kCategories) {
    std::vector<const RunRecord*> subset;
    for (const RunRecord& r : records)
      if (r.bench_case.category == c) subset.push_back(&r);
    if (!subset.empty())
      metrics.per_category.emplace_back(c, metrics_over(subset));
  }

  static const HardType kHardTypes[] = {
      HardType::visual_dependent, HardType::ambiguous, HardType::multi_step,
      HardType::impossible};
  int hard_count = 0, hard_cf = 0, impossible = 0, impossible_refused = 0;
  for (const RunRecord& r : records) {
    if (!r.bench_case.hard) continue;
    ++hard_count;
    if (r.cf) ++hard_cf;
    if (r.bench_case.hard->hard_type == HardType::impossible) {
      ++impossible;
      if (r.refused) ++impossible_refused;
    }
  }
  metrics.hard_case_count = hard_count;
  for (HardType t : kHardTypes) {
    HardTypeMetrics m;
    int sr = 0;
    for (const RunRecord& r : records) {
      if (!r.bench_case.hard || r.bench_case.hard->hard_type != t) continue;
      ++m.case_count;
      if (r.sr) ++sr;
    }
    if (m.case_count > 0) {
      m.sr_percent = 100.0 * sr / m.case_count;
      metrics.per_hard_type.emplace_back(t, m);
    }
  }
  if (impossible > 0)
    metrics.ra_percent = 100.0 * impossible_refused / impossible;
  if (hard_count > 0) metrics.cf_percent = 100.0 * hard_cf / hard_count;

  int judged = 0;
  double adherence = 0, visual = 0, text = 0, image = 0, layout = 0, color = 0;
  for (const RunRecord& r : records) {
    if (!r.judge) continue;
    ++judged;
    adherence += r.judge->instruction_adherence;
    visual += r.judge->visualquality;
    text += r.judge->text_quality;
    image += r.judge->image_quality;
    layout += r.judge->layout_quality;
    color += r.judge->color_quality;
  }
  if (judged > 0) {
    Json mean;
    mean["instruction_adherence"] = adherence / judged;
    mean["visualquality"] = visual / judged;
    mean["text_quality"] = text / judged;
    mean["image_quality"] = image / judged;
    mean["layout_quality"] = layout / judged;
    mean["color_quality"] = color / judged;
    metrics.mean_judge = std::move(mean);
  }
  return metrics;
}

Json report_to_json(const SuiteMetrics& metrics,
                    const std::vector<RunRecord>& records,
                    bool include_timing) {
  Json suite;
  suite["case_count"] = metrics.overall.case_count;
  suite["overall"] = category_metrics_json(metrics.overall, include_timing);
  Json per_category = Json::object();
  for (const auto& [category, m] : metrics.per_category)
    per_category[category_name(category)] =
        category_metrics_json(m, include_timing);
  suite["per_category"] = std::move(per_category);

  Json hard;
  hard["case_count"] = metrics.hard_case_count;
  Json per_hard = Json::object();
  for (const auto& [hard_type, m] : metrics.per_hard_type) {
    Json h;
    h["case_count"] = m.case_count;
    h["sr_percent"] = m.sr_percent;
    per_hard[hard_type_name(hard_type)] = std::move(h);
  }
  hard["per_hard_type"] = std::move(per_hard);
  if (metrics.ra_percent) hard["ra_percent"] = *metrics.ra_percent;
  if (metrics.cf_percent) hard["cf_percent"] = *metrics.cf_percent;
  suite["hard"] = std::move(hard);
  if (metrics.mean_judge) suite["judge"] = *metrics.mean_judge;

  Json rows = Json::array();
  for (const RunRecord& r : records) {
    Json row;
    row["instruction_key"] = r.bench_case.instruction_key;
    row["category"] = category_name(r.bench_case.category);
    row["instruction"] = r.bench_case.instruction;
    row["sr"] = r.sr;
    row["refused"] = r.refused;
    row["cf"] = r.cf;
    if (include_timing) row["wall_time_seconds"] = r.wall_time_seconds;
    row["input_tokens"] = r.input_tokens;
    row["output_tokens"] = r.output_tokens;
    row["cost_usd"] = r.cost_usd.to_string();
    if (r.bench_case.hard) {
      row["hard_type"] = hard_type_name(r.bench_case.hard->hard_type);
      if (r.hard_score) {
        row["hard_score"] = *r.hard_score;
        row["hard_score_percent"] = hard_percentage(*r.hard_score);
      }
    }
    if (r.judge) row["judge"] = judge_scores_to_json(*r.judge);
    if (!r.notes.empty()) row["notes"] = r.notes;
    rows.push_back(std::move(row));
  }

  Json report;
  report["suite"] = std::move(suite);
  report["records"] = std::move(rows);
  return report;
}

std::string report_to_csv(const std::vector<RunRecord>& records,
                          bool include_timing) {
  std::ostringstream out;
  out << "instruction_key,category,sr,refused,cf";
  if (include_timing) out << ",wall_time_seconds";
  out << ",input_tokens,output_tokens,cost_usd,hard_type,hard_score\n";
  for (const RunRecord& r : records) {
    out << csv_escape(r.bench_case.instruction_key) << ','
        << category_name(r.bench_case.category) << ',' << (r.sr ? 1 : 0) << ','
        << (r.refused ? 1 : 0) << ',' << (r.cf ? 1 : 0);
    if (include_timing) out << ',' << r.wall_time_seconds;
    out << ',' << r.input_tokens << ',' << r.output_tokens << ','
        << r.cost_usd.to_string() << ',';
    if (r.bench_case.hard) out << hard_type_name(r.bench_case.hard->hard_type);
    out << ',';
    if (r.hard_score) out << *r.hard_score;
    out << '\n';
  }
  return out.str();
}

}  // namespace deckhand::bench
