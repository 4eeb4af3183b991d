// Acceptance suite: one pass/fail line per criterion, exit 0 only when all
// criteria hold. Runs fully offline.

#include <chrono>
#include <cmath>
#include <fstream>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>

#include "agent/editor.hpp"
#include "agent/executor.hpp"
#include "agent/interpreter.hpp"
#include "agent/planner.hpp"
#include "agent/script.hpp"
#include "bench/bench.hpp"
#include "bench/judge.hpp"
#include "bench/stats.hpp"
#include "llm/config.hpp"
#include "pipeline/pipeline.hpp"
#include "pptx/pptx_io.hpp"
#include "pptx/slide_json.hpp"
#include "support/error.hpp"
#include "../testutil.hpp"

using namespace deckhand;
namespace tu = testutil;
using pptx::Json;
using Clock = std::chrono::steady_clock;

namespace {

int failures = 0;

void report(int number, const std::string& title,
            const std::function<void()>& body) {
  try {
    body();
    std::cout << "PASS criterion " << number << ": " << title << "\n";
  } catch (const std::exception& e) {
    ++failures;
    std::cout << "FAIL criterion " << number << ": " << title << " -- "
              << e.what() << "\n";
  }
}

void require(bool condition, const std::string& what) {
  if (!condition) throw std::runtime_error(what);
}

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

// ---------------------------------------------------------------------------

void criterion1_round_trip() {
  auto start = Clock::now();
  auto corpus = tu::fixture_corpus();
  require(corpus.size() >= 10, "fixture corpus must hold at least 10 decks");

  bool has_picture = false, has_notes = false, has_five_slides = false,
       has_mixed_formats = false;
  for (const Deck& deck : corpus) {
    for (const Slide& slide : deck.slides) {
      if (!slide.notes_text.empty()) has_notes = true;
      for (const Shape& shape : slide.shapes) {
        if (shape.kind == ShapeKind::picture) has_picture = true;
        if (shape.text_frame)
          for (const Paragraph& p : shape.text_frame->paragraphs)
            if (p.runs.size() >= 2 && !(p.runs[0].format == p.runs[1].format))
              has_mixed_formats = true;
      }
    }
    if (deck.slides.size() >= 5) has_five_slides = true;
  }
  require(has_picture && has_notes && has_five_slides && has_mixed_formats,
          "corpus must cover pictures, notes, 5+ slides, mixed formats");

  for (std::size_t i = 0; i < corpus.size(); ++i) {
    Deck first = pptx::load_deck_bytes(pptx::save_deck_bytes(corpus[i]));
    Deck second = pptx::load_deck_bytes(pptx::save_deck_bytes(first));
    require(first.slides.size() == corpus[i].slides.size(),
            "deck " + std::to_string(i) + ": slide count changed");
    for (std::size_t s = 0; s < first.slides.size(); ++s)
      require(first.slides[s] == corpus[i].slides[s],
              "deck " + std::to_string(i) + " slide " + std::to_string(s) +
                  ": modeled fields changed");
    for (const auto& [name, bytes] : corpus[i].opaque_parts) {
      auto it = first.opaque_parts.find(name);
      require(it != first.opaque_parts.end() && it->second == bytes,
              "deck " + std::to_string(i) + ": opaque part " + name +
                  " not byte-identical");
    }
    require(first == second,
            "deck " + std::to_string(i) + ": second round trip diverged");
  }
  double elapsed = seconds_since(start);
  require(elapsed < 5.0,
          "round trips took " + std::to_string(elapsed) + "s (limit 5s)");
}

void criterion2_run_invariants() {
  tu::Rng rng(20250810);
  for (int i = 0; i < 1000; ++i) {
    Paragraph p = tu::random_paragraph(rng);

    // random single-run edit, then normalize
    Paragraph edited = p;
    if (!edited.runs.empty() && rng.chance(0.7)) {
      auto& target = edited.runs[static_cast<std::size_t>(
          rng.below(static_cast<int>(edited.runs.size())))];
      switch (rng.below(3)) {
        case 0: target.text += "x"; break;
        case 1: target.format = tu::random_format(rng); break;
        default: target.text.clear(); break;
      }
    }
    std::string expected;
    for (const Run& r : edited.runs) expected += r.text;

    Paragraph normalized = normalize_runs(edited);
    require(paragraph_text(normalized) == expected,
            "case " + std::to_string(i) + ": concatenation broke");
    Paragraph twice = normalize_runs(normalized);
    require(twice == normalized,
            "case " + std::to_string(i) + ": normalize not idempotent");
    for (const Run& r : normalized.runs)
      require(!r.text.empty(),
              "case " + std::to_string(i) + ": empty run survived");
  }
}

void criterion3_planner_conformance() {
  const std::string example = R"({
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
})";
  agent::Plan plan = agent::parse_plan(example);
  require(plan.tasks.size() == 2, "expected exactly 2 tasks");
  require(plan.tasks[0].page_number == 3 && plan.tasks[1].page_number == 5,
          "expected pages {3, 5}");
  require(plan.tasks[0].action == "Translate to English" &&
              plan.tasks[1].action == "Translate to English",
          "expected both actions 'Translate to English'");

  agent::Plan fenced = agent::parse_plan("```json\n" + example + "\n```");
  require(agent::plan_to_json(fenced) == agent::plan_to_json(plan),
          "fenced and unfenced forms must parse identically");
}

void criterion4_reflection_loop() {
  Deck deck = tu::basic_deck();
  Json before = pptx::slide_to_json(deck, 1);
  Json after = before;
  after["objects"][0]["paragraphs"][0]["runs"][0]["text"] = "Bonjour";

  const char* invalid =
      R"J({"ops":[{"set_run_format":{"slide":1,"shape_selector":"Title 1",
        "paragraph_index":0,"run_index":0,"format":{"color_rgb":"(255,0,0)"}}}]})J";
  const char* valid =
      R"({"ops":[{"set_run_text":{"slide":1,"shape_selector":"Title 1",
        "paragraph_index":0,"run_index":0,"text":"Bonjour"}}]})";

  agent::Task task;
  task.page_number = 1;
  task.description = "Translate the title";
  task.action = "Translate to French";
  llm::StageModelCfg cfg{"mock", 4096, 0.05, 1.0};
  llm::PricingTable pricing;

  {
    auto mock = llm::mock_provider({tu::reply(invalid), tu::reply(valid)});
    llm::Provider provider(*mock, pricing);
    auto [edited, result] =
        agent::run_with_reflection(task, before, after, deck, provider, cfg, 3);
    require(result.status == agent::TaskStatus::success,
            "recovery run must succeed");
    require(result.trace.attempts.size() == 2, "trace length must be 2");
    auto first = result.trace.attempts[0].outcome;
    require(first == agent::AttemptOutcome::parse_error ||
                first == agent::AttemptOutcome::validation_error,
            "first outcome must be parse_error or validation_error");
    require(result.trace.attempts[1].outcome ==
                agent::AttemptOutcome::success,
            "second outcome must be success");
  }
  {
    auto mock = llm::mock_provider(
        {tu::reply(invalid), tu::reply(invalid), tu::reply(invalid)});
    llm::Provider provider(*mock, pricing);
    auto [edited, result] =
        agent::run_with_reflection(task, before, after, deck, provider, cfg, 3);
    require(result.status == agent::TaskStatus::failed,
            "exhaustion run must fail");
    require(result.trace.attempts.size() == 3, "trace length must be exactly 3");
    require(edited == deck, "failed run must leave the deck unchanged");
  }
}

void criterion5_cost_oracle() {
  llm::Config config = llm::default_config();
  Money gemini = llm::compute_cost(llm::Usage{1'000'000, 1'000'000},
                                   config.pricing.lookup("gemini-2.5-flash"));
  require(gemini.picodollars() == 750'000'000'000 &&
              gemini.to_string() == "0.75",
          "1M/1M at gemini-2.5-flash must cost exactly 0.75, got " +
              gemini.to_string());
  Money deepseek = llm::compute_cost(llm::Usage{100'000, 10'000},
                                     config.pricing.lookup("deepseek-v3"));
  require(deepseek.picodollars() == 38'000'000'000 &&
              deepseek.to_string() == "0.038",
          "100k/10k at deepseek-v3 must cost exactly 0.038, got " +
              deepseek.to_string());
}

void criterion6_statistics_oracle() {
  require(bench::pearson({1, 2, 3}, {1, 2, 3}) == 1.0 ||
              std::abs(bench::pearson({1, 2, 3}, {1, 2, 3}) - 1.0) < 1e-12,
          "self-correlation must be 1");
  require(std::abs(bench::pearson({1, 2, 3}, {3, 2, 1}) + 1.0) < 1e-12,
          "anti-correlation must be -1");

  tu::Rng rng(160914);
  std::uniform_real_distribution<double> value(-100.0, 100.0);
  for (int trial = 0; trial < 100; ++trial) {
    std::size_t n = 2 + static_cast<std::size_t>(rng.below(64));
    std::vector<double> x(n), y(n);
    for (std::size_t i = 0; i < n; ++i) {
      x[i] = value(rng.engine);
      y[i] = value(rng.engine);
    }
    x[1] = x[0] + 1;
    y[1] = y[0] + 1;
    double nn = static_cast<double>(n);
    double sx = 0, sy = 0, sxy = 0, sxx = 0, syy = 0;
    for (std::size_t i = 0; i < n; ++i) {
      sx += x[i];
      sy += y[i];
      sxy += x[i] * y[i];
      sxx += x[i] * x[i];
      syy += y[i] * y[i];
    }
    double oracle = (nn * sxy - sx * sy) /
                    std::sqrt((nn * sxx - sx * sx) * (nn * syy - sy * sy));
    require(std::abs(bench::pearson(x, y) - oracle) < 1e-9,
            "trial " + std::to_string(trial) + ": |r - oracle| >= 1e-9");
  }

  require(bench::hard_percentage(0) == 0.0 &&
              bench::hard_percentage(3) == 60.0 &&
              bench::hard_percentage(5) == 100.0,
          "hard percentage must map {0->0, 3->60, 5->100}");
}

// Ten golden cases over the mock: nine feasible across all four categories
// plus one impossible Hard case routed to refusal.
void criterion7_golden_suite() {
  auto start = Clock::now();
  tu::TempDir tmp;

  struct GoldenCase {
    std::string key;
    const char* category;
    std::string instruction;
    bool impossible = false;
  };
  std::vector<GoldenCase> golden = {
      {"0", "TextEditing", "golden case 0: retitle to Golden 0"},
      {"1", "TextEditing", "golden case 1: retitle to Golden 1"},
      {"2", "TextEditing", "golden case 2: retitle to Golden 2"},
      {"3", "VisualFormatting", "golden case 3: make the title red"},
      {"4", "VisualFormatting", "golden case 4: fill the title box"},
      {"5", "LayoutAdjustment", "golden case 5: widen the title"},
      {"6", "LayoutAdjustment", "golden case 6: move the title down"},
      {"7", "SlideStructure", "golden case 7: set the speaker notes"},
      {"8", "SlideStructure", "golden case 8: add a footer textbox"},
      {"9", "SlideStructure",
       "golden case 9: name the speaker in the embedded audio", true},
  };

  Deck base = tu::basic_deck();
  Json before = pptx::slide_to_json(base, 1);

  std::ofstream manifest(tmp.file("manifest.jsonl"));
  std::ofstream replies(tmp.file("replies.jsonl"));
  auto reply_line = [&replies](const char* stage, const std::string& match,
                               const Json& payload) {
    Json entry;
    entry["stage"] = stage;
    entry["match"] = match;
    entry["text"] = payload.dump();
    entry["input_tokens"] = 120;
    entry["output_tokens"] = 30;
    replies << entry.dump() << "\n";
  };

  for (const GoldenCase& g : golden) {
    pptx::save_deck(base, tmp.file("slide_" + g.key + ".pptx"));
    Json manifest_line;
    manifest_line["instruction_key"] = g.key;
    manifest_line["instruction"] = g.instruction;
    manifest_line["category"] = g.category;
    manifest_line["pptx_file"] = "slide_" + g.key + ".pptx";
    if (g.impossible)
      manifest_line["hard"] =
          Json{{"hard_type", "impossible"},
               {"ideal_description", "the agent refuses the request"}};
    manifest << manifest_line.dump() << "\n";

    std::string desc = "golden task " + g.key;
    Json task;
    task["page number"] = 1;
    task["description"] = desc;
    task["target"] = "Title section of slide 1";
    task["action"] = g.impossible ? "refuse" : "Apply the golden edit";
    task["contents"] = g.impossible
                           ? Json{{"reason", "requires audio perception"}}
                           : Json::object();
    Json plan;
    plan["understanding"] = desc;
    plan["tasks"] = Json::array({task});
    reply_line("planner", g.instruction, plan);
    if (g.impossible) continue;

    Json after = before;
    Json script;
    if (g.key == "0" || g.key == "1" || g.key == "2") {
      std::string text = "Golden " + g.key;
      after["objects"][0]["paragraphs"][0]["runs"][0]["text"] = text;
      script["ops"] = Json::array(
          {Json{{"set_run_text", Json{{"slide", 1},
                                      {"shape_selector", "Title 1"},
                                      {"paragraph_index", 0},
                                      {"run_index", 0},
                                      {"text", text}}}}});
    } else if (g.key == "3") {
      after["objects"][0]["paragraphs"][0]["runs"][0]["color_rgb"] = "FF0000";
      script["ops"] = Json::array(
          {Json{{"set_run_format",
                 Json{{"slide", 1},
                      {"shape_selector", "Title 1"},
                      {"paragraph_index", 0},
                      {"run_index", 0},
                      {"format", Json{{"color_rgb", 16711680}}}}}}});
    } else if (g.key == "4") {
      after["objects"][0]["fill"] =
          Json{{"kind", "solid"}, {"color_rgb", "00FF00"}};
      script["ops"] = Json::array(
          {Json{{"set_fill",
                 Json{{"slide", 1},
                      {"shape_selector", "Title 1"},
                      {"fill", Json{{"kind", "solid"},
                                    {"color_rgb", 65280}}}}}}});
    } else if (g.key == "5") {
      after["objects"][0]["position"]["width_emu"] = 10000000;
      script["ops"] = Json::array(
          {Json{{"set_shape_box", Json{{"slide", 1},
                                       {"shape_selector", "Title 1"},
                                       {"box", Json{{"width_emu", 10000000}}}}}}});
    } else if (g.key == "6") {
      after["objects"][0]["position"]["top_emu"] = 2000000;
      script["ops"] = Json::array(
          {Json{{"set_shape_box", Json{{"slide", 1},
                                       {"shape_selector", "Title 1"},
                                       {"box", Json{{"top_emu", 2000000}}}}}}});
    } else if (g.key == "7") {
      after["notes"] = "golden notes";
      script["ops"] = Json::array(
          {Json{{"set_notes",
                 Json{{"slide", 1}, {"text", "golden notes"}}}}});
    } else {  // "8"
      script["ops"] = Json::array(
          {Json{{"add_textbox",
                 Json{{"slide", 1},
                      {"name", "Footer"},
                      {"box", Json{{"left_emu", 0},
                                   {"top_emu", 6000000},
                                   {"width_emu", 4000000},
                                   {"height_emu", 500000}}},
                      {"paragraphs",
                       Json::array({Json{
                           {"runs", Json::array({Json{{"text", "Footer 8"}}})}
                       }})}}}}});
    }
    reply_line("editor", desc, after);
    reply_line("codegen", desc, script);
  }
  manifest.close();
  replies.close();

  std::ofstream config_file(tmp.file("deckhand.json"));
  config_file << R"({"mock_script": "replies.jsonl", "workers": 1})";
  config_file.close();

  auto run_suite_once = [&]() -> std::string {
    llm::Config config = llm::load_config(tmp.file("deckhand.json"));
    auto client = llm::make_chat_client(config);
    auto cases = bench::load_manifest(tmp.file("manifest.jsonl"));
    bench::BenchOptions options;
    options.no_timing = true;
    options.work_dir = tmp.path();
    auto records = bench::run_suite(cases, config, *client, options);
    require(records.size() == 10, "expected 10 records");
    int feasible = 0, feasible_sr = 0;
    for (const bench::RunRecord& r : records) {
      if (r.bench_case.hard &&
          r.bench_case.hard->hard_type == bench::HardType::impossible) {
        require(r.refused, "impossible case must be refused");
        require(!r.sr, "refusals do not count as execution success");
      } else {
        ++feasible;
        if (r.sr) ++feasible_sr;
        require(!r.cf, "no feasible case may be catastrophic");
      }
    }
    require(feasible == 9, "expected 9 feasible cases");
    require(feasible_sr == 9,
            "sr on the feasible cases must be 100%, got " +
                std::to_string(feasible_sr) + "/9");
    bench::SuiteMetrics metrics = bench::aggregate(records);
    require(metrics.ra_percent && *metrics.ra_percent == 100.0,
            "RA must be 100.0");
    require(metrics.cf_percent && *metrics.cf_percent == 0.0,
            "CF must be 0.0");
    return bench::report_to_json(metrics, records, /*include_timing=*/false)
        .dump(2);
  };

  std::string first = run_suite_once();
  std::string second = run_suite_once();
  require(first == second, "report must be byte-stable across runs");

  double elapsed = seconds_since(start);
  require(elapsed < 30.0,
          "golden suite took " + std::to_string(elapsed) + "s (limit 30s)");
}

void criterion8_interpreter_oracle() {
  tu::Rng rng(777777);
  for (int trial = 0; trial < 500; ++trial) {
    Deck deck = tu::random_deck(rng, 3);
    Json deck_json = pptx::deck_to_json(deck);
    std::vector<std::string> layouts = {"Content"};
    agent::EditScript script = tu::random_script(rng, deck_json, layouts);

    agent::validate_script(script, deck);
    auto [edited, report] = agent::apply_script(script, deck);
    Json via_interpreter = pptx::deck_to_json(edited);
    Json via_oracle = tu::oracle_apply(deck_json, script, layouts);
    require(tu::unordered(via_interpreter) == tu::unordered(via_oracle),
            "trial " + std::to_string(trial) +
                ": interpreter diverged from the JSON oracle");

    // transactionality under an injected apply failure
    if (trial % 5 == 0) {
      agent::AddSlide bad;
      bad.after_index = 0;
      bad.layout_name = "Layout That Does Not Exist";
      agent::EditScript failing = script;
      failing.ops.push_back(bad);
      Deck loaded = pptx::load_deck_bytes(pptx::save_deck_bytes(deck));
      Json snapshot = pptx::deck_to_json(loaded);
      bool threw = false;
      try {
        agent::apply_script(failing, loaded);
      } catch (const Error& e) {
        threw = e.code() == Errc::apply_error;
      }
      require(threw, "trial " + std::to_string(trial) +
                         ": injected failure did not raise ApplyError");
      require(pptx::deck_to_json(loaded) == snapshot,
              "trial " + std::to_string(trial) +
                  ": failed apply mutated the input deck");
    }
  }
}

void criterion9_judge_fidelity() {
  auto [adherence, tilc] =
      bench::build_judge_prompts("o.png", "e.png", "recolor the title");
  for (const char* needle :
       {"You are an expert slide-editing judge.",
        "Return valid JSON with exactly these keys:",
        "instruction_adherence", "visualquality",
        "Judge only what you can see in the given image(s) and notes.",
        "Return *only* the JSON object, nothing else."})
    require(adherence.find(needle) != std::string::npos,
            std::string("adherence prompt is missing: ") + needle);
  for (const char* needle :
       {"text_quality", "image_quality", "layout_quality", "color_quality",
        "TEXT QUALITY:", "IMAGE QUALITY:", "LAYOUT QUALITY:",
        "COLOR QUALITY:"})
    require(tilc.find(needle) != std::string::npos,
            std::string("quality prompt is missing: ") + needle);

  // all six keys are range-checked
  const char* good_adherence = R"({"instruction_adherence":4,"visualquality":3})";
  const char* good_tilc =
      R"({"text_quality":5,"image_quality":4,"layout_quality":4,"color_quality":5})";
  bench::JudgeScores scores =
      bench::parse_judge_scores(good_adherence, good_tilc);
  require(scores.instruction_adherence == 4 && scores.color_quality == 5,
          "nominal judge reply must parse");

  for (const char* key :
       {"instruction_adherence", "visualquality", "text_quality",
        "image_quality", "layout_quality", "color_quality"}) {
    Json bad_a = Json::parse(good_adherence);
    Json bad_t = Json::parse(good_tilc);
    if (bad_a.contains(key)) bad_a[key] = 6;
    else bad_t[key] = 6;
    bool threw = false;
    try {
      bench::parse_judge_scores(bad_a.dump(), bad_t.dump());
    } catch (const Error& e) {
      threw = e.code() == Errc::out_of_range;
    }
    require(threw, std::string("out-of-range '") + key + "' must be rejected");
  }
}

}  // namespace

int main() {
  report(1, "round-trip fidelity over the fixture corpus",
         criterion1_round_trip);
  report(2, "run-level invariants over 1000 randomized cases",
         criterion2_run_invariants);
  report(3, "planning-stage conformance on the worked example",
         criterion3_planner_conformance);
  report(4, "reflection loop recovery and exhaustion", criterion4_reflection_loop);
  report(5, "exact cost accounting from the shipped pricing table",
         criterion5_cost_oracle);
  report(6, "statistics oracle (pearson, rubric percentage)",
         criterion6_statistics_oracle);
  report(7, "offline golden end-to-end suite", criterion7_golden_suite);
  report(8, "interpreter equivalence against the JSON-level oracle",
         criterion8_interpreter_oracle);
  report(9, "judge prompt fidelity and score range checks",
         criterion9_judge_fidelity);

  if (failures == 0) {
    std::cout << "all acceptance criteria passed\n";
    return 0;
  }
  std::cout << failures << " acceptance criteria failed\n";
  return 1;
}
