#include "deckhand/deckhand.h"

#include <cstdlib>
#include <cstring>
#include <fstream>
#include <memory>
#include <new>

#include "bench/bench.hpp"
#include "llm/config.hpp"
#include "model/deck.hpp"
#include "pipeline/pipeline.hpp"
#include "pptx/pptx_io.hpp"
#include "pptx/slide_json.hpp"
#include "support/error.hpp"

using namespace deckhand;

struct dh_deck {
  Deck deck;
};

struct dh_config {
  llm::Config config;
};

namespace {

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out) std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

void set_err(char** err, const std::string& message) {
  if (err) *err = dup_string(message);
}

dh_status status_of(const Error& e) {
  switch (e.code()) {
    case Errc::io:
      return DH_E_IO;
    case Errc::not_a_zip:
    case Errc::malformed_package:
    case Errc::malformed_xml:
      return DH_E_FORMAT;
    case Errc::slide_out_of_range:
      return DH_E_RANGE;
    case Errc::manifest_error:
    case Errc::config_error:
    case Errc::empty_plan:
    case Errc::auth:
      return DH_E_USAGE;
    default:
      return DH_E_INTERNAL;
  }
}

template <typename Fn>
dh_status guarded(char** err, Fn&& fn) {
  try {
    return fn();
  } catch (const Error& e) {
    set_err(err, e.what());
    return status_of(e);
  } catch (const std::bad_alloc&) {
    set_err(err, "out of memory");
    return DH_E_INTERNAL;
  } catch (const std::exception& e) {
    set_err(err, e.what());
    return DH_E_INTERNAL;
  }
}

}  // namespace

extern "C" {

const char* dh_version(void) { return "0.1.0"; }

void dh_string_free(char* s) { std::free(s); }

dh_status dh_deck_load(const char* path, dh_deck** out_deck, char** err) {
  if (!path || !out_deck) {
    set_err(err, "path and out_deck must be non-NULL");
    return DH_E_USAGE;
  }
  *out_deck = nullptr;
  return guarded(err, [&] {
    auto handle = std::make_unique<dh_deck>();
    handle->deck = pptx::load_deck(path);
    *out_deck = handle.release();
    return DH_OK;
  });
}

void dh_deck_free(dh_deck* deck) { delete deck; }

dh_status dh_deck_save(const dh_deck* deck, const char* path, char** err) {
  if (!deck || !path) {
    set_err(err, "deck and path must be non-NULL");
    return DH_E_USAGE;
  }
  return guarded(err, [&] {
    pptx::save_deck(deck->deck, path);
    return DH_OK;
  });
}

int dh_deck_slide_count(const dh_deck* deck) {
  return deck ? static_cast<int>(deck->deck.slides.size()) : -1;
}

dh_status dh_deck_slide_json(const dh_deck* deck, int slide_index,
                             char** out_json, char** err) {
  if (!deck || !out_json) {
    set_err(err, "deck and out_json must be non-NULL");
    return DH_E_USAGE;
  }
  *out_json = nullptr;
  return guarded(err, [&] {
    std::string text =
        slide_index == 0
            ? pptx::json_text(pptx::deck_to_json(deck->deck))
            : pptx::json_text(pptx::slide_to_json(deck->deck, slide_index));
    *out_json = dup_string(text);
    return DH_OK;
  });
}

dh_status dh_deck_summary_json(const dh_deck* deck, char** out_json,
                               char** err) {
  if (!deck || !out_json) {
    set_err(err, "deck and out_json must be non-NULL");
    return DH_E_USAGE;
  }
  *out_json = nullptr;
  return guarded(err, [&] {
    *out_json = dup_string(pptx::json_text(pptx::deck_summary(deck->deck)));
    return DH_OK;
  });
}

dh_status dh_config_default(dh_config** out_config, char** err) {
  if (!out_config) {
    set_err(err, "out_config must be non-NULL");
    return DH_E_USAGE;
  }
  *out_config = nullptr;
  return guarded(err, [&] {
    auto handle = std::make_unique<dh_config>();
    handle->config = llm::default_config();
    *out_config = handle.release();
    return DH_OK;
  });
}

dh_status dh_config_load(const char* path, dh_config** out_config, char** err) {
  if (!path || !out_config) {
    set_err(err, "path and out_config must be non-NULL");
    return DH_E_USAGE;
  }
  *out_config = nullptr;
  return guarded(err, [&] {
    auto handle = std::make_unique<dh_config>();
    handle->config = llm::load_config(path);
    *out_config = handle.release();
    return DH_OK;
  });
}

void dh_config_free(dh_config* config) { delete config; }

dh_status dh_edit(const dh_config* config, const char* deck_path,
                  const char* instruction, const dh_edit_options* options,
                  char** out_report_json, char** err) {
  if (!config || !deck_path || !instruction || !out_report_json) {
    set_err(err, "config, deck_path, instruction and out_report_json must be "
                 "non-NULL");
    return DH_E_USAGE;
  }
  *out_report_json = nullptr;
  return guarded(err, [&] {
    llm::Config cfg = config->config;
    pipeline::EditOptions edit_options;
    bool direct = false;
    if (options) {
      if (options->out_path) edit_options.output_path = options->out_path;
      if (options->max_attempts > 0) cfg.max_attempts = options->max_attempts;
      edit_options.no_timing = options->no_timing != 0;
      edit_options.allow_overwrite = options->allow_overwrite != 0;
      direct = options->direct_mode != 0;
    }
    auto client = llm::make_chat_client(cfg);
    pipeline::EditOutcome outcome =
        direct ? pipeline::direct_edit(instruction, deck_path, cfg, *client,
                                       edit_options)
               : pipeline::edit_deck(instruction, deck_path, cfg, *client,
                                     edit_options);
    pipeline::Json report = pipeline::outcome_to_json(
        outcome, /*include_timing=*/!edit_options.no_timing);
    *out_report_json = dup_string(report.dump(2));
    return DH_OK;
  });
}

dh_status dh_bench(const dh_config* config, const char* manifest_path,
                   const dh_bench_options* options, char** out_report_json,
                   char** err) {
  if (!config || !manifest_path || !out_report_json) {
    set_err(err, "config, manifest_path and out_report_json must be non-NULL");
    return DH_E_USAGE;
  }
  *out_report_json = nullptr;
  return guarded(err, [&] {
    const llm::Config& cfg = config->config;
    bench::BenchOptions bench_options;
    std::filesystem::path report_path;
    if (options) {
      bench_options.workers = options->workers;
      bench_options.no_timing = options->no_timing != 0;
      switch (options->judge_mode) {
        case DH_JUDGE_OFF: bench_options.judge_mode = bench::JudgeMode::off; break;
        case DH_JUDGE_TEXT: bench_options.judge_mode = bench::JudgeMode::text; break;
        case DH_JUDGE_IMAGE: bench_options.judge_mode = bench::JudgeMode::image; break;
      }
      if (options->report_path) report_path = options->report_path;
    }

    auto cases = bench::load_manifest(manifest_path);
    auto client = llm::make_chat_client(cfg);
    auto records = bench::run_suite(cases, cfg, *client, bench_options);
    bench::SuiteMetrics metrics = bench::aggregate(records);
    bench::Json report = bench::report_to_json(
        metrics, records, /*include_timing=*/!bench_options.no_timing);
    std::string text = report.dump(2);

    if (!report_path.empty()) {
      std::ofstream out(report_path, std::ios::trunc);
      if (!out) raise(Errc::io, "cannot write report " + report_path.string());
      out << text << "\n";
    }
    if (cfg.csv_report) {
      std::ofstream out(*cfg.csv_report, std::ios::trunc);
      if (!out)
        raise(Errc::io, "cannot write csv report " + cfg.csv_report->string());
      out << bench::report_to_csv(records,
                                  /*include_timing=*/!bench_options.no_timing);
    }
    *out_report_json = dup_string(text);
    return DH_OK;
  });
}

}  // extern "C"
