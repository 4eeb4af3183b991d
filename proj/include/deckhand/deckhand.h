/*
 * deckhand — C API for the slide-editing agent engine.
 *
 * The library exposes opaque handles and status codes; every structured
 * result comes back as a heap-allocated UTF-8 JSON string the caller frees
 * with dh_string_free(). Handles are not thread-safe individually, but
 * distinct handles may be used from different threads.
 */

#ifndef DECKHAND_H
#define DECKHAND_H

#ifdef __cplusplus
extern "C" {
#endif

typedef enum dh_status {
  DH_OK = 0,
  DH_E_USAGE = 1,    /* bad arguments, bad config, empty instruction */
  DH_E_IO = 2,       /* file system failure */
  DH_E_FORMAT = 3,   /* not a PPTX, malformed package or XML, bad manifest */
  DH_E_RANGE = 4,    /* slide index out of range */
  DH_E_INTERNAL = 5, /* anything else */
} dh_status;

typedef struct dh_deck dh_deck;     /* a loaded presentation */
typedef struct dh_config dh_config; /* engine configuration */

/* Library version, static storage. */
const char* dh_version(void);

/* Frees any string returned through an out-parameter. NULL is a no-op. */
void dh_string_free(char* s);

/* ---- decks ---------------------------------------------------------- */

/* Loads a .pptx file. On failure returns the status and, when err is
 * non-NULL, a message the caller must free. */
dh_status dh_deck_load(const char* path, dh_deck** out_deck, char** err);
void dh_deck_free(dh_deck* deck);

dh_status dh_deck_save(const dh_deck* deck, const char* path, char** err);

/* Number of slides; -1 on a NULL handle. */
int dh_deck_slide_count(const dh_deck* deck);

/* Structured JSON for one slide (1-based) or, with slide_index 0, a JSON
 * array covering the whole deck. */
dh_status dh_deck_slide_json(const dh_deck* deck, int slide_index,
                             char** out_json, char** err);

/* Compact per-deck summary (slide count, titles, shape histograms). */
dh_status dh_deck_summary_json(const dh_deck* deck, char** out_json,
                               char** err);

/* ---- configuration --------------------------------------------------- */

/* Built-in defaults: stage models, sampling settings, pricing table. */
dh_status dh_config_default(dh_config** out_config, char** err);

/* Defaults overlaid with a JSON config file. */
dh_status dh_config_load(const char* path, dh_config** out_config, char** err);
void dh_config_free(dh_config* config);

/* ---- editing ---------------------------------------------------------- */

typedef struct dh_edit_options {
  const char* out_path;   /* NULL: "<input>.edited.pptx" */
  int direct_mode;        /* 0: staged pipeline, 1: single-shot generation */
  int max_attempts;       /* 0: take the config value */
  int no_timing;          /* 1: omit wall-clock fields from the report */
  int allow_overwrite;    /* 1: out_path may equal the input */
} dh_edit_options;

/* Executes one natural-language instruction against a deck file. DH_OK means
 * the engine ran; the edit's own outcome ("success" | "partial" | "refused"
 * | "failed") is the "status" field of the returned report JSON. */
dh_status dh_edit(const dh_config* config, const char* deck_path,
                  const char* instruction, const dh_edit_options* options,
                  char** out_report_json, char** err);

/* ---- benchmarking ----------------------------------------------------- */

typedef enum dh_judge_mode {
  DH_JUDGE_OFF = 0,
  DH_JUDGE_TEXT = 1,
  DH_JUDGE_IMAGE = 2,
} dh_judge_mode;

typedef struct dh_bench_options {
  int workers;              /* 0: take the config value */
  dh_judge_mode judge_mode; /* scoring mode for the judge stage */
  const char* report_path;  /* optional: also write the report here */
  int no_timing;            /* 1: omit wall-clock fields (stable bytes) */
} dh_bench_options;

/* Runs every case in a JSON-lines manifest and returns the metrics report.
 * DH_OK means the suite executed; per-case failures are inside the report. */
dh_status dh_bench(const dh_config* config, const char* manifest_path,
                   const dh_bench_options* options, char** out_report_json,
                   char** err);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* DECKHAND_H */
