#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

namespace deckhand::bench {

using Json = nlohmann::ordered_json;

enum class JudgeMode { off, text, image };
const char* judge_mode_name(JudgeMode mode);

struct JudgeScores {
  int instruction_adherence = 0;
  int visualquality = 0;
  int text_quality = 0;
  int image_quality = 0;
  int layout_quality = 0;
  int color_quality = 0;
};

struct JudgeInputs {
  JudgeMode mode = JudgeMode::image;
  std::string instruction;
  // image mode
  std::filesystem::path original_image, edited_image;
  // text fallback mode: the slide JSON stands in for the renders
  std::string original_json, edited_json;
};

// The two scoring prompts (adherence/visual, then text/image/layout/color).
// Image-mode prompts reference the attached renders; the text fallback embeds
// the slide JSON instead.
std::pair<std::string, std::string> build_judge_prompts(const JudgeInputs& in);
std::pair<std::string, std::string> build_judge_prompts(
    const std::filesystem::path& original_image,
    const std::filesystem::path& edited_image, const std::string& instruction);

// Scores the edited slide against a Hard case's ideal outcome description;
// the reply is {"score": 0..5}.
std::string build_hard_judge_prompt(const JudgeInputs& in,
                                    const std::string& ideal_description);
int parse_hard_judge_score(const std::string& reply);

// Parses and range-checks both score documents.
// Throws JudgeParseError / OutOfRange.
JudgeScores parse_judge_scores(const std::string& adherence_json,
                               const std::string& tilc_json);

Json judge_scores_to_json(const JudgeScores& scores);
JudgeScores judge_scores_from_json(const Json& j);

// Runs the configured external render command ("{pptx}"/"{outdir}"
// placeholders) and returns the produced PNGs sorted by name. Throws
// RenderUnavailable when no command is configured.
std::vector<std::filesystem::path> render_slides(
    const std::filesystem::path& pptx, const std::filesystem::path& outdir,
    const std::optional<std::string>& render_command);

}  // namespace deckhand::bench
