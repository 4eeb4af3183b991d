#include "bench/judge.hpp"

#include <algorithm>
#include <cstdlib>

#include "support/error.hpp"
#include "support/jsontext.hpp"

namespace deckhand::bench {
namespace {

constexpr const char* kAdherencePrompt =
    R"PROMPT(You are an expert slide-editing judge.
TASK
- Compare the ORIGINAL slide with the EDITED slide.
- Decide how well the EDITED slide follows the INSTRUCTION and how aesthetically pleasing it is.
SCORING
Return valid JSON with exactly these keys:
{instruction_adherence: <int 0-5>,
visualquality:       <int 0-5>
}
GUIDELINES
Score each from 0 to 5, based on the following rubric:
5 = Perfect: Fully satisfies the instruction / visually excellent with no flaws.
4 = Mostly correct: Clearly reflects the instruction / visually strong but with minor flaws.
3 = Partially correct: Instruction was followed to a noticeable degree, but key aspects are missing or flawed / visual layout or formatting needs improvement.
2 = Slightly changed but inadequate: Some edits related to the instruction are present but insufficient or poorly done / visual design is lacking.
1 = Attempted but incorrect: Some change is visible, but it does not match the instruction / visual result is clearly poor.
0 = Completely fails: No meaningful attempt to follow the instruction / visually broken or irrelevant.
Judge only what you can see in the given image(s) and notes.
Return *only* the JSON object, nothing else.
)PROMPT";

constexpr const char* kTilcPrompt =
    R"PROMPT(You are an expert slide-editing judge.
TASK
- Compare the ORIGINAL slide with the EDITED slide.
- Evaluate how well the EDITED slide handles Text, Image, Layout, and Color aspects based on the INSTRUCTION.
SCORING
Return valid JSON with exactly these keys:
{  text_quality: <int 0-5>,
  image_quality: <int 0-5>,
  layout_quality: <int 0-5>,
  color_quality: <int 0-5>
}
GUIDELINES
Score each from 0 to 5, based on the following rubric:
TEXT QUALITY:
5 = Perfect: Text content, formatting, and typography are flawless and fully satisfy the instruction.
4 = Mostly correct: Text elements are clearly improved but have minor issues in content, formatting, or typography.
3 = Partially correct: Text improvements are noticeable but have significant issues in content, formatting, or typography.
2 = Slightly changed but inadequate: Some text edits are present but insufficient or poorly implemented.
1 = Attempted but incorrect: Text changes are visible but do not match the instruction or improve the slide.
0 = Completely fails: No meaningful text improvements or changes are severely detrimental.
IMAGE QUALITY:
5 = Perfect: Images are optimal in selection, placement, sizing, and enhancement, fully satisfying the instruction.
4 = Mostly correct: Images are well-selected and implemented with only minor issues in placement, sizing, or visual quality.
3 = Partially correct: Image improvements are noticeable but have significant issues in selection, placement, sizing, or quality.
2 = Slightly changed but inadequate: Some image edits are present but insufficient or poorly implemented.
1 = Attempted but incorrect: Image changes are visible but do not match the instruction or improve the slide.
0 = Completely fails: No meaningful image improvements or changes are severely detrimental.
LAYOUT QUALITY:
5 = Perfect: Slide organization, spacing, alignment, and element relationships are flawless and fully satisfy the instruction.
4 = Mostly correct: Layout is clearly improved but has minor issues in organization, spacing, or alignment.
3 = Partially correct: Layout improvements are noticeable but have significant issues in organization, spacing, or alignment.
2 = Slightly changed but inadequate: Some layout edits are present but insufficient or poorly implemented.
1 = Attempted but incorrect: Layout changes are visible but do not match the instruction or improve the slide.
0 = Completely fails: No meaningful layout improvements or changes are severely detrimental.
COLOR QUALITY:
5 = Perfect: Color scheme, contrast, balance, and emphasis are flawless and fully satisfy the instruction.
4 = Mostly correct: Color choices are clearly improved but have minor issues in scheme, contrast, or emphasis.
3 = Partially correct: Color improvements are noticeable but have significant issues in scheme, contrast, or emphasis.
2 = Slightly changed but inadequate: Some color edits are present but insufficient or poorly implemented.
1 = Attempted but incorrect: Color changes are visible but do not match the instruction or improve the slide.
0 = Completely fails: No meaningful color improvements or changes are severely detrimental.
Judge only what you can see in the given image(s) and notes.
Return *only* the JSON object, nothing else.
)PROMPT";

std::string context_block(const JudgeInputs& in) {
  std::string out = "INSTRUCTION\n" + in.instruction + "\n\n";
  if (in.mode == JudgeMode::text) {
    out +=
        "[text-fallback mode: no rendered images; the slide JSON below "
        "stands in for the ORIGINAL and EDITED renders]\n\n";
    out += "ORIGINAL slide JSON:\n" + in.original_json + "\n\n";
    out += "EDITED slide JSON:\n" + in.edited_json + "\n\n";
  } else {
    out += "The ORIGINAL slide is the first attached image; the EDITED slide "
           "is the second.\n\n";
  }
  return out;
}

int checked_score(const Json& doc, const char* key) {
  if (!doc.contains(key))
    raise(Errc::judge_parse, std::string("missing key '") + key + "'");
  const Json& v = doc.at(key);
  if (!v.is_number_integer() && !v.is_number_unsigned())
    raise(Errc::judge_parse, std::string("'") + key + "' must be an integer");
  int score = v.get<int>();
  if (score < 0 || score > 5)
    raise(Errc::out_of_range, std::string("'") + key + "' = " +
                                  std::to_string(score) + " outside 0..5");
  return score;
}

Json parse_score_doc(const std::string& text, const char* which) {
  Json doc =
      Json::parse(clean_model_json(text), nullptr, /*allow_exceptions=*/false);
  if (doc.is_discarded() || !doc.is_object())
    raise(Errc::judge_parse,
          std::string(which) + " reply is not a JSON object: " + text);
  return doc;
}

}  // namespace

const char* judge_mode_name(JudgeMode mode) {
  switch (mode) {
    case JudgeMode::off: return "off";
    case JudgeMode::text: return "text";
    case JudgeMode::image: return "image";
  }
  return "off";
}

std::pair<std::string, std::string> build_judge_prompts(const JudgeInputs& in) {
  std::string context = context_block(in);
  return {context + kAdherencePrompt, context + kTilcPrompt};
}

std::pair<std::string, std::string> build_judge_prompts(
    const std::filesystem::path& original_image,
    const std::filesystem::path& edited_image, const std::string& instruction) {
  JudgeInputs in;
  in.mode = JudgeMode::image;
  in.original_image = original_image;
  in.edited_image = edited_image;
  in.instruction = instruction;
  return build_judge_prompts(in);
}

std::string build_hard_judge_prompt(const JudgeInputs& in,
                                    const std::string& ideal_description) {
  std::string out = context_block(in);
  out +=
      "You are an expert slide-editing judge.\n"
      "Rate the extent to which the EDITED slide satisfies the following "
      "ideal outcome, on a scale of 0 (not at all) to 5 (fully):\n";
  out += ideal_description;
  out += "\nReturn valid JSON with exactly this key:\n{score: <int 0-5>}\n"
         "Return *only* the JSON object, nothing else.\n";
  return out;
}

int parse_hard_judge_score(const std::string& reply) {
  Json doc = parse_score_doc(reply, "hard-score");
  if (!doc.contains("score"))
    raise(Errc::judge_parse, "missing key 'score'");
  return checked_score(doc, "score");
}

JudgeScores parse_judge_scores(const std::string& adherence_json,
                               const std::string& tilc_json) {
  Json adherence = parse_score_doc(adherence_json, "adherence");
  Json tilc = parse_score_doc(tilc_json, "quality");
  JudgeScores scores;
  scores.instruction_adherence = checked_score(adherence, "instruction_adherence");
  scores.visualquality = checked_score(adherence, "visualquality");
  scores.text_quality = checked_score(tilc, "text_quality");
  scores.image_quality = checked_score(tilc, "image_quality");
  scores.layout_quality = checked_score(tilc, "layout_quality");
  scores.color_quality = checked_score(tilc, "color_quality");
  return scores;
}

Json judge_scores_to_json(const JudgeScores& s) {
  Json j;
  j["instruction_adherence"] = s.instruction_adherence;
  j["visualquality"] = s.visualquality;
  j["text_quality"] = s.text_quality;
  j["image_quality"] = s.image_quality;
  j["layout_quality"] = s.layout_quality;
  j["color_quality"] = s.color_quality;
  return j;
}

JudgeScores judge_scores_from_json(const Json& j) {
  JudgeScores s;
  s.instruction_adherence = checked_score(j, "instruction_adherence");
  s.visualquality = checked_score(j, "visualquality");
  s.text_quality = checked_score(j, "text_quality");
  s.image_quality = checked_score(j, "image_quality");
  s.layout_quality = checked_score(j, "layout_quality");
  s.color_quality = checked_score(j, "color_quality");
  return s;
}

std::vector<std::filesystem::path> render_slides(
    const std::filesystem::path& pptx, const std::filesystem::path& outdir,
    const std::optional<std::string>& render_command) {
  if (!render_command || render_command->empty())
    raise(Errc::render_unavailable,
          "no render command configured; set 'render_command' or use the "
          "text judge mode");
  std::filesystem::create_directories(outdir);
  std::string cmd = *render_command;
  auto substitute = [&cmd](const std::string& slot, const std::string& value) {
    for (auto at = cmd.find(slot); at != std::string::npos;
         at = cmd.find(slot))
      cmd.replace(at, slot.size(), value);
  };
  substitute("{pptx}", pptx.string());
  substitute("{outdir}", outdir.string());
  int rc = std::system(cmd.c_str());
  if (rc != 0)
    raise(Errc::render_unavailable,
          "render command exited with status " + std::to_string(rc));
  std::vector<std::filesystem::path> images;
  for (const auto& entry : std::filesystem::directory_iterator(outdir))
    if (entry.path().extension() == ".png") images.push_back(entry.path());
  std::sort(images.begin(), images.end());
  if (images.empty())
    raise(Errc::render_unavailable, "render command produced no png files");
  return images;
}

}  // namespace deckhand::bench
