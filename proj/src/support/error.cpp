#include "support/error.hpp"

namespace deckhand {

const char* errc_name(Errc code) {
  switch (code) {
    case Errc::internal: return "InternalError";
    case Errc::io: return "IoError";
    case Errc::not_a_zip: return "NotAZip";
    case Errc::malformed_package: return "MalformedPackage";
    case Errc::malformed_xml: return "MalformedXml";
    case Errc::slide_out_of_range: return "SlideOutOfRange";
    case Errc::not_found: return "NotFound";
    case Errc::ambiguous: return "Ambiguous";
    case Errc::plan_parse: return "PlanParseError";
    case Errc::page_out_of_range: return "PageOutOfRange";
    case Errc::empty_plan: return "EmptyPlan";
    case Errc::edit_parse: return "EditParseError";
    case Errc::structure_mismatch: return "StructureMismatch";
    case Errc::script_parse: return "ScriptParseError";
    case Errc::shape_not_found: return "ShapeNotFound";
    case Errc::run_out_of_range: return "RunOutOfRange";
    case Errc::invalid_color: return "InvalidColor";
    case Errc::invalid_geometry: return "InvalidGeometry";
    case Errc::apply_error: return "ApplyError";
    case Errc::transport: return "TransportError";
    case Errc::auth: return "AuthError";
    case Errc::rate_limited: return "RateLimited";
    case Errc::bad_response: return "BadResponse";
    case Errc::manifest_error: return "ManifestError";
    case Errc::judge_parse: return "JudgeParseError";
    case Errc::out_of_range: return "OutOfRange";
    case Errc::degenerate_input: return "DegenerateInput";
    case Errc::empty_suite: return "EmptySuite";
    case Errc::render_unavailable: return "RenderUnavailable";
    case Errc::config_error: return "ConfigError";
  }
  return "UnknownError";
}

}  // namespace deckhand
