#pragma once

#include <stdexcept>
#include <string>

namespace deckhand {

// Every failure the library can raise, one code per contract-level error.
enum class Errc {
  internal,
  io,
  // package / xml
  not_a_zip,
  malformed_package,
  malformed_xml,
  slide_out_of_range,
  // model lookups
  not_found,
  ambiguous,
  // planner
  plan_parse,
  page_out_of_range,
  empty_plan,
  // editor
  edit_parse,
  structure_mismatch,
  // edit script
  script_parse,
  shape_not_found,
  run_out_of_range,
  invalid_color,
  invalid_geometry,
  apply_error,
  // provider
  transport,
  auth,
  rate_limited,
  bad_response,
  // bench
  manifest_error,
  judge_parse,
  out_of_range,
  degenerate_input,
  empty_suite,
  render_unavailable,
  // config / cli
  config_error,
};

const char* errc_name(Errc code);

class Error : public std::runtime_error {
 public:
  Error(Errc code, std::string message)
      : std::runtime_error(std::string(errc_name(code)) + ": " + message),
        code_(code) {}

  Errc code() const { return code_; }

 private:
  Errc code_;
};

[[noreturn]] inline void raise(Errc code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace deckhand
