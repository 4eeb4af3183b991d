#pragma once

#include <string>
#include <utility>
#include <vector>

#include "agent/script.hpp"
#include "model/deck.hpp"

namespace deckhand::agent {

struct ApplyReport {
  bool refused = false;
  std::string refuse_reason;
  int ops_applied = 0;
  std::vector<std::string> effects;  // one line per applied op
};

// Simulates the script sequentially against a scratch copy of the deck so
// every reference is checked at the moment its op would run. Throws
// SlideOutOfRange / ShapeNotFound / RunOutOfRange / InvalidColor /
// InvalidGeometry, each naming the op index.
void validate_script(const EditScript& script, const Deck& deck);

// Applies the script to a copy, leaving the input untouched. A refuse script
// reports refused and returns the deck unchanged. Throws ApplyError for
// conditions validation cannot foresee (unknown layout names, shapes whose
// source bytes cannot carry the edit).
std::pair<Deck, ApplyReport> apply_script(const EditScript& script,
                                          const Deck& deck);

}  // namespace deckhand::agent
