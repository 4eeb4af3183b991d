#pragma once

#include <vector>

namespace deckhand::bench {

// Sample Pearson correlation coefficient. Throws DegenerateInput for fewer
// than two points or a constant vector.
double pearson(const std::vector<double>& xs, const std::vector<double>& ys);

// Linear 0-5 -> 0-100 mapping for rubric scores. Throws OutOfRange.
double hard_percentage(int score);

}  // namespace deckhand::bench
