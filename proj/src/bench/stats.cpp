#include "bench/stats.hpp"

#include <cmath>

#include "support/error.hpp"

namespace deckhand::bench {

double pearson(const std::vector<double>& xs, const std::vector<double>& ys) {
  if (xs.size() != ys.size())
    raise(Errc::degenerate_input, "vectors differ in length");
  std::size_t n = xs.size();
  if (n < 2) raise(Errc::degenerate_input, "need at least two points");

  double mean_x = 0, mean_y = 0;
  for (std::size_t i = 0; i < n; ++i) {
    mean_x += xs[i];
    mean_y += ys[i];
  }
  mean_x /= static_cast<double>(n);
  mean_y /= static_cast<double>(n);

  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    double dx = xs[i] - mean_x;
    double dy = ys[i] - mean_y;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0)
    raise(Errc::degenerate_input, "constant vector has no correlation");
  return sxy / std::sqrt(sxx * syy);
}

double hard_percentage(int score) {
  if (score < 0 || score > 5)
    raise(Errc::out_of_range,
          "score " + std::to_string(score) + " outside 0..5");
  return static_cast<double>(score) / 5.0 * 100.0;
}

}  // namespace deckhand::bench
