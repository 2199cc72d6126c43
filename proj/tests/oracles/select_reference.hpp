#pragma once

// Straight transcription of the thresholded selection loop, kept separate
// from the library so the two can be compared.

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

namespace salient::oracle {

inline std::vector<std::size_t> select_reference(const std::vector<double>& r, std::size_t K) {
  const std::size_t T = r.size();
  if (T == 0) return {};
  double avg = 0.0;
  for (double x : r) avg += x;
  avg /= static_cast<double>(T);
  double var = 0.0;
  for (double x : r) var += (x - avg) * (x - avg);
  const double stdev = std::sqrt(var / static_cast<double>(T));

  std::vector<std::pair<double, std::size_t>> order;
  for (std::size_t j = 0; j < T; ++j) order.push_back({-r[j], j});
  std::sort(order.begin(), order.end());  // descending score, then ascending index

  std::vector<std::size_t> m;
  std::size_t k = 1;
  double val = avg + 0.5 * stdev;
  while (k <= T && k <= K && r[order[k - 1].second] >= val) {
    m.push_back(order[k - 1].second);
    val = val * 0.618;
    k = k + 1;
  }
  return m;
}

}  // namespace salient::oracle
