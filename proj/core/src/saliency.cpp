#include "salient/saliency.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace salient {

std::string_view saliency_mode_name(SaliencyMode mode) { return mode == SaliencyMode::kNaive ? "naive" : "tfidf"; }

SaliencyMode parse_saliency_mode(std::string_view name) {
  if (name == "naive") return SaliencyMode::kNaive;
  if (name == "tfidf") return SaliencyMode::kTfIdf;
  throw std::invalid_argument("unknown saliency mode: " + std::string(name));
}

SaliencyScores saliency_naive(const Tensor& alignment) {
  if (alignment.rank() != 2) throw ShapeError("saliency: alignment must be a matrix, got " + shape_string(alignment.shape()));
  SaliencyScores s;
  s.r.assign(alignment.cols(), 0.0);
  for (std::size_t i = 0; i < alignment.rows(); ++i)
    for (std::size_t j = 0; j < alignment.cols(); ++j) s.r[j] += alignment.at(i, j);
  const double total = std::accumulate(s.r.begin(), s.r.end(), 0.0);
  for (auto& x : s.r) x /= total;
  return s;
}

SaliencyScores saliency_tfidf(const Tensor& alignment, std::span<const double> w_in, std::span<const double> w_out) {
  if (alignment.rank() != 2) throw ShapeError("saliency: alignment must be a matrix, got " + shape_string(alignment.shape()));
  if (w_out.size() != alignment.rows() || w_in.size() != alignment.cols())
    throw ShapeError("saliency: weight lengths (in " + std::to_string(w_in.size()) + ", out " +
                     std::to_string(w_out.size()) + ") do not match alignment " + shape_string(alignment.shape()));
  SaliencyScores s;
  s.r.assign(alignment.cols(), 0.0);
  for (std::size_t i = 0; i < alignment.rows(); ++i)
    for (std::size_t j = 0; j < alignment.cols(); ++j) s.r[j] += w_out[i] * alignment.at(i, j);
  for (std::size_t j = 0; j < s.r.size(); ++j) s.r[j] *= w_in[j];
  return s;
}

Selection select_salient(std::span<const double> r, std::size_t k) {
  Selection sel;
  const std::size_t t = r.size();
  if (t == 0 || k == 0) return sel;

  const double avg = std::accumulate(r.begin(), r.end(), 0.0) / static_cast<double>(t);
  double var = 0.0;
  for (double x : r) var += (x - avg) * (x - avg);
  const double std_dev = std::sqrt(var / static_cast<double>(t));

  std::vector<std::size_t> order(t);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return r[a] > r[b]; });

  double threshold = avg + 0.5 * std_dev;
  const std::size_t limit = std::min(k, t);
  for (std::size_t pos = 0; pos < limit && r[order[pos]] >= threshold; ++pos) {
    sel.indices.push_back(order[pos]);
    sel.scores.push_back(r[order[pos]]);
    threshold *= kThresholdDecay;
  }
  return sel;
}

}  // namespace salient
