#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "salient/tensor.hpp"

namespace salient {

/// Alignment between a source line and the line decoded from it.
struct AttentionTrace {
  Tensor alignment;                     // T_out x T_in, rows sum to 1
  std::vector<Tensor> encoder_states;   // h_1..h_{T_in}

  std::size_t source_length() const { return alignment.cols(); }
  std::size_t target_length() const { return alignment.rows(); }
};

enum class SaliencyMode { kNaive, kTfIdf };
std::string_view saliency_mode_name(SaliencyMode mode);
SaliencyMode parse_saliency_mode(std::string_view name);

struct SaliencyScores {
  std::vector<double> r;  // one score per source character
};

/// Column mass of the alignment, normalised to sum to 1.
SaliencyScores saliency_naive(const Tensor& alignment);
inline SaliencyScores saliency_naive(const AttentionTrace& trace) { return saliency_naive(trace.alignment); }

/// r = (w_out . A) (elementwise*) w_in, without renormalisation.
SaliencyScores saliency_tfidf(const Tensor& alignment, std::span<const double> w_in, std::span<const double> w_out);
inline SaliencyScores saliency_tfidf(const AttentionTrace& trace, std::span<const double> w_in,
                                     std::span<const double> w_out) {
  return saliency_tfidf(trace.alignment, w_in, w_out);
}

struct Selection {
  std::vector<std::size_t> indices;  // m_1..m_N, by descending score
  std::vector<double> scores;        // r at those indices, non-increasing

  std::size_t count() const { return indices.size(); }
};

/// Thresholded selection of at most K salient positions.
///
/// Positions are visited in descending score order (ties: lower index first).
/// The threshold starts at mean + 0.5 * (population) standard deviation and
/// is multiplied by 0.618 after every acceptance; the scan stops at the first
/// score below the threshold or once min(K, T) positions are taken.
Selection select_salient(std::span<const double> r, std::size_t k);

inline constexpr double kThresholdDecay = 0.618;

}  // namespace salient
