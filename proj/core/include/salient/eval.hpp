#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "salient/corpus.hpp"

namespace salient {

inline constexpr std::size_t kBleuOrder = 4;

struct BleuReport {
  double bleu = 0.0;  // 0..100
  std::array<double, kBleuOrder> precisions{};
  std::array<std::size_t, kBleuOrder> matches{};
  std::array<std::size_t, kBleuOrder> totals{};
  double brevity_penalty = 1.0;
  std::size_t hypothesis_length = 0;
  std::size_t reference_length = 0;
};

/// Corpus BLEU over character tokens with multi-bleu conventions: clipped
/// n-gram counts summed over the corpus, uniform weights over n = 1..4, and
/// BP = exp(1 - ref/hyp) when the hypothesis side is shorter. A zero
/// precision at any order yields BLEU 0.
BleuReport corpus_bleu(std::span<const std::u32string> hypotheses, std::span<const std::u32string> references);

/// Mean over lines of |A ∩ B| / |A ∪ B|, with two empty sets scoring 1.
double saliency_jaccard(std::span<const std::vector<std::size_t>> model,
                        std::span<const std::vector<std::size_t>> gold);

double jaccard(std::span<const char32_t> a, std::span<const char32_t> b);

/// Mean pairwise Jaccard similarity of the character sets of whole poems.
double innovation(std::span<const std::u32string> poems);
double innovation(std::span<const Poem> poems);

}  // namespace salient
