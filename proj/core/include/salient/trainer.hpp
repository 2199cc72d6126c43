#pragma once

#include <functional>
#include <optional>
#include <ostream>
#include <span>
#include <stdexcept>
#include <vector>

#include "salient/chain.hpp"
#include "salient/config.hpp"
#include "salient/corpus.hpp"
#include "salient/model.hpp"
#include "salient/rng.hpp"
#include "salient/tfidf.hpp"

namespace salient {

class TrainingError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct LossPoint {
  std::size_t step = 0;
  double train_loss = 0.0;  // nats per character, batch mean
  std::optional<double> val_loss;
};

struct PoemGradient {
  double loss = 0.0;  // mean cross entropy per character
  std::size_t chars = 0;
  Gradients grads;    // gradient of `loss`
};

/// Forward and backward pass over one poem's full chain.
PoemGradient poem_gradient(const Model& model, const Poem& poem, const ChainOptions& options);

struct BatchGradient {
  double loss = 0.0;  // mean of per-poem losses
  Gradients grads;    // mean of per-poem gradients
};

/// Per-poem gradients averaged in poem order; `jobs` > 1 spreads poems over
/// threads without changing the result.
BatchGradient batch_gradient(const Model& model, std::span<const Poem* const> poems, const ChainOptions& options,
                             std::size_t jobs = 1);

/// Mean nats/character over poems under teacher forcing.
double evaluate_loss(const Model& model, std::span<const Poem> poems, const ChainOptions& options);

struct CharacterAccuracy {
  std::size_t correct = 0;
  std::size_t total = 0;
  double ratio() const { return total ? static_cast<double>(correct) / static_cast<double>(total) : 0.0; }
};

/// Fraction of gold characters that are the argmax prediction under teacher forcing.
CharacterAccuracy teacher_forced_accuracy(const Model& model, std::span<const Poem> poems, const ChainOptions& options);

struct TrainResult {
  Model model;
  TfIdfTable tfidf;
  std::vector<LossPoint> curve;
};

using ProgressFn = std::function<void(const LossPoint&)>;

/// Adam over shuffled per-poem mini-batches. Deterministic for a fixed seed.
TrainResult train(const Corpus& corpus, const RunConfig& config, const ProgressFn& progress = {});

/// Continues training `model` on `poems`; used by train() and fine-tuning.
std::vector<LossPoint> run_training(Model& model, std::span<const Poem> poems, std::span<const Poem> validation,
                                    const TfIdfTable& tfidf, const TrainConfig& config,
                                    const std::optional<Style>& style_override, const ProgressFn& progress);

/// Equal-size label groups: every present label is downsampled (seeded) to the
/// smallest present group. Unlabelled poems are dropped.
std::vector<Poem> balance_styles(std::span<const Poem> poems, Rng& rng);

/// Returns `base` with the style extension added (new weights seeded), or an
/// identical copy when it already has one.
Model with_style_extension(const Model& base, std::uint64_t seed);

/// Style fine-tuning of a pre-trained model on label-balanced poems.
TrainResult finetune_style(const Model& base, const TfIdfTable& tfidf, std::span<const Poem> labelled,
                           const TrainConfig& config, const ProgressFn& progress = {});

void write_loss_csv(std::ostream& out, std::span<const LossPoint> curve);

}  // namespace salient
