#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>

#include "salient/model.hpp"
#include "salient/tfidf.hpp"

namespace salient {

using KeyValues = std::map<std::string, std::string>;

/// Flat "key = value" text; '#' starts a comment, blank lines are ignored.
KeyValues parse_key_values(std::string_view text);
KeyValues load_key_values(const std::filesystem::path& path);

struct TrainConfig {
  std::size_t batch_size = 64;
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  std::size_t epochs = 10;
  std::size_t max_steps = 0;  // 0: no cap beyond epochs
  std::uint64_t seed = 1;
  bool teacher_forcing = true;
  bool detach_clue = false;
  std::size_t validation_interval = 0;  // steps between validation passes, 0 = never
  std::size_t validation_count = 0;     // trailing corpus poems held out
  std::size_t jobs = 1;                 // worker threads for per-poem gradients
  TfScope tf_scope = TfScope::kLine;

  void validate() const;
  KeyValues to_map() const;
  void apply(const KeyValues& kv);
};

/// Everything a config file can set. Unknown keys are rejected.
struct RunConfig {
  ModelConfig model;
  TrainConfig train;

  static RunConfig from(const KeyValues& kv);
  /// Every key with its effective value, echoed into checkpoint manifests.
  KeyValues echo() const;
};

std::string_view tf_scope_name(TfScope scope);
TfScope parse_tf_scope(std::string_view name);

}  // namespace salient
