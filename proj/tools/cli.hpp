#pragma once

#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "salient/checkpoint.hpp"
#include "salient/corpus.hpp"
#include "salient/saliency.hpp"

namespace salient::cli {

enum ExitCode : int { kOk = 0, kValidation = 1, kRuntime = 2 };

/// Runs one command. `args` excludes the program name.
int run(std::span<const std::string> args, std::ostream& out, std::ostream& err);

/// Saliency observed on one teacher-forced line transition.
struct TransitionTable {
  std::size_t source_line = 0;  // 0-based
  std::size_t target_line = 0;
  std::vector<TokenId> source;
  std::vector<double> scores;
  Selection selection;
};

/// Replays the training chain of `poem` and collects the three transitions.
std::vector<TransitionTable> inspect_saliency(const Checkpoint& checkpoint, const Poem& poem);

void print_transition_tables(std::ostream& out, const Vocabulary& vocab, std::span<const TransitionTable> tables);

}  // namespace salient::cli
