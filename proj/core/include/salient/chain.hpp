#pragma once

#include <optional>
#include <vector>

#include "salient/model.hpp"
#include "salient/saliency.hpp"
#include "salient/tfidf.hpp"

namespace salient {

struct ChainOptions {
  /// Needed for tf-idf saliency and for keyword extraction.
  const TfIdfTable* tfidf = nullptr;
  TfScope tf_scope = TfScope::kLine;
  /// Stop gradients flowing from later lines into earlier clue updates.
  bool detach_clue = false;
  /// Overrides the poem's own style label for the style extension.
  std::optional<Style> style;
};

/// One decoding task: encode `source`, decode `target` under teacher forcing.
struct ChainTask {
  std::vector<TokenId> source;
  std::vector<TokenId> target;
  std::size_t target_line = 0;
};

struct TaskTrace {
  ad::Var loss;                         // summed cross entropy over the target
  EncodedSource source;
  std::vector<ad::Var> attention_rows;  // one per target character
  std::vector<TokenId> argmax;          // greedy prediction at every step
  std::size_t clue_dimension = 0;       // width of the clue this task consumed
  std::size_t clue_cursor = 0;          // SSI fill cursor at this task
  // Present for tasks decoding line 2 onward: saliency over the source line.
  std::optional<SaliencyScores> scores;
  std::optional<Selection> selection;
};

/// Ordered decoding tasks of one poem: keyword -> L1 with an empty clue, then
/// L_{i-1} -> L_i. After decoding L_i (i >= 2) the salient characters of
/// L_{i-1} are selected from that task's attention and folded into the clue.
struct TrainingExampleChain {
  std::vector<TokenId> keyword;
  std::vector<ChainTask> tasks;
  std::vector<TaskTrace> traces;
  SalientClueState final_clue;
  ad::Var total_loss;
  std::size_t char_count = 0;
};

TrainingExampleChain build_chain(Graph& graph, const Poem& poem, const ChainOptions& options);

/// Keyword of a poem: the annotated one, else tf-idf extraction.
std::vector<TokenId> poem_keyword(const Poem& poem, const TfIdfTable* tfidf);

/// Alignment matrix (rows = target chars) from attention row variables.
Tensor alignment_matrix(const Graph& graph, std::span<const ad::Var> rows);

}  // namespace salient
