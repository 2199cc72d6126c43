#include "salient/chain.hpp"

#include <stdexcept>

namespace salient {

std::vector<TokenId> poem_keyword(const Poem& poem, const TfIdfTable* tfidf) {
  if (!poem.keyword.empty()) return poem.keyword;
  if (!tfidf) throw std::invalid_argument("poem has no keyword and no tf-idf table was given to extract one");
  return extract_keyword(poem, *tfidf);
}

Tensor alignment_matrix(const Graph& graph, std::span<const ad::Var> rows) {
  if (rows.empty()) throw std::invalid_argument("alignment_matrix: no rows");
  const std::size_t cols = graph.value(rows[0]).size();
  Tensor a({rows.size(), cols});
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& r = graph.value(rows[i]);
    std::copy(r.data().begin(), r.data().end(), a.row(i).begin());
  }
  return a;
}

TrainingExampleChain build_chain(Graph& graph, const Poem& poem, const ChainOptions& options) {
  const auto& cfg = graph.model().config();
  if (cfg.saliency == SaliencyMode::kTfIdf && !options.tfidf)
    throw std::invalid_argument("build_chain: tf-idf saliency needs a tf-idf table");
  auto& tape = graph.tape();

  TrainingExampleChain chain;
  chain.keyword = poem_keyword(poem, options.tfidf);
  chain.tasks.push_back({chain.keyword, poem.lines[0], 0});
  for (std::size_t i = 1; i < kLinesPerPoem; ++i) chain.tasks.push_back({poem.lines[i - 1], poem.lines[i], i});

  SalientClueState clue = graph.initial_clue(poem.form);
  ExtensionVector ext;
  std::vector<ad::Var> losses;

  for (std::size_t k = 0; k < chain.tasks.size(); ++k) {
    const auto& task = chain.tasks[k];
    TaskTrace trace;
    trace.source = graph.encode_source(task.source);
    trace.clue_dimension = clue.dimension;
    trace.clue_cursor = clue.cursor;

    if (k == 0) {
      ad::Var intent, style;
      if (cfg.extension.intent) intent = graph.intent_vector(trace.source.states);
      if (cfg.extension.style)
        style = graph.style_vector(static_cast<std::size_t>(options.style.value_or(poem.style.value_or(Style::kNone))));
      ext = graph.extension(intent, style);
    }

    DecoderState state = graph.initial_state();
    TokenId prev = Vocabulary::kBos;
    std::vector<ad::Var> char_losses;
    for (auto gold : task.target) {
      auto step = graph.decode_step(state, prev, trace.source, clue, ext);
      char_losses.push_back(tape.cross_entropy(step.logits, gold));
      trace.attention_rows.push_back(step.attention);
      const auto& logits = graph.value(step.logits);
      std::size_t best = 0;
      for (std::size_t v = 1; v < logits.size(); ++v)
        if (logits[v] > logits[best]) best = v;
      trace.argmax.push_back(static_cast<TokenId>(best));
      state = step.state;
      prev = gold;
    }
    auto weights = Tensor({char_losses.size()}, 1.0);
    trace.loss = tape.weighted_sum(tape.constant(std::move(weights)), char_losses);
    losses.push_back(trace.loss);
    chain.char_count += task.target.size();

    if (task.target_line >= 1) {
      std::vector<double> w_in, w_out;
      if (cfg.saliency == SaliencyMode::kTfIdf) {
        w_in = tfidf_line(task.source, poem, *options.tfidf, options.tf_scope);
        w_out = tfidf_line(task.target, poem, *options.tfidf, options.tf_scope);
      }
      auto r = graph.saliency(trace.attention_rows, w_in, w_out, cfg.saliency);
      const auto& rv = graph.value(r);
      SaliencyScores scores{std::vector<double>(rv.data().begin(), rv.data().end())};
      Selection sel = select_salient(scores.r, max_salient(poem.form));
      clue = graph.update_clue(clue, sel, r, trace.source.states);
      if (options.detach_clue) clue = graph.detach(clue);
      trace.scores = std::move(scores);
      trace.selection = std::move(sel);
    }
    chain.traces.push_back(std::move(trace));
  }

  chain.final_clue = clue;
  chain.total_loss = tape.weighted_sum(tape.constant(Tensor({losses.size()}, 1.0)), losses);
  return chain;
}

}  // namespace salient
