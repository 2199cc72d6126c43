#pragma once

#include <cmath>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "salient/chain.hpp"
#include "salient/corpus.hpp"
#include "salient/model.hpp"
#include "salient/rng.hpp"
#include "salient/tfidf.hpp"

namespace salient::test {

inline std::filesystem::path data_path(const std::string& name) {
  return std::filesystem::path(SALIENT_TEST_DATA) / name;
}

/// Small model used across tests: embedding 8, hidden 16.
inline ModelConfig tiny_config(std::size_t vocab, ClueMode clue = ClueMode::kSsi, ExtensionKind ext = {},
                               SaliencyMode saliency = SaliencyMode::kTfIdf) {
  ModelConfig c;
  c.vocab_size = vocab;
  c.embed_dim = 8;
  c.encoder_hidden = 16;
  c.decoder_hidden = 16;
  c.attention_dim = 16;
  c.maxout_dim = 16;
  c.clue_dim = 16;
  c.intent_dim = 8;
  c.style_dim = 8;
  c.clue = clue;
  c.extension = ext;
  c.saliency = saliency;
  c.init_scale = 0.3;
  return c;
}

/// Random Wujue poem over ids [kFirstCharacter, vocab).
inline Poem random_poem(Rng& rng, std::size_t vocab, Form form = Form::kWujue) {
  Poem p;
  p.form = form;
  for (auto& line : p.lines)
    for (std::size_t i = 0; i < line_length(form); ++i)
      line.push_back(static_cast<TokenId>(Vocabulary::kFirstCharacter + rng.below(vocab - Vocabulary::kFirstCharacter)));
  p.keyword = {p.lines[0][1], p.lines[0][2]};
  return p;
}

/// Mean per-character chain loss of one poem.
inline double chain_loss(const Model& model, const Poem& poem, const ChainOptions& options) {
  Graph g(model);
  auto chain = build_chain(g, poem, options);
  return g.value(chain.total_loss)[0] / static_cast<double>(chain.char_count);
}

/// |a - n| / max(|a|, |n|, floor)
inline double relative_error(double analytic, double numeric, double floor = 1e-6) {
  return std::abs(analytic - numeric) / std::max({std::abs(analytic), std::abs(numeric), floor});
}

}  // namespace salient::test
