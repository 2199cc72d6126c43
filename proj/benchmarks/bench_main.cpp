#include <benchmark/benchmark.h>

#include "salient/chain.hpp"
#include "salient/corpus.hpp"
#include "salient/generator.hpp"
#include "salient/rng.hpp"
#include "salient/saliency.hpp"
#include "salient/tone.hpp"

using namespace salient;

namespace {

const Corpus& corpus() {
  static const Corpus c = load_corpus(std::string(SALIENT_BENCH_DATA) + "/wujue20.txt");
  return c;
}

ModelConfig bench_config(ClueMode clue) {
  ModelConfig c;
  c.vocab_size = corpus().vocab.size();
  c.embed_dim = 32;
  c.encoder_hidden = 32;
  c.decoder_hidden = 64;
  c.attention_dim = 64;
  c.maxout_dim = 64;
  c.clue_dim = 64;
  c.clue = clue;
  return c;
}

void BM_SelectSalient(benchmark::State& state) {
  Rng rng(1);
  std::vector<std::vector<double>> inputs(256, std::vector<double>(static_cast<std::size_t>(state.range(0))));
  for (auto& v : inputs)
    for (auto& x : v) x = rng.uniform(0.0, 1.0);
  std::size_t i = 0;
  for (auto _ : state) benchmark::DoNotOptimize(select_salient(inputs[i++ % inputs.size()], 3));
}
BENCHMARK(BM_SelectSalient)->Arg(5)->Arg(7);

void BM_DecodeStep(benchmark::State& state) {
  Model model(bench_config(ClueMode::kSsi), 1);
  const auto kw = corpus().vocab.encode(U"明月");
  for (auto _ : state) {
    Graph g(model);
    auto src = g.encode_source(kw);
    auto step = g.decode_step(g.initial_state(), Vocabulary::kBos, src, g.initial_clue(Form::kWujue), g.no_extension());
    benchmark::DoNotOptimize(g.value(step.logits).data().data());
  }
}
BENCHMARK(BM_DecodeStep)->Unit(benchmark::kMicrosecond);

void BM_ChainForwardBackward(benchmark::State& state) {
  const auto clue = state.range(0) ? ClueMode::kSsi : ClueMode::kSdu;
  Model model(bench_config(clue), 1);
  const auto table = TfIdfTable::build(corpus().train, corpus().vocab.size());
  const ChainOptions opts{&table, TfScope::kLine, false, std::nullopt};
  auto grads = model.params().zeros_like();
  for (auto _ : state) {
    Graph g(model);
    auto chain = build_chain(g, corpus().train[0], opts);
    g.tape().backward(chain.total_loss, grads);
  }
}
BENCHMARK(BM_ChainForwardBackward)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_GeneratePoem(benchmark::State& state) {
  Model model(bench_config(ClueMode::kSsi), 1);
  const auto table = TfIdfTable::build(corpus().train, corpus().vocab.size());
  const auto lexicon = load_tone_lexicon(std::string(SALIENT_BENCH_DATA) + "/tones.tsv").lexicon;
  const auto patterns = PatternTable::standard();
  GenerationContext ctx{model, corpus().vocab, table, &lexicon, &patterns};
  GenerateOptions o;
  o.beam = static_cast<std::size_t>(state.range(0));
  const auto kw = corpus().vocab.encode(U"明月");
  for (auto _ : state) benchmark::DoNotOptimize(generate_poem(ctx, kw, o).log_prob);
}
BENCHMARK(BM_GeneratePoem)->Arg(1)->Arg(5)->Arg(20)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
