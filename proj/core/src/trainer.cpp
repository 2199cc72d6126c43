#include "salient/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <numeric>
#include <thread>

#include "salient/adam.hpp"

namespace salient {

namespace {

bool finite(const Gradients& g) {
  return std::all_of(g.begin(), g.end(), [](const Tensor& t) { return t.all_finite(); });
}

}  // namespace

PoemGradient poem_gradient(const Model& model, const Poem& poem, const ChainOptions& options) {
  Graph graph(model);
  auto chain = build_chain(graph, poem, options);
  auto& tape = graph.tape();
  auto loss = tape.scale(chain.total_loss, 1.0 / static_cast<double>(chain.char_count));
  PoemGradient out;
  out.loss = tape.value(loss)[0];
  out.chars = chain.char_count;
  out.grads = model.params().zeros_like();
  tape.backward(loss, out.grads);
  return out;
}

BatchGradient batch_gradient(const Model& model, std::span<const Poem* const> poems, const ChainOptions& options,
                             std::size_t jobs) {
  if (poems.empty()) throw std::invalid_argument("batch_gradient: zero-length batch");
  std::vector<PoemGradient> per(poems.size());
  const std::size_t workers = std::min(std::max<std::size_t>(jobs, 1), poems.size());
  if (workers == 1) {
    for (std::size_t i = 0; i < poems.size(); ++i) per[i] = poem_gradient(model, *poems[i], options);
  } else {
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(workers);
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        try {
          for (std::size_t i = w; i < poems.size(); i += workers) per[i] = poem_gradient(model, *poems[i], options);
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
    }
    for (auto& t : pool) t.join();
    for (auto& e : errors)
      if (e) std::rethrow_exception(e);
  }

  BatchGradient out;
  out.grads = model.params().zeros_like();
  for (const auto& p : per) {
    out.loss += p.loss;
    add_into(out.grads, p.grads);
  }
  const double inv = 1.0 / static_cast<double>(poems.size());
  out.loss *= inv;
  scale_in_place(out.grads, inv);
  return out;
}

double evaluate_loss(const Model& model, std::span<const Poem> poems, const ChainOptions& options) {
  if (poems.empty()) throw std::invalid_argument("evaluate_loss: no poems");
  double total = 0.0;
  std::size_t chars = 0;
  for (const auto& poem : poems) {
    Graph graph(model);
    auto chain = build_chain(graph, poem, options);
    total += graph.value(chain.total_loss)[0];
    chars += chain.char_count;
  }
  return total / static_cast<double>(chars);
}

CharacterAccuracy teacher_forced_accuracy(const Model& model, std::span<const Poem> poems, const ChainOptions& options) {
  CharacterAccuracy acc;
  for (const auto& poem : poems) {
    Graph graph(model);
    auto chain = build_chain(graph, poem, options);
    for (std::size_t k = 0; k < chain.tasks.size(); ++k) {
      const auto& gold = chain.tasks[k].target;
      const auto& pred = chain.traces[k].argmax;
      for (std::size_t i = 0; i < gold.size(); ++i) acc.correct += pred[i] == gold[i];
      acc.total += gold.size();
    }
  }
  return acc;
}

std::vector<LossPoint> run_training(Model& model, std::span<const Poem> poems, std::span<const Poem> validation,
                                    const TfIdfTable& tfidf, const TrainConfig& config,
                                    const std::optional<Style>& style_override, const ProgressFn& progress) {
  config.validate();
  if (poems.empty()) throw TrainingError("training split is empty");
  AdamState adam(model.params(), {config.learning_rate, config.beta1, config.beta2, config.epsilon});
  Rng rng(config.seed);
  ChainOptions options{&tfidf, config.tf_scope, config.detach_clue, style_override};

  std::vector<std::size_t> order(poems.size());
  std::iota(order.begin(), order.end(), 0);
  std::vector<LossPoint> curve;
  std::size_t step = 0;
  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    rng.shuffle(std::span<std::size_t>(order));
    for (std::size_t start = 0; start < order.size(); start += config.batch_size) {
      const std::size_t end = std::min(order.size(), start + config.batch_size);
      std::vector<const Poem*> batch;
      for (std::size_t i = start; i < end; ++i) batch.push_back(&poems[order[i]]);
      auto bg = batch_gradient(model, batch, options, config.jobs);
      if (!std::isfinite(bg.loss) || !finite(bg.grads))
        throw TrainingError("non-finite loss or gradient at step " + std::to_string(step));
      adam.apply(model.params(), bg.grads);
      ++step;
      LossPoint point{step, bg.loss, std::nullopt};
      if (config.validation_interval && !validation.empty() && step % config.validation_interval == 0)
        point.val_loss = evaluate_loss(model, validation, options);
      curve.push_back(point);
      if (progress) progress(point);
      if (config.max_steps && step >= config.max_steps) return curve;
    }
  }
  return curve;
}

TrainResult train(const Corpus& corpus, const RunConfig& config, const ProgressFn& progress) {
  if (corpus.train.empty()) throw TrainingError("training split is empty");
  ModelConfig mc = config.model;
  mc.vocab_size = corpus.vocab.size();
  Model model(mc, config.train.seed);
  auto tfidf = TfIdfTable::build(corpus.train, corpus.vocab.size());
  auto curve = run_training(model, corpus.train, corpus.validation, tfidf, config.train, std::nullopt, progress);
  return TrainResult{std::move(model), std::move(tfidf), std::move(curve)};
}

std::vector<Poem> balance_styles(std::span<const Poem> poems, Rng& rng) {
  std::map<std::size_t, std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < poems.size(); ++i)
    if (poems[i].style) groups[static_cast<std::size_t>(*poems[i].style)].push_back(i);
  if (groups.empty()) return {};
  std::size_t smallest = poems.size();
  for (const auto& [label, idx] : groups) smallest = std::min(smallest, idx.size());

  std::vector<std::size_t> keep;
  for (auto& [label, idx] : groups) {
    rng.shuffle(std::span<std::size_t>(idx));
    keep.insert(keep.end(), idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(smallest));
  }
  std::sort(keep.begin(), keep.end());
  std::vector<Poem> out;
  for (auto i : keep) out.push_back(poems[i]);
  return out;
}

Model with_style_extension(const Model& base, std::uint64_t seed) {
  if (base.config().extension.style) return Model(base.config(), base.params());
  ModelConfig mc = base.config();
  mc.extension.style = true;
  Rng rng(seed);
  const std::size_t old_width = base.config().output_input_dim();
  ParameterSet params;
  for (auto& [name, shape] : Model::layout(mc)) {
    Tensor t(shape);
    auto existing = base.params().find(name);
    if (existing && base.params()[*existing].shape() == shape) {
      t = base.params()[*existing];
    } else if (name == "output.maxout.W") {
      // style features are appended last, so old columns keep their positions
      const Tensor& old = base.params()[base.params().slot(name)];
      for (std::size_t r = 0; r < shape[0]; ++r)
        for (std::size_t c = 0; c < shape[1]; ++c)
          t.at(r, c) = c < old_width ? old.at(r, c) : rng.uniform(-mc.init_scale, mc.init_scale);
    } else {
      for (auto& x : t.data()) x = rng.uniform(-mc.init_scale, mc.init_scale);
    }
    params.add(name, std::move(t));
  }
  return Model(mc, std::move(params));
}

TrainResult finetune_style(const Model& base, const TfIdfTable& tfidf, std::span<const Poem> labelled,
                           const TrainConfig& config, const ProgressFn& progress) {
  Rng rng(config.seed);
  auto balanced = balance_styles(labelled, rng);
  if (balanced.empty()) throw TrainingError("style fine-tuning needs style-labelled poems; none found");
  Model model = with_style_extension(base, config.seed ^ 0x5157u);
  auto curve = run_training(model, balanced, {}, tfidf, config, std::nullopt, progress);
  return TrainResult{std::move(model), tfidf, std::move(curve)};
}

void write_loss_csv(std::ostream& out, std::span<const LossPoint> curve) {
  out << "step,train_loss,val_loss\n";
  char buf[64];
  for (const auto& p : curve) {
    std::snprintf(buf, sizeof buf, "%.17g", p.train_loss);
    out << p.step << ',' << buf << ',';
    if (p.val_loss) {
      std::snprintf(buf, sizeof buf, "%.17g", *p.val_loss);
      out << buf;
    }
    out << '\n';
  }
}

}  // namespace salient
