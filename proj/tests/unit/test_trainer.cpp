#include <doctest.h>

#include <sstream>

#include "salient/checkpoint.hpp"
#include "salient/trainer.hpp"
#include "support.hpp"

using namespace salient;

namespace {

RunConfig small_run(std::size_t steps) {
  RunConfig rc;
  rc.model = test::tiny_config(0);
  rc.model.ssi_projection_dim = 6;
  rc.train.batch_size = 4;
  rc.train.learning_rate = 0.01;
  rc.train.max_steps = steps;
  rc.train.seed = 17;
  return rc;
}

bool same_params(const Model& a, const Model& b) {
  if (a.params().size() != b.params().size()) return false;
  for (std::size_t s = 0; s < a.params().size(); ++s)
    if (!(a.params()[s] == b.params()[s])) return false;
  return true;
}

}  // namespace

TEST_SUITE("trainer") {
  TEST_CASE("training is deterministic for a seed") {
    auto corpus = load_corpus(test::data_path("wujue20.txt"));
    auto a = train(corpus, small_run(6));
    auto b = train(corpus, small_run(6));
    CHECK(same_params(a.model, b.model));
    REQUIRE(a.curve.size() == 6);
    for (std::size_t i = 0; i < 6; ++i) CHECK(a.curve[i].train_loss == b.curve[i].train_loss);
    auto rc = small_run(6);
    rc.train.seed = 18;
    CHECK_FALSE(same_params(a.model, train(corpus, rc).model));
  }

  TEST_CASE("loss decreases on a small corpus") {
    auto corpus = load_corpus(test::data_path("wujue20.txt"));
    auto res = train(corpus, small_run(40));
    ChainOptions opts{&res.tfidf, TfScope::kLine, false, std::nullopt};
    const double before = evaluate_loss(Model(res.model.config(), 17), corpus.train, opts);
    CHECK(evaluate_loss(res.model, corpus.train, opts) < before);
  }

  TEST_CASE("threaded batches match the serial result") {
    auto corpus = load_corpus(test::data_path("wujue20.txt"));
    auto serial = small_run(3);
    auto threaded = small_run(3);
    threaded.train.jobs = 3;
    CHECK(same_params(train(corpus, serial).model, train(corpus, threaded).model));
  }

  TEST_CASE("batch gradient is the mean of poem gradients") {
    auto corpus = load_corpus(test::data_path("wujue20.txt"));
    auto cfg = test::tiny_config(corpus.vocab.size());
    Model m(cfg, 3);
    auto table = TfIdfTable::build(corpus.train, corpus.vocab.size());
    ChainOptions opts{&table, TfScope::kLine, false, std::nullopt};
    std::vector<const Poem*> batch{&corpus.train[0], &corpus.train[1]};
    auto bg = batch_gradient(m, batch, opts);
    auto g0 = poem_gradient(m, corpus.train[0], opts);
    auto g1 = poem_gradient(m, corpus.train[1], opts);
    CHECK(bg.loss == doctest::Approx((g0.loss + g1.loss) / 2));
    const auto slot = m.params().slot("output.W");
    for (std::size_t i = 0; i < 20; ++i)
      CHECK(bg.grads[slot][i] == doctest::Approx((g0.grads[slot][i] + g1.grads[slot][i]) / 2));
    CHECK_THROWS(batch_gradient(m, std::vector<const Poem*>{}, opts));
  }

  TEST_CASE("non-finite loss stops training with the step") {
    auto corpus = load_corpus(test::data_path("wujue20.txt"));
    auto cfg = test::tiny_config(corpus.vocab.size());
    Model m(cfg, 3);
    m.params()[m.params().slot("output.b")][0] = std::nan("");
    auto table = TfIdfTable::build(corpus.train, corpus.vocab.size());
    try {
      run_training(m, corpus.train, {}, table, small_run(2).train, std::nullopt, {});
      FAIL("expected a training error");
    } catch (const TrainingError& e) {
      CHECK(std::string(e.what()).find("step 0") != std::string::npos);
    }
  }

  TEST_CASE("validation loss is reported at the interval") {
    auto corpus = load_corpus(test::data_path("wujue20.txt"), {4, false});
    auto rc = small_run(4);
    rc.train.validation_interval = 2;
    auto res = train(corpus, rc);
    CHECK_FALSE(res.curve[0].val_loss.has_value());
    CHECK(res.curve[1].val_loss.has_value());
    std::ostringstream csv;
    write_loss_csv(csv, res.curve);
    const auto text = csv.str();
    CHECK(text.rfind("step,train_loss,val_loss\n1,", 0) == 0);
    CHECK(std::count(text.begin(), text.end(), '\n') == 5);
  }

  TEST_CASE("style balancing downsamples to the smallest label") {
    auto corpus = load_corpus(test::data_path("styled.txt"));
    std::vector<Poem> poems(corpus.train.begin(), corpus.train.begin() + 25);  // 10 / 10 / 5
    poems.push_back(corpus.train[0]);
    poems.back().style.reset();
    Rng rng(1);
    auto bal = balance_styles(poems, rng);
    CHECK(bal.size() == 15);
    std::array<int, 3> counts{};
    for (const auto& p : bal) ++counts[static_cast<std::size_t>(*p.style)];
    CHECK(counts == std::array<int, 3>{5, 5, 5});
  }

  TEST_CASE("adding the style extension keeps pretrained weights") {
    auto cfg = test::tiny_config(20, ClueMode::kSdu, {true, false});
    Model base(cfg, 9);
    auto ext = with_style_extension(base, 1);
    CHECK(ext.config().extension == ExtensionKind{true, true});
    CHECK(ext.params()[ext.params().slot("embedding")] == base.params()[base.params().slot("embedding")]);
    const auto& old_w = base.params()[base.params().slot("output.maxout.W")];
    const auto& new_w = ext.params()[ext.params().slot("output.maxout.W")];
    CHECK(new_w.cols() == old_w.cols() + cfg.style_dim);
    for (std::size_t r = 0; r < old_w.rows(); ++r)
      for (std::size_t c = 0; c < old_w.cols(); ++c) CHECK(new_w.at(r, c) == old_w.at(r, c));
  }

  TEST_CASE("style fine-tuning needs labels") {
    auto corpus = load_corpus(test::data_path("wujue20.txt"));
    auto cfg = test::tiny_config(corpus.vocab.size());
    Model base(cfg, 2);
    auto table = TfIdfTable::build(corpus.train, corpus.vocab.size());
    CHECK_THROWS_AS(finetune_style(base, table, corpus.train, small_run(1).train), TrainingError);
  }
}

TEST_SUITE("checkpoint") {
  Checkpoint make_checkpoint() {
    auto corpus = load_corpus(test::data_path("wujue20.txt"));
    auto rc = small_run(1);
    auto res = train(corpus, rc);
    rc.model.vocab_size = corpus.vocab.size();
    return Checkpoint{std::move(res.model), corpus.vocab, std::move(res.tfidf), rc.echo()};
  }

  TEST_CASE("bit-exact round trip") {
    auto ck = make_checkpoint();
    const auto bytes = serialize_checkpoint(ck);
    CHECK(bytes.compare(0, 8, std::string("SALCKPT\0", 8)) == 0);
    auto back = deserialize_checkpoint(bytes);
    CHECK(same_params(back.model, ck.model));
    CHECK(back.vocab == ck.vocab);
    CHECK(back.config == ck.config);
    CHECK(back.tfidf.df_counts() == ck.tfidf.df_counts());
    CHECK(back.tfidf.unknown_idf() == ck.tfidf.unknown_idf());
    CHECK(serialize_checkpoint(back) == bytes);
  }

  TEST_CASE("corrupt files are rejected") {
    const auto bytes = serialize_checkpoint(make_checkpoint());
    auto bad = bytes;
    bad[0] = 'X';
    CHECK_THROWS_AS(deserialize_checkpoint(bad), CheckpointError);
    CHECK_THROWS_AS(deserialize_checkpoint(bytes.substr(0, bytes.size() - 8)), CheckpointError);
    CHECK_THROWS_AS(deserialize_checkpoint(bytes.substr(0, 20)), CheckpointError);
    CHECK_THROWS_AS(load_checkpoint("/nonexistent/model.ckpt"), CheckpointError);
  }
}
