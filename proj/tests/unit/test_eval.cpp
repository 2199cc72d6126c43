#include <doctest.h>

#include <algorithm>
#include <fstream>
#include <iterator>
#include <set>
#include <sstream>

#include "salient/eval.hpp"
#include "salient/utf8.hpp"
#include "support.hpp"

using namespace salient;

namespace {

std::vector<std::string> read_lines(const std::string& name) {
  std::ifstream in(test::data_path(name));
  std::vector<std::string> lines;
  for (std::string l; std::getline(in, l);) lines.push_back(l);
  return lines;
}

std::vector<std::u32string> read_u32(const std::string& name) {
  std::vector<std::u32string> out;
  for (const auto& l : read_lines(name)) out.push_back(utf8::decode(l));
  return out;
}

std::vector<std::size_t> parse_set(const std::string& cell) {
  std::vector<std::size_t> out;
  std::stringstream ss(cell);
  for (std::string x; std::getline(ss, x, ',');)
    if (!x.empty()) out.push_back(std::stoul(x));
  return out;
}

}  // namespace

TEST_SUITE("eval") {
  TEST_CASE("BLEU matches the frozen fixture value") {
    const auto hyp = read_u32("bleu_hyp.txt");
    const auto ref = read_u32("bleu_ref.txt");
    const double expected = std::stod(read_lines("bleu_expected.txt").at(0));
    auto r = corpus_bleu(hyp, ref);
    CHECK(r.bleu == doctest::Approx(expected).epsilon(1e-6));
    CHECK(r.hypothesis_length == 14);
    CHECK(r.reference_length == 15);
    CHECK(r.matches[0] == 13);
    CHECK(r.totals[0] == 14);
    CHECK(r.brevity_penalty == doctest::Approx(std::exp(1.0 - 15.0 / 14.0)));
  }

  TEST_CASE("BLEU boundary laws") {
    std::vector<std::u32string> a{U"白日依山尽", U"黄河入海流"};
    CHECK(corpus_bleu(a, a).bleu == doctest::Approx(100.0));
    std::vector<std::u32string> b{U"千山鸟飞绝", U"万径人踪灭"};
    CHECK(corpus_bleu(a, b).bleu == 0.0);
    std::vector<std::u32string> empty{U"", U""};
    auto r = corpus_bleu(empty, a);
    CHECK(r.bleu == 0.0);
    CHECK(r.brevity_penalty == 0.0);
    std::vector<std::u32string> longer{U"白日依山尽尽", U"黄河入海流流"};
    CHECK(corpus_bleu(longer, a).brevity_penalty == 1.0);
    CHECK_THROWS_AS(corpus_bleu(a, std::vector<std::u32string>{U"x"}), std::invalid_argument);
    CHECK_THROWS_AS(corpus_bleu(std::vector<std::u32string>{}, std::vector<std::u32string>{}), std::invalid_argument);
  }

  TEST_CASE("BLEU is invariant to the order of sentence pairs") {
    const auto hyp = read_u32("bleu_hyp.txt");
    const auto ref = read_u32("bleu_ref.txt");
    std::vector<std::u32string> h2{hyp[2], hyp[0], hyp[1]}, r2{ref[2], ref[0], ref[1]};
    CHECK(corpus_bleu(h2, r2).bleu == doctest::Approx(corpus_bleu(hyp, ref).bleu).epsilon(1e-14));
  }

  TEST_CASE("saliency Jaccard matches the frozen fixture") {
    std::vector<std::vector<std::size_t>> model, gold;
    for (const auto& l : read_lines("jaccard_pairs.tsv")) {
      if (l.starts_with("#")) continue;
      const auto tab = l.find('\t');
      model.push_back(parse_set(l.substr(0, tab)));
      gold.push_back(parse_set(l.substr(tab + 1)));
    }
    REQUIRE(model.size() == 10);
    CHECK(saliency_jaccard(model, gold) == doctest::Approx(0.6).epsilon(1e-12));
  }

  TEST_CASE("Jaccard laws") {
    std::vector<std::vector<std::size_t>> a{{1, 2}}, b{{2, 3}}, e{{}};
    CHECK(saliency_jaccard(a, b) == doctest::Approx(1.0 / 3));
    CHECK(saliency_jaccard(a, a) == 1.0);
    CHECK(saliency_jaccard(e, e) == 1.0);
    CHECK(saliency_jaccard(a, e) == 0.0);
    CHECK_THROWS_AS(saliency_jaccard(a, std::vector<std::vector<std::size_t>>{}), std::invalid_argument);
    const std::u32string x = U"明月光", y = U"月光光";
    CHECK(jaccard(x, y) == doctest::Approx(2.0 / 3));
    CHECK(jaccard(x, y) == jaccard(y, x));
    CHECK(jaccard(std::u32string_view(), std::u32string_view()) == 1.0);
  }

  TEST_CASE("innovation laws") {
    std::vector<std::u32string> same{U"春眠不觉晓", U"晓觉不眠春"};
    CHECK(innovation(same) == 1.0);
    std::vector<std::u32string> disjoint{U"春眠不觉晓", U"白日依山尽"};
    CHECK(innovation(disjoint) == 0.0);
    CHECK_THROWS_AS(innovation(std::vector<std::u32string>{U"一"}), std::invalid_argument);

    Rng rng(8);
    const std::u32string alphabet = U"山水风月花鸟云天";
    std::vector<std::u32string> poems(5);
    for (auto& p : poems)
      for (int i = 0; i < 6; ++i) p.push_back(alphabet[rng.below(alphabet.size())]);
    double total = 0.0;
    int pairs = 0;
    for (std::size_t i = 0; i < poems.size(); ++i)
      for (std::size_t j = i + 1; j < poems.size(); ++j) {
        std::set<char32_t> a(poems[i].begin(), poems[i].end()), b(poems[j].begin(), poems[j].end()), u, n;
        std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::inserter(u, u.end()));
        std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::inserter(n, n.end()));
        total += static_cast<double>(n.size()) / static_cast<double>(u.size());
        ++pairs;
      }
    CHECK(innovation(poems) == doctest::Approx(total / pairs).epsilon(1e-14));
    auto shuffled = poems;
    std::swap(shuffled[0], shuffled[4]);
    CHECK(innovation(shuffled) == doctest::Approx(innovation(poems)).epsilon(1e-14));
  }

  TEST_CASE("poem overload joins all lines") {
    auto corpus = load_corpus(test::data_path("wujue20.txt"));
    std::vector<std::u32string> texts;
    for (const auto& p : corpus.train) {
      std::u32string t;
      for (const auto& l : p.lines) t += corpus.vocab.decode(l);
      texts.push_back(t);
    }
    CHECK(innovation(corpus.train) == doctest::Approx(innovation(texts)).epsilon(1e-14));
  }
}
