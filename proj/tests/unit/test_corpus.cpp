#include <doctest.h>

#include <cmath>
#include <map>

#include "salient/corpus.hpp"
#include "salient/tfidf.hpp"
#include "salient/tone.hpp"
#include "salient/utf8.hpp"
#include "salient/vocabulary.hpp"
#include "support.hpp"

using namespace salient;

TEST_SUITE("corpus") {
  TEST_CASE("utf8 round trip and malformed input") {
    const std::string text = "床前明月光 a\xC3\xA9";
    auto cps = utf8::decode(text);
    CHECK(cps.size() == 8);
    CHECK(cps[0] == U'床');
    CHECK(utf8::encode(cps) == text);
    CHECK_THROWS(utf8::decode("\xE5\xBA"));
    CHECK_THROWS(utf8::decode("\xFF"));
  }

  TEST_CASE("vocabulary ids follow frequency then code point") {
    std::unordered_map<char32_t, std::size_t> counts{{U'b', 3}, {U'a', 3}, {U'c', 5}, {U'd', 1}};
    auto v = Vocabulary::from_counts(counts);
    CHECK(v.size() == 8);
    CHECK(v.id(U'c') == 4);
    CHECK(v.id(U'a') == 5);
    CHECK(v.id(U'b') == 6);
    CHECK(v.id(U'd') == 7);
    CHECK(v.id(U'z') == Vocabulary::kUnk);
    CHECK(v.is_reserved(Vocabulary::kBos));
    CHECK(v.decode(v.encode(U"abcd")) == U"abcd");
    CHECK(Vocabulary::deserialize(v.serialize()) == v);
  }

  TEST_CASE("corpus parsing with comments, style and keyword columns") {
    const std::string text =
        "# header\n"
        "\n"
        "床前明月光|疑是地上霜|举头望明月|低头思故乡\tromantic\t明月\n"
        "春眠不觉晓|处处闻啼鸟|夜来风雨声|花落知多少\n"
        "朝辞白帝彩云间|千里江陵一日还|两岸猿声啼不住|轻舟已过万重山\tnone\n";
    auto c = parse_corpus(text);
    REQUIRE(c.train.size() == 3);
    CHECK(c.rejected.empty());
    CHECK(c.train[0].style == Style::kRomantic);
    CHECK(c.vocab.decode(c.train[0].keyword) == U"明月");
    CHECK_FALSE(c.train[1].style.has_value());
    CHECK(c.train[1].keyword.empty());
    CHECK(c.train[2].form == Form::kQijue);
    CHECK(c.train[2].style == Style::kNone);
    // 月 and 明 are the most frequent characters
    CHECK(c.vocab.id(U'明') < c.vocab.id(U'床'));
  }

  TEST_CASE("malformed poems are rejected with a position report") {
    const std::string text =
        "床前明月光|疑是地上霜|举头望明月|低头思故乡\n"
        "春眠不觉晓|处处闻啼|夜来风雨声|花落知多少\n"
        "只有三行|只有三行|只有三行\n"
        "白日依山尽|黄河入海流|欲穷千里目|更上一层楼\tcomic\n";
    auto c = parse_corpus(text);
    CHECK(c.train.size() == 1);
    REQUIRE(c.rejected.size() == 3);
    CHECK(c.rejected[0].poem_index == 1);
    REQUIRE(c.rejected[0].line_index.has_value());
    CHECK(*c.rejected[0].line_index == 1);
    CHECK(c.rejected[0].source_line == 2);
    CHECK(c.rejected[1].poem_index == 2);
    CHECK(c.rejected[2].poem_index == 3);
    CHECK_THROWS_AS(parse_corpus(text, {0, true}), CorpusError);
  }

  TEST_CASE("seven characters in a five-character poem is rejected") {
    auto c = parse_corpus("床前明月光|疑是地上霜|举头望明月|低头思故乡\n床前明月光|疑是地上霜|举头望明月光光|低头思故乡\n");
    REQUIRE(c.rejected.size() == 1);
    CHECK(*c.rejected[0].line_index == 2);
  }

  TEST_CASE("empty corpus is fatal") {
    CHECK_THROWS_AS(parse_corpus("# nothing\n\n"), CorpusError);
    CHECK_THROWS_AS(parse_corpus("abc|def\n"), CorpusError);
  }

  TEST_CASE("vocabulary comes from the training split only") {
    const std::string text =
        "床前明月光|疑是地上霜|举头望明月|低头思故乡\n"
        "春眠不觉晓|处处闻啼鸟|夜来风雨声|花落知多少\n";
    auto c = parse_corpus(text, {1, false});
    CHECK(c.train.size() == 1);
    CHECK(c.validation.size() == 1);
    CHECK_FALSE(c.vocab.find(U'眠').has_value());
    CHECK(c.validation[0].lines[0][1] == Vocabulary::kUnk);
    CHECK_THROWS_AS(parse_corpus(text, {2, false}), CorpusError);
  }

  TEST_CASE("fixture corpora load") {
    auto w = load_corpus(test::data_path("wujue20.txt"));
    CHECK(w.train.size() == 20);
    auto s = load_corpus(test::data_path("styled.txt"));
    CHECK(s.train.size() == 30);
    for (const auto& p : s.train) {
      CHECK(p.style.has_value());
      CHECK(p.keyword.size() == 2);
    }
    auto q = load_corpus(test::data_path("qijue4.txt"));
    CHECK(q.train.size() == 4);
    CHECK(q.train[0].form == Form::kQijue);
  }

  TEST_CASE("forms and styles") {
    CHECK(line_length(Form::kWujue) == 5);
    CHECK(line_length(Form::kQijue) == 7);
    CHECK(max_salient(Form::kWujue) == 2);
    CHECK(max_salient(Form::kQijue) == 3);
    CHECK(parse_form("qijue") == Form::kQijue);
    CHECK_THROWS(parse_form("sonnet"));
    CHECK(parse_style("Battlefield") == Style::kBattlefield);
    CHECK(static_cast<std::size_t>(Style::kNone) == 3);
    CHECK_FALSE(form_for_length(6).has_value());
  }
}

TEST_SUITE("tfidf") {
  // Three poems over ids 4..7; df and idf computed by hand.
  std::vector<Poem> tiny_corpus() {
    auto mk = [](std::vector<TokenId> l) {
      Poem p;
      for (auto& line : p.lines) line = l;
      return p;
    };
    return {mk({4, 4, 5, 6, 4}), mk({4, 5, 5, 5, 5}), mk({4, 7, 7, 7, 7})};
  }

  TEST_CASE("idf is ln(N/df) with poems as documents") {
    auto t = TfIdfTable::build(tiny_corpus(), 8);
    CHECK(t.document_count() == 3);
    CHECK(t.df(4) == 3);
    CHECK(t.df(5) == 2);
    CHECK(t.df(6) == 1);
    CHECK(t.idf(4) == doctest::Approx(0.0));
    CHECK(t.idf(5) == doctest::Approx(std::log(1.5)));
    CHECK(t.idf(6) == doctest::Approx(std::log(3.0)));
    CHECK(t.idf(Vocabulary::kUnk) == doctest::Approx(std::log(3.0)));
    CHECK(TfIdfTable::build(tiny_corpus(), 8, 0.25).idf(Vocabulary::kUnk) == 0.25);
    CHECK_THROWS(TfIdfTable::from_counts(2, {3}, 0.0));
  }

  TEST_CASE("line weights are min-max normalised") {
    auto t = TfIdfTable::build(tiny_corpus(), 8);
    const std::vector<TokenId> line{4, 5, 6, 5};
    auto raw = raw_tfidf(line, t);
    CHECK(raw[0] == doctest::Approx(0.0));
    CHECK(raw[1] == doctest::Approx(2 * std::log(1.5)));
    CHECK(raw[2] == doctest::Approx(std::log(3.0)));
    auto w = tfidf_line(line, t);
    const double hi = std::max(2 * std::log(1.5), std::log(3.0));
    CHECK(w[0] == 0.0);
    CHECK(w[1] == doctest::Approx(2 * std::log(1.5) / hi));
    CHECK(w[2] == doctest::Approx(std::log(3.0) / hi));
    CHECK(minmax_normalize(std::vector<double>{2.0, 2.0, 2.0}) == std::vector<double>{1.0, 1.0, 1.0});
  }

  TEST_CASE("poem scope counts tf over the poem") {
    auto corpus = tiny_corpus();
    auto t = TfIdfTable::build(corpus, 8);
    const auto& poem = corpus[0];
    auto w = tfidf_line(poem.lines[0], poem, t, TfScope::kPoem);
    // tf(5) = 4, tf(6) = 4 across the poem; idf 5 < idf 6 so 6 is the max.
    CHECK(w[3] == 1.0);
    CHECK(w[2] == doctest::Approx(std::log(1.5) / std::log(3.0)));
    CHECK(w[0] == 0.0);
  }

  TEST_CASE("keyword extraction matches a brute-force scan") {
    auto corpus = load_corpus(test::data_path("wujue20.txt"));
    auto t = TfIdfTable::build(corpus.train, corpus.vocab.size());
    for (const auto& p : corpus.train) {
      std::map<TokenId, double> tf;
      for (const auto& l : p.lines)
        for (auto id : l) tf[id] += 1.0;
      double best = -1.0;
      std::vector<TokenId> expect;
      for (const auto& l : p.lines)
        for (std::size_t j = 0; j + 1 < l.size(); ++j) {
          const double s = tf[l[j]] * t.idf(l[j]) + tf[l[j + 1]] * t.idf(l[j + 1]);
          if (s > best) {
            best = s;
            expect = {l[j], l[j + 1]};
          }
        }
      CHECK(extract_keyword(p, t) == expect);
    }
  }
}

TEST_SUITE("tone") {
  TEST_CASE("lexicon parsing, defaults and duplicates") {
    auto load = parse_tone_lexicon("# c\ttone\tgroup\n明\tP\t3\n月\tZ\t\n明\tZ\t4\n光\tP\t3\n");
    CHECK(load.duplicates == 1);
    CHECK(load.lexicon.size() == 3);
    CHECK(load.lexicon.lookup(U'明').tone == Tone::kZe);
    CHECK(load.lexicon.lookup(U'明').rhyme_group == 4);
    CHECK_FALSE(load.lexicon.lookup(U'月').rhyme_group.has_value());
    CHECK(load.lexicon.lookup(U'霜').tone == Tone::kUnknown);
    CHECK_THROWS(parse_tone_lexicon("明\tQ\t1\n"));
    CHECK_THROWS(parse_tone_lexicon("明\tP\tx\n"));
  }

  TEST_CASE("fixture lexicon covers every fixture character") {
    auto load = load_tone_lexicon(test::data_path("tones.tsv"));
    CHECK(load.duplicates == 0);
    for (const char* name : {"wujue20.txt", "styled.txt", "qijue4.txt"}) {
      auto c = load_corpus(test::data_path(name));
      auto tones = load.lexicon.by_token(c.vocab);
      for (TokenId id = Vocabulary::kFirstCharacter; id < c.vocab.size(); ++id) {
        CHECK(tones[id].tone != Tone::kUnknown);
        CHECK(tones[id].rhyme_group.has_value());
      }
    }
  }
}
