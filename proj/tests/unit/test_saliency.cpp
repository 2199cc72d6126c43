#include <doctest.h>

#include <numeric>

#include "oracles/select_reference.hpp"
#include "salient/saliency.hpp"
#include "salient/rng.hpp"

using namespace salient;

namespace {

std::vector<double> random_scores(Rng& rng, std::size_t t) {
  std::vector<double> r(t);
  const bool coarse = rng.below(3) == 0;  // coarse grids produce ties
  for (auto& x : r) x = coarse ? static_cast<double>(rng.below(4)) / 4.0 : rng.unit();
  return r;
}

Tensor random_stochastic(Rng& rng, std::size_t rows, std::size_t cols) {
  Tensor a({rows, cols});
  for (std::size_t i = 0; i < rows; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < cols; ++j) s += (a.at(i, j) = rng.unit() + 1e-3);
    for (std::size_t j = 0; j < cols; ++j) a.at(i, j) /= s;
  }
  return a;
}

}  // namespace

TEST_SUITE("saliency") {
  TEST_CASE("hand traces") {
    // avg 0.2, population std 0.16769, first threshold 0.28385
    const std::vector<double> fig{0.53, 0.17, 0.12, 0.10, 0.08};
    auto s = select_salient(fig, 2);
    CHECK(s.indices == std::vector<std::size_t>{0});
    CHECK(s.scores == std::vector<double>{0.53});

    const std::vector<double> uniform(5, 0.2);
    CHECK(select_salient(uniform, 2).count() == 2);
    CHECK(select_salient(std::vector<double>(7, 1.0 / 7), 3).count() == 3);

    CHECK(select_salient(std::vector<double>{1, 1, 1, 1, 1, 0}, 2).count() == 0);
  }

  TEST_CASE("ties resolve to the lower index") {
    auto s = select_salient(std::vector<double>{0.1, 0.4, 0.1, 0.4, 0.0}, 2);
    CHECK(s.indices == std::vector<std::size_t>{1, 3});
  }

  TEST_CASE("K larger than T is capped") {
    auto s = select_salient(std::vector<double>{0.5, 0.5}, 3);
    CHECK(s.count() == 2);
    CHECK(select_salient(std::vector<double>{}, 2).count() == 0);
  }

  TEST_CASE("matches the reference loop on random vectors") {
    Rng rng(2024);
    for (int trial = 0; trial < 2000; ++trial) {
      const std::size_t t = rng.below(2) ? 5 : 7;
      const std::size_t k = rng.below(2) ? 2 : 3;
      auto r = random_scores(rng, t);
      REQUIRE(select_salient(r, k).indices == oracle::select_reference(r, k));
    }
  }

  TEST_CASE("selection properties") {
    Rng rng(7);
    for (int trial = 0; trial < 500; ++trial) {
      const std::size_t t = 1 + rng.below(9);
      const std::size_t k = 1 + rng.below(4);
      auto r = random_scores(rng, t);
      auto s = select_salient(r, k);
      CHECK(s.count() <= std::min(k, t));
      for (std::size_t i = 0; i < s.count(); ++i) {
        CHECK(s.indices[i] < t);
        CHECK(s.scores[i] == r[s.indices[i]]);
        if (i) CHECK(s.scores[i] <= s.scores[i - 1]);
      }
      // exact under power-of-two scaling
      auto scaled = r;
      for (auto& x : scaled) x *= 8.0;
      CHECK(select_salient(scaled, k).indices == s.indices);
      // monotone in K: a larger budget only extends the selection
      auto more = select_salient(r, k + 1);
      CHECK(std::equal(s.indices.begin(), s.indices.end(), more.indices.begin()));
    }
  }

  TEST_CASE("naive scores are normalised column sums") {
    Rng rng(3);
    for (int trial = 0; trial < 100; ++trial) {
      auto a = random_stochastic(rng, 5, 5 + rng.below(3));
      auto r = saliency_naive(a).r;
      CHECK(std::accumulate(r.begin(), r.end(), 0.0) == doctest::Approx(1.0).epsilon(1e-12));
      for (std::size_t j = 0; j < a.cols(); ++j) {
        double col = 0.0;
        for (std::size_t i = 0; i < a.rows(); ++i) col += a.at(i, j);
        CHECK(r[j] == doctest::Approx(col / static_cast<double>(a.rows())).epsilon(1e-12));
      }
    }
  }

  TEST_CASE("tf-idf scores") {
    auto a = Tensor::matrix(2, 3, {0.5, 0.25, 0.25, 0.0, 0.5, 0.5});
    const std::vector<double> ones3(3, 1.0), ones2(2, 1.0);
    auto plain = saliency_tfidf(a, ones3, ones2).r;
    CHECK(plain == std::vector<double>{0.5, 0.75, 0.75});
    const std::vector<double> w_in{1.0, 0.0, 0.5}, w_out{0.0, 1.0};
    auto r = saliency_tfidf(a, w_in, w_out).r;
    CHECK(r == std::vector<double>{0.0, 0.0, 0.25});
    CHECK_THROWS_AS(saliency_tfidf(a, ones2, ones2), ShapeError);
    CHECK_THROWS_AS(saliency_tfidf(a, ones3, ones3), ShapeError);
  }

  TEST_CASE("mode names") {
    CHECK(parse_saliency_mode("naive") == SaliencyMode::kNaive);
    CHECK(parse_saliency_mode(saliency_mode_name(SaliencyMode::kTfIdf)) == SaliencyMode::kTfIdf);
    CHECK_THROWS(parse_saliency_mode("max"));
  }
}
