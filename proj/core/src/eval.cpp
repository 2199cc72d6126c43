#include "salient/eval.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <stdexcept>

namespace salient {

namespace {

using NgramCounts = std::map<std::u32string, std::size_t>;

NgramCounts ngrams(const std::u32string& s, std::size_t n) {
  NgramCounts out;
  for (std::size_t i = 0; i + n <= s.size(); ++i) ++out[s.substr(i, n)];
  return out;
}

template <typename T>
double set_jaccard(const std::set<T>& a, const std::set<T>& b) {
  if (a.empty() && b.empty()) return 1.0;
  std::size_t inter = 0;
  for (const auto& x : a) inter += b.count(x);
  return static_cast<double>(inter) / static_cast<double>(a.size() + b.size() - inter);
}

}  // namespace

BleuReport corpus_bleu(std::span<const std::u32string> hypotheses, std::span<const std::u32string> references) {
  if (hypotheses.empty()) throw std::invalid_argument("corpus_bleu: no hypotheses");
  if (hypotheses.size() != references.size())
    throw std::invalid_argument("corpus_bleu: " + std::to_string(hypotheses.size()) + " hypotheses but " +
                                std::to_string(references.size()) + " references");
  BleuReport rep;
  for (std::size_t i = 0; i < hypotheses.size(); ++i) {
    const auto& hyp = hypotheses[i];
    const auto& ref = references[i];
    rep.hypothesis_length += hyp.size();
    rep.reference_length += ref.size();
    for (std::size_t n = 1; n <= kBleuOrder; ++n) {
      const auto h = ngrams(hyp, n);
      const auto r = ngrams(ref, n);
      for (const auto& [gram, count] : h) {
        auto it = r.find(gram);
        if (it != r.end()) rep.matches[n - 1] += std::min(count, it->second);
        rep.totals[n - 1] += count;
      }
    }
  }
  bool zero = false;
  double log_sum = 0.0;
  for (std::size_t n = 0; n < kBleuOrder; ++n) {
    rep.precisions[n] = rep.totals[n] ? static_cast<double>(rep.matches[n]) / static_cast<double>(rep.totals[n]) : 0.0;
    if (rep.precisions[n] == 0.0)
      zero = true;
    else
      log_sum += std::log(rep.precisions[n]);
  }
  if (rep.hypothesis_length == 0) {
    rep.brevity_penalty = 0.0;
  } else if (rep.hypothesis_length < rep.reference_length) {
    rep.brevity_penalty = std::exp(1.0 - static_cast<double>(rep.reference_length) /
                                             static_cast<double>(rep.hypothesis_length));
  }
  rep.bleu = zero ? 0.0 : 100.0 * rep.brevity_penalty * std::exp(log_sum / static_cast<double>(kBleuOrder));
  return rep;
}

double saliency_jaccard(std::span<const std::vector<std::size_t>> model,
                        std::span<const std::vector<std::size_t>> gold) {
  if (model.size() != gold.size())
    throw std::invalid_argument("saliency_jaccard: " + std::to_string(model.size()) + " model lines but " +
                                std::to_string(gold.size()) + " gold lines");
  if (model.empty()) throw std::invalid_argument("saliency_jaccard: no lines");
  double total = 0.0;
  for (std::size_t i = 0; i < model.size(); ++i) {
    const std::set<std::size_t> a(model[i].begin(), model[i].end());
    const std::set<std::size_t> b(gold[i].begin(), gold[i].end());
    total += set_jaccard(a, b);
  }
  return total / static_cast<double>(model.size());
}

double jaccard(std::span<const char32_t> a, std::span<const char32_t> b) {
  return set_jaccard(std::set<char32_t>(a.begin(), a.end()), std::set<char32_t>(b.begin(), b.end()));
}

double innovation(std::span<const std::u32string> poems) {
  if (poems.size() < 2) throw std::invalid_argument("innovation: needs at least 2 poems");
  std::vector<std::set<char32_t>> sets;
  for (const auto& p : poems) sets.emplace_back(p.begin(), p.end());
  double total = 0.0;
  std::size_t pairs = 0;
  for (std::size_t i = 0; i < sets.size(); ++i)
    for (std::size_t j = i + 1; j < sets.size(); ++j, ++pairs) total += set_jaccard(sets[i], sets[j]);
  return total / static_cast<double>(pairs);
}

double innovation(std::span<const Poem> poems) {
  std::vector<std::u32string> flat;
  for (const auto& p : poems) {
    std::u32string s;
    for (const auto& line : p.lines)
      for (auto id : line) s.push_back(static_cast<char32_t>(id));
    flat.push_back(std::move(s));
  }
  return innovation(flat);
}

}  // namespace salient
