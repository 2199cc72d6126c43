#include "salient/tfidf.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

namespace salient {

TfIdfTable TfIdfTable::build(std::span<const Poem> poems, std::size_t vocab_size, double unknown_idf) {
  if (poems.empty()) throw std::invalid_argument("tf-idf table needs at least one document");
  TfIdfTable t;
  t.documents_ = poems.size();
  t.df_.assign(vocab_size, 0);
  for (const auto& p : poems) {
    std::unordered_set<TokenId> seen;
    for (const auto& line : p.lines)
      for (auto id : line) seen.insert(id);
    for (auto id : seen)
      if (id < vocab_size && id >= Vocabulary::kFirstCharacter) ++t.df_[id];
  }
  t.unknown_idf_ = unknown_idf < 0.0 ? std::log(static_cast<double>(t.documents_)) : unknown_idf;
  return t;
}

TfIdfTable TfIdfTable::from_counts(std::size_t documents, std::vector<std::uint32_t> df, double unknown_idf) {
  if (documents == 0) throw std::invalid_argument("tf-idf table needs at least one document");
  for (auto d : df)
    if (d > documents) throw std::invalid_argument("tf-idf table: df exceeds document count");
  TfIdfTable t;
  t.documents_ = documents;
  t.df_ = std::move(df);
  t.unknown_idf_ = unknown_idf;
  return t;
}

double TfIdfTable::idf(TokenId id) const {
  const auto d = df(id);
  if (d == 0) return unknown_idf_;
  return std::log(static_cast<double>(documents_) / static_cast<double>(d));
}

std::vector<double> minmax_normalize(std::span<const double> raw) {
  if (raw.empty()) return {};
  auto [lo, hi] = std::minmax_element(raw.begin(), raw.end());
  const double mn = *lo, mx = *hi;
  std::vector<double> out(raw.size(), 1.0);
  if (mx == mn) return out;
  for (std::size_t i = 0; i < raw.size(); ++i) out[i] = (raw[i] - mn) / (mx - mn);
  return out;
}

namespace {

std::vector<double> weights(std::span<const TokenId> line, const std::unordered_map<TokenId, std::size_t>& tf,
                            const TfIdfTable& table) {
  std::vector<double> raw;
  raw.reserve(line.size());
  for (auto id : line) raw.push_back(static_cast<double>(tf.at(id)) * table.idf(id));
  return raw;
}

std::unordered_map<TokenId, std::size_t> poem_tf(const Poem& poem) {
  std::unordered_map<TokenId, std::size_t> tf;
  for (const auto& l : poem.lines)
    for (auto id : l) ++tf[id];
  return tf;
}

}  // namespace

std::vector<double> raw_tfidf(std::span<const TokenId> line, const TfIdfTable& table) {
  std::unordered_map<TokenId, std::size_t> tf;
  for (auto id : line) ++tf[id];
  return weights(line, tf, table);
}

std::vector<double> tfidf_line(std::span<const TokenId> line, const TfIdfTable& table) {
  if (line.empty()) throw std::invalid_argument("tfidf_line: empty line");
  return minmax_normalize(raw_tfidf(line, table));
}

std::vector<double> tfidf_line(std::span<const TokenId> line, const Poem& poem, const TfIdfTable& table,
                               TfScope scope) {
  if (scope == TfScope::kLine) return tfidf_line(line, table);
  if (line.empty()) throw std::invalid_argument("tfidf_line: empty line");
  auto tf = poem_tf(poem);
  // a generated line that is not (yet) part of the poem still counts itself once
  for (auto id : line)
    if (tf[id] == 0) tf[id] = 1;
  return minmax_normalize(weights(line, tf, table));
}

std::vector<TokenId> extract_keyword(const Poem& poem, const TfIdfTable& table) {
  const auto tf = poem_tf(poem);
  auto score = [&](TokenId id) { return static_cast<double>(tf.at(id)) * table.idf(id); };

  std::vector<TokenId> best;
  double best_score = -1.0;
  for (const auto& line : poem.lines) {
    if (line.size() < 2) continue;
    for (std::size_t j = 0; j + 1 < line.size(); ++j) {
      const double s = score(line[j]) + score(line[j + 1]);
      if (s > best_score) {
        best_score = s;
        best = {line[j], line[j + 1]};
      }
    }
  }
  if (!best.empty()) return best;
  for (const auto& line : poem.lines)
    for (auto id : line)
      if (score(id) > best_score) {
        best_score = score(id);
        best = {id};
      }
  return best;
}

}  // namespace salient
