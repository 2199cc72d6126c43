#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "salient/corpus.hpp"

namespace salient {

/// Where term frequency is counted for per-line weights.
enum class TfScope { kLine, kPoem };

/// Document frequencies with each poem as one document;
/// idf(c) = ln(documents / df(c)).
class TfIdfTable {
 public:
  TfIdfTable() = default;
  /// unknown_idf applies to ids with df = 0 (UNK, reserved, unseen);
  /// negative selects ln(documents), the idf of a df = 1 character.
  static TfIdfTable build(std::span<const Poem> poems, std::size_t vocab_size, double unknown_idf = -1.0);

  static TfIdfTable from_counts(std::size_t documents, std::vector<std::uint32_t> df, double unknown_idf);

  std::size_t document_count() const { return documents_; }
  const std::vector<std::uint32_t>& df_counts() const { return df_; }
  double unknown_idf() const { return unknown_idf_; }
  std::uint32_t df(TokenId id) const { return id < df_.size() ? df_[id] : 0; }
  double idf(TokenId id) const;

 private:
  std::size_t documents_ = 0;
  std::vector<std::uint32_t> df_;
  double unknown_idf_ = 0.0;
};

/// Min-max normalisation into [0,1]; all-equal inputs map to all ones.
std::vector<double> minmax_normalize(std::span<const double> raw);

/// Raw tf*idf per position, tf counted inside `line`.
std::vector<double> raw_tfidf(std::span<const TokenId> line, const TfIdfTable& table);

/// Normalised tf-idf weight vector of a line (tf counted within the line).
std::vector<double> tfidf_line(std::span<const TokenId> line, const TfIdfTable& table);
/// As above, but tf may be counted over the whole poem.
std::vector<double> tfidf_line(std::span<const TokenId> line, const Poem& poem, const TfIdfTable& table,
                               TfScope scope);

/// Contiguous bigram (within one line) maximising summed poem-level tf-idf;
/// earliest position wins ties. Falls back to the best single character
/// when lines are shorter than two characters.
std::vector<TokenId> extract_keyword(const Poem& poem, const TfIdfTable& table);

}  // namespace salient
