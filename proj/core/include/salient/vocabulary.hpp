#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace salient {

using TokenId = std::uint32_t;

/// Character <-> id bijection shared by encoder and decoder. Ids 0..3 are
/// reserved; corpus characters start at kFirstCharacter.
class Vocabulary {
 public:
  static constexpr TokenId kPad = 0;
  static constexpr TokenId kBos = 1;
  static constexpr TokenId kEos = 2;
  static constexpr TokenId kUnk = 3;
  static constexpr TokenId kFirstCharacter = 4;

  Vocabulary() = default;
  /// Characters in id order; duplicates are rejected.
  explicit Vocabulary(std::vector<char32_t> characters);

  /// Ids assigned by descending frequency, then ascending codepoint.
  static Vocabulary from_counts(const std::unordered_map<char32_t, std::size_t>& counts);

  std::size_t size() const { return characters_.size() + kFirstCharacter; }
  std::optional<TokenId> find(char32_t c) const;
  TokenId id(char32_t c) const;  // kUnk when absent
  bool is_reserved(TokenId id) const { return id < kFirstCharacter; }
  /// Display text of a token; reserved ids render as <pad>, <bos>, ...
  std::string text(TokenId id) const;
  char32_t character(TokenId id) const;

  std::vector<TokenId> encode(std::u32string_view text) const;
  std::u32string decode(std::span<const TokenId> ids) const;
  std::string decode_utf8(std::span<const TokenId> ids) const;

  const std::vector<char32_t>& characters() const { return characters_; }

  /// UTF-8 string of all characters in id order; reloading reproduces ids.
  std::string serialize() const;
  static Vocabulary deserialize(std::string_view text);

  friend bool operator==(const Vocabulary& a, const Vocabulary& b) { return a.characters_ == b.characters_; }

 private:
  std::vector<char32_t> characters_;
  std::unordered_map<char32_t, TokenId> index_;
};

}  // namespace salient
