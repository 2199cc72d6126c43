#include "salient/vocabulary.hpp"

#include <algorithm>
#include <stdexcept>

#include "salient/utf8.hpp"

namespace salient {

Vocabulary::Vocabulary(std::vector<char32_t> characters) : characters_(std::move(characters)) {
  for (std::size_t i = 0; i < characters_.size(); ++i) {
    auto [it, inserted] = index_.emplace(characters_[i], static_cast<TokenId>(i + kFirstCharacter));
    if (!inserted) throw std::invalid_argument("duplicate vocabulary character " + utf8::encode(characters_[i]));
  }
}

Vocabulary Vocabulary::from_counts(const std::unordered_map<char32_t, std::size_t>& counts) {
  std::vector<std::pair<char32_t, std::size_t>> items(counts.begin(), counts.end());
  std::sort(items.begin(), items.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  std::vector<char32_t> chars;
  chars.reserve(items.size());
  for (const auto& [c, n] : items) chars.push_back(c);
  return Vocabulary(std::move(chars));
}

std::optional<TokenId> Vocabulary::find(char32_t c) const {
  auto it = index_.find(c);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

TokenId Vocabulary::id(char32_t c) const { return find(c).value_or(kUnk); }

char32_t Vocabulary::character(TokenId id) const {
  if (id < kFirstCharacter || id >= size()) throw std::out_of_range("token id has no character: " + std::to_string(id));
  return characters_[id - kFirstCharacter];
}

std::string Vocabulary::text(TokenId id) const {
  switch (id) {
    case kPad: return "<pad>";
    case kBos: return "<bos>";
    case kEos: return "<eos>";
    case kUnk: return "<unk>";
    default: return utf8::encode(character(id));
  }
}

std::vector<TokenId> Vocabulary::encode(std::u32string_view text) const {
  std::vector<TokenId> out;
  out.reserve(text.size());
  for (char32_t c : text) out.push_back(id(c));
  return out;
}

std::u32string Vocabulary::decode(std::span<const TokenId> ids) const {
  std::u32string out;
  for (auto id : ids) out.push_back(is_reserved(id) ? U'�' : character(id));
  return out;
}

std::string Vocabulary::decode_utf8(std::span<const TokenId> ids) const { return utf8::encode(decode(ids)); }

std::string Vocabulary::serialize() const { return utf8::encode(std::u32string(characters_.begin(), characters_.end())); }

Vocabulary Vocabulary::deserialize(std::string_view text) {
  auto chars = utf8::decode(text);
  return Vocabulary(std::vector<char32_t>(chars.begin(), chars.end()));
}

}  // namespace salient
