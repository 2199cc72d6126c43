#pragma once

#include <filesystem>
#include <optional>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "salient/vocabulary.hpp"

namespace salient {

enum class Tone { kPing, kZe, kUnknown };

struct ToneEntry {
  Tone tone = Tone::kUnknown;
  std::optional<int> rhyme_group;

  friend bool operator==(const ToneEntry&, const ToneEntry&) = default;
};

/// Character -> (tone, rhyme group). Characters without an entry read back
/// as (Unknown, none).
class ToneLexicon {
 public:
  void set(char32_t c, ToneEntry entry) { entries_[c] = entry; }
  ToneEntry lookup(char32_t c) const;
  std::size_t size() const { return entries_.size(); }

  /// Entry for every token id of `vocab`; reserved ids are Unknown.
  std::vector<ToneEntry> by_token(const Vocabulary& vocab) const;

 private:
  std::unordered_map<char32_t, ToneEntry> entries_;
};

struct LexiconLoad {
  ToneLexicon lexicon;
  std::size_t duplicates = 0;  // later rows overwrite earlier ones
};

/// TSV rows: character, tone (P|Z), rhyme group integer (may be empty).
LexiconLoad parse_tone_lexicon(std::string_view text);
LexiconLoad load_tone_lexicon(const std::filesystem::path& path);

}  // namespace salient
