#include "salient/tone.hpp"

#include <charconv>
#include <stdexcept>
#include <string>

#include "salient/corpus.hpp"
#include "salient/utf8.hpp"

namespace salient {

ToneEntry ToneLexicon::lookup(char32_t c) const {
  auto it = entries_.find(c);
  return it == entries_.end() ? ToneEntry{} : it->second;
}

std::vector<ToneEntry> ToneLexicon::by_token(const Vocabulary& vocab) const {
  std::vector<ToneEntry> out(vocab.size());
  for (TokenId id = Vocabulary::kFirstCharacter; id < vocab.size(); ++id) out[id] = lookup(vocab.character(id));
  return out;
}

LexiconLoad parse_tone_lexicon(std::string_view text) {
  LexiconLoad result;
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    auto end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    start = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty() || line.front() == '#') continue;

    auto t1 = line.find('\t');
    if (t1 == std::string_view::npos) throw std::invalid_argument("lexicon line " + std::to_string(line_no) + ": missing tone column");
    auto t2 = line.find('\t', t1 + 1);
    auto chars = utf8::decode(line.substr(0, t1));
    if (chars.size() != 1)
      throw std::invalid_argument("lexicon line " + std::to_string(line_no) + ": expected one character");
    auto tone_col = line.substr(t1 + 1, t2 == std::string_view::npos ? std::string_view::npos : t2 - t1 - 1);
    ToneEntry e;
    if (tone_col == "P" || tone_col == "p") e.tone = Tone::kPing;
    else if (tone_col == "Z" || tone_col == "z") e.tone = Tone::kZe;
    else if (tone_col.empty()) e.tone = Tone::kUnknown;
    else throw std::invalid_argument("lexicon line " + std::to_string(line_no) + ": tone must be P or Z");
    if (t2 != std::string_view::npos) {
      auto group = line.substr(t2 + 1);
      if (!group.empty()) {
        int g = 0;
        auto [p, ec] = std::from_chars(group.data(), group.data() + group.size(), g);
        if (ec != std::errc() || p != group.data() + group.size())
          throw std::invalid_argument("lexicon line " + std::to_string(line_no) + ": bad rhyme group");
        e.rhyme_group = g;
      }
    }
    const std::size_t before = result.lexicon.size();
    result.lexicon.set(chars[0], e);
    if (result.lexicon.size() == before) ++result.duplicates;
    if (end == text.size()) break;
  }
  return result;
}

LexiconLoad load_tone_lexicon(const std::filesystem::path& path) { return parse_tone_lexicon(read_file(path)); }

}  // namespace salient
