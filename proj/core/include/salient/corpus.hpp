#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "salient/vocabulary.hpp"

namespace salient {

enum class Form { kWujue, kQijue };

inline constexpr std::size_t kLinesPerPoem = 4;

/// Characters per line: 5 for Wujue, 7 for Qijue.
std::size_t line_length(Form form);
/// Maximum number of salient characters selected per line (K).
std::size_t max_salient(Form form);
std::string_view form_name(Form form);
Form parse_form(std::string_view name);
std::optional<Form> form_for_length(std::size_t length);

/// Style labels; the numeric value is the style embedding row.
enum class Style : std::size_t { kPastoral = 0, kBattlefield = 1, kRomantic = 2, kNone = 3 };
inline constexpr std::size_t kStyleCount = 4;
std::string_view style_name(Style style);
Style parse_style(std::string_view name);

struct Poem {
  Form form = Form::kWujue;
  std::array<std::vector<TokenId>, kLinesPerPoem> lines;
  std::optional<Style> style;
  std::vector<TokenId> keyword;  // empty when the corpus gives none

  std::size_t line_length() const { return lines[0].size(); }
};

/// One corpus record before vocabulary mapping.
struct RawPoem {
  std::array<std::u32string, kLinesPerPoem> lines;
  std::optional<Style> style;
  std::u32string keyword;
  std::size_t source_line = 0;  // 1-based line in the file
};

struct CorpusIssue {
  std::size_t poem_index = 0;  // 0-based among poem records
  std::optional<std::size_t> line_index;  // 0-based poem line, when applicable
  std::size_t source_line = 0;
  std::string message;
};

class CorpusError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct CorpusOptions {
  /// Trailing poems held out for validation; the vocabulary never sees them.
  std::size_t validation_count = 0;
  /// Throw on the first malformed poem instead of skipping it.
  bool strict = false;
};

struct Corpus {
  std::vector<Poem> train;
  std::vector<Poem> validation;
  Vocabulary vocab;
  std::vector<CorpusIssue> rejected;
};

/// Parses corpus text: one poem per line, lines joined by '|', optional
/// "\t<style>" and "\t<keyword>" columns, '#' comments.
std::vector<RawPoem> parse_corpus_records(std::string_view text, std::vector<CorpusIssue>& rejected, bool strict);

Corpus parse_corpus(std::string_view text, const CorpusOptions& options = {});
Corpus load_corpus(const std::filesystem::path& path, const CorpusOptions& options = {});

/// Maps a validated record onto an existing vocabulary (unknown chars -> UNK).
Poem to_poem(const RawPoem& raw, const Vocabulary& vocab);

/// Parses a single "l1|l2|l3|l4" poem and validates its form.
RawPoem parse_poem_text(std::string_view text);

std::string read_file(const std::filesystem::path& path);

}  // namespace salient
