#pragma once

#include <array>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "salient/corpus.hpp"
#include "salient/model.hpp"
#include "salient/saliency.hpp"
#include "salient/tfidf.hpp"
#include "salient/tone.hpp"

namespace salient {

enum class TemplateTone { kPing, kZe, kAny };

/// Tone pattern of one quatrain: a sequence over {P, Z, Any} per line.
struct ToneTemplate {
  std::string name;
  std::array<std::vector<TemplateTone>, kLinesPerPoem> lines;
};

/// Parses four strings over 'P', 'Z', '*' (any).
ToneTemplate make_template(std::string name, const std::array<std::string_view, kLinesPerPoem>& lines);

class PatternTable {
 public:
  /// The four regulated patterns of each form, with the freely toned
  /// positions (1st/3rd for Wujue, 1st/3rd/5th for Qijue) as Any.
  static PatternTable standard();

  void add(Form form, ToneTemplate tpl);
  std::span<const ToneTemplate> templates(Form form) const;

 private:
  std::vector<ToneTemplate> wujue_;
  std::vector<ToneTemplate> qijue_;
};

/// Unknown tones act as wildcards.
bool tone_allows(TemplateTone required, Tone actual);
/// True when every known tone of `line` fits `pattern` position by position.
bool line_matches(std::span<const TokenId> line, std::span<const TemplateTone> pattern, std::span<const ToneEntry> tones);

struct FormReport {
  bool length_ok = false;
  bool tone_ok = false;
  bool rhyme_ok = false;
  std::optional<std::size_t> template_index;  // first template matching all lines
  bool first_line_rhymes = false;             // noted, not required

  bool ok() const { return length_ok && tone_ok && rhyme_ok; }
};

/// Length, joint tone-template and line 2/4 rhyme check. Unknown rhyme
/// groups are wildcards, so only known mismatches fail.
FormReport check_form(const std::array<std::vector<TokenId>, kLinesPerPoem>& lines, Form form,
                      std::span<const ToneEntry> tones, const PatternTable& patterns);
inline FormReport check_form(const Poem& poem, std::span<const ToneEntry> tones, const PatternTable& patterns) {
  return check_form(poem.lines, poem.form, tones, patterns);
}

struct Hypothesis {
  std::vector<TokenId> chars;
  double log_prob = 0.0;
  DecoderState state;                // decoder state after emitting `chars`
  std::vector<ad::Var> attention;    // one alignment row per emitted char
};

/// Constraint on a line under construction.
struct LineConstraint {
  std::vector<std::vector<TemplateTone>> candidates;  // acceptable tone lines
  std::optional<int> rhyme_group;                     // enforced at the final position
};

/// Removes hypotheses whose characters up to `position` fit no candidate tone
/// line, or whose final character breaks the required rhyme group. Survivors
/// keep their relative order; an empty result is returned as is.
std::vector<Hypothesis> prune_beam(std::vector<Hypothesis> hypotheses, std::size_t position,
                                   const LineConstraint& constraint, std::span<const ToneEntry> tones);

/// Orders by log probability descending, then by character ids ascending.
void sort_beam(std::vector<Hypothesis>& beam);

/// Beam search for one line of exactly `length` characters. Reserved ids are
/// never emitted. Returns the final beam, best first (empty if pruned away).
std::vector<Hypothesis> beam_search_line(Graph& graph, const EncodedSource& source, const SalientClueState& clue,
                                         const ExtensionVector& ext, std::size_t length, std::size_t beam_width,
                                         const LineConstraint* constraint, std::span<const ToneEntry> tones);

class BeamExhausted : public std::runtime_error {
 public:
  BeamExhausted(std::size_t line, std::string tpl)
      : std::runtime_error("beam exhausted under constraints on line " + std::to_string(line + 1) + " (template " +
                           tpl + "); retry with a larger beam or constraints off"),
        line_(line),
        template_(std::move(tpl)) {}
  std::size_t line() const { return line_; }
  const std::string& template_name() const { return template_; }

 private:
  std::size_t line_;
  std::string template_;
};

struct GenerateOptions {
  Form form = Form::kWujue;
  std::size_t beam = 20;
  bool constraints = true;
  std::optional<Style> style;  // style extension input; defaults to None
  std::uint64_t seed = 0;
  TfScope tf_scope = TfScope::kLine;
};

/// Saliency of the source line observed while generating `line`.
struct LineSaliency {
  std::size_t line = 0;         // 0-based generated line
  std::size_t source_line = 0;  // 0-based line the scores index into
  std::vector<double> scores;
  Selection selection;
};

struct GeneratedPoem {
  Poem poem;
  std::vector<TokenId> keyword;
  std::vector<LineSaliency> saliency;
  std::vector<double> line_log_probs;
  double log_prob = 0.0;
  std::optional<FormReport> form_check;
  std::string template_name;
};

struct GenerationContext {
  const Model& model;
  const Vocabulary& vocab;
  const TfIdfTable& tfidf;
  const ToneLexicon* lexicon = nullptr;  // required when constraints are on
  const PatternTable* patterns = nullptr;
};

GeneratedPoem generate_poem(const GenerationContext& context, std::span<const TokenId> keyword,
                            const GenerateOptions& options);

}  // namespace salient
